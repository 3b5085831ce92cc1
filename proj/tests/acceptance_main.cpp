// Acceptance gate: the end-to-end behaviors the library must deliver, each
// reported as a single PASS/FAIL line.  Exit status is the number of failed
// criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "rdstab/certificates.hpp"
#include "rdstab/leslie.hpp"
#include "rdstab/lp.hpp"
#include "rdstab/rds.hpp"
#include "rdstab/spectral.hpp"
#include "support.hpp"

using namespace rdstab;
using namespace testsupport;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

void expect(Outcome& o, bool cond, const std::string& what) {
    if (!cond) {
        o.ok = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += what;
    }
}

double rho_qr(const Matrix& m) {
    double best = 0.0;
    for (const auto& lam : eigenvalues(m)) best = std::max(best, std::abs(lam));
    return best;
}

// ---------------------------------------------------------------------------
// 1. The worked 2x2 pair: only the continuous-form diagonal certificate
//    exists, with the closed-form top eigenvalue at E = I.
Outcome criterion_worked_pair_certificates() {
    Outcome o;
    NonnegMatrix a = pair1_a();
    NonnegMatrix b = pair1_b();

    expect(o, !find_clclf(a, b).has_value(), "clclf unexpectedly feasible");
    expect(o, find_cdlf(a, b, DiagonalFlavor::stein).status == CdlfSearchStatus::infeasible,
           "discrete-form search should prove infeasibility");

    auto lyap = find_cdlf(a, b, DiagonalFlavor::lyapunov);
    expect(o, lyap.status == CdlfSearchStatus::found, "continuous-form search failed");
    if (lyap.status == CdlfSearchStatus::found) {
        expect(o, verify_diagonal_cert(a, b, *lyap.cert), "certificate failed verification");
        expect(o, std::abs(lyap.cert->e[0] - 1.0) < 1e-9 && std::abs(lyap.cert->e[1] - 1.0) < 1e-9,
               "expected the uniform diagonal");
    }

    const double expected = -1.9 + std::sqrt(1.01);
    const double lam_a = symmetric_eigen_max(lyapunov_form(a, {1.0, 1.0})).first;
    const double lam_b = symmetric_eigen_max(lyapunov_form(b, {1.0, 1.0})).first;
    expect(o, std::abs(lam_a - expected) <= 1e-9, "first form eigenvalue off closed form");
    expect(o, std::abs(lam_b - expected) <= 1e-9, "second form eigenvalue off closed form");

    // E = I also verifies as a handed-in certificate.
    DiagonalCert identity{DiagonalFlavor::lyapunov, {1.0, 1.0}, -expected};
    expect(o, verify_diagonal_cert(a, b, identity), "E = I failed verification");

    SystemPair pair(a, b, CouplingKind::diagonal);
    RdsVerdict v = decide_rds(pair);
    expect(o, v.status == RdsStatus::certified && v.reason == RdsReason::cdlf_lyapunov,
           "verdict should be certified via the continuous-form diagonal certificate");
    expect(o, verify_verdict(pair, v), "verdict failed independent verification");
    return o;
}

// ---------------------------------------------------------------------------
// 2. The mirrored-cycle pair: no strict common linear certificate, but the
//    joint one at v = (1,1) with margin 1/4, upgraded by irreducibility.
Outcome criterion_mirrored_cycle_pair() {
    Outcome o;
    NonnegMatrix a = pair2_a();
    NonnegMatrix b = pair2_b();

    expect(o, !find_clclf(a, b).has_value(), "clclf unexpectedly feasible");
    auto jl = find_jlclf(a, b);
    expect(o, jl.has_value(), "joint linear certificate not found");
    if (jl) {
        expect(o, verify_copositive_cert(a, b, *jl), "certificate failed verification");
        expect(o, std::abs(jl->v[0] - 1.0) <= 1e-9 && std::abs(jl->v[1] - 1.0) <= 1e-9,
               "witness should normalize to (1,1)");
        expect(o, std::abs(jl->margin - 0.25) <= 1e-9, "margin should be 1/4");
    }
    expect(o, is_irreducible(a) && is_irreducible(b), "both matrices should be irreducible");

    SystemPair pair(a, b, CouplingKind::diagonal);
    RdsVerdict v = decide_rds(pair);
    expect(o, v.status == RdsStatus::certified && v.reason == RdsReason::jlclf_irreducible,
           "verdict should be certified via the joint copositive route");
    expect(o, verify_verdict(pair, v), "verdict failed independent verification");
    return o;
}

// ---------------------------------------------------------------------------
// 3. The 3x3 pair with a destabilizing coupling: the quoted coupling pushes
//    rho to about 1.02 and the search refutes within budget.
Outcome criterion_leslie_counterexample() {
    Outcome o;
    SystemPair pair(leslie3_a(), leslie3_b(), CouplingKind::leslie);

    const double rho = rho_coupled(pair, leslie3_d());
    expect(o, std::abs(rho - 1.02) <= 0.005,
           "rho at the quoted coupling is " + std::to_string(rho) + ", expected 1.02 +- 0.005");

    RdsOptions opt;
    opt.budget = 10000;
    RdsVerdict v = decide_rds(pair, opt);
    expect(o, v.status == RdsStatus::refuted, "verdict should be refuted");
    expect(o, verify_verdict(pair, v), "refutation failed independent verification");

    auto hit = find_destabilizer(pair, 10000, 0);
    expect(o, hit.has_value(), "destabilizer search came up empty");
    if (hit) {
        expect(o, hit->second > 1.0, "destabilizer rho not above 1");
        expect(o, is_admissible_coupling(pair, hit->first), "destabilizer not admissible");
    }
    return o;
}

// ---------------------------------------------------------------------------
// 4. Single-row couplings can never destabilize a Schur Leslie pair:
//    300 random pairs x 200 sampled couplings, zero violations.
Outcome criterion_single_row_never_destabilizes() {
    Outcome o;
    Rng rng(8801);
    int violations = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng.below(4); // 2..5
        const double ta = 0.30 + 0.65 * rng.uniform();
        const double tb = 0.30 + 0.65 * rng.uniform();
        NonnegMatrix a = random_leslie_with_rho(n, rng, ta);
        NonnegMatrix b = random_leslie_with_rho(n, rng, tb);
        for (int s = 0; s < 200; ++s) {
            NonnegMatrix d = random_coupling(a, b, CouplingKind::leslie_single_row, rng);
            const double rho = rho_qr(CoupledMatrix(a, b, d).matrix().mat());
            if (rho >= 1.0) ++violations;
        }
    }
    expect(o, violations == 0,
           std::to_string(violations) + " sampled single-row couplings reached rho >= 1");
    return o;
}

// ---------------------------------------------------------------------------
// 5. A common right vector exists exactly when every row selection is Schur:
//    300 random pairs, boundary-straddling, with a 1e-6 exclusion band.
Outcome criterion_selection_equivalence() {
    Outcome o;
    Rng rng(8802);
    int checked = 0, disagreements = 0, guard = 0;
    while (checked < 300 && ++guard < 5000) {
        const std::size_t n = 2 + rng.below(3); // 2..4
        NonnegMatrix a = random_with_rho(n, rng, 0.55 + 0.60 * rng.uniform());
        NonnegMatrix b = random_with_rho(n, rng, 0.55 + 0.60 * rng.uniform());
        bool all_schur = true, near_critical = false;
        for (const auto& sel : row_selections(a, b)) {
            const double rho = rho_qr(sel.matrix.mat());
            if (std::abs(rho - 1.0) < 1e-6) near_critical = true;
            if (rho >= 1.0) all_schur = false;
        }
        if (near_critical) continue;
        ++checked;
        if (common_right_vector(a, b).has_value() != all_schur) ++disagreements;
    }
    expect(o, checked == 300, "generator failed to produce 300 usable pairs");
    expect(o, disagreements == 0, std::to_string(disagreements) + " equivalence failures");
    return o;
}

// ---------------------------------------------------------------------------
// 6. Whenever the discrete-form common diagonal certificate exists, the same
//    diagonal passes the continuous form, and sampled diagonal couplings of
//    certified pairs never reach rho = 1.
Outcome criterion_discrete_implies_continuous_and_stability() {
    Outcome o;
    Rng rng(8803);
    int found = 0, implication_failures = 0, stability_violations = 0, guard = 0;
    while (found < 100 && ++guard < 3000) {
        const std::size_t n = 2 + rng.below(3); // 2..4
        NonnegMatrix a = random_with_rho(n, rng, 0.25 + 0.35 * rng.uniform());
        NonnegMatrix b = random_with_rho(n, rng, 0.25 + 0.35 * rng.uniform());
        auto stein = find_cdlf(a, b, DiagonalFlavor::stein);
        if (stein.status != CdlfSearchStatus::found) continue;
        ++found;

        DiagonalCert lyap;
        lyap.flavor = DiagonalFlavor::lyapunov;
        lyap.e = stein.cert->e;
        lyap.margin = -std::max(symmetric_eigen_max(lyapunov_form(a, lyap.e)).first,
                                symmetric_eigen_max(lyapunov_form(b, lyap.e)).first);
        if (!(lyap.margin > 0.0) || !verify_diagonal_cert(a, b, lyap)) ++implication_failures;

        // 10,000 admissible diagonal couplings: a small grid plus random fill.
        auto samples = enumerate_coupling_class(a, b, CouplingKind::diagonal, 3,
                                                rng.below(1u << 30), 0);
        const std::size_t want = 10000;
        Rng drng(found * 7919u);
        while (samples.size() < want)
            samples.push_back(random_coupling(a, b, CouplingKind::diagonal, drng));
        for (const auto& d : samples) {
            const double rho = rho_qr(CoupledMatrix(a, b, d).matrix().mat());
            if (!(rho < 1.0 + 1e-9)) ++stability_violations;
        }
    }
    expect(o, found == 100, "only found " + std::to_string(found) + " discrete-form pairs");
    expect(o, implication_failures == 0,
           std::to_string(implication_failures) + " implication failures");
    expect(o, stability_violations == 0,
           std::to_string(stability_violations) + " sampled couplings reached rho >= 1 + 1e-9");
    return o;
}

// ---------------------------------------------------------------------------
// 7. Exact algebra, checked numerically at scale: the discrete/continuous
//    form identity, the block decomposition of the coupled quadratic form,
//    and negative semidefiniteness of the coupling block.
Outcome criterion_identity_residuals() {
    Outcome o;
    Rng rng(8804);
    double worst_identity = 0.0, worst_block = 0.0, worst_eig = -1e300;
    bool identity_ok = true, block_ok = true, eig_ok = true;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        NonnegMatrix a = random_nonneg(n, rng);
        NonnegMatrix b = random_nonneg(n, rng);
        Vector e(n), d(n);
        for (std::size_t i = 0; i < n; ++i) {
            e[i] = 0.1 + 10.0 * rng.uniform();
            d[i] = rng.uniform() * std::min(a(i, i), b(i, i));
        }

        const double na = a.mat().norm_inf();
        const double identity_scale = (1.0 + na) * (1.0 + na) * (1.0 + norm_inf(e));
        const double r1 = stein_lyapunov_identity_residual(a, e);
        worst_identity = std::max(worst_identity, r1 / identity_scale);
        if (r1 > 1e-12 * identity_scale) identity_ok = false;

        const double block_scale = (1.0 + na + b.mat().norm_inf()) * (1.0 + norm_inf(e)) *
                                   (1.0 + norm_inf(d));
        const double r2 = qm_block_identity_residual(a, b, d, e);
        worst_block = std::max(worst_block, r2 / block_scale);
        if (r2 > 1e-12 * block_scale) block_ok = false;

        const double lam = coupling_block_max_eigenvalue(e, d);
        worst_eig = std::max(worst_eig, lam);
        if (lam > 1e-12) eig_ok = false;
    }
    expect(o, identity_ok, "discrete/continuous identity residual above 1e-12 (scaled); worst " +
                               std::to_string(worst_identity));
    expect(o, block_ok, "block decomposition residual above 1e-12 (scaled); worst " +
                            std::to_string(worst_block));
    expect(o, eig_ok, "coupling block has a positive eigenvalue; worst " +
                          std::to_string(worst_eig));
    return o;
}

// ---------------------------------------------------------------------------
// 8. The classic stability characterizations agree pointwise: spectral
//    radius, left contraction vector, no supporting vector, and the two
//    diagonal certificate forms, on matrices straddling rho = 1.
Outcome criterion_stability_condition_agreement() {
    Outcome o;
    Rng rng(8805);
    int checked = 0, disagreements = 0, undecided = 0, guard = 0;
    while (checked < 500 && ++guard < 3000) {
        const std::size_t n = 1 + rng.below(6);
        const double target = 0.2 + 1.6 * rng.uniform();
        if (std::abs(target - 1.0) < 1e-3) continue;
        NonnegMatrix a = random_with_rho(n, rng, target);
        ++checked;

        const bool stable = spectral_radius(a).rho < 1.0;
        const bool left_vector = find_clclf(a, a).has_value();
        const bool no_support = no_supporting_vector(a);
        const auto stein = find_cdlf(a, a, DiagonalFlavor::stein);
        const auto lyap = find_cdlf(a, a, DiagonalFlavor::lyapunov);
        if (stein.status == CdlfSearchStatus::undecided ||
            lyap.status == CdlfSearchStatus::undecided)
            ++undecided;
        const bool stein_found = stein.status == CdlfSearchStatus::found;
        const bool lyap_found = lyap.status == CdlfSearchStatus::found;

        if (left_vector != stable || no_support != stable || stein_found != stable ||
            lyap_found != stable)
            ++disagreements;
    }
    expect(o, checked == 500, "generator failed to produce 500 matrices");
    expect(o, undecided == 0, std::to_string(undecided) + " searches returned undecided");
    expect(o, disagreements == 0, std::to_string(disagreements) + " condition disagreements");
    return o;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
        double budget_ms; // 0 = unbounded
    };
    const std::vector<Criterion> criteria = {
        {"worked 2x2 pair: certificate flavors and closed-form eigenvalue",
         criterion_worked_pair_certificates, 1000.0},
        {"mirrored-cycle pair: joint copositive certificate", criterion_mirrored_cycle_pair,
         1000.0},
        {"3x3 counterexample: refutation with verified witness", criterion_leslie_counterexample,
         10000.0},
        {"single-row couplings preserve stability (300 pairs x 200 samples)",
         criterion_single_row_never_destabilizes, 60000.0},
        {"right-vector / row-selection equivalence (300 pairs)", criterion_selection_equivalence,
         30000.0},
        {"discrete-form implies continuous-form; certified pairs stay stable (100 pairs x 10k)",
         criterion_discrete_implies_continuous_and_stability, 0.0},
        {"algebraic identity residuals (1000 draws each)", criterion_identity_residuals, 0.0},
        {"stability characterizations agree (500 matrices)",
         criterion_stability_condition_agreement, 0.0},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                .count();
        if (criteria[i].budget_ms > 0.0 && ms > criteria[i].budget_ms) {
            o.ok = false;
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += "runtime " + std::to_string(ms) + " ms exceeds budget " +
                        std::to_string(criteria[i].budget_ms) + " ms";
        }
        std::printf("[%s] %zu. %s (%.0f ms)%s%s\n", o.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, ms, o.detail.empty() ? "" : " -- ", o.detail.c_str());
        if (!o.ok) ++failures;
    }
    if (failures == 0)
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
