#include "rdstab/rds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdstab/errors.hpp"
#include "rdstab/spectral.hpp"

namespace rdstab {

namespace {

Matrix two_ed(const Vector& e, const Vector& d) {
    Matrix m(e.size(), e.size());
    for (std::size_t i = 0; i < e.size(); ++i) m(i, i) = 2.0 * e[i] * d[i];
    return m;
}

} // namespace

SystemPair::SystemPair(NonnegMatrix a, NonnegMatrix b, CouplingKind coupling, double schur_margin,
                       double tol)
    : a_(std::move(a)), b_(std::move(b)), coupling_(coupling), schur_margin_(schur_margin),
      tol_(tol) {
    if (a_.dim() != b_.dim()) throw ValidationError("system pair: dimension mismatch");
    if (!(schur_margin_ >= 0.0)) throw ValidationError("system pair: margin must be nonnegative");
    if (!(tol_ > 0.0)) throw ValidationError("system pair: tol must be positive");
    if (coupling_ != CouplingKind::diagonal) {
        validate_leslie(a_);
        validate_leslie(b_);
    }
    rho_a_ = spectral_radius(a_, tol_).rho;
    rho_b_ = spectral_radius(b_, tol_).rho;
    if (!(rho_a_ < 1.0 - schur_margin_))
        throw ValidationError("system pair: first matrix is not Schur-stable within margin (rho = " +
                              std::to_string(rho_a_) + ")");
    if (!(rho_b_ < 1.0 - schur_margin_))
        throw ValidationError("system pair: second matrix is not Schur-stable within margin (rho = " +
                              std::to_string(rho_b_) + ")");
}

bool is_admissible_coupling(const SystemPair& pair, const NonnegMatrix& d) {
    try {
        require_admissible_coupling(pair, d);
        return true;
    } catch (const ValidationError&) {
        return false;
    }
}

void require_admissible_coupling(const SystemPair& pair, const NonnegMatrix& d) {
    const std::size_t n = pair.dim();
    if (d.dim() != n) throw ValidationError("coupling: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (d(i, j) == 0.0) continue;
            bool ok = true;
            switch (pair.coupling()) {
            case CouplingKind::diagonal:
                ok = (i == j);
                break;
            case CouplingKind::leslie:
            case CouplingKind::leslie_single_row:
                ok = (i == j + 1) || (i == n - 1 && j == n - 1);
                break;
            }
            if (!ok)
                throw ValidationError("coupling entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") is outside the " +
                                      std::string(to_string(pair.coupling())) + " pattern");
            if (d(i, j) > pair.a()(i, j) || d(i, j) > pair.b()(i, j))
                throw ValidationError("coupling entry (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") exceeds a donor entry");
        }
    }
    if (pair.coupling() == CouplingKind::leslie_single_row) {
        std::size_t active = 0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (d(i, j) != 0.0) {
                    ++active;
                    break;
                }
            }
        }
        if (active > 1)
            throw ValidationError("coupling has " + std::to_string(active) +
                                  " nonzero rows; the single-row class allows one");
    }
}

CoupledMatrix couple(const SystemPair& pair, const NonnegMatrix& d) {
    require_admissible_coupling(pair, d);
    return CoupledMatrix(pair.a(), pair.b(), d);
}

double rho_coupled(const SystemPair& pair, const NonnegMatrix& d) {
    return spectral_radius(couple(pair, d).matrix(), pair.tol()).rho;
}

namespace {

// Destabilizer search state: candidate couplings are vectors over the free
// slots of the class; for the single-row kind a candidate also carries which
// group (row) is active.
struct SearchSpace {
    CouplingBounds bounds;
    std::vector<std::vector<std::size_t>> groups; // slot indices enumerated together
};

SearchSpace make_search_space(const SystemPair& pair) {
    SearchSpace sp;
    sp.bounds = coupling_bounds(pair.a(), pair.b(), pair.coupling());
    const std::size_t k = sp.bounds.slots.size();
    if (pair.coupling() == CouplingKind::leslie_single_row) {
        std::vector<std::vector<std::size_t>> by_row(pair.dim());
        for (std::size_t s = 0; s < k; ++s) by_row[sp.bounds.slots[s].first].push_back(s);
        for (auto& g : by_row)
            if (!g.empty()) sp.groups.push_back(std::move(g));
    } else {
        std::vector<std::size_t> all(k);
        for (std::size_t s = 0; s < k; ++s) all[s] = s;
        sp.groups.push_back(std::move(all));
    }
    return sp;
}

NonnegMatrix values_to_coupling(const SystemPair& pair, const SearchSpace& sp,
                                const Vector& values) {
    Matrix d(pair.dim(), pair.dim());
    for (std::size_t s = 0; s < sp.bounds.slots.size(); ++s)
        d(sp.bounds.slots[s].first, sp.bounds.slots[s].second) = values[s];
    return NonnegMatrix(std::move(d));
}

} // namespace

std::optional<std::pair<NonnegMatrix, double>> find_destabilizer(const SystemPair& pair,
                                                                 int budget, std::uint64_t seed,
                                                                 double feastol) {
    if (budget < 1) throw ValidationError("find_destabilizer: budget must be positive");
    const SearchSpace sp = make_search_space(pair);
    const std::size_t k = sp.bounds.slots.size();
    Rng rng(seed);

    int evals = 0;
    double best_rho = -1.0;
    Vector best_values(k, 0.0);
    const auto evaluate = [&](const Vector& values) {
        if (evals >= budget) return false;
        ++evals;
        const CoupledMatrix cm(pair.a(), pair.b(), values_to_coupling(pair, sp, values));
        double rho = 0.0;
        for (const auto& lam : eigenvalues(cm.matrix().mat())) rho = std::max(rho, std::abs(lam));
        if (rho > best_rho) {
            best_rho = rho;
            best_values = values;
        }
        return true;
    };

    // Lattice pass: the finest resolution r <= 8 whose point count fits into
    // min(4096, budget/2), per enumerated group; skipped when even r = 1 does
    // not fit (more than 12 free slots).
    for (const auto& group : sp.groups) {
        const double cap = std::min(4096.0, std::max(1.0, static_cast<double>(budget) / 2.0));
        std::size_t res = 0;
        for (std::size_t r = 8; r >= 1; --r) {
            if (std::pow(static_cast<double>(r + 1), static_cast<double>(group.size())) <= cap) {
                res = r;
                break;
            }
        }
        if (res == 0) continue;
        std::vector<std::size_t> idx(group.size(), 0);
        bool done = false;
        while (!done) {
            Vector values(k, 0.0);
            for (std::size_t g = 0; g < group.size(); ++g)
                values[group[g]] = sp.bounds.upper[group[g]] * static_cast<double>(idx[g]) /
                                   static_cast<double>(res);
            if (!evaluate(values)) {
                done = true;
                break;
            }
            std::size_t g = 0;
            for (; g < idx.size(); ++g) {
                if (idx[g] < res) {
                    ++idx[g];
                    for (std::size_t h = 0; h < g; ++h) idx[h] = 0;
                    break;
                }
            }
            done = done || (g == idx.size());
        }
    }

    // Random pass up to 70% of the budget, then coordinate ascent on the rest.
    const int random_stop = (budget * 7) / 10;
    while (evals < random_stop) {
        Vector values(k, 0.0);
        if (pair.coupling() == CouplingKind::leslie_single_row) {
            const auto& group = sp.groups[rng.below(sp.groups.size())];
            for (std::size_t s : group) values[s] = rng.uniform() * sp.bounds.upper[s];
        } else {
            for (std::size_t s = 0; s < k; ++s) values[s] = rng.uniform() * sp.bounds.upper[s];
        }
        evaluate(values);
    }

    if (best_rho >= 0.0) {
        // Ascent only moves slots of the group the incumbent lives in, so
        // single-row candidates stay single-row.
        std::vector<std::size_t> active;
        if (pair.coupling() == CouplingKind::leslie_single_row) {
            for (const auto& group : sp.groups) {
                bool nonzero = false;
                for (std::size_t s : group) nonzero = nonzero || best_values[s] > 0.0;
                if (nonzero) {
                    active = group;
                    break;
                }
            }
            if (active.empty()) active = sp.groups.front();
        } else if (!sp.groups.empty()) {
            active = sp.groups.front();
        }
        for (int round = 0; round < 10 && evals < budget; ++round) {
            const double frac = 0.125 * std::pow(0.5, round);
            for (std::size_t s : active) {
                if (evals >= budget) break;
                const double step = frac * sp.bounds.upper[s];
                if (step <= 0.0) continue;
                for (const double dir : {+1.0, -1.0}) {
                    Vector trial = best_values;
                    trial[s] = std::clamp(trial[s] + dir * step, 0.0, sp.bounds.upper[s]);
                    if (trial[s] == best_values[s]) continue;
                    if (!evaluate(trial)) break;
                }
            }
        }
    }

    if (!(best_rho > 1.0 + feastol)) return std::nullopt;

    // Independent confirmation before claiming a refutation.
    const NonnegMatrix d = values_to_coupling(pair, sp, best_values);
    const CoupledMatrix cm(pair.a(), pair.b(), d);
    const double rho_sq = spectral_radius_squaring(cm.matrix().mat(), pair.tol());
    if (!(rho_sq > 1.0 + feastol)) return std::nullopt;
    const double rho = spectral_radius(cm.matrix(), pair.tol()).rho;
    return std::make_pair(d, rho);
}

RdsVerdict decide_rds(const SystemPair& pair, const RdsOptions& options) {
    if (options.budget < 1) throw ValidationError("decide_rds: budget must be positive");
    RdsVerdict v;
    v.seed = options.seed;
    v.budget = options.budget;

    // Notes accumulate as "clause; clause; " fragments; drop the separator
    // left hanging when a later step settles the verdict.
    const auto trim_note = [&]() {
        if (v.note.size() >= 2 && v.note.compare(v.note.size() - 2, 2, "; ") == 0)
            v.note.erase(v.note.size() - 2);
    };

    const auto certify = [&](RdsReason reason, Certificate cert) {
        v.status = RdsStatus::certified;
        v.reason = reason;
        v.certificate = std::move(cert);
        trim_note();
        return v;
    };

    if (pair.coupling() == CouplingKind::leslie_single_row)
        return certify(RdsReason::single_row_structure, StructureCert{pair.rho_a(), pair.rho_b()});

    if (pair.coupling() == CouplingKind::diagonal) {
        if (auto c = find_clclf(pair.a(), pair.b(), options.feastol))
            return certify(RdsReason::clclf, std::move(*c));
        if (auto c = find_jlclf(pair.a(), pair.b(), options.feastol)) {
            if (is_irreducible(pair.a()) || is_irreducible(pair.b()))
                return certify(RdsReason::jlclf_irreducible, std::move(*c));
            v.note += "joint linear certificate exists but neither matrix is irreducible; ";
        }
        const CdlfResult lyap =
            find_cdlf(pair.a(), pair.b(), DiagonalFlavor::lyapunov, options.cdlf_max_cuts,
                      options.feastol);
        if (lyap.status == CdlfSearchStatus::found)
            return certify(RdsReason::cdlf_lyapunov, *lyap.cert);
        if (lyap.status == CdlfSearchStatus::undecided)
            v.note += "cdlf-lyapunov search hit the cut cap; ";
        const CdlfResult stein = find_cdlf(pair.a(), pair.b(), DiagonalFlavor::stein,
                                           options.cdlf_max_cuts, options.feastol);
        if (stein.status == CdlfSearchStatus::found)
            return certify(RdsReason::cdlf_stein, *stein.cert);
        if (stein.status == CdlfSearchStatus::undecided)
            v.note += "cdlf-stein search hit the cut cap; ";
    } else {
        const auto [s1, s2] = build_s1_s2(pair.a(), pair.b());
        const double rho_s1 = spectral_radius(s1.matrix, pair.tol()).rho;
        const double rho_s2 = spectral_radius(s2.matrix, pair.tol()).rho;
        if (rho_s1 < 1.0 - pair.schur_margin() && rho_s2 < 1.0 - pair.schur_margin())
            return certify(RdsReason::s1_s2_envelope, EnvelopeCert{rho_s1, rho_s2});
        v.note += "envelope not conclusive (rho_s1 = " + std::to_string(rho_s1) +
                  ", rho_s2 = " + std::to_string(rho_s2) + "); ";
        if (auto w = common_right_vector(pair.a(), pair.b(), options.feastol))
            return certify(RdsReason::common_right_vector, RightVectorCert{w->v, w->margin});
    }

    if (auto hit = find_destabilizer(pair, options.budget, options.seed, options.feastol)) {
        v.status = RdsStatus::refuted;
        v.reason = RdsReason::counterexample;
        v.witness_d = std::move(hit->first);
        v.rho_at_witness = hit->second;
        trim_note();
        return v;
    }

    v.status = RdsStatus::undecided;
    v.reason = RdsReason::none;
    v.note += "no certificate found and the destabilizer search exhausted its budget of " +
              std::to_string(options.budget) + " evaluations";
    return v;
}

Trajectory simulate_coupled(const SystemPair& pair, const NonnegMatrix& d, const Vector& x0,
                            const Vector& y0, std::size_t steps) {
    return simulate_coupled(couple(pair, d), x0, y0, steps);
}

Trajectory simulate_coupled(const CoupledMatrix& cm, const Vector& x0, const Vector& y0,
                            std::size_t steps) {
    const std::size_t n = cm.block_dim();
    if (x0.size() != n || y0.size() != n)
        throw ValidationError("simulate_coupled: state dimension mismatch");
    for (double v : x0)
        if (!std::isfinite(v)) throw ValidationError("simulate_coupled: x0 must be finite");
    for (double v : y0)
        if (!std::isfinite(v)) throw ValidationError("simulate_coupled: y0 must be finite");
    const Matrix& m = cm.matrix().mat();

    Trajectory tr;
    Vector z(2 * n);
    std::copy(x0.begin(), x0.end(), z.begin());
    std::copy(y0.begin(), y0.end(), z.begin() + static_cast<std::ptrdiff_t>(n));
    const auto record = [&](const Vector& state) {
        tr.x.emplace_back(state.begin(), state.begin() + static_cast<std::ptrdiff_t>(n));
        tr.y.emplace_back(state.begin() + static_cast<std::ptrdiff_t>(n), state.end());
    };
    // Max-abs state norm: immune to overflow from squaring near the 1e300
    // divergence cutoff.
    const auto state_norm = [](const Vector& xs, const Vector& ys) {
        double nrm = 0.0;
        for (double v : xs) nrm = std::max(nrm, std::abs(v));
        for (double v : ys) nrm = std::max(nrm, std::abs(v));
        return nrm;
    };

    record(z);
    for (std::size_t t = 0; t < steps; ++t) {
        z = mat_vec(m, z);
        record(z);
        double nrm = 0.0;
        for (double v : z) nrm = std::max(nrm, std::abs(v));
        if (nrm > 1e300) {
            tr.divergent = true;
            break;
        }
    }

    // Least-squares slope of log-norm over the trailing half of what was
    // actually recorded.
    const std::size_t last = tr.x.size() - 1;
    const std::size_t start = last - last / 2;
    if (last >= start + 1) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0, window_max = 0.0;
        const double count = static_cast<double>(last - start + 1);
        for (std::size_t t = start; t <= last; ++t) {
            const double nrm = state_norm(tr.x[t], tr.y[t]);
            window_max = std::max(window_max, nrm);
            const double ln = std::log(std::max(nrm, 1e-300));
            const double tt = static_cast<double>(t);
            sx += tt;
            sy += ln;
            sxx += tt * tt;
            sxy += tt * ln;
        }
        const double denom = count * sxx - sx * sx;
        // A window that never leaves the origin has no growth to estimate.
        tr.growth_estimate =
            (window_max > 0.0 && denom != 0.0) ? (count * sxy - sx * sy) / denom : 0.0;
    }
    return tr;
}

bool verify_certificate(const NonnegMatrix& a, const NonnegMatrix& b, const Certificate& cert) {
    if (a.dim() != b.dim()) return false;
    if (const auto* cop = std::get_if<CopositiveCert>(&cert))
        return verify_copositive_cert(a, b, *cop);
    if (const auto* d = std::get_if<DiagonalCert>(&cert)) return verify_diagonal_cert(a, b, *d);
    if (const auto* rv = std::get_if<RightVectorCert>(&cert)) {
        if (rv->v.size() != a.dim() || !is_ggt0(rv->v) || !(rv->margin > 0.0)) return false;
        const Vector av = mat_vec(a.mat(), rv->v);
        const Vector bv = mat_vec(b.mat(), rv->v);
        const double need =
            rv->margin * (1.0 - 1e-9) -
            1e-12 * (1.0 + norm_inf(rv->v)) * std::max(a.mat().norm_inf(), b.mat().norm_inf());
        for (std::size_t i = 0; i < rv->v.size(); ++i)
            if (rv->v[i] - av[i] < need || rv->v[i] - bv[i] < need) return false;
        return true;
    }
    if (const auto* env = std::get_if<EnvelopeCert>(&cert)) {
        try {
            const auto [s1, s2] = build_s1_s2(a, b);
            const double r1 = spectral_radius(s1.matrix).rho;
            const double r2 = spectral_radius(s2.matrix).rho;
            return r1 < 1.0 && r2 < 1.0 && std::abs(r1 - env->rho_s1) <= 1e-8 * (1.0 + r1) &&
                   std::abs(r2 - env->rho_s2) <= 1e-8 * (1.0 + r2);
        } catch (const ValidationError&) {
            return false;
        } catch (const NumericError&) {
            return false;
        }
    }
    if (const auto* st = std::get_if<StructureCert>(&cert)) {
        try {
            validate_leslie(a);
            validate_leslie(b);
            const double ra = spectral_radius(a).rho;
            const double rb = spectral_radius(b).rho;
            return ra < 1.0 && rb < 1.0 && std::abs(ra - st->rho_a) <= 1e-8 * (1.0 + ra) &&
                   std::abs(rb - st->rho_b) <= 1e-8 * (1.0 + rb);
        } catch (const ValidationError&) {
            return false;
        } catch (const NumericError&) {
            return false;
        }
    }
    return false;
}

bool verify_verdict(const SystemPair& pair, const RdsVerdict& verdict) {
    switch (verdict.status) {
    case RdsStatus::undecided:
        return true;
    case RdsStatus::refuted: {
        if (!verdict.witness_d || !verdict.rho_at_witness) return false;
        if (!is_admissible_coupling(pair, *verdict.witness_d)) return false;
        try {
            const double rho = rho_coupled(pair, *verdict.witness_d);
            return rho > 1.0 && std::abs(rho - *verdict.rho_at_witness) <= 1e-6 * (1.0 + rho);
        } catch (const NumericError&) {
            return false;
        }
    }
    case RdsStatus::certified:
        break;
    }
    if (!verdict.certificate) return false;
    const Certificate& cert = *verdict.certificate;

    // The stored certificate kind must match the claimed reason.
    bool kind_ok = false;
    switch (verdict.reason) {
    case RdsReason::clclf: {
        const auto* c = std::get_if<CopositiveCert>(&cert);
        kind_ok = c && c->flavor == CopositiveFlavor::clclf;
        break;
    }
    case RdsReason::jlclf_irreducible: {
        const auto* c = std::get_if<CopositiveCert>(&cert);
        kind_ok = c && c->flavor == CopositiveFlavor::jlclf &&
                  (is_irreducible(pair.a()) || is_irreducible(pair.b()));
        break;
    }
    case RdsReason::cdlf_lyapunov: {
        const auto* c = std::get_if<DiagonalCert>(&cert);
        kind_ok = c && c->flavor == DiagonalFlavor::lyapunov;
        break;
    }
    case RdsReason::cdlf_stein: {
        const auto* c = std::get_if<DiagonalCert>(&cert);
        kind_ok = c && c->flavor == DiagonalFlavor::stein;
        break;
    }
    case RdsReason::s1_s2_envelope:
        kind_ok = std::holds_alternative<EnvelopeCert>(cert) &&
                  pair.coupling() != CouplingKind::diagonal;
        break;
    case RdsReason::common_right_vector:
        kind_ok = std::holds_alternative<RightVectorCert>(cert);
        break;
    case RdsReason::single_row_structure:
        kind_ok = std::holds_alternative<StructureCert>(cert) &&
                  pair.coupling() == CouplingKind::leslie_single_row;
        break;
    case RdsReason::counterexample:
    case RdsReason::none:
        kind_ok = false;
        break;
    }
    return kind_ok && verify_certificate(pair.a(), pair.b(), cert);
}

double qm_block_identity_residual(const NonnegMatrix& a, const NonnegMatrix& b, const Vector& d,
                                  const Vector& e) {
    const std::size_t n = a.dim();
    if (b.dim() != n || d.size() != n || e.size() != n)
        throw ValidationError("qm_block_identity_residual: dimension mismatch");
    const CoupledMatrix cm(a, b, NonnegMatrix(Matrix::diag(d)));
    const std::size_t nn = 2 * n;
    Matrix mi = cm.matrix().mat();
    for (std::size_t i = 0; i < nn; ++i) mi(i, i) -= 1.0;
    Vector ee(nn, 0.0);
    for (std::size_t i = 0; i < n; ++i) ee[i] = ee[n + i] = e[i];
    const Matrix pmi = Matrix::diag(ee) * mi; // P (M - I)
    const Matrix lhs = pmi.transposed() + pmi;

    const Matrix qa = lyapunov_form(a, e);
    const Matrix qb = lyapunov_form(b, e);
    const Matrix ed2 = two_ed(e, d);
    Matrix rhs(nn, nn);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            rhs(i, j) = qa(i, j) - ed2(i, j);
            rhs(i, n + j) = ed2(i, j);
            rhs(n + i, j) = ed2(i, j);
            rhs(n + i, n + j) = qb(i, j) - ed2(i, j);
        }
    }
    return (lhs - rhs).max_abs();
}

double coupling_block_max_eigenvalue(const Vector& e, const Vector& d) {
    if (e.size() != d.size())
        throw ValidationError("coupling_block_max_eigenvalue: dimension mismatch");
    const std::size_t n = e.size();
    const Matrix ed2 = two_ed(e, d);
    Matrix block(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            block(i, j) = -ed2(i, j);
            block(i, n + j) = ed2(i, j);
            block(n + i, j) = ed2(i, j);
            block(n + i, n + j) = -ed2(i, j);
        }
    }
    return symmetric_eigen_max(block).first;
}

const char* to_string(RdsStatus s) {
    switch (s) {
    case RdsStatus::certified: return "certified";
    case RdsStatus::refuted: return "refuted";
    case RdsStatus::undecided: return "undecided";
    }
    return "?";
}

const char* to_string(RdsReason r) {
    switch (r) {
    case RdsReason::clclf: return "clclf";
    case RdsReason::jlclf_irreducible: return "jlclf-irreducible";
    case RdsReason::cdlf_lyapunov: return "cdlf-lyapunov";
    case RdsReason::cdlf_stein: return "cdlf-stein";
    case RdsReason::s1_s2_envelope: return "s1-s2-envelope";
    case RdsReason::common_right_vector: return "common-right-vector";
    case RdsReason::single_row_structure: return "single-row-structure";
    case RdsReason::counterexample: return "counterexample";
    case RdsReason::none: return "none";
    }
    return "?";
}

const char* to_string(CouplingKind k) {
    switch (k) {
    case CouplingKind::diagonal: return "diagonal";
    case CouplingKind::leslie: return "leslie";
    case CouplingKind::leslie_single_row: return "leslie-single-row";
    }
    return "?";
}

} // namespace rdstab
