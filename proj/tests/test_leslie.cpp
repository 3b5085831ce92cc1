#include <doctest.h>

#include <cmath>
#include <set>

#include "rdstab/errors.hpp"
#include "rdstab/leslie.hpp"
#include "rdstab/spectral.hpp"
#include "support.hpp"

using namespace rdstab;
using namespace testsupport;

TEST_CASE("leslie pattern validation") {
    LeslieMatrix la = validate_leslie(leslie3_a());
    CHECK(la.fertility == Vector{0.1, 0.85, 0.15});
    CHECK(la.survival == Vector{0.9, 0.7});
    CHECK(la.corner == 0.2);

    // Off-pattern entry is rejected and named.
    Matrix bad = leslie3_a().mat();
    bad(1, 2) = 0.3;
    try {
        validate_leslie(NonnegMatrix(std::move(bad)));
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("(1,2)") != std::string::npos);
    }

    // Degenerate sizes.
    LeslieMatrix one = validate_leslie(NonnegMatrix(Matrix{{0.7}}));
    CHECK(one.corner == 0.7);
    CHECK(one.survival.empty());
    CHECK(validate_leslie(NonnegMatrix(Matrix{{0.1, 0.2}, {0.9, 0.3}})).survival ==
          Vector{0.9});
}

TEST_CASE("coupling bounds take entrywise minima of the donors") {
    auto cb = coupling_bounds(leslie3_a(), leslie3_b(), CouplingKind::leslie);
    REQUIRE(cb.slots.size() == 3);
    CHECK(cb.slots[0] == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(cb.slots[1] == std::pair<std::size_t, std::size_t>{2, 1});
    CHECK(cb.slots[2] == std::pair<std::size_t, std::size_t>{2, 2});
    CHECK(cb.upper == Vector{0.5, 0.35, 0.2});

    auto db = coupling_bounds(pair1_a(), pair1_b(), CouplingKind::diagonal);
    REQUIRE(db.slots.size() == 2);
    CHECK(db.upper == Vector{0.1, 0.0});
}

TEST_CASE("coupling enumeration hits the full lattice") {
    // Full Leslie class: (resolution+1)^(n-1+1) lattice points.
    auto lat = enumerate_coupling_class(leslie3_a(), leslie3_b(), CouplingKind::leslie, 2, 0);
    CHECK(lat.size() == 27);

    // Single-row class: one lattice per active row.
    auto lat1 = enumerate_coupling_class(leslie3_a(), leslie3_b(),
                                         CouplingKind::leslie_single_row, 2, 0);
    CHECK(lat1.size() == 3 + 9);

    auto cb = coupling_bounds(leslie3_a(), leslie3_b(), CouplingKind::leslie);
    for (const auto& d : lat) {
        // On-pattern, within bounds.
        for (std::size_t s = 0; s < cb.slots.size(); ++s)
            CHECK(d(cb.slots[s].first, cb.slots[s].second) <= cb.upper[s] + 1e-15);
        validate_leslie(d);
    }
    for (const auto& d : lat1) {
        std::set<std::size_t> active_rows;
        const std::size_t n = d.dim();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d(i, j) != 0.0) active_rows.insert(i);
        CHECK(active_rows.size() <= 1);
    }

    // The extremes are present in the lattice: zero coupling and the bound.
    bool has_zero = false, has_full = false;
    for (const auto& d : lat) {
        if (d.mat().max_abs() == 0.0) has_zero = true;
        if (d(1, 0) == cb.upper[0] && d(2, 1) == cb.upper[1] && d(2, 2) == cb.upper[2])
            has_full = true;
    }
    CHECK(has_zero);
    CHECK(has_full);

    // Random tail sampling is seeded and admissible.
    auto with_random =
        enumerate_coupling_class(leslie3_a(), leslie3_b(), CouplingKind::leslie, 1, 42, 10);
    auto with_random2 =
        enumerate_coupling_class(leslie3_a(), leslie3_b(), CouplingKind::leslie, 1, 42, 10);
    REQUIRE(with_random.size() == with_random2.size());
    for (std::size_t i = 0; i < with_random.size(); ++i)
        CHECK((with_random[i].mat() - with_random2[i].mat()).max_abs() == 0.0);
}

TEST_CASE("random couplings are admissible and deterministic under a seed") {
    Rng rng1(7), rng2(7);
    for (int trial = 0; trial < 20; ++trial) {
        NonnegMatrix d1 = random_coupling(leslie3_a(), leslie3_b(), CouplingKind::leslie, rng1);
        NonnegMatrix d2 = random_coupling(leslie3_a(), leslie3_b(), CouplingKind::leslie, rng2);
        CHECK((d1.mat() - d2.mat()).max_abs() == 0.0);
        CHECK(leq_entrywise(d1.mat(), leslie3_a().mat()));
        CHECK(leq_entrywise(d1.mat(), leslie3_b().mat()));
    }
}

TEST_CASE("row selections enumerate in binary counting order") {
    NonnegMatrix a = pair2_a();
    NonnegMatrix b = pair2_b();
    auto sels = row_selections(a, b);
    REQUIRE(sels.size() == 4);
    CHECK(sels[0].mask == 0);
    CHECK((sels[0].matrix.mat() - a.mat()).max_abs() == 0.0);
    CHECK((sels[3].matrix.mat() - b.mat()).max_abs() == 0.0);
    // Bit 0 set: row 0 from b, row 1 from a.
    CHECK(sels[1].matrix(0, 1) == 1.0);
    CHECK(sels[1].matrix(1, 0) == 1.0);
    // That mixed selection is the swap matrix: spectral radius exactly 1,
    // which is why no common right vector exists for this pair.
    CHECK(spectral_radius(sels[1].matrix).rho == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("envelope matrices take the first row from each donor and shared maxima") {
    auto [s1, s2] = build_s1_s2(leslie3_a(), leslie3_b());
    CHECK(s1.fertility == Vector{0.1, 0.85, 0.15});
    CHECK(s2.fertility == Vector{0.6, 0.1, 1.0});
    CHECK(s1.survival == Vector{0.9, 0.7});
    CHECK(s2.survival == Vector{0.9, 0.7});
    CHECK(s1.corner == 0.45);
    CHECK(s2.corner == 0.45);

    // n = 1: the lone entry acts as the corner, so both envelopes are the max.
    auto [t1, t2] = build_s1_s2(NonnegMatrix(Matrix{{0.3}}), NonnegMatrix(Matrix{{0.5}}));
    CHECK(t1.matrix(0, 0) == 0.5);
    CHECK(t2.matrix(0, 0) == 0.5);
}

TEST_CASE("every row selection of a leslie pair is dominated by an envelope") {
    Rng rng(2020);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        NonnegMatrix a = random_leslie(n, rng);
        NonnegMatrix b = random_leslie(n, rng);
        auto [s1, s2] = build_s1_s2(a, b);
        for (const auto& sel : row_selections(a, b)) {
            const bool under_s1 = leq_entrywise(sel.matrix.mat(), s1.matrix.mat());
            const bool under_s2 = leq_entrywise(sel.matrix.mat(), s2.matrix.mat());
            CHECK((under_s1 || under_s2));
        }
        // The donors themselves sit below their envelopes, so the envelope
        // spectral radii bound the donors'.
        CHECK(spectral_radius(s1.matrix).rho >= spectral_radius(a).rho - 1e-9);
        CHECK(spectral_radius(s2.matrix).rho >= spectral_radius(b).rho - 1e-9);
    }
}

TEST_CASE("admissible couplings keep both residual matrices on the leslie pattern") {
    Rng rng(2021);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.below(4);
        NonnegMatrix a = random_leslie(n, rng);
        NonnegMatrix b = random_leslie(n, rng);
        for (CouplingKind kind : {CouplingKind::leslie, CouplingKind::leslie_single_row}) {
            NonnegMatrix d = random_coupling(a, b, kind, rng);
            validate_leslie(d);
            validate_leslie(NonnegMatrix(a.mat() - d.mat(), 1e-12));
            validate_leslie(NonnegMatrix(b.mat() - d.mat(), 1e-12));
        }
    }
}

TEST_CASE("common right vector matches the all-selections-schur oracle") {
    // The mirrored-cycle pair has a selection with rho exactly 1: no witness.
    CHECK_FALSE(common_right_vector(pair2_a(), pair2_b()).has_value());

    // A strongly contractive pair always has one.
    Rng rng(2022);
    NonnegMatrix a = random_with_rho(3, rng, 0.2);
    NonnegMatrix b = random_with_rho(3, rng, 0.2);
    auto w = common_right_vector(a, b);
    REQUIRE(w.has_value());
    CHECK(w->margin > 0.0);
    Vector av = mat_vec(a.mat(), w->v);
    for (std::size_t i = 0; i < 3; ++i) CHECK(av[i] < w->v[i]);

    // Randomized equivalence, excluding near-critical selections.
    int checked = 0;
    for (int trial = 0; trial < 60 && checked < 40; ++trial) {
        const std::size_t n = 2 + rng.below(2);
        NonnegMatrix ra = random_with_rho(n, rng, 0.55 + 0.6 * rng.uniform());
        NonnegMatrix rb = random_with_rho(n, rng, 0.55 + 0.6 * rng.uniform());
        bool all_schur = true, near_critical = false;
        for (const auto& sel : row_selections(ra, rb)) {
            const double rho = spectral_radius(sel.matrix).rho;
            if (std::abs(rho - 1.0) < 1e-6) near_critical = true;
            if (rho >= 1.0) all_schur = false;
        }
        if (near_critical) continue;
        ++checked;
        CHECK(common_right_vector(ra, rb).has_value() == all_schur);
    }
    CHECK(checked >= 30);
}
