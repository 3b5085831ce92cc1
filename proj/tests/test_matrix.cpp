#include <doctest.h>

#include <cmath>
#include <limits>

#include "rdstab/errors.hpp"
#include "rdstab/matrix.hpp"
#include "support.hpp"

using namespace rdstab;
using namespace testsupport;

TEST_CASE("matrix arithmetic basics") {
    Matrix a{{1.0, 2.0}, {3.0, 4.0}};
    Matrix b{{0.0, 1.0}, {1.0, 0.0}};

    Matrix c = a * b;
    CHECK(c(0, 0) == 2.0);
    CHECK(c(0, 1) == 1.0);
    CHECK(c(1, 0) == 4.0);
    CHECK(c(1, 1) == 3.0);

    Matrix t = a.transposed();
    CHECK(t(0, 1) == 3.0);
    CHECK(t(1, 0) == 2.0);

    CHECK(Matrix::identity(3)(1, 1) == 1.0);
    CHECK(Matrix::identity(3)(0, 1) == 0.0);
    CHECK(Matrix::diag({2.0, 5.0})(1, 1) == 5.0);

    CHECK(a.norm_inf() == 7.0);
    CHECK(a.max_abs() == 4.0);
    CHECK((a - a).max_abs() == 0.0);
    CHECK((a * 2.0)(1, 1) == 8.0);
}

TEST_CASE("vector helpers") {
    CHECK(dot({1.0, 2.0}, {3.0, 4.0}) == 11.0);
    CHECK(norm_inf(Vector{-3.0, 2.0}) == 3.0);
    Matrix a{{1.0, 2.0}, {3.0, 4.0}};
    Vector ax = mat_vec(a, {1.0, 1.0});
    CHECK(ax[0] == 3.0);
    CHECK(ax[1] == 7.0);
    Vector va = vec_mat({1.0, 1.0}, a);
    CHECK(va[0] == 4.0);
    CHECK(va[1] == 6.0);

    CHECK(all_geq0({0.0, 1.0}));
    CHECK_FALSE(all_geq0({-1e-6, 1.0}));
    CHECK(all_geq0({-1e-13, 1.0}, 1e-12));
    CHECK(is_gt0({0.0, 1.0}));
    CHECK_FALSE(is_gt0({0.0, 0.0}));
    CHECK(is_ggt0({0.5, 1.0}));
    CHECK_FALSE(is_ggt0({0.0, 1.0}));
    CHECK(leq_entrywise(Matrix{{1.0}}, Matrix{{2.0}}));
    CHECK_FALSE(leq_entrywise(Matrix{{2.0}}, Matrix{{1.0}}));
}

TEST_CASE("nonneg matrix validation") {
    CHECK_THROWS_AS(NonnegMatrix(Matrix{{1.0, -0.5}, {0.0, 1.0}}), ValidationError);
    CHECK_THROWS_AS(NonnegMatrix(Matrix(2, 3)), ValidationError);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(NonnegMatrix(Matrix{{nan}}), ValidationError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(NonnegMatrix(Matrix{{inf}}), ValidationError);

    // Slack clamps tiny negatives produced by round-tripping.
    NonnegMatrix m(Matrix{{-1e-13, 1.0}, {0.0, 2.0}}, 1e-12);
    CHECK(m(0, 0) == 0.0);
    CHECK_THROWS_AS(NonnegMatrix(Matrix{{-1e-6}}, 1e-12), ValidationError);

    NonnegMatrix r = NonnegMatrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    CHECK(r(1, 0) == 3.0);
    CHECK_THROWS_AS(NonnegMatrix::from_rows({{1.0, 2.0}, {3.0}}), ValidationError);
}

TEST_CASE("coupled matrix assembly and exact recovery") {
    NonnegMatrix a = pair1_a();
    NonnegMatrix b = pair1_b();
    NonnegMatrix d(Matrix{{0.1, 0.0}, {0.0, 0.0}});
    CoupledMatrix cm(a, b, d);

    CHECK(cm.matrix().dim() == 4);
    CHECK(cm.matrix()(0, 0) == a(0, 0) - d(0, 0));
    CHECK(cm.matrix()(0, 2) == d(0, 0));
    CHECK(cm.matrix()(2, 0) == d(0, 0));
    CHECK(cm.matrix()(2, 2) == b(0, 0) - d(0, 0));
    CHECK(cm.matrix()(0, 1) == 1.0);
    CHECK(cm.matrix()(3, 2) == 1.0);

    // d exceeding a donor entry is rejected.
    NonnegMatrix too_big(Matrix{{0.2, 0.0}, {0.0, 0.0}});
    CHECK_THROWS_AS(CoupledMatrix(a, b, too_big), ValidationError);
    // Dimension mismatch is rejected.
    CHECK_THROWS_AS(CoupledMatrix(a, b, NonnegMatrix(Matrix{{0.0}})), ValidationError);
}

TEST_CASE("coupled matrix round-trips random parts bit-exactly") {
    Rng rng(20240801);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng.below(5);
        NonnegMatrix a = random_nonneg(n, rng);
        NonnegMatrix b = random_nonneg(n, rng);
        Matrix dm(n, n);
        for (std::size_t i = 0; i < n; ++i)
            dm(i, i) = rng.uniform() * std::min(a(i, i), b(i, i));
        NonnegMatrix d(std::move(dm));

        CoupledMatrix cm(a, b, d);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(cm.a()(i, j) == a(i, j));
                CHECK(cm.b()(i, j) == b(i, j));
                CHECK(cm.d()(i, j) == d(i, j));
                CHECK(cm.matrix()(i, j) == a(i, j) - d(i, j));
                CHECK(cm.matrix()(i, n + j) == d(i, j));
                CHECK(cm.matrix()(n + i, j) == d(i, j));
                CHECK(cm.matrix()(n + i, n + j) == b(i, j) - d(i, j));
            }
        }
    }
}

TEST_CASE("irreducibility known cases") {
    // Single node: trivially irreducible.
    CHECK(is_irreducible(NonnegMatrix(Matrix{{0.0}})));
    // Cycle.
    CHECK(is_irreducible(NonnegMatrix(Matrix{{0.0, 1.0}, {1.0, 0.0}})));
    // Strictly upper triangular: no path back.
    CHECK_FALSE(is_irreducible(NonnegMatrix(Matrix{{0.0, 1.0}, {0.0, 0.0}})));
    // Dense positive.
    Rng rng(7);
    NonnegMatrix dense = random_with_rho(4, rng, 0.5);
    CHECK(is_irreducible(dense));
    // Block reducible 3x3.
    CHECK_FALSE(is_irreducible(
        NonnegMatrix(Matrix{{1.0, 1.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, 0.0, 1.0}})));
}

TEST_CASE("irreducibility agrees with transitive-closure oracle") {
    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        NonnegMatrix m = random_nonneg(n, rng, /*zero_prob=*/0.7);
        CHECK(is_irreducible(m) == strongly_connected_oracle(m));
    }
}
