#pragma once

// Shared helpers for the test binaries: seeded generators for random
// instances and closed-form oracles that are independent of the library's
// iterative solvers.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rdstab/leslie.hpp"
#include "rdstab/matrix.hpp"
#include "rdstab/rng.hpp"
#include "rdstab/spectral.hpp"

namespace testsupport {

using rdstab::Matrix;
using rdstab::NonnegMatrix;
using rdstab::Rng;
using rdstab::Vector;

inline NonnegMatrix random_nonneg(std::size_t n, Rng& rng, double zero_prob = 0.0) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = (zero_prob > 0.0 && rng.uniform() < zero_prob) ? 0.0 : rng.uniform();
    return NonnegMatrix(std::move(m));
}

// Random matrix rescaled so its spectral radius equals `target` (up to the
// accuracy of the QR eigensolver; scaling commutes with rho exactly in exact
// arithmetic).  Resamples until the raw draw has rho away from zero.
inline NonnegMatrix random_with_rho(std::size_t n, Rng& rng, double target,
                                    double zero_prob = 0.0) {
    for (;;) {
        NonnegMatrix m = random_nonneg(n, rng, zero_prob);
        double rho = 0.0;
        for (const auto& lam : rdstab::eigenvalues(m.mat())) rho = std::max(rho, std::abs(lam));
        if (rho < 1e-6) continue;
        Matrix scaled = m.mat();
        scaled *= target / rho;
        return NonnegMatrix(std::move(scaled));
    }
}

inline NonnegMatrix random_leslie(std::size_t n, Rng& rng) {
    Matrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) m(0, j) = rng.uniform();
    for (std::size_t i = 0; i + 1 < n; ++i) m(i + 1, i) = 0.2 + 0.8 * rng.uniform();
    m(n - 1, n - 1) = std::max(m(n - 1, n - 1), 0.8 * rng.uniform());
    return NonnegMatrix(std::move(m));
}

inline NonnegMatrix random_leslie_with_rho(std::size_t n, Rng& rng, double target) {
    for (;;) {
        NonnegMatrix m = random_leslie(n, rng);
        double rho = 0.0;
        for (const auto& lam : rdstab::eigenvalues(m.mat())) rho = std::max(rho, std::abs(lam));
        if (rho < 1e-6) continue;
        Matrix scaled = m.mat();
        scaled *= target / rho;
        return NonnegMatrix(std::move(scaled));
    }
}

// Largest root modulus of a 2x2 matrix by the quadratic formula.
inline double rho_2x2_oracle(double a, double b, double c, double d) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        return std::max(std::abs(0.5 * tr + s), std::abs(0.5 * tr - s));
    }
    return std::sqrt(det); // complex pair: |lambda|^2 = det
}

// Largest root modulus of x^3 + c2 x^2 + c1 x + c0 by Cardano's formulas.
inline double cubic_max_modulus_oracle(double c2, double c1, double c0) {
    const double p = c1 - c2 * c2 / 3.0;
    const double q = 2.0 * c2 * c2 * c2 / 27.0 - c2 * c1 / 3.0 + c0;
    const double shift = -c2 / 3.0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;
    if (disc > 0.0) {
        // One real root and a complex pair.
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-0.5 * q + s);
        const double v = std::cbrt(-0.5 * q - s);
        const double t1 = u + v;
        const double real_root = t1 + shift;
        // Remaining quadratic: t^2 + t1 t + (t1^2 + p), complex pair in t.
        const double re = -0.5 * t1 + shift;
        const double im2 = (t1 * t1 + p) - 0.25 * t1 * t1;
        const double pair_mod = std::sqrt(re * re + std::max(im2, 0.0));
        return std::max(std::abs(real_root), pair_mod);
    }
    // Three real roots.
    if (p >= 0.0) {
        // Only possible with disc <= 0 when p == 0 and q == 0: triple root.
        return std::abs(shift);
    }
    const double m = 2.0 * std::sqrt(-p / 3.0);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    double best = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double t = m * std::cos(theta - 2.0 * M_PI * static_cast<double>(k) / 3.0);
        best = std::max(best, std::abs(t + shift));
    }
    return best;
}

// Spectral radius of a 3x3 matrix through its characteristic polynomial.
inline double rho_3x3_oracle(const Matrix& a) {
    const double tr = a(0, 0) + a(1, 1) + a(2, 2);
    const double m01 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double m02 = a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0);
    const double m12 = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    const double det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
                       a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                       a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
    return cubic_max_modulus_oracle(-tr, m01 + m02 + m12, -det);
}

// Strong connectivity by boolean transitive closure.
inline bool strongly_connected_oracle(const NonnegMatrix& a) {
    const std::size_t n = a.dim();
    if (n == 1) return true;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) reach[i][j] = (i == j) || a(i, j) > 0.0;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

// The worked 2x2 pairs used across the test suites.
inline NonnegMatrix pair1_a() { return NonnegMatrix(Matrix{{0.1, 1.0}, {0.0, 0.0}}); }
inline NonnegMatrix pair1_b() { return NonnegMatrix(Matrix{{0.1, 0.0}, {1.0, 0.0}}); }
inline NonnegMatrix pair2_a() { return NonnegMatrix(Matrix{{0.0, 0.75}, {1.0, 0.0}}); }
inline NonnegMatrix pair2_b() { return NonnegMatrix(Matrix{{0.0, 1.0}, {0.75, 0.0}}); }

// The 3x3 Leslie pair with a destabilizing coupling, and that coupling.
inline NonnegMatrix leslie3_a() {
    return NonnegMatrix(Matrix{{0.1, 0.85, 0.15}, {0.9, 0.0, 0.0}, {0.0, 0.7, 0.2}});
}
inline NonnegMatrix leslie3_b() {
    return NonnegMatrix(Matrix{{0.6, 0.1, 1.0}, {0.5, 0.0, 0.0}, {0.0, 0.35, 0.45}});
}
inline NonnegMatrix leslie3_d() {
    return NonnegMatrix(Matrix{{0.0, 0.0, 0.0}, {0.25, 0.0, 0.0}, {0.0, 0.2, 0.0}});
}

} // namespace testsupport
