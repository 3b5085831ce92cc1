#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <utility>

#include "rdstab/matrix.hpp"

namespace rdstab {

enum class SpectralMethod {
    automatic,       // QR cross-checked against normalized squaring
    qr,              // Hessenberg reduction + Francis double-shift QR only
    power_squaring,  // normalized repeated squaring only
};

struct SpectralResult {
    double rho = 0.0;
    SpectralMethod method = SpectralMethod::qr; // method that produced rho
    double residual = 0.0;   // cross-method gap, plus Perron residual when present
    std::optional<Vector> perron_vector; // positive, max-entry 1; only when irreducible
};

// Spectral radius of a nonnegative matrix.
//
// The default runs both methods and insists they agree to within 10*tol
// (relative to 1+rho); a larger gap raises NumericError with both estimates.
// For irreducible input the result carries a Perron vector with residual
// |a*x - rho*x|_inf <= tol*(1+rho).
SpectralResult spectral_radius(const NonnegMatrix& a, double tol = 1e-10,
                               SpectralMethod method = SpectralMethod::automatic);

// rho(a) < 1 - margin.
bool is_schur(const NonnegMatrix& a, double margin = 1e-9);

// All eigenvalues of a general square matrix (balancing, Householder
// Hessenberg reduction, Francis double-shift QR).  Order is unspecified.
std::vector<std::complex<double>> eigenvalues(Matrix a);

// Gelfand limit |A^(2^k)|^(1/2^k) in the infinity norm, evaluated by repeated
// squaring with per-step normalization.  Monotone from above, so always an
// upper bound on rho up to the convergence slack of ~tol/10.
double spectral_radius_squaring(const Matrix& a, double tol = 1e-10,
                                std::size_t max_squarings = 64);

// Largest eigenvalue and a unit eigenvector of a symmetric matrix, by cyclic
// Jacobi rotations.  Input must be symmetric to 1e-12*max_abs (it is
// symmetrized internally before iterating); the pair satisfies
// |s*x - lambda*x|_inf <= tol*(1+|s|_inf).
std::pair<double, Vector> symmetric_eigen_max(const Matrix& s, double tol = 1e-12);

// True when no nonzero nonnegative v has v^T a >= v^T entrywise, decided by
// linear programming.  For a nonnegative matrix this is equivalent to
// rho(a) < 1, which makes it an independent stability oracle.
bool no_supporting_vector(const NonnegMatrix& a, double feastol = 1e-9);

// Solve a x = b by LU with partial pivoting.  Throws NumericError on a pivot
// below `singular_tol` times the matrix scale.
Vector lu_solve(Matrix a, Vector b, double singular_tol = 1e-300);

} // namespace rdstab
