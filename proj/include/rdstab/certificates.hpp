#pragma once

#include <cstddef>
#include <optional>

#include "rdstab/matrix.hpp"

namespace rdstab {

// Linear (copositive) certificates: a strictly positive row vector v with
//   clclf:  v^T A << v^T  and  v^T B << v^T
//   jlclf:  v^T A <= v^T,  v^T B <= v^T,  and  v^T (A+B) << 2 v^T
enum class CopositiveFlavor { clclf, jlclf };

struct CopositiveCert {
    CopositiveFlavor flavor = CopositiveFlavor::clclf;
    Vector v;            // strictly positive, scaled to min entry 1
    double margin = 0.0; // worst slack of the strict rows at this v
};

// Diagonal quadratic certificates: a positive diagonal E = diag(e) with
//   stein:     A^T E A - E  and  B^T E B - E  negative definite
//   lyapunov:  (A-I)^T E + E (A-I)  and the same for B  negative definite
enum class DiagonalFlavor { stein, lyapunov };

struct DiagonalCert {
    DiagonalFlavor flavor = DiagonalFlavor::stein;
    Vector e;            // strictly positive, scaled to sum n
    double margin = 0.0; // both forms have max eigenvalue <= -margin
};

enum class CdlfSearchStatus { found, infeasible, undecided };

struct CdlfResult {
    CdlfSearchStatus status = CdlfSearchStatus::undecided;
    std::optional<DiagonalCert> cert; // present iff status == found
    int cuts = 0;                     // eigenvector cuts generated
};

// The quadratic forms the diagonal certificates are about, as symmetric
// matrices linear in e.
Matrix stein_form(const NonnegMatrix& a, const Vector& e);
Matrix lyapunov_form(const NonnegMatrix& a, const Vector& e);

std::optional<CopositiveCert> find_clclf(const NonnegMatrix& a, const NonnegMatrix& b,
                                         double feastol = 1e-9);
std::optional<CopositiveCert> find_jlclf(const NonnegMatrix& a, const NonnegMatrix& b,
                                         double feastol = 1e-9);

// Cutting-plane search for a common diagonal certificate.  Candidates live in
// the box [1e-6, 1e6]^n scaled to sum n; every round evaluates the worst
// eigenvector of both forms (a first, then b) and either accepts the
// candidate (both max eigenvalues <= -delta, delta = 1e-8*(1+max norm^2)) or
// adds one linear cut per violated form.  An infeasible cut program proves no
// candidate in the box clears the delta margin; hitting `max_cuts` yields
// undecided, never a silent failure.
CdlfResult find_cdlf(const NonnegMatrix& a, const NonnegMatrix& b, DiagonalFlavor flavor,
                     int max_cuts = 500, double feastol = 1e-9);

// Re-checks a certificate by direct arithmetic, independent of the searches.
bool verify_copositive_cert(const NonnegMatrix& a, const NonnegMatrix& b,
                            const CopositiveCert& cert);

// Dual-route definiteness check: both forms must pass a Cholesky
// factorization of -(S + (margin/2) I) and a Jacobi max-eigenvalue test
// lambda_max(S) <= -margin/2.  True only when every route agrees.
bool verify_diagonal_cert(const NonnegMatrix& a, const NonnegMatrix& b,
                          const DiagonalCert& cert);

// max-abs residual of the exact algebraic identity
//   A^T E A - E = (A-I)^T E + E (A-I) + (A-I)^T E (A-I)
// evaluated entrywise for E = diag(e).
double stein_lyapunov_identity_residual(const NonnegMatrix& a, const Vector& e);

} // namespace rdstab
