#include "rdstab/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rdstab/errors.hpp"
#include "rdstab/lp.hpp"
#include "rdstab/spectral.hpp"

namespace rdstab {

namespace {

void check_same_dim(const NonnegMatrix& a, const NonnegMatrix& b) {
    if (a.dim() != b.dim())
        throw ValidationError("certificate search: matrices must share one dimension");
}

// Row j of the system v^T X <= v^T as coefficients over v.
Vector column_row(const NonnegMatrix& x, std::size_t j) {
    const std::size_t n = x.dim();
    Vector c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) c[i] = x(i, j);
    c[j] -= 1.0;
    return c;
}

double min_slack(const Vector& v, const NonnegMatrix& x) {
    const Vector vx = vec_mat(v, x.mat());
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < v.size(); ++j) m = std::min(m, v[j] - vx[j]);
    return m;
}

// True when s (symmetric) plus shift*I is negative definite, decided by a
// Cholesky factorization of its negation.
bool negative_definite_cholesky(const Matrix& s, double shift) {
    const std::size_t n = s.rows();
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = -0.5 * (s(i, j) + s(j, i));
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= shift;
    for (std::size_t j = 0; j < n; ++j) {
        double d = m(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= m(j, k) * m(j, k);
        if (!(d > 0.0)) return false;
        const double r = std::sqrt(d);
        m(j, j) = r;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = m(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= m(i, k) * m(j, k);
            m(i, j) = v / r;
        }
    }
    return true;
}

} // namespace

Matrix stein_form(const NonnegMatrix& a, const Vector& e) {
    if (e.size() != a.dim()) throw ValidationError("stein_form: diagonal size mismatch");
    const Matrix ea = Matrix::diag(e) * a.mat();
    Matrix s = a.mat().transposed() * ea; // A^T E A
    for (std::size_t i = 0; i < e.size(); ++i) s(i, i) -= e[i];
    return s;
}

Matrix lyapunov_form(const NonnegMatrix& a, const Vector& e) {
    if (e.size() != a.dim()) throw ValidationError("lyapunov_form: diagonal size mismatch");
    const std::size_t n = e.size();
    Matrix am = a.mat();
    for (std::size_t i = 0; i < n; ++i) am(i, i) -= 1.0;
    const Matrix ea = Matrix::diag(e) * am; // E (A - I)
    return ea.transposed() + ea;
}

std::optional<CopositiveCert> find_clclf(const NonnegMatrix& a, const NonnegMatrix& b,
                                         double feastol) {
    check_same_dim(a, b);
    const std::size_t n = a.dim();
    std::vector<StrictRow> rows;
    for (std::size_t j = 0; j < n; ++j) rows.push_back({column_row(a, j), true});
    for (std::size_t j = 0; j < n; ++j) rows.push_back({column_row(b, j), true});
    const auto sf = strict_feasibility(rows, Vector(n, 1.0), feastol);
    if (!sf.feasible || !sf.witness) return std::nullopt;

    CopositiveCert cert;
    cert.flavor = CopositiveFlavor::clclf;
    cert.v = *sf.witness;
    cert.margin = std::min(min_slack(cert.v, a), min_slack(cert.v, b));
    if (!(cert.margin > 0.0)) return std::nullopt;
    return cert;
}

std::optional<CopositiveCert> find_jlclf(const NonnegMatrix& a, const NonnegMatrix& b,
                                         double feastol) {
    check_same_dim(a, b);
    const std::size_t n = a.dim();
    std::vector<StrictRow> rows;
    for (std::size_t j = 0; j < n; ++j) rows.push_back({column_row(a, j), false});
    for (std::size_t j = 0; j < n; ++j) rows.push_back({column_row(b, j), false});
    for (std::size_t j = 0; j < n; ++j) {
        Vector c(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) c[i] = a(i, j) + b(i, j);
        c[j] -= 2.0;
        rows.push_back({std::move(c), true});
    }
    const auto sf = strict_feasibility(rows, Vector(n, 1.0), feastol);
    if (!sf.feasible || !sf.witness) return std::nullopt;

    CopositiveCert cert;
    cert.flavor = CopositiveFlavor::jlclf;
    cert.v = *sf.witness;
    const Vector va = vec_mat(cert.v, a.mat());
    const Vector vb = vec_mat(cert.v, b.mat());
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        margin = std::min(margin, 2.0 * cert.v[j] - va[j] - vb[j]);
    cert.margin = margin;
    if (!(cert.margin > 0.0)) return std::nullopt;
    return cert;
}

CdlfResult find_cdlf(const NonnegMatrix& a, const NonnegMatrix& b, DiagonalFlavor flavor,
                     int max_cuts, double feastol) {
    check_same_dim(a, b);
    if (max_cuts < 1) throw ValidationError("find_cdlf: max_cuts must be positive");
    const std::size_t n = a.dim();
    const double scale = std::max(a.mat().norm_inf(), b.mat().norm_inf());
    const double delta = 1e-8 * (1.0 + scale * scale);

    const auto form = [&](const NonnegMatrix& x, const Vector& e) {
        return flavor == DiagonalFlavor::stein ? stein_form(x, e) : lyapunov_form(x, e);
    };
    // Rayleigh gradient of the violated form at eigenvector x, as a linear
    // functional of e: stein gives (Ax)_i^2 - x_i^2, lyapunov 2 x_i ((A-I)x)_i.
    const auto cut_vector = [&](const NonnegMatrix& m, const Vector& x) {
        Vector g(n, 0.0);
        if (flavor == DiagonalFlavor::stein) {
            const Vector mx = mat_vec(m.mat(), x);
            for (std::size_t i = 0; i < n; ++i) g[i] = mx[i] * mx[i] - x[i] * x[i];
        } else {
            Matrix shifted = m.mat();
            for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= 1.0;
            const Vector mx = mat_vec(shifted, x);
            for (std::size_t i = 0; i < n; ++i) g[i] = 2.0 * x[i] * mx[i];
        }
        return g;
    };

    CdlfResult result;
    Vector candidate(n, 1.0);
    std::vector<Vector> cuts;
    while (true) {
        const auto ea = symmetric_eigen_max(form(a, candidate));
        const auto eb = symmetric_eigen_max(form(b, candidate));
        if (ea.first <= -delta && eb.first <= -delta) {
            DiagonalCert cert;
            cert.flavor = flavor;
            cert.e = candidate;
            cert.margin = std::min(-ea.first, -eb.first);
            result.status = CdlfSearchStatus::found;
            result.cert = std::move(cert);
            return result;
        }
        if (ea.first > -delta) cuts.push_back(cut_vector(a, ea.second));
        if (eb.first > -delta) cuts.push_back(cut_vector(b, eb.second));
        result.cuts = static_cast<int>(cuts.size());
        if (result.cuts > max_cuts) {
            result.status = CdlfSearchStatus::undecided;
            return result;
        }

        LinearProgram lp;
        lp.num_vars = n + 1; // e, then the interiority variable t
        lp.sense = Sense::maximize;
        lp.objective.assign(n + 1, 0.0);
        lp.objective[n] = 1.0;
        lp.lower.assign(n + 1, 1e-6);
        lp.upper.assign(n + 1, 1e6);
        lp.lower[n] = 0.0;
        LpConstraint sum;
        sum.coeff.assign(n + 1, 1.0);
        sum.coeff[n] = 0.0;
        sum.rel = Relation::equal;
        sum.rhs = static_cast<double>(n);
        lp.constraints.push_back(std::move(sum));
        for (const auto& g : cuts) {
            LpConstraint c;
            c.coeff.assign(n + 1, 0.0);
            std::copy(g.begin(), g.end(), c.coeff.begin());
            c.coeff[n] = 1.0;
            c.rel = Relation::less_equal;
            c.rhs = -delta;
            lp.constraints.push_back(std::move(c));
        }
        const LpOutcome lpres = solve_lp(lp, feastol);
        if (lpres.status == LpStatus::infeasible) {
            result.status = CdlfSearchStatus::infeasible;
            return result;
        }
        if (lpres.status != LpStatus::optimal)
            throw LpError("cdlf cut program cannot be unbounded");
        candidate.assign(lpres.solution->begin(),
                         lpres.solution->begin() + static_cast<std::ptrdiff_t>(n));
    }
}

bool verify_copositive_cert(const NonnegMatrix& a, const NonnegMatrix& b,
                            const CopositiveCert& cert) {
    if (a.dim() != b.dim() || cert.v.size() != a.dim()) return false;
    if (!is_ggt0(cert.v) || !(cert.margin > 0.0)) return false;
    const double scale = std::max({1.0, a.mat().norm_inf(), b.mat().norm_inf()}) * norm_inf(cert.v);
    const double slack = 1e-12 * scale;
    const double need = cert.margin * (1.0 - 1e-9) - slack;
    const Vector va = vec_mat(cert.v, a.mat());
    const Vector vb = vec_mat(cert.v, b.mat());
    for (std::size_t j = 0; j < cert.v.size(); ++j) {
        if (cert.flavor == CopositiveFlavor::clclf) {
            if (cert.v[j] - va[j] < need || cert.v[j] - vb[j] < need) return false;
        } else {
            if (va[j] > cert.v[j] + slack || vb[j] > cert.v[j] + slack) return false;
            if (2.0 * cert.v[j] - va[j] - vb[j] < need) return false;
        }
    }
    return true;
}

bool verify_diagonal_cert(const NonnegMatrix& a, const NonnegMatrix& b,
                          const DiagonalCert& cert) {
    if (a.dim() != b.dim() || cert.e.size() != a.dim()) return false;
    if (!is_ggt0(cert.e) || !(cert.margin >= 0.0) || !std::isfinite(cert.margin)) return false;
    const double half = 0.5 * cert.margin;
    for (const NonnegMatrix* m : {&a, &b}) {
        Matrix s = cert.flavor == DiagonalFlavor::stein ? stein_form(*m, cert.e)
                                                        : lyapunov_form(*m, cert.e);
        const bool chol_ok = negative_definite_cholesky(s, half);
        bool eig_ok = false;
        try {
            const auto em = symmetric_eigen_max(s);
            eig_ok = em.first <= -half + 1e-13 * (1.0 + s.norm_inf());
        } catch (const NumericError&) {
            eig_ok = false;
        }
        if (!chol_ok || !eig_ok) return false;
    }
    return true;
}

double stein_lyapunov_identity_residual(const NonnegMatrix& a, const Vector& e) {
    if (e.size() != a.dim())
        throw ValidationError("stein_lyapunov_identity_residual: diagonal size mismatch");
    const std::size_t n = e.size();
    const Matrix lhs = stein_form(a, e);
    Matrix am = a.mat();
    for (std::size_t i = 0; i < n; ++i) am(i, i) -= 1.0;
    const Matrix quad = am.transposed() * (Matrix::diag(e) * am); // (A-I)^T E (A-I)
    const Matrix rhs = lyapunov_form(a, e) + quad;
    return (lhs - rhs).max_abs();
}

} // namespace rdstab
