#include "rdstab/spectral.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>

#include "rdstab/errors.hpp"
#include "rdstab/lp.hpp"

namespace rdstab {

namespace {

double sign_with(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Diagonal similarity scaling by powers of two (exact in floating point),
// equalizing row and column norms.  Classic "balanc".
void balance_in_place(Matrix& a) {
    const std::size_t n = a.rows();
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

// Householder reduction to upper Hessenberg form.
void hessenberg_in_place(Matrix& a) {
    const std::size_t n = a.rows();
    if (n < 3) return;
    Vector v(n, 0.0);
    for (std::size_t c = 0; c + 2 < n; ++c) {
        double scale = 0.0;
        for (std::size_t i = c + 1; i < n; ++i) scale = std::max(scale, std::abs(a(i, c)));
        if (scale == 0.0) continue;
        double nrm2 = 0.0;
        for (std::size_t i = c + 1; i < n; ++i) {
            v[i] = a(i, c) / scale;
            nrm2 += v[i] * v[i];
        }
        const double alpha = -sign_with(std::sqrt(nrm2), v[c + 1]);
        v[c + 1] -= alpha;
        const double vnorm2 = 2.0 * (nrm2 + std::abs(alpha) * std::abs(alpha + v[c + 1]));
        if (vnorm2 <= 0.0) continue;
        const double beta = 2.0 / vnorm2;
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = c + 1; i < n; ++i) s += v[i] * a(i, j);
            s *= beta;
            for (std::size_t i = c + 1; i < n; ++i) a(i, j) -= s * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = c + 1; j < n; ++j) s += a(i, j) * v[j];
            s *= beta;
            for (std::size_t j = c + 1; j < n; ++j) a(i, j) -= s * v[j];
        }
        a(c + 1, c) = alpha * scale;
        for (std::size_t i = c + 2; i < n; ++i) a(i, c) = 0.0;
        for (std::size_t i = c + 1; i < n; ++i) v[i] = 0.0;
    }
}

// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
// The EISPACK hqr scheme: deflation by small-subdiagonal scan, an exceptional
// shift every 10 sweeps on a stubborn block (the standard shifts can cycle
// without progress on spectra with near-equal moduli), and a total budget of
// 30 sweeps per dimension for the whole matrix.
void hqr_eigenvalues(Matrix& h, std::vector<std::complex<double>>& out) {
    const int n = static_cast<int>(h.rows());
    out.assign(n, {0.0, 0.0});
    auto a = [&h](int i, int j) -> double& {
        return h(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    };

    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));

    int nn = n - 1;
    int sweeps_left = 30 * n;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= DBL_EPSILON * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            if (l < 0) l = 0;
            double x = a(nn, nn);
            if (l == nn) {
                out[nn--] = {x + t, 0.0};
            } else {
                double y = a(nn - 1, nn - 1);
                double w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_with(z, p);
                        double r1 = x + z;
                        double r2 = (z != 0.0) ? x - w / z : r1;
                        out[nn - 1] = {r1, 0.0};
                        out[nn] = {r2, 0.0};
                    } else {
                        out[nn - 1] = {x + p, z};
                        out[nn] = {x + p, -z};
                    }
                    nn -= 2;
                } else {
                    if (sweeps_left-- <= 0)
                        throw NumericError("qr eigenvalue iteration failed to converge", x + t,
                                           std::abs(a(nn, nn - 1)));
                    if (its > 0 && its % 10 == 0) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v =
                            std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                           std::abs(a(m + 1, m + 1)));
                        if (u <= DBL_EPSILON * v) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        a(i, i - 2) = 0.0;
                        if (i != m + 2) a(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s = sign_with(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) a(k, k - 1) = -a(k, k - 1);
                        } else {
                            a(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= nn; ++j) {
                            p = a(k, j) + q * a(k + 1, j);
                            if (k != nn - 1) {
                                p += r * a(k + 2, j);
                                a(k + 2, j) -= p * z;
                            }
                            a(k + 1, j) -= p * y;
                            a(k, j) -= p * x;
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            p = x * a(i, k) + y * a(i, k + 1);
                            if (k != nn - 1) {
                                p += z * a(i, k + 2);
                                a(i, k + 2) -= p * r;
                            }
                            a(i, k + 1) -= p * q;
                            a(i, k) -= p;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
}

struct LuFactors {
    Matrix m;
    std::vector<std::size_t> piv;
    double min_pivot = std::numeric_limits<double>::infinity();
    bool singular = false;
};

LuFactors lu_factor(Matrix a) {
    const std::size_t n = a.rows();
    LuFactors f{std::move(a), std::vector<std::size_t>(n), std::numeric_limits<double>::infinity(), false};
    Matrix& m = f.m;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        f.piv[k] = p;
        if (p != k)
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
        const double pivot = m(k, k);
        if (pivot == 0.0) {
            f.singular = true;
            f.min_pivot = 0.0;
            return f;
        }
        f.min_pivot = std::min(f.min_pivot, std::abs(pivot));
        for (std::size_t i = k + 1; i < n; ++i) {
            m(i, k) /= pivot;
            const double lik = m(i, k);
            if (lik == 0.0) continue;
            for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= lik * m(k, j);
        }
    }
    return f;
}

Vector lu_apply(const LuFactors& f, Vector b) {
    const std::size_t n = f.m.rows();
    for (std::size_t k = 0; k < n; ++k)
        if (f.piv[k] != k) std::swap(b[k], b[f.piv[k]]);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) b[i] -= f.m(i, j) * b[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) b[i] -= f.m(i, j) * b[j];
        b[i] /= f.m(i, i);
    }
    return b;
}

// Perron vector of an irreducible nonnegative matrix by inverse iteration
// with the shifted matrix a - (rho + delta) I.  The resolvent at a shift just
// above rho is entrywise positive, so iterates (after a sign flip) stay
// positive and align with the Perron direction at rate ~delta.
struct PerronOutcome {
    Vector x;
    double residual;
};

std::optional<PerronOutcome> perron_inverse_iteration(const NonnegMatrix& a, double rho,
                                                      double tol) {
    const std::size_t n = a.dim();
    if (n == 1) return PerronOutcome{{1.0}, 0.0};
    const double deltas[] = {1e-8, 1e-11, 1e-5};
    for (double rel : deltas) {
        const double delta = rel * (1.0 + rho);
        Matrix shifted = a.mat();
        for (std::size_t i = 0; i < n; ++i) shifted(i, i) -= rho + delta;
        LuFactors lu = lu_factor(std::move(shifted));
        if (lu.singular) continue;
        Vector x(n, 1.0 / static_cast<double>(n));
        for (int it = 0; it < 25; ++it) {
            Vector y = lu_apply(lu, x);
            double mx = 0.0;
            for (double& yi : y) {
                yi = -yi;
                mx = std::max(mx, yi);
            }
            if (!(mx > 0.0) || !std::isfinite(mx)) break;
            bool positive = true;
            for (double& yi : y) {
                yi /= mx;
                if (!(yi > 0.0)) positive = false;
            }
            if (positive) {
                const Vector ay = mat_vec(a.mat(), y);
                double res = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    res = std::max(res, std::abs(ay[i] - rho * y[i]));
                if (res <= tol * (1.0 + rho)) return PerronOutcome{std::move(y), res};
            }
            for (double& yi : y) yi = std::max(yi, 1e-300);
            x = std::move(y);
        }
    }
    return std::nullopt;
}

} // namespace

std::vector<std::complex<double>> eigenvalues(Matrix a) {
    if (a.rows() != a.cols()) throw ValidationError("eigenvalues: matrix must be square");
    if (a.rows() == 0) throw ValidationError("eigenvalues: empty matrix");
    balance_in_place(a);
    hessenberg_in_place(a);
    std::vector<std::complex<double>> out;
    hqr_eigenvalues(a, out);
    return out;
}

double spectral_radius_squaring(const Matrix& a, double tol, std::size_t max_squarings) {
    if (a.rows() != a.cols()) throw ValidationError("spectral_radius_squaring: square input required");
    if (a.rows() == 0) throw ValidationError("spectral_radius_squaring: empty matrix");
    if (!(tol > 0.0)) throw ValidationError("spectral_radius_squaring: tol must be positive");

    Matrix b = a;
    double log_scale = 0.0; // log |A^(2^k)| == log_scale + log |b|
    double pow2 = 1.0;      // 2^k
    double prev_est = std::numeric_limits<double>::infinity();
    double est = 0.0;
    int calm_steps = 0;
    for (std::size_t k = 0; k <= max_squarings; ++k) {
        const double nrm = b.norm_inf();
        if (nrm == 0.0) return 0.0;
        est = std::exp((log_scale + std::log(nrm)) / pow2);
        if (k > 0) {
            const double gap = std::abs(prev_est - est);
            calm_steps = (gap <= 0.02 * tol * (1.0 + est)) ? calm_steps + 1 : 0;
            if (calm_steps >= 2 && k >= 6) return est;
        }
        prev_est = est;
        if (k == max_squarings) break;
        Matrix scaled = b;
        scaled *= 1.0 / nrm;
        b = scaled * scaled;
        log_scale = 2.0 * (log_scale + std::log(nrm));
        pow2 *= 2.0;
    }
    throw NumericError("normalized squaring did not settle", est, std::abs(prev_est - est));
}

std::pair<double, Vector> symmetric_eigen_max(const Matrix& s_in, double tol) {
    if (s_in.rows() != s_in.cols()) throw ValidationError("symmetric_eigen_max: square input required");
    const std::size_t n = s_in.rows();
    if (n == 0) throw ValidationError("symmetric_eigen_max: empty matrix");
    const double scale = s_in.norm_inf();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(s_in(i, j) - s_in(j, i)) > 1e-12 * std::max(1.0, scale))
                throw ValidationError("symmetric_eigen_max: input is not symmetric");

    Matrix a = s_in;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            a(i, j) = a(j, i) = v;
        }

    Matrix v = Matrix::identity(n);
    if (n > 1) {
        const double stop = 1e-16 * std::max(1.0, scale);
        for (int sweep = 0; sweep < 100; ++sweep) {
            double off = 0.0;
            for (std::size_t p = 0; p < n; ++p)
                for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
            if (off <= stop) break;
            if (sweep == 99)
                throw NumericError("jacobi sweep limit reached", a(0, 0), off);
            for (std::size_t p = 0; p < n; ++p) {
                for (std::size_t q = p + 1; q < n; ++q) {
                    const double apq = a(p, q);
                    if (std::abs(apq) <= stop * 1e-2) continue;
                    const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                    double t;
                    const double denom = std::abs(theta) + std::sqrt(theta * theta + 1.0);
                    t = (theta >= 0.0 ? 1.0 : -1.0) / denom;
                    if (!std::isfinite(denom)) t = 1.0 / (2.0 * theta);
                    const double c = 1.0 / std::sqrt(t * t + 1.0);
                    const double s = t * c;
                    const double app = a(p, p), aqq = a(q, q);
                    a(p, p) = app - t * apq;
                    a(q, q) = aqq + t * apq;
                    a(p, q) = a(q, p) = 0.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        if (i != p && i != q) {
                            const double aip = a(i, p), aiq = a(i, q);
                            a(i, p) = a(p, i) = c * aip - s * aiq;
                            a(i, q) = a(q, i) = s * aip + c * aiq;
                        }
                        const double vip = v(i, p), viq = v(i, q);
                        v(i, p) = c * vip - s * viq;
                        v(i, q) = s * vip + c * viq;
                    }
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (a(i, i) > a(best, best)) best = i;
    const double lambda = a(best, best);
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = v(i, best);

    Matrix sym = s_in;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double w = 0.5 * (sym(i, j) + sym(j, i));
            sym(i, j) = sym(j, i) = w;
        }
    const Vector sx = mat_vec(sym, x);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) res = std::max(res, std::abs(sx[i] - lambda * x[i]));
    if (res > tol * (1.0 + scale))
        throw NumericError("jacobi eigenpair residual too large", lambda, res);
    return {lambda, std::move(x)};
}

SpectralResult spectral_radius(const NonnegMatrix& a, double tol, SpectralMethod method) {
    if (!(tol > 0.0)) throw ValidationError("spectral_radius: tol must be positive");
    SpectralResult result;
    double rho_qr = -1.0, rho_sq = -1.0;
    if (method == SpectralMethod::automatic || method == SpectralMethod::qr) {
        double m = 0.0;
        for (const auto& lam : eigenvalues(a.mat())) m = std::max(m, std::abs(lam));
        rho_qr = m;
    }
    if (method == SpectralMethod::automatic || method == SpectralMethod::power_squaring)
        rho_sq = spectral_radius_squaring(a.mat(), tol);

    if (method == SpectralMethod::automatic) {
        const double gap = std::abs(rho_qr - rho_sq);
        const double band = 10.0 * tol * (1.0 + std::max(rho_qr, rho_sq));
        if (gap > band)
            throw NumericError("spectral radius estimates disagree: qr=" + std::to_string(rho_qr) +
                                   " squaring=" + std::to_string(rho_sq),
                               rho_qr, gap);
        result.rho = rho_qr;
        result.method = SpectralMethod::qr;
        result.residual = gap;
    } else if (method == SpectralMethod::qr) {
        result.rho = rho_qr;
        result.method = SpectralMethod::qr;
    } else {
        result.rho = rho_sq;
        result.method = SpectralMethod::power_squaring;
    }

    if (is_irreducible(a)) {
        auto perron = perron_inverse_iteration(a, result.rho, tol);
        if (!perron)
            throw NumericError("perron vector iteration failed", result.rho,
                               std::numeric_limits<double>::infinity());
        result.perron_vector = std::move(perron->x);
        result.residual = std::max(result.residual, perron->residual);
    }
    return result;
}

bool is_schur(const NonnegMatrix& a, double margin) {
    if (!(margin >= 0.0)) throw ValidationError("is_schur: margin must be nonnegative");
    return spectral_radius(a).rho < 1.0 - margin;
}

bool no_supporting_vector(const NonnegMatrix& a, double feastol) {
    const std::size_t n = a.dim();
    LinearProgram lp;
    lp.num_vars = n;
    lp.objective.assign(n, 0.0);
    lp.sense = Sense::maximize;
    lp.lower.assign(n, 0.0);
    lp.upper.assign(n, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < n; ++j) {
        LpConstraint row;
        row.coeff.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) row.coeff[i] = a(i, j);
        row.coeff[j] -= 1.0;
        row.rel = Relation::greater_equal;
        row.rhs = 0.0;
        lp.constraints.push_back(std::move(row));
    }
    LpConstraint norm;
    norm.coeff.assign(n, 1.0);
    norm.rel = Relation::equal;
    norm.rhs = 1.0;
    lp.constraints.push_back(std::move(norm));
    return solve_lp(lp, feastol).status == LpStatus::infeasible;
}

Vector lu_solve(Matrix a, Vector b, double singular_tol) {
    if (a.rows() != a.cols() || a.rows() != b.size())
        throw ValidationError("lu_solve: dimension mismatch");
    const double scale = std::max(1.0, a.max_abs());
    LuFactors f = lu_factor(std::move(a));
    if (f.singular || f.min_pivot < singular_tol * scale)
        throw NumericError("lu_solve: singular matrix", 0.0, f.min_pivot);
    return lu_apply(f, std::move(b));
}

} // namespace rdstab
