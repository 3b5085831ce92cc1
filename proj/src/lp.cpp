#include "rdstab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdstab/errors.hpp"

namespace rdstab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kReducedCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;

void validate(const LinearProgram& lp) {
    const std::size_t k = lp.num_vars;
    if (k == 0) throw ValidationError("lp: no variables");
    if (lp.objective.size() != k) throw ValidationError("lp: objective size mismatch");
    if (!lp.lower.empty() && lp.lower.size() != k)
        throw ValidationError("lp: lower bound size mismatch");
    if (!lp.upper.empty() && lp.upper.size() != k)
        throw ValidationError("lp: upper bound size mismatch");
    for (const auto& c : lp.constraints)
        if (c.coeff.size() != k) throw ValidationError("lp: constraint size mismatch");
    for (double v : lp.objective)
        if (std::isnan(v)) throw ValidationError("lp: nan in objective");
    for (std::size_t j = 0; j < k; ++j) {
        const double lo = lp.lower.empty() ? -kInf : lp.lower[j];
        const double hi = lp.upper.empty() ? kInf : lp.upper[j];
        if (std::isnan(lo) || std::isnan(hi) || lo > hi)
            throw ValidationError("lp: bad bounds on variable " + std::to_string(j));
    }
}

// Dense simplex tableau.  Row layout: m constraint rows then the reduced-cost
// row; column layout: structural columns, then one rhs column at the end.
struct Tableau {
    std::size_t m = 0, ncols = 0; // constraint rows, structural columns
    std::vector<Vector> t;        // (m+1) x (ncols+1)
    std::vector<std::size_t> basis;

    double& at(std::size_t i, std::size_t j) { return t[i][j]; }
    double at(std::size_t i, std::size_t j) const { return t[i][j]; }
    double& rhs(std::size_t i) { return t[i][ncols]; }
    double rhs(std::size_t i) const { return t[i][ncols]; }

    void pivot(std::size_t pr, std::size_t pc) {
        Vector& prow = t[pr];
        const double pv = prow[pc];
        for (double& x : prow) x /= pv;
        prow[pc] = 1.0;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == pr) continue;
            Vector& row = t[i];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= ncols; ++j) row[j] -= f * prow[j];
            row[pc] = 0.0;
        }
        basis[pr] = pc;
    }
};

// Bland-rule primal simplex on a tableau whose cost row already holds reduced
// costs for the current basis.  `allowed` masks columns that may enter.
void run_simplex(Tableau& tb, const std::vector<bool>& allowed, bool* unbounded) {
    if (unbounded) *unbounded = false;
    const std::size_t cap = 2000 + 200 * (tb.m + tb.ncols);
    for (std::size_t iter = 0;; ++iter) {
        if (iter > cap) throw LpError("simplex iteration cap hit (cycling guard)");
        std::size_t enter = tb.ncols;
        for (std::size_t j = 0; j < tb.ncols; ++j) {
            if (!allowed[j]) continue;
            if (tb.at(tb.m, j) < -kReducedCostTol) {
                enter = j;
                break;
            }
        }
        if (enter == tb.ncols) return; // optimal
        std::size_t leave = tb.m;
        double best_ratio = kInf;
        for (std::size_t i = 0; i < tb.m; ++i) {
            const double aij = tb.at(i, enter);
            if (aij <= kPivotTol) continue;
            const double ratio = tb.rhs(i) / aij;
            if (ratio < best_ratio - 1e-12 ||
                (ratio < best_ratio + 1e-12 && (leave == tb.m || tb.basis[i] < tb.basis[leave]))) {
                best_ratio = ratio;
                leave = i;
            }
        }
        if (leave == tb.m) {
            if (unbounded) {
                *unbounded = true;
                return;
            }
            throw LpError("simplex: unbounded direction in a phase that must be bounded");
        }
        tb.pivot(leave, enter);
    }
}

struct Standardized {
    Tableau tb;            // phase-1 ready: artificial basis, phase-1 cost row
    std::size_t nvars = 0; // original variable count
    std::size_t nrows = 0; // canonical row count
    Vector sigma;          // row scale factors
    Vector flip;           // +-1 applied after scaling
    // column j of variable v: plus part v, minus part nvars+v, slack 2*nvars+r,
    // artificial 2*nvars+nrows+r
};

Standardized standardize(const std::vector<CanonRow>& rows, std::size_t nvars) {
    Standardized s;
    s.nvars = nvars;
    s.nrows = rows.size();
    const std::size_t ncols = 2 * nvars + 2 * s.nrows;
    s.tb.m = s.nrows;
    s.tb.ncols = ncols;
    s.tb.t.assign(s.nrows + 1, Vector(ncols + 1, 0.0));
    s.tb.basis.resize(s.nrows);
    s.sigma.resize(s.nrows);
    s.flip.resize(s.nrows);
    for (std::size_t r = 0; r < s.nrows; ++r) {
        double sc = std::max(1.0, std::abs(rows[r].rhs));
        for (double c : rows[r].coeff) sc = std::max(sc, std::abs(c));
        s.sigma[r] = sc;
        const double b = rows[r].rhs / sc;
        const double f = (b >= 0.0) ? 1.0 : -1.0;
        s.flip[r] = f;
        for (std::size_t v = 0; v < nvars; ++v) {
            const double c = f * rows[r].coeff[v] / sc;
            s.tb.at(r, v) = c;
            s.tb.at(r, nvars + v) = -c;
        }
        s.tb.at(r, 2 * nvars + r) = f;                    // slack
        s.tb.at(r, 2 * nvars + s.nrows + r) = 1.0;        // artificial
        s.tb.rhs(r) = f * b;
        s.tb.basis[r] = 2 * nvars + s.nrows + r;
    }
    // Phase-1 reduced costs: cost 1 on artificials, basis is all artificial.
    for (std::size_t j = 0; j <= ncols; ++j) {
        double sum = 0.0;
        for (std::size_t r = 0; r < s.nrows; ++r) sum += s.tb.at(r, j);
        const bool artificial = j >= 2 * nvars + s.nrows && j < ncols;
        s.tb.at(s.nrows, j) = (artificial ? 1.0 : 0.0) - sum;
    }
    return s;
}

} // namespace

std::vector<CanonRow> canonical_leq_rows(const LinearProgram& lp) {
    validate(lp);
    const std::size_t k = lp.num_vars;
    std::vector<CanonRow> rows;
    for (const auto& c : lp.constraints) {
        if (c.rel == Relation::less_equal || c.rel == Relation::equal)
            rows.push_back({c.coeff, c.rhs});
        if (c.rel == Relation::greater_equal || c.rel == Relation::equal) {
            CanonRow neg;
            neg.coeff.resize(k);
            for (std::size_t j = 0; j < k; ++j) neg.coeff[j] = -c.coeff[j];
            neg.rhs = -c.rhs;
            rows.push_back(std::move(neg));
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double hi = lp.upper.empty() ? kInf : lp.upper[j];
        if (std::isfinite(hi)) {
            CanonRow row;
            row.coeff.assign(k, 0.0);
            row.coeff[j] = 1.0;
            row.rhs = hi;
            rows.push_back(std::move(row));
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double lo = lp.lower.empty() ? -kInf : lp.lower[j];
        if (std::isfinite(lo)) {
            CanonRow row;
            row.coeff.assign(k, 0.0);
            row.coeff[j] = -1.0;
            row.rhs = -lo;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

bool verify_farkas_ray(const LinearProgram& lp, const Vector& ray, double feastol) {
    const auto rows = canonical_leq_rows(lp);
    if (ray.size() != rows.size()) return false;
    double ymax = 0.0;
    for (double y : ray) {
        if (y < -feastol) return false;
        ymax = std::max(ymax, std::abs(y));
    }
    if (ymax == 0.0) return false;
    double cmax = 1.0;
    for (const auto& r : rows)
        for (double c : r.coeff) cmax = std::max(cmax, std::abs(c));
    Vector combo(lp.num_vars, 0.0);
    double rhs = 0.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (ray[r] == 0.0) continue;
        for (std::size_t j = 0; j < lp.num_vars; ++j) combo[j] += ray[r] * rows[r].coeff[j];
        rhs += ray[r] * rows[r].rhs;
    }
    const double slack = 1e-6 * ymax * cmax * static_cast<double>(rows.size());
    for (double c : combo)
        if (std::abs(c) > slack) return false;
    return rhs < -feastol * ymax;
}

LpOutcome solve_lp(const LinearProgram& lp, double feastol) {
    validate(lp);
    if (!(feastol > 0.0)) throw ValidationError("lp: feastol must be positive");
    const std::size_t k = lp.num_vars;
    const auto rows = canonical_leq_rows(lp);
    Standardized s = standardize(rows, k);
    Tableau& tb = s.tb;
    const std::size_t ncols = tb.ncols;
    const std::size_t art0 = 2 * k + s.nrows;

    std::vector<bool> allow_all(ncols, true);
    run_simplex(tb, allow_all, nullptr);

    double phase1 = 0.0;
    for (std::size_t r = 0; r < s.nrows; ++r)
        if (tb.basis[r] >= art0) phase1 += tb.rhs(r);

    LpOutcome out;
    if (phase1 > feastol) {
        // Dual of the phase-1 problem certifies infeasibility.  On the scaled,
        // sign-flipped rows the multiplier of row r is pi_r = 1 - redcost of
        // its artificial; mapped back, y_r = -pi_r * flip_r / sigma_r >= 0.
        Vector ray(s.nrows, 0.0);
        for (std::size_t r = 0; r < s.nrows; ++r) {
            const double pi = 1.0 - tb.at(tb.m, art0 + r);
            ray[r] = std::max(0.0, -pi * s.flip[r] / s.sigma[r]);
        }
        double ymax = 0.0;
        for (double y : ray) ymax = std::max(ymax, y);
        if (ymax > 0.0)
            for (double& y : ray) y /= ymax;
        if (!verify_farkas_ray(lp, ray, feastol))
            throw LpError("phase-1 dual failed the Farkas check", phase1, 0.0);
        out.status = LpStatus::infeasible;
        out.farkas_ray = std::move(ray);
        return out;
    }

    // Drive leftover artificials out of the basis; drop rows that turn out to
    // be redundant (no structural pivot available).
    for (std::size_t r = tb.m; r-- > 0;) {
        if (tb.basis[r] < art0) continue;
        std::size_t pc = ncols;
        for (std::size_t j = 0; j < art0; ++j) {
            if (std::abs(tb.at(r, j)) > kPivotTol) {
                pc = j;
                break;
            }
        }
        if (pc < ncols) {
            tb.pivot(r, pc);
        } else {
            tb.t.erase(tb.t.begin() + static_cast<std::ptrdiff_t>(r));
            tb.basis.erase(tb.basis.begin() + static_cast<std::ptrdiff_t>(r));
            --tb.m;
        }
    }

    // Phase-2 reduced costs for the minimization form.
    Vector cost(ncols, 0.0);
    const double sgn = (lp.sense == Sense::maximize) ? -1.0 : 1.0;
    for (std::size_t v = 0; v < k; ++v) {
        cost[v] = sgn * lp.objective[v];
        cost[k + v] = -sgn * lp.objective[v];
    }
    for (std::size_t j = 0; j <= ncols; ++j) {
        double red = (j < ncols) ? cost[j] : 0.0;
        for (std::size_t i = 0; i < tb.m; ++i) red -= cost[tb.basis[i]] * tb.at(i, j);
        tb.at(tb.m, j) = red;
    }
    std::vector<bool> allowed(ncols, false);
    for (std::size_t j = 0; j < art0; ++j) allowed[j] = true;
    bool unbounded = false;
    run_simplex(tb, allowed, &unbounded);
    if (unbounded) {
        out.status = LpStatus::unbounded;
        return out;
    }

    Vector full(ncols, 0.0);
    for (std::size_t i = 0; i < tb.m; ++i) full[tb.basis[i]] = tb.rhs(i);
    Vector x(k, 0.0);
    for (std::size_t v = 0; v < k; ++v) x[v] = full[v] - full[k + v];

    // Re-substitution guard: the reported point must satisfy what was asked.
    double xscale = 1.0;
    for (double xv : x) xscale = std::max(xscale, std::abs(xv));
    for (const auto& c : lp.constraints) {
        const double lhs = dot(c.coeff, x);
        double cmax = 0.0;
        for (double cc : c.coeff) cmax = std::max(cmax, std::abs(cc));
        const double tol = 1e-7 * std::max(1.0, cmax) * xscale + feastol * (1.0 + std::abs(c.rhs));
        const bool ok = (c.rel == Relation::less_equal && lhs <= c.rhs + tol) ||
                        (c.rel == Relation::greater_equal && lhs >= c.rhs - tol) ||
                        (c.rel == Relation::equal && std::abs(lhs - c.rhs) <= tol);
        if (!ok) throw LpError("simplex solution failed re-substitution", lhs, lhs - c.rhs);
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double lo = lp.lower.empty() ? -kInf : lp.lower[j];
        const double hi = lp.upper.empty() ? kInf : lp.upper[j];
        const double tol = 1e-7 * xscale + feastol;
        if (x[j] < lo - tol || x[j] > hi + tol)
            throw LpError("simplex solution violates a bound", x[j], 0.0);
    }

    out.status = LpStatus::optimal;
    out.objective_value = dot(lp.objective, x);
    out.solution = std::move(x);
    return out;
}

StrictFeasibility strict_feasibility(const std::vector<StrictRow>& rows,
                                     const Vector& lower_bounds, double feastol) {
    const std::size_t k = lower_bounds.size();
    if (k == 0) throw ValidationError("strict_feasibility: no variables");
    for (const auto& r : rows)
        if (r.coeff.size() != k) throw ValidationError("strict_feasibility: row size mismatch");

    constexpr double kBox = 1e6;
    LinearProgram lp;
    lp.num_vars = k + 1; // x, then eps
    lp.sense = Sense::maximize;
    lp.objective.assign(k + 1, 0.0);
    lp.objective[k] = 1.0;
    lp.lower.assign(k + 1, 0.0);
    lp.upper.assign(k + 1, kBox);
    for (std::size_t j = 0; j < k; ++j) lp.lower[j] = lower_bounds[j];
    lp.lower[k] = -kBox;

    for (const auto& r : rows) {
        LpConstraint c;
        c.coeff.assign(k + 1, 0.0);
        std::copy(r.coeff.begin(), r.coeff.end(), c.coeff.begin());
        c.coeff[k] = r.strict ? 1.0 : 0.0;
        c.rel = Relation::less_equal;
        c.rhs = 0.0;
        lp.constraints.push_back(std::move(c));
    }
    LpConstraint sum;
    sum.coeff.assign(k + 1, 0.0);
    std::fill(sum.coeff.begin(), sum.coeff.begin() + static_cast<std::ptrdiff_t>(k), 1.0);
    sum.rel = Relation::less_equal;
    sum.rhs = static_cast<double>(k) * kBox;
    lp.constraints.push_back(std::move(sum));

    const LpOutcome res = solve_lp(lp, feastol);
    StrictFeasibility sf;
    if (res.status == LpStatus::infeasible) {
        sf.feasible = false;
        sf.margin = -kInf;
        return sf;
    }
    if (res.status != LpStatus::optimal)
        throw LpError("strict feasibility program cannot be unbounded");

    const Vector& sol = *res.solution;
    sf.margin = sol[k];
    sf.feasible = sf.margin > feastol;
    if (sf.feasible) {
        Vector x(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(k));
        double mn = kInf;
        for (double v : x) mn = std::min(mn, v);
        if (mn > feastol)
            for (double& v : x) v /= mn;
        sf.witness = std::move(x);
    }
    return sf;
}

} // namespace rdstab
