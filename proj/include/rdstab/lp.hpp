#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "rdstab/matrix.hpp"

namespace rdstab {

enum class Relation { less_equal, greater_equal, equal };
enum class Sense { minimize, maximize };
enum class LpStatus { optimal, infeasible, unbounded };

struct LpConstraint {
    Vector coeff;
    Relation rel = Relation::less_equal;
    double rhs = 0.0;
};

// A small dense linear program.  Bounds default to free variables; use
// +-infinity for absent bounds.
struct LinearProgram {
    std::size_t num_vars = 0;
    Vector objective;                     // size num_vars
    Sense sense = Sense::maximize;
    std::vector<LpConstraint> constraints;
    Vector lower, upper;                  // size num_vars each (may be empty = free)
};

struct LpOutcome {
    LpStatus status = LpStatus::infeasible;
    std::optional<Vector> solution;
    std::optional<double> objective_value;
    // Farkas certificate for infeasible problems: nonnegative multipliers over
    // canonical_leq_rows(lp) with ray^T C = 0 and ray^T d < 0.
    std::optional<Vector> farkas_ray;
};

// The problem rewritten as C x <= d: each <= constraint verbatim, each >=
// negated, each equality split into a +/- pair, then upper-bound rows, then
// lower-bound rows (negated).  Farkas rays index this list.
struct CanonRow {
    Vector coeff;
    double rhs = 0.0;
};
std::vector<CanonRow> canonical_leq_rows(const LinearProgram& lp);

// Two-phase dense-tableau primal simplex with Bland's rule.  Every optimal
// solution is re-substituted into the original constraints before being
// returned, and every Farkas ray is checked against canonical_leq_rows; an
// inconsistency raises LpError rather than returning a wrong answer.
LpOutcome solve_lp(const LinearProgram& lp, double feastol = 1e-9);

bool verify_farkas_ray(const LinearProgram& lp, const Vector& ray, double feastol = 1e-9);

// Strict/non-strict homogeneous row system: find x with
//     coeff_r . x  <  0   (strict rows)
//     coeff_r . x <=  0   (non-strict rows)
//     x_j >= lower_bounds_j
// decided through the bounded margin program
//     max eps  s.t.  coeff_r . x + eps <= 0 (strict), coeff_r . x <= 0 (rest),
//                    lower_bounds <= x <= 1e6,  sum x <= k*1e6,  |eps| <= 1e6.
// Feasible iff the optimum exceeds feastol.  The witness is scaled to
// min-entry 1 when its smallest entry is positive.
struct StrictRow {
    Vector coeff;
    bool strict = true;
};

struct StrictFeasibility {
    bool feasible = false;
    std::optional<Vector> witness;
    double margin = 0.0; // optimized eps (before witness rescaling)
};

StrictFeasibility strict_feasibility(const std::vector<StrictRow>& rows,
                                     const Vector& lower_bounds, double feastol = 1e-9);

} // namespace rdstab
