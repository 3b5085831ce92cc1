#include "rdstab/leslie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rdstab/errors.hpp"
#include "rdstab/lp.hpp"

namespace rdstab {

namespace {

bool on_leslie_pattern(std::size_t n, std::size_t i, std::size_t j) {
    if (i == 0) return true;                  // fertility row
    if (i == j + 1) return true;              // survival subdiagonal
    if (i == n - 1 && j == n - 1) return true; // corner retention
    return false;
}

NonnegMatrix slots_to_matrix(std::size_t n,
                             const std::vector<std::pair<std::size_t, std::size_t>>& slots,
                             const Vector& values) {
    Matrix d(n, n);
    for (std::size_t k = 0; k < slots.size(); ++k) d(slots[k].first, slots[k].second) = values[k];
    return NonnegMatrix(std::move(d));
}

} // namespace

LeslieMatrix validate_leslie(const NonnegMatrix& m) {
    const std::size_t n = m.dim();
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (m(i, j) != 0.0 && !on_leslie_pattern(n, i, j))
                throw ValidationError("entry (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") = " + std::to_string(m(i, j)) +
                                      " breaks the Leslie pattern");
    LeslieMatrix out{m, Vector(n, 0.0), Vector(n >= 1 ? n - 1 : 0, 0.0), 0.0};
    for (std::size_t j = 0; j < n; ++j) out.fertility[j] = m(0, j);
    for (std::size_t i = 0; i + 1 < n; ++i) out.survival[i] = m(i + 1, i);
    out.corner = m(n - 1, n - 1);
    return out;
}

CouplingBounds coupling_bounds(const NonnegMatrix& a, const NonnegMatrix& b, CouplingKind kind) {
    if (a.dim() != b.dim()) throw ValidationError("coupling_bounds: dimension mismatch");
    const std::size_t n = a.dim();
    CouplingBounds cb;
    if (kind == CouplingKind::diagonal) {
        for (std::size_t i = 0; i < n; ++i) {
            cb.slots.emplace_back(i, i);
            cb.upper.push_back(std::min(a(i, i), b(i, i)));
        }
        return cb;
    }
    validate_leslie(a);
    validate_leslie(b);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cb.slots.emplace_back(i + 1, i);
        cb.upper.push_back(std::min(a(i + 1, i), b(i + 1, i)));
    }
    cb.slots.emplace_back(n - 1, n - 1);
    cb.upper.push_back(std::min(a(n - 1, n - 1), b(n - 1, n - 1)));
    return cb;
}

std::vector<NonnegMatrix> enumerate_coupling_class(const NonnegMatrix& a, const NonnegMatrix& b,
                                                   CouplingKind kind, std::size_t resolution,
                                                   std::uint64_t seed,
                                                   std::size_t random_samples) {
    if (resolution == 0) throw ValidationError("enumerate_coupling_class: resolution must be >= 1");
    const CouplingBounds cb = coupling_bounds(a, b, kind);
    const std::size_t k = cb.slots.size();
    const std::size_t n = a.dim();
    std::vector<NonnegMatrix> out;
    Rng rng(seed);

    // Groups of slots enumerated jointly; for the single-row kind each group
    // holds the slots living in one matrix row.
    std::vector<std::vector<std::size_t>> groups;
    if (kind == CouplingKind::leslie_single_row) {
        std::vector<std::vector<std::size_t>> by_row(n);
        for (std::size_t s = 0; s < k; ++s) by_row[cb.slots[s].first].push_back(s);
        for (auto& g : by_row)
            if (!g.empty()) groups.push_back(std::move(g));
    } else {
        std::vector<std::size_t> all(k);
        for (std::size_t s = 0; s < k; ++s) all[s] = s;
        groups.push_back(std::move(all));
    }

    for (const auto& group : groups) {
        std::vector<std::size_t> idx(group.size(), 0);
        bool done = false;
        while (!done) {
            Vector values(k, 0.0);
            for (std::size_t g = 0; g < group.size(); ++g) {
                // Scale by the fraction (exactly 1 at the top index) so the
                // grid never exceeds the admissible upper bound by rounding.
                const double frac =
                    static_cast<double>(idx[g]) / static_cast<double>(resolution);
                values[group[g]] = idx[g] == resolution ? cb.upper[group[g]]
                                                        : cb.upper[group[g]] * frac;
            }
            out.push_back(slots_to_matrix(n, cb.slots, values));
            std::size_t g = 0;
            for (; g < idx.size(); ++g) {
                if (idx[g] < resolution) {
                    ++idx[g];
                    for (std::size_t h = 0; h < g; ++h) idx[h] = 0;
                    break;
                }
            }
            done = (g == idx.size());
        }
    }

    for (std::size_t s = 0; s < random_samples; ++s) out.push_back(random_coupling(a, b, kind, rng));
    return out;
}

NonnegMatrix random_coupling(const NonnegMatrix& a, const NonnegMatrix& b, CouplingKind kind,
                             Rng& rng) {
    const CouplingBounds cb = coupling_bounds(a, b, kind);
    const std::size_t k = cb.slots.size();
    Vector values(k, 0.0);
    if (kind == CouplingKind::leslie_single_row) {
        const std::size_t n = a.dim();
        std::vector<std::vector<std::size_t>> by_row(n);
        for (std::size_t s = 0; s < k; ++s) by_row[cb.slots[s].first].push_back(s);
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < n; ++r)
            if (!by_row[r].empty()) rows.push_back(r);
        const auto& group = by_row[rows[rng.below(rows.size())]];
        for (std::size_t s : group) values[s] = rng.uniform() * cb.upper[s];
    } else {
        for (std::size_t s = 0; s < k; ++s) values[s] = rng.uniform() * cb.upper[s];
    }
    return slots_to_matrix(a.dim(), cb.slots, values);
}

std::vector<RowSelection> row_selections(const NonnegMatrix& a, const NonnegMatrix& b) {
    if (a.dim() != b.dim()) throw ValidationError("row_selections: dimension mismatch");
    const std::size_t n = a.dim();
    if (n > 16) throw ValidationError("row_selections: 2^n selections is impractical for n > 16");
    std::vector<RowSelection> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            const NonnegMatrix& src = (mask >> i) & 1u ? b : a;
            for (std::size_t j = 0; j < n; ++j) m(i, j) = src(i, j);
        }
        out.push_back({mask, NonnegMatrix(std::move(m))});
    }
    return out;
}

std::pair<LeslieMatrix, LeslieMatrix> build_s1_s2(const NonnegMatrix& a, const NonnegMatrix& b) {
    if (a.dim() != b.dim()) throw ValidationError("build_s1_s2: dimension mismatch");
    const LeslieMatrix la = validate_leslie(a);
    const LeslieMatrix lb = validate_leslie(b);
    const std::size_t n = a.dim();

    const auto envelope = [&](const LeslieMatrix& first_row_src) {
        Matrix m(n, n);
        if (n == 1) {
            // The single entry is the corner slot; the shared corner rule wins.
            m(0, 0) = std::max(la.corner, lb.corner);
        } else {
            for (std::size_t j = 0; j < n; ++j) m(0, j) = first_row_src.fertility[j];
            for (std::size_t i = 0; i + 1 < n; ++i)
                m(i + 1, i) = std::max(la.survival[i], lb.survival[i]);
            m(n - 1, n - 1) = std::max(la.corner, lb.corner);
        }
        return validate_leslie(NonnegMatrix(std::move(m)));
    };
    return {envelope(la), envelope(lb)};
}

std::optional<RightVectorWitness> common_right_vector(const NonnegMatrix& a, const NonnegMatrix& b,
                                                      double feastol) {
    if (a.dim() != b.dim()) throw ValidationError("common_right_vector: dimension mismatch");
    const std::size_t n = a.dim();
    std::vector<StrictRow> rows;
    for (const NonnegMatrix* m : {&a, &b}) {
        for (std::size_t i = 0; i < n; ++i) {
            Vector c(n, 0.0);
            for (std::size_t j = 0; j < n; ++j) c[j] = (*m)(i, j);
            c[i] -= 1.0;
            rows.push_back({std::move(c), true}); // (Mv)_i - v_i < 0
        }
    }
    const auto sf = strict_feasibility(rows, Vector(n, 1.0), feastol);
    if (!sf.feasible || !sf.witness) return std::nullopt;

    RightVectorWitness w;
    w.v = *sf.witness;
    const Vector av = mat_vec(a.mat(), w.v);
    const Vector bv = mat_vec(b.mat(), w.v);
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        margin = std::min({margin, w.v[i] - av[i], w.v[i] - bv[i]});
    w.margin = margin;
    if (!(w.margin > 0.0)) return std::nullopt;
    return w;
}

} // namespace rdstab
