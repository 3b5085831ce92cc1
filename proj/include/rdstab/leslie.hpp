#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rdstab/matrix.hpp"
#include "rdstab/rng.hpp"

namespace rdstab {

// Coupling structures a matrix pair may exchange mass through:
//   diagonal          D = diag(d), 0 <= d_i <= min(a_ii, b_ii)
//   leslie            D nonzero only on the subdiagonal and the (n-1,n-1)
//                     corner, bounded by the matching entries of both matrices
//   leslie_single_row a Leslie-pattern D with at most one nonzero row
enum class CouplingKind { diagonal, leslie, leslie_single_row };

// A Leslie matrix: fertilities across the first row, survival rates on the
// subdiagonal, an optional terminal-class retention entry in the corner,
// zero elsewhere.
struct LeslieMatrix {
    NonnegMatrix matrix;
    Vector fertility; // first row, n entries
    Vector survival;  // subdiagonal, n-1 entries
    double corner = 0.0;
};

// Throws ValidationError naming the first off-pattern entry.
LeslieMatrix validate_leslie(const NonnegMatrix& m);

// Per-slot upper bounds for couplings admissible against both a and b.
struct CouplingBounds {
    // For diagonal: the n diagonal slots.  For the Leslie kinds: the n-1
    // subdiagonal slots followed by the corner slot.
    std::vector<std::pair<std::size_t, std::size_t>> slots;
    Vector upper;
};
CouplingBounds coupling_bounds(const NonnegMatrix& a, const NonnegMatrix& b, CouplingKind kind);

// Admissible coupling samples: a full lattice with `resolution` subdivisions
// per free slot (values i/resolution * bound), plus `random_samples` seeded
// uniform draws.  For the single-row kind the lattice and the draws are taken
// per active row, all other rows pinned to zero.
std::vector<NonnegMatrix> enumerate_coupling_class(const NonnegMatrix& a, const NonnegMatrix& b,
                                                   CouplingKind kind, std::size_t resolution,
                                                   std::uint64_t seed,
                                                   std::size_t random_samples = 0);

// One uniform admissible draw (used by the samplers and the property tests).
NonnegMatrix random_coupling(const NonnegMatrix& a, const NonnegMatrix& b, CouplingKind kind,
                             Rng& rng);

// All 2^n row selections of the pair, in binary counting order: bit i of the
// selection index picks row i from b (set) or a (clear).
struct RowSelection {
    std::uint32_t mask = 0;
    NonnegMatrix matrix;
};
std::vector<RowSelection> row_selections(const NonnegMatrix& a, const NonnegMatrix& b);

// The two Leslie envelope matrices: shared entrywise-max survival and corner,
// first row taken from a (first) respectively b (second).  For n = 1 the
// single entry is treated as the corner slot, so both are [max(a, b)].
std::pair<LeslieMatrix, LeslieMatrix> build_s1_s2(const NonnegMatrix& a, const NonnegMatrix& b);

// A strictly positive v with A v << v and B v << v, when one exists.  Such a
// vector bounds every row selection of the pair at once.
struct RightVectorWitness {
    Vector v;            // scaled to min entry 1
    double margin = 0.0; // min over rows of v_i - (Av)_i and v_i - (Bv)_i
};
std::optional<RightVectorWitness> common_right_vector(const NonnegMatrix& a,
                                                      const NonnegMatrix& b,
                                                      double feastol = 1e-9);

} // namespace rdstab
