#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patternforge/containment.hpp"
#include "patternforge/tensor.hpp"

namespace pforge {

/// Constructions verify their output only when it has at most this many cells.
inline constexpr std::uint64_t kDefaultVerifyCellLimit = 1u << 16;

struct ConstructionOptions {
  bool verify = true;
  std::uint64_t verify_cell_limit = kDefaultVerifyCellLimit;
  Budget budget{};
};

enum class VerificationStatus { kVerified, kSkipped, kUndecided };

std::string to_string(VerificationStatus s);

struct ConstructionResult {
  TensorMatrix matrix;
  VerificationStatus verification = VerificationStatus::kSkipped;
};

/// Ones at (i, i, ..., i).
PermutationTensor identity_permutation(int k, int d);

/// Ones at (i, s_2(i), ..., s_d(i)) for independent uniform permutations
/// s_2..s_d drawn in that order by Fisher-Yates from mt19937_64(seed).
PermutationTensor random_permutation(int k, int d, std::uint64_t seed);

/// antidiagonal(s, d) (x) n, which avoids R^{k,...,k} as an interval minor
/// whenever n avoids R^{k-1,...,k-1}. The precondition is always checked;
/// the output is re-checked when verification is on and within the cell limit.
ConstructionResult homo1_avoider(int s, const TensorMatrix& n, int k, const ConstructionOptions& opts = {});

/// Blow-up of an avoider `a` of `p` by factor s on every axis:
/// antidiagonal(s, d) (x) a, with the antidiagonal reversed on every axis
/// where the chosen corner 1-entry of `p` sits at the top of its extent.
ConstructionResult scale_avoider(int s, const TensorMatrix& a, const TensorMatrix& p,
                                 const ConstructionOptions& opts = {});

/// Reflection mask used by scale_avoider for pattern `p`; throws
/// PreconditionError when `p` has no corner 1-entry.
std::vector<bool> scale_orientation(const TensorMatrix& p);

struct CornerReduction {
  TensorMatrix reduced;
  GridWitness partition;               // witness widened to a full partition
  std::vector<Coord> deleted_off_corner;  // ones sharing a block cross section with (1,...,1)
  Coord deleted_center;                // the one removed from block (2,...,2)
  int center_candidates = 0;           // ones that were in block (2,...,2)
  bool contains_smaller_grid = false;  // reduced contains R^{l-1,...,l-1} as interval minor
  bool has_corner_one = false;
  std::optional<GridWitness> smaller_grid_witness;

  bool claims_hold() const { return contains_smaller_grid && has_corner_one; }
};

/// Deletes the ones of `p` in blocks that share a cross section with block
/// (1,...,1) (other than that block), deletes the lexicographically least
/// one in block (2,...,2), drops empty cross sections, and then checks that
/// the result contains R^{l-1,...,l-1} as an interval minor and has a
/// corner 1-entry. `w` must be a valid witness for R^{l,...,l}, l >= 2.
CornerReduction corner_reduce(const PermutationTensor& p, const GridWitness& w, Budget budget = {});

}  // namespace pforge
