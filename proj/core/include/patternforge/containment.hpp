#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "patternforge/tensor.hpp"

namespace pforge {

enum class Verdict { kContains, kAvoids, kUndecided };

std::string to_string(Verdict v);

/// Search effort cap for the exact deciders. Running out yields
/// Verdict::kUndecided, never a guessed answer.
struct Budget {
  std::uint64_t max_nodes = 100'000'000;
};

/// Strictly increasing index maps, one per axis: axis_maps[l][i-1] is the
/// row of A that row i of P lands on (both 1-based).
struct Embedding {
  std::vector<std::vector<int>> axis_maps;
};

struct PatternDecision {
  Verdict verdict = Verdict::kUndecided;
  std::optional<Embedding> embedding;
  std::uint64_t nodes = 0;

  /// Throws UndecidedError when the budget ran out.
  bool contains() const;
};

/// Closed 1-based interval [lo, hi].
struct Interval {
  int lo = 1;
  int hi = 1;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Per-axis lists of disjoint increasing intervals. Block (j_1, ..., j_d) is
/// the product of the j-th interval on every axis.
struct GridWitness {
  std::vector<std::vector<Interval>> axes;
  friend bool operator==(const GridWitness&, const GridWitness&) = default;
};

struct MinorDecision {
  Verdict verdict = Verdict::kUndecided;
  std::optional<GridWitness> witness;
  std::uint64_t nodes = 0;

  bool contains() const;
};

/// Ordinary containment: does some submatrix of `a` become `p` after
/// turning ones into zeroes? Exact backtracking; deterministic.
PatternDecision contains_pattern(const TensorMatrix& a, const TensorMatrix& p, Budget budget = {});

/// Containment restricted to embeddings that send the lexicographically
/// last 1 of `p` onto the 1 of `a` at linear index `cell`. When `cell` is
/// the last 1 of `a`, this is exactly the set of embeddings that a cell
/// appended in lexicographic order can create.
PatternDecision contains_pattern_through(const TensorMatrix& a, const TensorMatrix& p,
                                         std::uint64_t cell, Budget budget = {});

/// Interval-minor containment via grid witnesses. A returned witness is the
/// lexicographically least one by flattened interval endpoints.
MinorDecision contains_interval_minor(const TensorMatrix& a, const TensorMatrix& b, Budget budget = {});

/// Throws StructuralError if `w` is not a list of disjoint increasing
/// intervals within `a` whose per-axis counts match the extents of `b`.
void validate_witness(const TensorMatrix& a, const TensorMatrix& b, const GridWitness& w);

/// Block scan: every block required by a 1 of `b` holds a 1 of `a`.
bool verify_witness(const TensorMatrix& a, const TensorMatrix& b, const GridWitness& w);

/// Widens a witness to a partition of each axis: every gap joins the
/// interval before it, a leading gap joins the first interval.
GridWitness extend_to_partition(const GridWitness& w, const std::vector<int>& dims);

/// For a partition witness, the 1-based block coordinate that `c` falls in.
Coord block_of(const GridWitness& partition, const Coord& c);

/// Literal breadth-first search over contraction sequences of `a`, testing
/// ordinary containment of `b` at every state. Refuses (RefusalError) when
/// `a` has more than kContractionOracleCellLimit cells.
inline constexpr std::uint64_t kContractionOracleCellLimit = 512;
bool contains_via_contraction_oracle(const TensorMatrix& a, const TensorMatrix& b);

nlohmann::json witness_to_json(const GridWitness& w);
GridWitness witness_from_json(const nlohmann::json& j);
nlohmann::json embedding_to_json(const Embedding& e);

}  // namespace pforge
