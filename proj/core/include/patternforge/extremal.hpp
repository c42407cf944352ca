#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "patternforge/rational.hpp"
#include "patternforge/tensor.hpp"

namespace pforge {

enum class ExtremalKind {
  kF,  // ordinary containment
  kM,  // interval-minor containment
};

enum class RecordStatus { kExact, kLowerBoundOnly };

std::string to_string(ExtremalKind k);
std::string to_string(RecordStatus s);
ExtremalKind parse_kind(const std::string& s);
RecordStatus parse_status(const std::string& s);

struct SearchConfig {
  std::uint64_t node_budget = 4'000'000'000ULL;
  std::chrono::duration<double> time_budget{3600.0};
  std::filesystem::path cache_dir;  // empty disables the record cache
  unsigned threads = 1;
  bool verify = true;
  // Skip branches that are not lexicographically maximal under the axis
  // reflections preserving the pattern. Never changes value or witness.
  bool symmetry_pruning = false;

  /// Identifies the search semantics for cache keys. Budgets, threads and
  /// verification are excluded: they do not change an exact answer.
  std::string fingerprint() const;
};

struct ExtremalRecord {
  ExtremalKind kind = ExtremalKind::kF;
  int n = 0;
  int d = 0;
  TensorMatrix pattern = TensorMatrix::zeros({1});
  std::uint64_t value = 0;
  TensorMatrix witness = TensorMatrix::zeros({1});
  RecordStatus status = RecordStatus::kLowerBoundOnly;
  std::chrono::milliseconds elapsed{0};
  std::uint64_t nodes = 0;
  std::string fingerprint;
};

/// Maximum number of ones in an n x ... x n matrix avoiding `p`.
ExtremalRecord f_exact(int n, const TensorMatrix& p, const SearchConfig& cfg = {});

/// Maximum number of ones in an n x ... x n matrix avoiding `b` as an
/// interval minor.
ExtremalRecord m_exact(int n, const TensorMatrix& b, const SearchConfig& cfg = {});

ExtremalRecord extremal_exact(ExtremalKind kind, int n, const TensorMatrix& pattern, const SearchConfig& cfg);

struct RatioRow {
  int n = 0;
  std::uint64_t value = 0;
  Rational ratio;  // value / n^{d-1}
  RecordStatus status = RecordStatus::kExact;
};

std::vector<RatioRow> ratio_sequence(ExtremalKind kind, const TensorMatrix& pattern, int n_first, int n_last,
                                     const SearchConfig& cfg = {});

}  // namespace pforge
