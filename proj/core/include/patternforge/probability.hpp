#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "patternforge/containment.hpp"
#include "patternforge/rational.hpp"

namespace pforge {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Smallest integer k with k >= (d+1) (2l)^d ln l. Requires l >= 2, d >= 2.
std::int64_t lemma_threshold(int ell, int d);

struct EllOfK {
  std::int64_t ell = 1;
  double inner = 0;          // (1/2) (k / ((d+1) ln k))^{1/d} - 1
  bool degenerate = false;   // floor clamped to 0, so l = 1
  std::int64_t threshold = 0;  // lemma_threshold(l, d) when l >= 2
  bool premise_holds = false;  // k >= threshold
};

/// l = 20 floor(((1/2)(k/((d+1) ln k))^{1/d} - 1) / 20) + 1, with the floor
/// clamped at 0. Requires k >= 3, d >= 2.
EllOfK ell_of_k(std::int64_t k, int d);

struct ProbabilityChain {
  // (1-(1/l-1/k)^{d-1})^{k/l-1}, (1-1/(2l)^{d-1})^{k/(2l)}, e^{-k/(2l)^d}, l^{-(d+1)}
  std::array<double, 4> values{};
  std::array<bool, 3> strict{};
  Rational tail;             // l^{-(d+1)} exactly
  bool union_bound_exact = false;  // l^d * l^{-(d+1)} == 1/l
  bool tail_matches_double = false;

  bool ordered() const { return strict[0] && strict[1] && strict[2]; }
};

/// Requires k >= 2l >= 4 and d >= 2; throws PreconditionError otherwise.
ProbabilityChain probability_chain(std::int64_t k, int ell, int d);

struct EstimateReport {
  int k = 0;
  int ell = 0;
  int d = 0;
  std::uint64_t trials = 0;
  std::uint64_t avoid_count = 0;
  std::uint64_t undecided = 0;
  double estimate = 0;  // avoid_count / decided trials
  double radius = 0;    // 99% normal-approximation half width
  std::uint64_t seed = 0;

  double upper() const { return estimate + radius; }
};

/// Monte Carlo estimate of the probability that a random d-dimensional k x
/// ... x k permutation tensor avoids R^{l,...,l} as an interval minor. Trial
/// i uses random_permutation(k, d, derive_seed(seed, i)); the report does not
/// depend on `threads`.
EstimateReport avoid_probability(int k, int ell, int d, std::uint64_t trials, std::uint64_t seed,
                                 unsigned threads = 1, Budget budget = {});

/// (1 / (2^{d-1} (d-1)!)) * value / m^{d-1}, exactly.
Rational converge_lower_bound(std::uint64_t value_at_m, int m, int d);

/// s^{d-1} / (d-1)!, exactly.
Rational scaling_factor(int s, int d);

}  // namespace pforge
