#include "patternforge/probability.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "patternforge/constructions.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/random.hpp"

namespace pforge {
namespace {

BigInt power(std::int64_t base, int exp) {
  BigInt r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

BigInt factorial(int n) {
  BigInt r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

std::int64_t lemma_threshold(int ell, int d) {
  if (ell < 2) throw PreconditionError("lemma_threshold needs l >= 2 (ln l <= 0 makes the bound vacuous)");
  if (d < 2) throw PreconditionError("lemma_threshold needs d >= 2");
  const long double bound =
      static_cast<long double>(d + 1) * std::pow(2.0L * ell, static_cast<long double>(d)) * std::log(static_cast<long double>(ell));
  return static_cast<std::int64_t>(std::ceil(bound));
}

EllOfK ell_of_k(std::int64_t k, int d) {
  if (k < 3) throw PreconditionError("ell_of_k needs k >= 3");
  if (d < 2) throw PreconditionError("ell_of_k needs d >= 2");
  EllOfK out;
  const double kd = static_cast<double>(k);
  out.inner = 0.5 * std::pow(kd / ((d + 1) * std::log(kd)), 1.0 / d) - 1.0;
  const double q = std::floor(out.inner / 20.0);
  const auto steps = q > 0 ? static_cast<std::int64_t>(q) : 0;
  out.ell = 20 * steps + 1;
  out.degenerate = out.ell == 1;
  if (!out.degenerate) {
    out.threshold = lemma_threshold(static_cast<int>(out.ell), d);
    out.premise_holds = k >= out.threshold;
  }
  return out;
}

ProbabilityChain probability_chain(std::int64_t k, int ell, int d) {
  if (d < 2) throw PreconditionError("probability_chain needs d >= 2");
  if (ell < 2 || k < 2 * static_cast<std::int64_t>(ell)) {
    throw PreconditionError("probability_chain needs k >= 2l >= 4 (got k=" + std::to_string(k) +
                            ", l=" + std::to_string(ell) + ")");
  }
  const double kd = static_cast<double>(k);
  const double l = ell;
  ProbabilityChain c;
  c.values[0] = std::pow(1.0 - std::pow(1.0 / l - 1.0 / kd, d - 1), kd / l - 1.0);
  c.values[1] = std::pow(1.0 - 1.0 / std::pow(2.0 * l, d - 1), kd / (2.0 * l));
  c.values[2] = std::exp(-kd / std::pow(2.0 * l, d));
  c.values[3] = std::pow(l, -(d + 1));
  for (int i = 0; i < 3; ++i) c.strict[i] = c.values[i] < c.values[i + 1];

  c.tail = Rational(BigInt(1), power(ell, d + 1));
  c.union_bound_exact = Rational(power(ell, d)) * c.tail == Rational(BigInt(1), BigInt(ell));
  c.tail_matches_double = std::abs(to_double(c.tail) - c.values[3]) <= 1e-15 * c.values[3];
  return c;
}

EstimateReport avoid_probability(int k, int ell, int d, std::uint64_t trials, std::uint64_t seed, unsigned threads,
                                 Budget budget) {
  if (trials < 1) throw PreconditionError("need at least one trial");
  if (k < 1 || ell < 1) throw PreconditionError("need k >= 1 and l >= 1");
  if (d < 2) throw PreconditionError("need d >= 2");

  const TensorMatrix grid = TensorMatrix::all_ones(std::vector<int>(d, ell));
  // 0 contains, 1 avoids, 2 undecided; folded in trial order below.
  std::vector<char> outcome(trials, 0);
  auto run_range = [&](std::uint64_t first, std::uint64_t step) {
    for (std::uint64_t t = first; t < trials; t += step) {
      const PermutationTensor p = random_permutation(k, d, derive_seed(seed, t));
      const Verdict v = contains_interval_minor(p.matrix(), grid, budget).verdict;
      outcome[t] = v == Verdict::kAvoids ? 1 : v == Verdict::kUndecided ? 2 : 0;
    }
  };
  const unsigned width = static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), trials));
  if (width == 1) {
    run_range(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < width; ++i) pool.emplace_back(run_range, i, width);
    for (auto& th : pool) th.join();
  }

  EstimateReport r{k, ell, d, trials, 0, 0, 0.0, 0.0, seed};
  for (char o : outcome) {
    if (o == 1) ++r.avoid_count;
    if (o == 2) ++r.undecided;
  }
  const std::uint64_t decided = trials - r.undecided;
  if (decided > 0) {
    r.estimate = static_cast<double>(r.avoid_count) / static_cast<double>(decided);
    r.radius = kZ99 * std::sqrt(r.estimate * (1.0 - r.estimate) / static_cast<double>(decided));
  }
  return r;
}

Rational converge_lower_bound(std::uint64_t value_at_m, int m, int d) {
  if (m < 1) throw PreconditionError("m must be at least 1");
  if (d < 2) throw PreconditionError("d must be at least 2");
  const BigInt denom = power(2, d - 1) * factorial(d - 1) * power(m, d - 1);
  return Rational(BigInt(value_at_m), denom);
}

Rational scaling_factor(int s, int d) {
  if (s < 1) throw PreconditionError("s must be at least 1");
  if (d < 2) throw PreconditionError("d must be at least 2");
  return Rational(power(s, d - 1), factorial(d - 1));
}

}  // namespace pforge
