#include "patternforge/constructions.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "patternforge/errors.hpp"
#include "patternforge/random.hpp"

namespace pforge {
namespace {

void require_dimension(int d) {
  if (d < 2) throw PreconditionError("dimension must be at least 2");
}

std::string describe(const Embedding& e) {
  std::ostringstream os;
  for (std::size_t i = 0; i < e.axis_maps.size(); ++i) {
    os << (i ? "; " : "") << "axis " << i + 1 << ":";
    for (int x : e.axis_maps[i]) os << ' ' << x;
  }
  return os.str();
}

}  // namespace

std::string to_string(VerificationStatus s) {
  switch (s) {
    case VerificationStatus::kVerified: return "verified";
    case VerificationStatus::kSkipped: return "skipped";
    case VerificationStatus::kUndecided: return "undecided";
  }
  return "skipped";
}

PermutationTensor identity_permutation(int k, int d) {
  if (k < 1) throw PreconditionError("k must be at least 1");
  require_dimension(d);
  std::vector<Coord> ones;
  for (int i = 1; i <= k; ++i) ones.emplace_back(d, i);
  return PermutationTensor(TensorMatrix(std::vector<int>(d, k), ones));
}

PermutationTensor random_permutation(int k, int d, std::uint64_t seed) {
  if (k < 1) throw PreconditionError("k must be at least 1");
  require_dimension(d);
  std::mt19937_64 rng(seed);
  std::vector<std::vector<int>> sigma(d - 1);
  for (auto& s : sigma) s = fisher_yates(rng, k);
  std::vector<Coord> ones(k, Coord(d));
  for (int i = 0; i < k; ++i) {
    ones[i][0] = i + 1;
    for (int a = 1; a < d; ++a) ones[i][a] = sigma[a - 1][i] + 1;
  }
  return PermutationTensor(TensorMatrix(std::vector<int>(d, k), ones));
}

ConstructionResult homo1_avoider(int s, const TensorMatrix& n, int k, const ConstructionOptions& opts) {
  if (s < 1) throw PreconditionError("s must be at least 1");
  if (k < 2) throw PreconditionError("k must be at least 2");
  const int d = n.dimension();
  require_dimension(d);

  const TensorMatrix smaller = TensorMatrix::all_ones(std::vector<int>(d, k - 1));
  const MinorDecision pre = contains_interval_minor(n, smaller, opts.budget);
  if (pre.verdict == Verdict::kUndecided) {
    throw UndecidedError("could not decide whether N avoids R^{k-1,...,k-1} within budget");
  }
  if (pre.verdict == Verdict::kContains) {
    throw PreconditionError("N contains R^{" + std::to_string(k - 1) + ",...} as an interval minor");
  }

  ConstructionResult out{kronecker(antidiagonal(s, d), n), VerificationStatus::kSkipped};
  if (out.matrix.ones_count() != binomial(s + d - 2, d - 1) * n.ones_count()) {
    throw VerificationFailure("homo1_avoider: ones count differs from binomial(s+d-2,d-1)*ones(N)");
  }
  if (opts.verify && out.matrix.cell_count() <= opts.verify_cell_limit) {
    const TensorMatrix grid = TensorMatrix::all_ones(std::vector<int>(d, k));
    const MinorDecision post = contains_interval_minor(out.matrix, grid, opts.budget);
    if (post.verdict == Verdict::kContains) {
      throw VerificationFailure("homo1_avoider output contains R^{" + std::to_string(k) +
                                ",...} as an interval minor");
    }
    out.verification =
        post.verdict == Verdict::kAvoids ? VerificationStatus::kVerified : VerificationStatus::kUndecided;
  }
  return out;
}

std::vector<bool> scale_orientation(const TensorMatrix& p) {
  const std::vector<Coord> corners = corner_ones(p);
  if (corners.empty()) throw PreconditionError("pattern has no corner 1-entry");
  // With the corner at the low end of every axis the plain antidiagonal
  // works: every other 1 of a copy lands in a block that is >= on each
  // axis, and blocks on the hyperplane are pairwise incomparable.
  const Coord& c = corners.front();
  std::vector<bool> mask(p.dimension());
  for (int i = 0; i < p.dimension(); ++i) mask[i] = c[i] != 1;
  return mask;
}

ConstructionResult scale_avoider(int s, const TensorMatrix& a, const TensorMatrix& p,
                                 const ConstructionOptions& opts) {
  if (s < 1) throw PreconditionError("s must be at least 1");
  const int d = p.dimension();
  require_dimension(d);
  if (a.dimension() != d) throw StructuralError("avoider and pattern differ in dimension");
  const std::vector<bool> mask = scale_orientation(p);
  // An empty cross section of P may map outside the block holding the rest
  // of a copy, so the block argument needs every cross section occupied.
  if (p.is_zero() || !(remove_empty_cross_sections(p) == p)) {
    throw PreconditionError("pattern has an empty cross section");
  }

  const PatternDecision pre = contains_pattern(a, p, opts.budget);
  if (pre.verdict == Verdict::kUndecided) throw UndecidedError("could not decide whether A avoids P");
  if (pre.verdict == Verdict::kContains) {
    throw PreconditionError("A contains P (" + describe(*pre.embedding) + ")");
  }

  ConstructionResult out{kronecker(reflected_antidiagonal(s, d, mask), a), VerificationStatus::kSkipped};
  if (opts.verify && out.matrix.cell_count() <= opts.verify_cell_limit) {
    const PatternDecision post = contains_pattern(out.matrix, p, opts.budget);
    if (post.verdict == Verdict::kContains) {
      throw VerificationFailure("scale_avoider output contains P via embedding " + describe(*post.embedding));
    }
    out.verification =
        post.verdict == Verdict::kAvoids ? VerificationStatus::kVerified : VerificationStatus::kUndecided;
  }
  return out;
}

CornerReduction corner_reduce(const PermutationTensor& perm, const GridWitness& w, Budget budget) {
  const TensorMatrix& p = perm.matrix();
  const int d = p.dimension();
  require_dimension(d);
  if (static_cast<int>(w.axes.size()) != d || w.axes.front().empty()) {
    throw PreconditionError("witness arity does not match the permutation");
  }
  const int ell = static_cast<int>(w.axes.front().size());
  for (const auto& ivs : w.axes) {
    if (static_cast<int>(ivs.size()) != ell) throw PreconditionError("witness is not for a cubic R^{l,...,l}");
  }
  if (ell < 2) throw PreconditionError("corner reduction needs l >= 2");

  const TensorMatrix grid = TensorMatrix::all_ones(std::vector<int>(d, ell));
  try {
    if (!verify_witness(p, grid, w)) throw PreconditionError("witness has an empty block");
  } catch (const StructuralError& e) {
    throw PreconditionError(std::string("invalid witness: ") + e.what());
  }

  CornerReduction out{p, extend_to_partition(w, p.dims()), {}, {}, 0, false, false, std::nullopt};
  std::vector<Coord> kept;
  std::vector<Coord> center;
  for (const Coord& c : p.ones()) {
    const Coord block = block_of(out.partition, c);
    const bool is_t = std::all_of(block.begin(), block.end(), [](int b) { return b == 1; });
    const bool touches_t = std::any_of(block.begin(), block.end(), [](int b) { return b == 1; });
    if (touches_t && !is_t) {
      out.deleted_off_corner.push_back(c);
      continue;
    }
    if (std::all_of(block.begin(), block.end(), [](int b) { return b == 2; })) center.push_back(c);
    kept.push_back(c);
  }
  // p.ones() is lexicographic, so center.front() is the least.
  out.center_candidates = static_cast<int>(center.size());
  out.deleted_center = center.front();
  kept.erase(std::find(kept.begin(), kept.end(), out.deleted_center));

  out.reduced = remove_empty_cross_sections(TensorMatrix(p.dims(), kept));
  const TensorMatrix smaller = TensorMatrix::all_ones(std::vector<int>(d, ell - 1));
  const MinorDecision check = contains_interval_minor(out.reduced, smaller, budget);
  out.contains_smaller_grid = check.verdict == Verdict::kContains;
  out.smaller_grid_witness = check.witness;
  out.has_corner_one = !corner_ones(out.reduced).empty();
  return out;
}

}  // namespace pforge
