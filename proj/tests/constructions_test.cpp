#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "patternforge/constructions.hpp"
#include "patternforge/errors.hpp"

namespace pforge {
namespace {

const TensorMatrix kIdentity2({2, 2}, {{1, 1}, {2, 2}});

// Adds cells in random order while the avoidance predicate allows it.
template <class Avoids>
TensorMatrix random_avoider(std::mt19937_64& rng, const std::vector<int>& dims, Avoids avoids, unsigned keep_one_in) {
  std::vector<Coord> cells = TensorMatrix::all_ones(dims).ones();
  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<Coord> ones;
  for (const Coord& c : cells) {
    if (rng() % keep_one_in != 0) continue;
    ones.push_back(c);
    if (!avoids(TensorMatrix(dims, ones))) ones.pop_back();
  }
  return TensorMatrix(dims, ones);
}

TEST(IdentityPermutation, Examples) {
  EXPECT_EQ(identity_permutation(2, 2).matrix(), kIdentity2);
  EXPECT_EQ(identity_permutation(1, 3).matrix(), TensorMatrix({1, 1, 1}, {{1, 1, 1}}));
  EXPECT_EQ(identity_permutation(3, 3).matrix(), TensorMatrix({3, 3, 3}, {{1, 1, 1}, {2, 2, 2}, {3, 3, 3}}));
  EXPECT_THROW(identity_permutation(2, 1), PreconditionError);
}

TEST(RandomPermutation, TrivialAndDeterministic) {
  EXPECT_EQ(random_permutation(1, 3, 99).matrix(), TensorMatrix({1, 1, 1}, {{1, 1, 1}}));
  for (std::uint64_t seed : {0ull, 7ull, 123456789ull}) {
    EXPECT_EQ(random_permutation(9, 3, seed).matrix(), random_permutation(9, 3, seed).matrix());
  }
  EXPECT_NE(random_permutation(9, 2, 1).matrix(), random_permutation(9, 2, 2).matrix());
}

TEST(RandomPermutation, PinnedOutput) {
  // Regression pin: mt19937_64 and the rejection sampler are fully specified,
  // so this must never change across platforms.
  const TensorMatrix p = random_permutation(6, 2, 42).matrix();
  EXPECT_EQ(p.ones(), (std::vector<Coord>{{1, 4}, {2, 2}, {3, 6}, {4, 3}, {5, 5}, {6, 1}}));
}

TEST(RandomPermutation, AlwaysValidAndFirstAxisIsIdentity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const PermutationTensor p = random_permutation(7, 2 + static_cast<int>(seed % 3), seed);
    EXPECT_TRUE(is_permutation(p.matrix()));
    const auto ones = p.matrix().ones();
    for (int i = 0; i < 7; ++i) EXPECT_EQ(ones[i][0], i + 1);
  }
}

TEST(RandomPermutation, MarginalIsRoughlyUniform) {
  // sigma_2(1) over 6000 draws of k=3: each value near 2000.
  std::array<int, 3> counts{};
  for (std::uint64_t seed = 0; seed < 6000; ++seed) ++counts[random_permutation(3, 2, seed).matrix().ones()[0][1] - 1];
  for (int c : counts) EXPECT_NEAR(c, 2000, 200);
}

TEST(Homo1Avoider, Examples) {
  const TensorMatrix n({2, 2}, {{1, 1}, {1, 2}, {2, 1}});
  const ConstructionResult r = homo1_avoider(2, n, 3);
  EXPECT_EQ(r.matrix.dims(), (std::vector<int>{4, 4}));
  EXPECT_EQ(r.matrix.ones_count(), 6u);
  EXPECT_EQ(r.verification, VerificationStatus::kVerified);
  EXPECT_FALSE(oracle::contains_minor(r.matrix, TensorMatrix::all_ones({3, 3})));

  const ConstructionResult same = homo1_avoider(1, n, 3);
  EXPECT_EQ(same.matrix, n);

  const ConstructionResult zero = homo1_avoider(2, TensorMatrix::zeros({1, 1}), 2);
  EXPECT_EQ(zero.matrix, TensorMatrix::zeros({2, 2}));
  EXPECT_FALSE(oracle::contains_minor(zero.matrix, TensorMatrix::all_ones({2, 2})));
}

TEST(Homo1Avoider, RejectsBadInputs) {
  EXPECT_THROW(homo1_avoider(2, TensorMatrix::all_ones({2, 2}), 3), PreconditionError);
  EXPECT_THROW(homo1_avoider(0, TensorMatrix::zeros({2, 2}), 3), PreconditionError);
  EXPECT_THROW(homo1_avoider(2, TensorMatrix::zeros({2, 2}), 1), PreconditionError);
  EXPECT_THROW(homo1_avoider(2, TensorMatrix::zeros({2}), 2), PreconditionError);
}

TEST(Homo1Avoider, SkipsVerificationOnRequest) {
  ConstructionOptions opts;
  opts.verify = false;
  EXPECT_EQ(homo1_avoider(2, TensorMatrix::zeros({2, 2}), 2, opts).verification, VerificationStatus::kSkipped);
}

TEST(Homo1Avoider, RandomInstancesAvoidByOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const int s = 1 + static_cast<int>(rng() % 3);
    const int k = 2 + static_cast<int>(rng() % 2);
    const int side = 1 + static_cast<int>(rng() % 3);
    const TensorMatrix smaller = TensorMatrix::all_ones({k - 1, k - 1});
    const TensorMatrix n = random_avoider(
        rng, {side, side}, [&](const TensorMatrix& t) { return !oracle::contains_minor(t, smaller); }, 1);
    const ConstructionResult r = homo1_avoider(s, n, k);
    EXPECT_EQ(r.matrix.ones_count(), binomial(s, 1) * n.ones_count());
    EXPECT_FALSE(oracle::contains_minor(r.matrix, TensorMatrix::all_ones({k, k})));
  }
}

TEST(ScaleAvoider, Examples) {
  const ConstructionResult r = scale_avoider(3, TensorMatrix::all_ones({1, 1}), kIdentity2);
  EXPECT_EQ(r.matrix, antidiagonal(3, 2));
  EXPECT_FALSE(oracle::contains(r.matrix, kIdentity2));

  const TensorMatrix a({2, 2}, {{1, 1}, {1, 2}, {2, 1}});
  EXPECT_EQ(scale_avoider(1, a, kIdentity2).matrix, a);

  const ConstructionResult r2 = scale_avoider(2, a, kIdentity2);
  EXPECT_EQ(r2.matrix.dims(), (std::vector<int>{4, 4}));
  EXPECT_EQ(r2.matrix.ones_count(), 6u);
  EXPECT_FALSE(oracle::contains(r2.matrix, kIdentity2));
}

TEST(ScaleAvoider, RejectsBadInputs) {
  const TensorMatrix no_corner({3, 3}, {{2, 2}, {1, 2}});
  EXPECT_THROW(scale_avoider(2, TensorMatrix::zeros({2, 2}), no_corner), PreconditionError);
  EXPECT_THROW(scale_avoider(2, kIdentity2, kIdentity2), PreconditionError);
}

TEST(ScaleAvoider, OrientationFollowsTheCorner) {
  // Anti-identity: corner (1,2) is at the top of axis 2.
  const TensorMatrix anti({2, 2}, {{1, 2}, {2, 1}});
  EXPECT_EQ(scale_orientation(anti), (std::vector<bool>{false, true}));
  const ConstructionResult r = scale_avoider(3, TensorMatrix::all_ones({1, 1}), anti);
  EXPECT_EQ(r.matrix, TensorMatrix({3, 3}, {{1, 1}, {2, 2}, {3, 3}}));
  EXPECT_FALSE(oracle::contains(r.matrix, anti));
}

// The empty second column of P can land outside the block of the other ones.
TEST(ScaleAvoider, RejectsEmptyCrossSections) {
  const TensorMatrix p({2, 2}, {{1, 1}, {2, 1}});
  const TensorMatrix a({2, 2}, {{1, 2}, {2, 1}, {2, 2}});
  ASSERT_FALSE(oracle::contains(a, p));
  EXPECT_TRUE(oracle::contains(kronecker(antidiagonal(2, 2), a), p));
  EXPECT_THROW(scale_avoider(2, a, p), PreconditionError);
}

TEST(ScaleAvoider, RandomInstancesAvoidByOracle) {
  std::mt19937_64 rng(57);
  int done = 0;
  while (done < 40) {
    const int d = 2 + static_cast<int>(rng() % 2);
    std::vector<int> pdims(d);
    for (int& x : pdims) x = 1 + static_cast<int>(rng() % 2);
    std::vector<Coord> pones;
    for (const Coord& c : TensorMatrix::all_ones(pdims).ones())
      if (rng() % 2) pones.push_back(c);
    const TensorMatrix p(pdims, pones);
    if (p.ones_count() < 2 || corner_ones(p).empty() || !(remove_empty_cross_sections(p) == p)) continue;
    const int s = 1 + static_cast<int>(rng() % (d == 2 ? 3 : 2));
    const TensorMatrix a = random_avoider(
        rng, std::vector<int>(d, 2), [&](const TensorMatrix& t) { return !oracle::contains(t, p); }, 1);
    const ConstructionResult r = scale_avoider(s, a, p);
    EXPECT_EQ(r.matrix.ones_count(), binomial(s + d - 2, d - 1) * a.ones_count());
    EXPECT_FALSE(oracle::contains(r.matrix, p));
    ++done;
  }
}

TEST(CornerReduce, HandTracedExample) {
  const PermutationTensor p(TensorMatrix({4, 4}, {{1, 2}, {2, 4}, {3, 1}, {4, 3}}));
  const GridWitness w{{{{1, 2}, {3, 4}}, {{1, 2}, {3, 4}}}};
  const CornerReduction r = corner_reduce(p, w);
  EXPECT_EQ(r.deleted_off_corner, (std::vector<Coord>{{2, 4}, {3, 1}}));
  EXPECT_EQ(r.deleted_center, (Coord{4, 3}));
  EXPECT_EQ(r.center_candidates, 1);
  EXPECT_EQ(r.reduced, TensorMatrix::all_ones({1, 1}));
  EXPECT_TRUE(r.contains_smaller_grid);
  EXPECT_TRUE(r.has_corner_one);
  EXPECT_TRUE(r.claims_hold());
}

TEST(CornerReduce, Preconditions) {
  const PermutationTensor p(TensorMatrix({4, 4}, {{1, 2}, {2, 4}, {3, 1}, {4, 3}}));
  EXPECT_THROW(corner_reduce(p, GridWitness{{{{1, 4}}, {{1, 4}}}}), PreconditionError);
  const GridWitness halves{{{{1, 2}, {3, 4}}, {{1, 2}, {3, 4}}}};
  EXPECT_THROW(corner_reduce(identity_permutation(4, 2), halves), PreconditionError);
  EXPECT_THROW(corner_reduce(p, GridWitness{{{{1, 2}, {2, 4}}, {{1, 2}, {3, 4}}}}), PreconditionError);
}

TEST(CornerReduce, ChecksAreReportedNotAssumed) {
  // Block (1,1) holds the pattern 2413, which has no corner 1-entry, and the
  // only one in block (2,2) is the one the reduction deletes.
  const PermutationTensor p(TensorMatrix({7, 7}, {{1, 2}, {2, 4}, {3, 1}, {4, 3}, {5, 6}, {6, 5}, {7, 7}}));
  const GridWitness w{{{{1, 5}, {6, 7}}, {{1, 5}, {6, 7}}}};
  ASSERT_TRUE(verify_witness(p.matrix(), TensorMatrix::all_ones({2, 2}), w));
  const CornerReduction r = corner_reduce(p, w);
  EXPECT_EQ(r.deleted_off_corner, (std::vector<Coord>{{5, 6}, {6, 5}}));
  EXPECT_EQ(r.deleted_center, (Coord{7, 7}));
  EXPECT_EQ(r.reduced, TensorMatrix({4, 4}, {{1, 2}, {2, 4}, {3, 1}, {4, 3}}));
  EXPECT_TRUE(r.contains_smaller_grid);
  EXPECT_FALSE(r.has_corner_one);
  EXPECT_FALSE(r.claims_hold());
}

TEST(CornerReduce, SeveralCenterOnesDeleteTheLeast) {
  const PermutationTensor p(TensorMatrix({5, 5}, {{1, 1}, {2, 4}, {3, 2}, {4, 3}, {5, 5}}));
  const GridWitness w{{{{1, 2}, {3, 5}}, {{1, 2}, {3, 5}}}};
  ASSERT_TRUE(verify_witness(p.matrix(), TensorMatrix::all_ones({2, 2}), w));
  const CornerReduction r = corner_reduce(p, w);
  EXPECT_EQ(r.deleted_off_corner, (std::vector<Coord>{{2, 4}, {3, 2}}));
  EXPECT_EQ(r.center_candidates, 2);
  EXPECT_EQ(r.deleted_center, (Coord{4, 3}));
  EXPECT_EQ(r.reduced, TensorMatrix({2, 2}, {{1, 1}, {2, 2}}));
  EXPECT_TRUE(r.claims_hold());
}

}  // namespace
}  // namespace pforge
