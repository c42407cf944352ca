#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "patternforge/constructions.hpp"
#include "patternforge/containment.hpp"
#include "patternforge/errors.hpp"

namespace pforge {
namespace {

const TensorMatrix kIdentity2({2, 2}, {{1, 1}, {2, 2}});
const TensorMatrix kAnti2({2, 2}, {{1, 2}, {2, 1}});
const TensorMatrix kR22 = TensorMatrix::all_ones({2, 2});

TensorMatrix random_tensor(std::mt19937_64& rng, const std::vector<int>& dims, unsigned one_in) {
  std::vector<Coord> ones;
  for (const Coord& c : TensorMatrix::all_ones(dims).ones()) {
    if (rng() % one_in == 0) ones.push_back(c);
  }
  return TensorMatrix(dims, ones);
}

// Every tensor with extents in 1..max_side on both axes.
std::vector<TensorMatrix> all_2d_upto(int max_side) {
  std::vector<TensorMatrix> out;
  for (int r = 1; r <= max_side; ++r)
    for (int c = 1; c <= max_side; ++c)
      for (TensorMatrix& t : oracle::all_tensors({r, c})) out.push_back(std::move(t));
  return out;
}

bool embedding_valid(const TensorMatrix& a, const TensorMatrix& p, const Embedding& e) {
  for (int i = 0; i < p.dimension(); ++i) {
    const auto& m = e.axis_maps[i];
    if (static_cast<int>(m.size()) != p.dims()[i]) return false;
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j] < 1 || m[j] > a.dims()[i] || (j > 0 && m[j] <= m[j - 1])) return false;
    }
  }
  for (const Coord& c : p.ones()) {
    Coord x(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) x[i] = e.axis_maps[i][c[i] - 1];
    if (!a.at(x)) return false;
  }
  return true;
}

TEST(ContainsPattern, Examples) {
  EXPECT_TRUE(contains_pattern(TensorMatrix::all_ones({2, 2}), kIdentity2).contains());
  EXPECT_FALSE(contains_pattern(antidiagonal(3, 2), kIdentity2).contains());
  EXPECT_TRUE(contains_pattern(TensorMatrix({3, 4}, {{2, 3}}), TensorMatrix::all_ones({1, 1})).contains());
  EXPECT_FALSE(contains_pattern(TensorMatrix::zeros({3, 3}), TensorMatrix::all_ones({1, 1})).contains());
  EXPECT_FALSE(contains_pattern(TensorMatrix::all_ones({2, 2}), TensorMatrix::all_ones({3, 1})).contains());
  EXPECT_THROW(contains_pattern(kIdentity2, TensorMatrix::all_ones({1})), StructuralError);
}

TEST(ContainsPattern, EmbeddingLeavesRoomForEmptyRows) {
  // P has an empty middle row; A must supply three distinct rows.
  const TensorMatrix p({3, 1}, {{1, 1}, {3, 1}});
  EXPECT_FALSE(contains_pattern(TensorMatrix::all_ones({2, 1}), p).contains());
  const TensorMatrix a({4, 1}, {{1, 1}, {2, 1}, {4, 1}});
  const PatternDecision r = contains_pattern(a, p);
  ASSERT_TRUE(r.contains());
  EXPECT_TRUE(embedding_valid(a, p, *r.embedding));
}

TEST(ContainsPattern, BudgetExhaustionIsUndecided) {
  std::mt19937_64 rng(5);
  const TensorMatrix a = random_tensor(rng, {8, 8}, 2);
  const TensorMatrix p = identity_permutation(7, 2).matrix();
  const PatternDecision r = contains_pattern(a, p, Budget{3});
  EXPECT_EQ(r.verdict, Verdict::kUndecided);
  EXPECT_THROW((void)r.contains(), UndecidedError);
}

TEST(ContainsPattern, AgreesWithOracleOnSmallTensors) {
  const auto as = all_2d_upto(3);
  const auto ps = all_2d_upto(2);
  for (const TensorMatrix& a : as) {
    for (const TensorMatrix& p : ps) {
      const PatternDecision r = contains_pattern(a, p);
      ASSERT_EQ(r.contains(), oracle::contains(a, p));
      if (r.contains()) ASSERT_TRUE(embedding_valid(a, p, *r.embedding));
    }
  }
}

TEST(ContainsPattern, AgreesWithOracleIn3d) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const TensorMatrix a = random_tensor(rng, {3, 3, 3}, 3);
    const TensorMatrix p = random_tensor(rng, {2, 2, 2}, 3);
    const PatternDecision r = contains_pattern(a, p);
    ASSERT_EQ(r.contains(), oracle::contains(a, p));
    if (r.contains()) ASSERT_TRUE(embedding_valid(a, p, *r.embedding));
  }
}

TEST(ContainsPatternThrough, MatchesNewEmbeddingsOnly) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const TensorMatrix a = random_tensor(rng, {4, 4}, 3);
    if (a.is_zero()) continue;
    const std::uint64_t last = a.linear_ones().back();
    std::vector<std::uint64_t> rest(a.linear_ones().begin(), a.linear_ones().end() - 1);
    const TensorMatrix before = TensorMatrix::from_linear(a.dims(), rest);
    for (const TensorMatrix& p : {kIdentity2, kAnti2, TensorMatrix({2, 3}, {{1, 1}, {2, 3}, {1, 2}})}) {
      if (oracle::contains(before, p)) continue;
      ASSERT_EQ(contains_pattern_through(a, p, last).contains(), oracle::contains(a, p));
    }
  }
}

TEST(ContainsPattern, MonotoneUnderAddingOnes) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const TensorMatrix a = random_tensor(rng, {4, 4}, 3);
    std::vector<Coord> more = a.ones();
    for (const Coord& c : TensorMatrix::all_ones({4, 4}).ones()) {
      if (!a.at(c) && rng() % 3 == 0) more.push_back(c);
    }
    const TensorMatrix bigger({4, 4}, more);
    const TensorMatrix p = random_tensor(rng, {2, 3}, 2);
    if (contains_pattern(a, p).contains()) EXPECT_TRUE(contains_pattern(bigger, p).contains());
    if (contains_interval_minor(a, p).contains()) EXPECT_TRUE(contains_interval_minor(bigger, p).contains());
  }
}

TEST(IntervalMinor, Examples) {
  const TensorMatrix a({3, 4}, {{2, 2}});
  const MinorDecision r1 = contains_interval_minor(a, TensorMatrix::all_ones({1, 1}));
  ASSERT_TRUE(r1.contains());
  EXPECT_TRUE(verify_witness(a, TensorMatrix::all_ones({1, 1}), *r1.witness));

  const TensorMatrix corners({3, 3}, {{1, 1}, {1, 3}, {3, 1}, {3, 3}});
  const MinorDecision r2 = contains_interval_minor(corners, kR22);
  ASSERT_TRUE(r2.contains());
  // Lexicographically least by flattened endpoints; the oracle enumerates
  // every interval system in that order.
  const GridWitness expected{{{{1, 1}, {2, 3}}, {{1, 1}, {2, 3}}}};
  EXPECT_EQ(*r2.witness, expected);
  EXPECT_EQ(*r2.witness, *oracle::minor_witness(corners, kR22));
  const GridWitness tight{{{{1, 1}, {3, 3}}, {{1, 1}, {3, 3}}}};
  EXPECT_TRUE(verify_witness(corners, kR22, tight));

  EXPECT_FALSE(contains_interval_minor(antidiagonal(3, 2), kR22).contains());
}

TEST(IntervalMinor, WitnessIsLexLeastAndMatchesOracle) {
  const auto as = all_2d_upto(3);
  const auto bs = all_2d_upto(2);
  for (const TensorMatrix& a : as) {
    for (const TensorMatrix& b : bs) {
      const MinorDecision r = contains_interval_minor(a, b);
      const auto expected = oracle::minor_witness(a, b);
      ASSERT_EQ(r.contains(), expected.has_value());
      if (expected) {
        ASSERT_EQ(*r.witness, *expected);
        ASSERT_TRUE(verify_witness(a, b, *r.witness));
      }
    }
  }
}

TEST(IntervalMinor, AgreesWithOracleIn3dAndOnRectangles) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 80; ++trial) {
    const TensorMatrix a = random_tensor(rng, {3, 4, 3}, 3);
    const TensorMatrix b = random_tensor(rng, {2, 2, 2}, 2);
    const MinorDecision r = contains_interval_minor(a, b);
    const auto expected = oracle::minor_witness(a, b);
    ASSERT_EQ(r.contains(), expected.has_value());
    if (expected) ASSERT_EQ(*r.witness, *expected);
  }
  for (int trial = 0; trial < 80; ++trial) {
    const TensorMatrix a = random_tensor(rng, {5, 6}, 2);
    const TensorMatrix b = random_tensor(rng, {3, 2}, 2);
    const auto expected = oracle::minor_witness(a, b);
    const MinorDecision r = contains_interval_minor(a, b);
    ASSERT_EQ(r.contains(), expected.has_value());
    if (expected) ASSERT_EQ(*r.witness, *expected);
  }
}

TEST(IntervalMinor, ZeroPatternNeedsOnlyRoom) {
  const MinorDecision r = contains_interval_minor(TensorMatrix::zeros({3, 2}), TensorMatrix::zeros({2, 2}));
  ASSERT_TRUE(r.contains());
  EXPECT_EQ(*r.witness, (GridWitness{{{{1, 1}, {2, 2}}, {{1, 1}, {2, 2}}}}));
  EXPECT_FALSE(contains_interval_minor(TensorMatrix::zeros({1, 2}), TensorMatrix::zeros({2, 2})).contains());
}

TEST(IntervalMinor, OneDimensional) {
  const TensorMatrix a({5}, {{2}, {4}});
  const MinorDecision r = contains_interval_minor(a, TensorMatrix::all_ones({2}));
  ASSERT_TRUE(r.contains());
  EXPECT_EQ(*r.witness, (GridWitness{{{{1, 2}, {3, 4}}}}));
  EXPECT_FALSE(contains_interval_minor(a, TensorMatrix::all_ones({3})).contains());
}

TEST(IntervalMinor, BudgetExhaustionIsUndecided) {
  std::mt19937_64 rng(4);
  const TensorMatrix a = random_tensor(rng, {12, 12, 12}, 9);
  EXPECT_EQ(contains_interval_minor(a, TensorMatrix::all_ones({4, 4, 4}), Budget{5}).verdict, Verdict::kUndecided);
}

TEST(VerifyWitness, Examples) {
  const GridWitness diag{{{{1, 1}, {2, 2}}, {{1, 1}, {2, 2}}}};
  EXPECT_FALSE(verify_witness(kIdentity2, kR22, diag));
  EXPECT_TRUE(verify_witness(kIdentity2, kIdentity2, diag));
  EXPECT_TRUE(verify_witness(TensorMatrix::zeros({3, 3}), TensorMatrix::zeros({2, 2}), diag));
}

TEST(VerifyWitness, StructuralErrorsAreNotFalse) {
  EXPECT_THROW(verify_witness(kIdentity2, kR22, GridWitness{{{{1, 2}}, {{1, 1}, {2, 2}}}}), StructuralError);
  EXPECT_THROW(verify_witness(kIdentity2, kR22, GridWitness{{{{1, 2}, {2, 2}}, {{1, 1}, {2, 2}}}}),
               StructuralError);
  EXPECT_THROW(verify_witness(kIdentity2, kR22, GridWitness{{{{1, 1}, {2, 3}}, {{1, 1}, {2, 2}}}}),
               StructuralError);
  EXPECT_THROW(verify_witness(kIdentity2, kR22, GridWitness{{{{1, 1}, {2, 2}}}}), StructuralError);
}

TEST(Witness, PartitionExtension) {
  const GridWitness w{{{{2, 2}, {4, 5}}, {{1, 1}, {3, 3}}}};
  const GridWitness full = extend_to_partition(w, {6, 4});
  EXPECT_EQ(full, (GridWitness{{{{1, 3}, {4, 6}}, {{1, 2}, {3, 4}}}}));
  EXPECT_EQ(block_of(full, {3, 2}), (Coord{1, 1}));
  EXPECT_EQ(block_of(full, {6, 3}), (Coord{2, 2}));
}

TEST(Witness, JsonRoundTrip) {
  const GridWitness w{{{{1, 2}, {3, 4}}, {{1, 1}, {2, 5}}}};
  const nlohmann::json j = witness_to_json(w);
  EXPECT_EQ(j.dump(), R"({"axes":[[[1,2],[3,4]],[[1,1],[2,5]]]})");
  EXPECT_EQ(witness_from_json(j), w);
  EXPECT_THROW(witness_from_json(nlohmann::json::parse(R"({"axes":[[[1]]]})")), StructuralError);
}

TEST(ContractionOracle, Examples) {
  EXPECT_TRUE(contains_via_contraction_oracle(TensorMatrix::all_ones({2, 2}), kR22));
  EXPECT_FALSE(contains_via_contraction_oracle(kIdentity2, kR22));
  EXPECT_TRUE(contains_via_contraction_oracle(antidiagonal(3, 2), TensorMatrix::all_ones({1, 1})));
  EXPECT_THROW(contains_via_contraction_oracle(TensorMatrix::zeros({9, 9, 9}), TensorMatrix::zeros({1, 1, 1})),
               RefusalError);
}

// Containment implies interval-minor containment; for permutation patterns
// the two coincide.
TEST(Orders, ContainmentImpliesMinorAndPermutationsCoincide) {
  const auto as = all_2d_upto(3);
  const auto ps = all_2d_upto(2);
  for (const TensorMatrix& a : as) {
    for (const TensorMatrix& p : ps) {
      const bool c = contains_pattern(a, p).contains();
      const bool m = contains_interval_minor(a, p).contains();
      if (c) ASSERT_TRUE(m);
      if (is_permutation(p)) ASSERT_EQ(c, m);
    }
  }
}

}  // namespace
}  // namespace pforge
