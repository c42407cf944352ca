#include <gtest/gtest.h>

#include <filesystem>

#include "oracles.hpp"
#include "patternforge/constructions.hpp"
#include "patternforge/errors.hpp"
#include "patternforge/extremal.hpp"
#include "patternforge/records.hpp"

namespace pforge {
namespace {

const TensorMatrix kIdentity2({2, 2}, {{1, 1}, {2, 2}});
const TensorMatrix kAnti2({2, 2}, {{1, 2}, {2, 1}});
const TensorMatrix kR22 = TensorMatrix::all_ones({2, 2});

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("pforge_extremal_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(FExact, Examples) {
  const ExtremalRecord r = f_exact(2, kIdentity2);
  EXPECT_EQ(r.value, 3u);
  EXPECT_EQ(r.status, RecordStatus::kExact);
  EXPECT_EQ(r.witness, TensorMatrix({2, 2}, {{1, 1}, {1, 2}, {2, 1}}));
  EXPECT_EQ(f_exact(3, kIdentity2).value, 5u);
  EXPECT_EQ(f_exact(3, TensorMatrix::all_ones({1, 1})).value, 0u);
  EXPECT_EQ(f_exact(2, TensorMatrix::all_ones({1, 1, 1})).value, 0u);
}

TEST(FExact, RejectsBadInputs) {
  EXPECT_THROW(f_exact(2, TensorMatrix::zeros({2, 2})), PreconditionError);
  EXPECT_THROW(f_exact(2, TensorMatrix::all_ones({2})), PreconditionError);
  EXPECT_THROW(f_exact(0, kIdentity2), PreconditionError);
  SearchConfig cfg;
  cfg.node_budget = 0;
  EXPECT_THROW(f_exact(2, kIdentity2, cfg), PreconditionError);
}

TEST(MExact, Examples) {
  EXPECT_EQ(m_exact(2, kR22).value, 3u);
  EXPECT_EQ(m_exact(3, TensorMatrix::all_ones({1, 1})).value, 0u);
  EXPECT_EQ(m_exact(2, TensorMatrix::all_ones({1, 1, 1})).value, 0u);
  for (const TensorMatrix& p : {kIdentity2, kAnti2}) EXPECT_GE(m_exact(2, kR22).value, f_exact(2, p).value);
}

// Every nonzero pattern up to 2x2 against the enumerate-everything oracle.
TEST(Extremal, AgreesWithBruteForceOracle) {
  for (int r = 1; r <= 2; ++r) {
    for (int c = 1; c <= 2; ++c) {
      for (const TensorMatrix& p : oracle::all_tensors({r, c})) {
        if (p.is_zero()) continue;
        for (int n = 1; n <= 3; ++n) {
          const ExtremalRecord f = f_exact(n, p);
          const ExtremalRecord m = m_exact(n, p);
          ASSERT_EQ(f.value, oracle::extremal(n, 2, p, false)) << "f n=" << n;
          ASSERT_EQ(m.value, oracle::extremal(n, 2, p, true)) << "m n=" << n;
          EXPECT_FALSE(oracle::contains(f.witness, p));
          EXPECT_FALSE(oracle::contains_minor(m.witness, p));
          EXPECT_LE(m.value, f.value);
        }
      }
    }
  }
}

TEST(Extremal, ThreeDimensionalAgreesWithOracle) {
  const TensorMatrix id3 = identity_permutation(2, 3).matrix();
  EXPECT_EQ(f_exact(2, id3).value, oracle::extremal(2, 3, id3, false));
  const TensorMatrix r222 = TensorMatrix::all_ones({2, 2, 2});
  EXPECT_EQ(m_exact(2, r222).value, oracle::extremal(2, 3, r222, true));
}

TEST(Extremal, SymmetryPruningKeepsValueAndWitness) {
  SearchConfig sym;
  sym.symmetry_pruning = true;
  for (int n = 2; n <= 4; ++n) {
    for (const TensorMatrix& p : {kIdentity2, kAnti2, TensorMatrix({2, 2}, {{1, 1}, {1, 2}, {2, 2}})}) {
      const ExtremalRecord plain = f_exact(n, p);
      const ExtremalRecord pruned = f_exact(n, p, sym);
      EXPECT_EQ(plain.value, pruned.value);
      EXPECT_EQ(plain.witness, pruned.witness);
      EXPECT_LE(pruned.nodes, plain.nodes);
    }
    const ExtremalRecord plain = m_exact(n, kR22);
    const ExtremalRecord pruned = m_exact(n, kR22, sym);
    EXPECT_EQ(plain.value, pruned.value);
    EXPECT_EQ(plain.witness, pruned.witness);
  }
}

TEST(Extremal, ThreadCountDoesNotChangeResult) {
  for (unsigned threads : {2u, 4u, 7u}) {
    SearchConfig cfg;
    cfg.threads = threads;
    for (int n = 1; n <= 4; ++n) {
      const ExtremalRecord one = f_exact(n, kIdentity2);
      const ExtremalRecord many = f_exact(n, kIdentity2, cfg);
      EXPECT_EQ(one.value, many.value);
      EXPECT_EQ(one.witness, many.witness);
      const ExtremalRecord m1 = m_exact(n, TensorMatrix::all_ones({3, 3}));
      const ExtremalRecord mm = m_exact(n, TensorMatrix::all_ones({3, 3}), cfg);
      EXPECT_EQ(m1.value, mm.value);
      EXPECT_EQ(m1.witness, mm.witness);
    }
  }
}

TEST(Extremal, BudgetExhaustionGivesLowerBoundAndResumes) {
  const auto dir = fresh_dir("resume");
  SearchConfig tight;
  tight.node_budget = 40;
  tight.cache_dir = dir;
  const ExtremalRecord partial = f_exact(4, kIdentity2, tight);
  EXPECT_EQ(partial.status, RecordStatus::kLowerBoundOnly);
  EXPECT_LE(partial.value, 7u);
  EXPECT_FALSE(oracle::contains(partial.witness, kIdentity2));

  SearchConfig roomy;
  roomy.cache_dir = dir;
  const ExtremalRecord resumed = f_exact(4, kIdentity2, roomy);
  const ExtremalRecord fresh = f_exact(4, kIdentity2);
  EXPECT_EQ(resumed.status, RecordStatus::kExact);
  EXPECT_EQ(resumed.value, 7u);
  EXPECT_EQ(resumed.witness, fresh.witness);

  // Now served from the cache.
  EXPECT_EQ(f_exact(4, kIdentity2, roomy).witness, fresh.witness);
  EXPECT_EQ(RecordStore(dir).load().size(), 2u);
  std::filesystem::remove_all(dir);
}

TEST(RatioSequence, Examples) {
  const auto rows = ratio_sequence(ExtremalKind::kF, kIdentity2, 1, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].ratio, Rational(1));
  EXPECT_EQ(rows[1].ratio, Rational(3, 2));
  EXPECT_EQ(rows[2].ratio, Rational(5, 3));
  for (const RatioRow& r : ratio_sequence(ExtremalKind::kF, TensorMatrix::all_ones({1, 1}), 1, 3)) {
    EXPECT_EQ(r.ratio, Rational(0));
  }
  for (const TensorMatrix& p : {kIdentity2, kAnti2, TensorMatrix::all_ones({1, 2})}) {
    for (const RatioRow& r : ratio_sequence(ExtremalKind::kF, p, 1, 4)) EXPECT_GE(r.ratio, Rational(1));
  }
  EXPECT_THROW(ratio_sequence(ExtremalKind::kF, kIdentity2, 3, 2), PreconditionError);
}

}  // namespace
}  // namespace pforge
