#include <gtest/gtest.h>

#include "rkcert/la.hpp"
#include "rkcert/oracle.hpp"

using namespace rkcert;
using la::DenseMatrix;

namespace {

template <class Fn>
void for_each_matrix(const PrimeField& f, std::size_t m, std::size_t n, Fn&& fn) {
  const std::size_t cells = m * n;
  std::vector<std::uint64_t> digits(cells, 0);
  for (;;) {
    DenseMatrix a(f, m, n);
    for (std::size_t k = 0; k < cells; ++k) a.data()[k] = digits[k];
    fn(a);
    std::size_t k = 0;
    while (k < cells && ++digits[k] == f.modulus()) digits[k++] = 0;
    if (k == cells) return;
  }
}

}  // namespace

TEST(Minor, Examples) {
  const PrimeField f7(7);
  const auto a = DenseMatrix::from_rows(f7, {{1, 2}, {3, 4}});
  EXPECT_EQ(oracle::minor(a, {}, {}), 1u);
  EXPECT_EQ(oracle::minor(DenseMatrix::identity(f7, 3), {0, 1}, {0, 1}), 1u);
  EXPECT_EQ(oracle::minor(a, {0, 1}, {0, 1}), 5u);
  EXPECT_THROW(oracle::minor(a, {0}, {0, 1}), DimensionMismatch);
}

TEST(Minor, LeibnizAndEliminationAgreeAtSizeFive) {
  // Size 5 goes through elimination; compare with Laplace expansion on row 0.
  const PrimeField f(131071);
  SeededRandom rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto a = la::random_matrix(f, 5, 5, rng);
    std::uint64_t lap = 0;
    for (std::size_t j = 0; j < 5; ++j) {
      std::vector<std::size_t> cols;
      for (std::size_t k = 0; k < 5; ++k)
        if (k != j) cols.push_back(k);
      const auto term = f.mul(a(0, j), oracle::minor(a, {1, 2, 3, 4}, cols));
      lap = j % 2 == 0 ? f.add(lap, term) : f.sub(lap, term);
    }
    ASSERT_EQ(oracle::minor(a, {0, 1, 2, 3, 4}, {0, 1, 2, 3, 4}), lap);
  }
}

TEST(Dodgson, HoldsOnRandomAndDegenerateMatrices) {
  for (std::uint64_t p : {7ull, 131071ull}) {
    const PrimeField f(p);
    SeededRandom rng(p);
    for (int t = 0; t < 2000; ++t) {
      const std::size_t n = 2 + t % 5;
      auto a = la::random_matrix(f, n, n, rng);
      if (t % 4 == 0) {
        const auto src = rng.next_u64() % n, dst = rng.next_u64() % n;
        for (std::size_t j = 0; j < n; ++j) a(dst, j) = a(src, j);
      }
      ASSERT_TRUE(oracle::check_dodgson(a));
    }
  }
  EXPECT_TRUE(oracle::check_dodgson(DenseMatrix::identity(PrimeField(7), 4)));
}

TEST(RankDet, Examples) {
  const PrimeField f7(7);
  EXPECT_EQ(oracle::oracle_det(DenseMatrix::identity(f7, 4)), 1u);
  EXPECT_EQ(oracle::oracle_rank(DenseMatrix(f7, 3, 4)), 0u);
  EXPECT_EQ(oracle::oracle_det(DenseMatrix::from_rows(f7, {{1, 2}, {3, 4}})), 5u);
  EXPECT_THROW(oracle::oracle_det(DenseMatrix(f7, 2, 3)), DimensionMismatch);
}

TEST(RankProfiles, Examples) {
  const PrimeField f5(5);
  EXPECT_EQ(oracle::oracle_crp(DenseMatrix::identity(f5, 3)).indices,
            (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_TRUE(oracle::oracle_crp(DenseMatrix(f5, 2, 2)).indices.empty());
  EXPECT_EQ(oracle::oracle_crp(DenseMatrix::from_rows(f5, {{0, 1}, {0, 2}})).indices,
            (std::vector<std::size_t>{1}));
  EXPECT_EQ(oracle::oracle_rrp(DenseMatrix::from_rows(f5, {{0, 0}, {1, 2}})).indices,
            (std::vector<std::size_t>{1}));
}

TEST(Rpm, Examples) {
  const PrimeField f7(7);
  EXPECT_EQ(oracle::oracle_rpm(DenseMatrix::identity(f7, 3)).to_dense(f7),
            DenseMatrix::identity(f7, 3));
  EXPECT_EQ(oracle::oracle_rpm(DenseMatrix(f7, 2, 3)).rank(), 0u);
  const auto anti = DenseMatrix::from_rows(f7, {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
  EXPECT_EQ(oracle::oracle_rpm(anti).to_dense(f7), anti);
  // A 1 at (2,1) with a nonzero (2,2) below a 1 at (1,2).
  const auto b = DenseMatrix::from_rows(f7, {{0, 1}, {1, 3}});
  EXPECT_EQ(oracle::oracle_rpm(b).to_dense(f7), DenseMatrix::from_rows(f7, {{0, 1}, {1, 0}}));
}

TEST(Rpm, ExhaustiveSearchAgreesAndIsUnique) {
  for (std::uint64_t p : {2ull, 3ull}) {
    const PrimeField f(p);
    for (auto [m, n] : {std::pair<std::size_t, std::size_t>{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
      if (p == 3 && m * n > 6) continue;
      for_each_matrix(f, m, n, [&](const DenseMatrix& a) {
        const auto found = oracle::oracle_rpm_exhaustive(a);
        ASSERT_EQ(found.size(), 1u);
        const auto r = oracle::oracle_rpm(a);
        ASSERT_EQ(found.front(), r);
        ASSERT_TRUE(r.is_valid());
        ASSERT_EQ(r.rank(), oracle::oracle_rank(a));
      });
    }
  }
}

TEST(Grp, Examples) {
  const PrimeField f5(5);
  EXPECT_TRUE(oracle::has_grp(DenseMatrix::identity(f5, 3)));
  EXPECT_FALSE(oracle::has_grp(DenseMatrix::from_rows(f5, {{0, 1}, {1, 0}})));
  EXPECT_TRUE(oracle::has_grp(DenseMatrix::from_rows(f5, {{1, 1}, {1, 0}})));
}

TEST(OracleVsLa, ExhaustiveF3ThreeByThree) {
  const PrimeField f3(3);
  int count = 0;
  for_each_matrix(f3, 3, 3, [&](const DenseMatrix& a) {
    ++count;
    const auto c = la::pluq_crp(a);
    ASSERT_EQ(c.rank, oracle::oracle_rank(a));
    ASSERT_EQ(la::column_rank_profile(c), oracle::oracle_crp(a));
    ASSERT_EQ(la::column_rank_profile(la::pluq_crp(a.transpose())), oracle::oracle_rrp(a));
    ASSERT_EQ(la::rank_profile_matrix(la::pluq_rpm(a)), oracle::oracle_rpm(a));
    if (c.rank == 3) {
      const auto d = la::ldup(a);
      ASSERT_EQ(f3.mul(d.p.sign() == 1 ? 1 : 2, d.d.determinant()), oracle::oracle_det(a));
    } else {
      ASSERT_EQ(oracle::oracle_det(a), 0u);
    }
  });
  EXPECT_EQ(count, 19683);
}

TEST(OracleVsLa, RandomLargeField) {
  const PrimeField f(131071);
  SeededRandom rng(99);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t m = 1 + rng.next_u64() % 8, n = 1 + rng.next_u64() % 8;
    const std::size_t r = rng.next_u64() % (std::min(m, n) + 1);
    const auto a = la::random_rank_matrix(f, m, n, r, rng);
    ASSERT_EQ(oracle::oracle_rank(a), r);
    ASSERT_EQ(la::column_rank_profile(la::pluq_crp(a)), oracle::oracle_crp(a));
    ASSERT_EQ(la::rank_profile_matrix(la::pluq_rpm(a)), oracle::oracle_rpm(a));
  }
}
