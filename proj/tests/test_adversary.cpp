#include <gtest/gtest.h>

#include "support.hpp"

using namespace rkcert;
using namespace rkcert::adversary;
using la::DenseMatrix;
using proto::Inputs;
using proto::ProtocolId;
using proto::Status;

namespace {

const PrimeField kF101(101);

constexpr std::size_t kTrials = 10000;
constexpr std::uint64_t kSeed = 1;

DenseMatrix rows(const PrimeField& f, const std::vector<std::vector<std::int64_t>>& r) {
  return DenseMatrix::from_rows(f, r);
}

}  // namespace

// ---------------------------------------------------------------------------
// Preconditions

TEST(Preconditions, GrpForgeNeedsNonsingularWithoutGenericProfile) {
  SeededRandom rng(1);
  EXPECT_THROW(GrpForge(rows(kF101, {{1, 2}, {3, 4}}), rng), Precondition);
  EXPECT_THROW(GrpForge(rows(kF101, {{0, 1}, {0, 1}}), rng), Precondition);
  EXPECT_NO_THROW(GrpForge(rows(kF101, {{0, 1}, {1, 0}}), rng));
}

TEST(Preconditions, CrpShiftNeedsAReplaceableColumn) {
  SeededRandom rng(1);
  EXPECT_THROW(CrpShift(DenseMatrix::identity(kF101, 2), rng), Precondition);
  EXPECT_THROW(CrpShift(DenseMatrix(kF101, 2, 2), rng), Precondition);
  CrpShift shift(rows(kF101, {{1, 1}, {2, 2}}), rng);
  EXPECT_EQ(shift.claimed(), (std::vector<std::size_t>{1}));
}

TEST(Preconditions, RpmPermNeedsAnotherPermutation) {
  SeededRandom rng(1);
  const auto a = rows(kF101, {{1, 1}, {1, 0}});
  EXPECT_THROW(RpmPerm(a, la::Permutation::identity(2), rng), Precondition);
  EXPECT_NO_THROW(RpmPerm(a, la::Permutation({1, 0}), rng));
  EXPECT_THROW(RpmPerm(DenseMatrix::identity(kF101, 2), la::Permutation({1, 0}), rng), Precondition);
}

TEST(Preconditions, RankInflateNeedsADeficientMatrix) {
  EXPECT_THROW(RankInflate(DenseMatrix::identity(kF101, 3)), Precondition);
  RankInflate ok(rows(kF101, {{1, 2}, {2, 4}}));
  (void)ok;
}

TEST(Preconditions, TriGhostNeedsAnEquivalence) {
  SeededRandom rng(1);
  const auto a = rows(kF101, {{1, 0}, {0, 1}, {1, 1}});
  const auto outside = rows(kF101, {{1, 0}, {0, 0}, {0, 0}});
  EXPECT_THROW(TriGhost(a, outside, proto::Side::Lower, rng), Precondition);
  EXPECT_THROW(TriGhost(rows(kF101, {{1, 1}, {1, 1}, {0, 0}}), outside, proto::Side::Lower, rng), Precondition);
}

// ---------------------------------------------------------------------------
// Degenerate adversaries are honest

TEST(Degenerate, ScaleByOneAlwaysAccepts) {
  SeededRandom rng(2);
  const Inputs in(la::random_nonsingular(kF101, 4, rng));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    ScaleD prover(in.a, 1);
    EXPECT_TRUE(proto::execute(ProtocolId::Ldup, in, prover, seed).run.verdict.accepted()) << seed;
  }
}

TEST(Degenerate, TriangularGhostAccepts) {
  const auto a = rows(kF101, {{1, 0}, {0, 1}, {1, 1}});
  Inputs in(a);
  in.b = la::multiply(a, rows(kF101, {{3, 0}, {7, 2}}));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SeededRandom rng(seed);
    TriGhost ghost(in.a, *in.b, in.side, rng);
    EXPECT_TRUE(ghost.honest());
    // Guessed fills never enter a lower triangular row.
    EXPECT_TRUE(proto::execute(ProtocolId::TriEquiv, in, ghost, seed).run.verdict.accepted()) << seed;
  }
}

TEST(Degenerate, HonestProverOnIdentityProfile) {
  Inputs in(DenseMatrix::identity(kF101, 2));
  const auto e = proto::execute_honest(ProtocolId::Crp, in, 3);
  ASSERT_TRUE(e.run.verdict.accepted());
  EXPECT_EQ(e.run.result.profile->indices, (std::vector<std::size_t>{0, 1}));
}

TEST(Degenerate, ShiftedDeterminantWithTheTrueValueAccepts) {
  const auto a = rows(kF101, {{2, 1}, {1, 3}});
  Inputs in(a);
  auto prover = det_shift(a, oracle::oracle_det(a));
  EXPECT_TRUE(proto::execute(ProtocolId::Det, in, *prover, 1).run.verdict.accepted());
}

// ---------------------------------------------------------------------------
// Empirical soundness on F_101

class Rate : public ::testing::TestWithParam<const char*> {};

TEST_P(Rate, WithinTheoremBoundOnF101) {
  const auto r = run_attack(GetParam(), 101, kTrials, kSeed);
  EXPECT_EQ(r.trials, kTrials);
  EXPECT_EQ(r.aborted, 0u) << "rejection must come from the verifier's checks";
  EXPECT_EQ(r.accepted + r.rejected, kTrials);
  EXPECT_GT(r.accepted, 0u);
  EXPECT_TRUE(r.pass) << r.name << " rate " << r.rate << " threshold " << r.threshold;
}

INSTANTIATE_TEST_SUITE_P(Adversaries, Rate,
                         ::testing::Values("crp-shift", "tri-ghost", "freivalds", "scale-d", "rpm-perm"),
                         [](const auto& info) {
                           std::string s = info.param;
                           for (auto& c : s)
                             if (c == '-') c = '_';
                           return s;
                         });

TEST(Rate, ThresholdFormula) {
  EXPECT_NEAR(threshold(1.0 / 101, 10000), 1.0 / 101 + 3 * std::sqrt((1.0 / 101) * (100.0 / 101) / 10000), 1e-15);
  EXPECT_NEAR(threshold(2.0 / 101, 10000), 0.0239816, 1e-6);
}

// The final-round guess succeeds with probability 1/p, and two further
// events of probability 1/p each let the forged round pass: w_1 = 0 and
// (u_1, v_1) parallel to (u_0, v_0). The rate lies between 2/p and the union
// bound 3/p.
TEST(Rate, GrpForgeBetweenTwoAndThreeOverP) {
  for (std::uint64_t p : {101u, 7u}) {
    const auto r = run_attack("grp-forge", p, kTrials, kSeed);
    const double q = 1.0 / static_cast<double>(p);
    EXPECT_EQ(r.aborted, 0u);
    EXPECT_LE(r.rate, threshold(3 * q, kTrials)) << p;
    EXPECT_GE(r.rate, 2 * q) << p;
  }
}

TEST(Rate, SmallFieldBounds) {
  for (const char* name : {"crp-shift", "tri-ghost", "freivalds", "scale-d", "rpm-perm"}) {
    const auto r = run_attack(name, 7, kTrials, kSeed);
    EXPECT_EQ(r.aborted, 0u) << name;
    EXPECT_TRUE(r.pass) << name << " rate " << r.rate << " threshold " << r.threshold;
  }
}

TEST(Rate, ReproducibleForAFixedSeed) {
  const auto a = run_attack("crp-shift", 101, 500, 9);
  const auto b = run_attack("crp-shift", 101, 500, 9);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.rejected, b.rejected);
}

TEST(Rate, RejectsBadArguments) {
  EXPECT_THROW(run_attack("nope", 101, 10, 1), Error);
  EXPECT_THROW(run_attack("crp-shift", 101, 0, 1), Error);
}

// ---------------------------------------------------------------------------
// Individual adversaries

TEST(Adversary, ScaledDeterminantShiftIsCaught) {
  SeededRandom rng(5);
  const auto a = la::random_nonsingular(kF101, 4, rng);
  const Inputs in(a);
  const auto det = oracle::oracle_det(a);
  std::size_t accepted = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    auto prover = det_shift(a, kF101.mul(det, 2));
    const auto e = proto::execute(ProtocolId::Det, in, *prover, seed);
    EXPECT_NE(e.run.verdict.status, Status::Abort);
    if (e.run.verdict.accepted()) {
      ++accepted;
      EXPECT_EQ(e.run.result.determinant, kF101.mul(det, 2));
    }
  }
  EXPECT_LE(static_cast<double>(accepted) / 2000, threshold(2.0 / 101, 2000));
}

TEST(Adversary, RankInflationIsRejected) {
  SeededRandom rng(6);
  const auto a = la::random_rank_matrix(kF101, 4, 4, 2, rng);
  const Inputs in(a);
  std::size_t accepted = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    proto::RpmProver prover(a, std::make_unique<RankInflate>(a));
    const auto e = proto::execute(ProtocolId::Rpm, in, prover, seed);
    EXPECT_NE(e.run.verdict.status, Status::Abort);
    accepted += e.run.verdict.accepted();
  }
  EXPECT_LE(accepted, 40u);
}
