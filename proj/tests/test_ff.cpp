#include <gtest/gtest.h>

#include <set>

#include "rkcert/ff.hpp"

using rkcert::FieldElement;
using rkcert::PrimeField;
using rkcert::SampleSet;
using rkcert::SeededRandom;

TEST(PrimeField, RejectsCompositeAndOutOfRange) {
  EXPECT_THROW(PrimeField(1), rkcert::Error);
  EXPECT_THROW(PrimeField(9), rkcert::Error);
  EXPECT_THROW(PrimeField(std::uint64_t{1} << 31), rkcert::Error);
  EXPECT_NO_THROW(PrimeField(2));
  EXPECT_NO_THROW(PrimeField(2147483647));
  EXPECT_EQ(PrimeField().modulus(), 131071u);
}

TEST(PrimeField, SmallExamples) {
  const PrimeField f7(7);
  EXPECT_EQ(f7.add(3, 5), 1u);
  EXPECT_EQ(f7.mul(3, 5), 1u);
  EXPECT_EQ(f7.inv(3), 5u);
  EXPECT_EQ(f7.inv(1), 1u);
  const PrimeField big(131071);
  EXPECT_EQ(big.add(131070, 1), 0u);
  EXPECT_EQ(big.inv(2), 65536u);
  EXPECT_EQ(big.mul(2, 65536), 1u);
  EXPECT_THROW(f7.inv(0), rkcert::DivisionByZero);
}

TEST(PrimeField, ReduceMatchesModuloOnExtremes) {
  for (std::uint64_t p : {2ull, 3ull, 101ull, 131071ull, 2147483647ull}) {
    const PrimeField f(p);
    SeededRandom rng(p);
    for (int i = 0; i < 20000; ++i) {
      const std::uint64_t x = rng.next_u64();
      ASSERT_EQ(f.reduce(x), x % p);
    }
    EXPECT_EQ(f.reduce(~std::uint64_t{0}), (~std::uint64_t{0}) % p);
    EXPECT_EQ(f.reduce((p - 1) * (p - 1)), ((p - 1) * (p - 1)) % p);
  }
}

TEST(PrimeField, FieldAxiomsOnRandomTriples) {
  for (std::uint64_t p : {2ull, 7ull, 131071ull}) {
    const PrimeField f(p);
    SeededRandom rng(42);
    const SampleSet all(f);
    for (int t = 0; t < 10000; ++t) {
      const auto a = sample(all, rng), b = sample(all, rng), c = sample(all, rng);
      ASSERT_EQ(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
      ASSERT_EQ(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
      ASSERT_EQ(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
      ASSERT_EQ(f.add(a, f.neg(a)), 0u);
      ASSERT_EQ(f.sub(a, b), f.add(a, f.neg(b)));
      ASSERT_EQ(f.fma(a, b, c), f.add(a, f.mul(b, c)));
      if (a != 0) {
        ASSERT_EQ(f.mul(a, f.inv(a)), 1u);
        ASSERT_EQ(f.inv(f.inv(a)), a);
      }
    }
  }
}

TEST(FieldElement, OperatorsAndModulusMismatch) {
  const PrimeField f7(7), f5(5);
  const FieldElement a(f7, 3), b(f7, 5);
  EXPECT_EQ((a + b).value(), 1u);
  EXPECT_EQ((a * b).value(), 1u);
  EXPECT_EQ((a - b).value(), 5u);
  EXPECT_EQ((a / b).value(), f7.mul(3, f7.inv(5)));
  EXPECT_EQ((-a).value(), 4u);
  EXPECT_EQ(a.inv().value(), 5u);
  EXPECT_THROW(a + FieldElement(f5, 1), rkcert::ModulusMismatch);
  EXPECT_THROW(FieldElement(f7, 0).inv(), rkcert::DivisionByZero);
}

TEST(SampleSet, ExclusionsAndMembership) {
  const PrimeField f7(7);
  SeededRandom rng(1);
  const auto nz = SampleSet::nonzero(f7);
  EXPECT_EQ(nz.size(), 6u);
  for (int i = 0; i < 10000; ++i) {
    const auto v = sample(nz, rng);
    ASSERT_GE(v, 1u);
    ASSERT_LE(v, 6u);
  }
  const SampleSet no3(f7, {3});
  for (int i = 0; i < 10000; ++i) ASSERT_NE(sample(no3, rng), 3u);
  const auto both = nz.without(3).without(3);
  EXPECT_EQ(both.size(), 5u);
  EXPECT_FALSE(both.contains(0));
  EXPECT_FALSE(both.contains(3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < both.size(); ++k) seen.insert(both.at(k));
  EXPECT_EQ(seen, (std::set<std::uint64_t>{1, 2, 4, 5, 6}));
}

TEST(SampleSet, BernoulliOverF2IsRoughlyFair) {
  const PrimeField f2(2);
  SeededRandom rng(9);
  const auto all = SampleSet::whole(f2);
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += static_cast<int>(sample(all, rng));
  EXPECT_GT(ones, 4700);
  EXPECT_LT(ones, 5300);
}

TEST(SampleSet, EmptySetThrows) {
  const PrimeField f2(2);
  SeededRandom rng(0);
  const SampleSet none(f2, {0, 1});
  EXPECT_EQ(none.size(), 0u);
  EXPECT_THROW(sample(none, rng), rkcert::EmptySampleSet);
}

TEST(SampleSet, SeededDrawsReplay) {
  const PrimeField f(131071);
  SeededRandom a(77), b(77);
  const auto all = SampleSet::whole(f);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(sample(all, a), sample(all, b));
}
