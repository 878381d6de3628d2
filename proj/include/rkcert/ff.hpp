#pragma once

// Arithmetic in Z/pZ for word-size primes, plus the sample sets and the
// replayable randomness the protocols draw their challenges from.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "rkcert/error.hpp"

namespace rkcert {

inline constexpr std::uint64_t kDefaultModulus = 131071;

__extension__ using uint128 = unsigned __int128;

/// The prime field Z/pZ with 2 <= p < 2^31. Residues are plain uint64_t
/// values in [0, p); every product of two residues fits in 64 bits.
class PrimeField {
 public:
  explicit PrimeField(std::uint64_t p = kDefaultModulus) : p_(p) {
    if (p < 2 || p >= (std::uint64_t{1} << 31)) {
      throw Error("modulus must satisfy 2 <= p < 2^31, got " +
                  std::to_string(p));
    }
    for (std::uint64_t d = 2; d * d <= p; ++d) {
      if (p % d == 0) {
        throw Error("modulus " + std::to_string(p) + " is not prime");
      }
    }
    barrett_ = static_cast<std::uint64_t>(
        (static_cast<uint128>(1) << 64) / p_);
  }

  std::uint64_t modulus() const { return p_; }

  // Barrett reduction, valid for every 64-bit input.
  std::uint64_t reduce(std::uint64_t x) const {
    const auto q = static_cast<std::uint64_t>(
        (static_cast<uint128>(x) * barrett_) >> 64);
    std::uint64_t r = x - q * p_;
    return r >= p_ ? r - p_ : r;
  }

  std::uint64_t from_int(std::int64_t v) const {
    const auto m = static_cast<std::int64_t>(p_);
    std::int64_t r = v % m;
    return static_cast<std::uint64_t>(r < 0 ? r + m : r);
  }

  std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const {
    return a >= b ? a - b : a + p_ - b;
  }
  std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    return reduce(a * b);
  }
  /// a + b*c
  std::uint64_t fma(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
    return reduce(a + b * c);
  }

  /// Inverse by the extended Euclidean algorithm.
  std::uint64_t inv(std::uint64_t a) const {
    if (a == 0) throw DivisionByZero();
    std::int64_t t = 0, new_t = 1;
    auto r = static_cast<std::int64_t>(p_);
    auto new_r = static_cast<std::int64_t>(a);
    while (new_r != 0) {
      const std::int64_t q = r / new_r;
      std::tie(t, new_t) = std::pair{new_t, t - q * new_t};
      std::tie(r, new_r) = std::pair{new_r, r - q * new_r};
    }
    return from_int(t);
  }
  std::uint64_t div(std::uint64_t a, std::uint64_t b) const {
    return mul(a, inv(b));
  }

  bool is_canonical(std::uint64_t a) const { return a < p_; }

  friend bool operator==(const PrimeField& a, const PrimeField& b) {
    return a.p_ == b.p_;
  }

 private:
  std::uint64_t p_;
  std::uint64_t barrett_ = 0;
};

/// A residue tagged with its field. Arithmetic between elements of different
/// fields throws ModulusMismatch.
class FieldElement {
 public:
  FieldElement(const PrimeField& field, std::uint64_t value)
      : field_(field), value_(field.reduce(value)) {}

  std::uint64_t value() const { return value_; }
  const PrimeField& field() const { return field_; }

  FieldElement inv() const { return {field_, field_.inv(value_)}; }

  friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_, a.field_.add(a.value_, b.value_)};
  }
  friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_, a.field_.sub(a.value_, b.value_)};
  }
  friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_, a.field_.mul(a.value_, b.value_)};
  }
  friend FieldElement operator/(const FieldElement& a, const FieldElement& b) {
    check(a, b);
    return {a.field_, a.field_.div(a.value_, b.value_)};
  }
  FieldElement operator-() const { return {field_, field_.neg(value_)}; }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.field_ == b.field_ && a.value_ == b.value_;
  }

 private:
  static void check(const FieldElement& a, const FieldElement& b) {
    if (!(a.field_ == b.field_)) {
      throw ModulusMismatch(a.field_.modulus(), b.field_.modulus());
    }
  }

  PrimeField field_;
  std::uint64_t value_;
};

/// Source of uniform 64-bit words. Implementations must be deterministic
/// functions of their seed so that protocol runs replay exactly.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual std::uint64_t next_u64() = 0;
};

class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next_u64() override { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// Uniform integer in [0, bound) by rejection on 64-bit words; independent of
/// the standard library's distribution implementation.
template <class NextWord>
std::uint64_t uniform_below(std::uint64_t bound, NextWord&& next) {
  if (bound == 0) throw EmptySampleSet();
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  for (;;) {
    const std::uint64_t w = next();
    if (w < limit) return w % bound;
  }
}

/// The challenge set S = F \ excluded.
class SampleSet {
 public:
  explicit SampleSet(const PrimeField& field,
                     std::vector<std::uint64_t> excluded = {})
      : field_(field), excluded_(std::move(excluded)) {
    for (auto& e : excluded_) e = field_.reduce(e);
    std::sort(excluded_.begin(), excluded_.end());
    excluded_.erase(std::unique(excluded_.begin(), excluded_.end()),
                    excluded_.end());
  }

  static SampleSet whole(const PrimeField& f) { return SampleSet(f); }
  static SampleSet nonzero(const PrimeField& f) { return SampleSet(f, {0}); }

  SampleSet without(std::uint64_t value) const {
    auto ex = excluded_;
    ex.push_back(value);
    return SampleSet(field_, std::move(ex));
  }

  const PrimeField& field() const { return field_; }
  std::uint64_t size() const { return field_.modulus() - excluded_.size(); }
  bool contains(std::uint64_t v) const {
    return v < field_.modulus() &&
           !std::binary_search(excluded_.begin(), excluded_.end(), v);
  }

  /// The index-th allowed residue in increasing order.
  std::uint64_t at(std::uint64_t index) const {
    if (index >= size()) throw EmptySampleSet();
    std::uint64_t v = index;
    for (std::uint64_t e : excluded_) {
      if (v >= e) ++v;
    }
    return v;
  }

 private:
  PrimeField field_;
  std::vector<std::uint64_t> excluded_;
};

inline std::uint64_t sample(const SampleSet& s, RandomSource& rng) {
  return s.at(uniform_below(s.size(), [&] { return rng.next_u64(); }));
}

inline FieldElement sample_element(const SampleSet& s, RandomSource& rng) {
  return {s.field(), sample(s, rng)};
}

}  // namespace rkcert
