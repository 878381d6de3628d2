#pragma once

// Verifier randomness. Interactive mode draws from a seeded PRNG. Fiat-Shamir
// mode derives every challenge from a SHA-256 hash chain over the input and
// the prover messages absorbed so far.

#include <openssl/evp.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "rkcert/error.hpp"
#include "rkcert/ff.hpp"
#include "rkcert/la.hpp"

namespace rkcert::proto {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

inline void put_le(Bytes& out, std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t get_le(std::span<const std::uint8_t> in, std::size_t width) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v |= std::uint64_t{in[i]} << (8 * i);
  return v;
}

inline Digest sha256(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b = {}) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  Digest out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), a.data(), a.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), b.data(), b.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw Error("SHA-256 computation failed");
  }
  return out;
}

/// Canonical serialization of the statement: "RKC1", protocol id, p, m, n,
/// A row-major, then protocol-specific extra inputs.
inline Bytes statement_bytes(std::uint8_t protocol_id, const la::DenseMatrix& a,
                             std::span<const std::uint8_t> extra = {}) {
  Bytes out{'R', 'K', 'C', '1', protocol_id};
  put_le(out, a.field().modulus(), 8);
  put_le(out, a.rows(), 4);
  put_le(out, a.cols(), 4);
  for (auto v : a.data()) put_le(out, v, 8);
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

class ChallengeSource {
 public:
  enum class Mode { Interactive, FiatShamir };

  static ChallengeSource interactive(std::uint64_t seed) {
    ChallengeSource cs(Mode::Interactive);
    cs.engine_.seed(seed);
    return cs;
  }

  static ChallengeSource fiat_shamir(std::span<const std::uint8_t> statement) {
    ChallengeSource cs(Mode::FiatShamir);
    cs.state_ = sha256(statement);
    return cs;
  }

  Mode mode() const { return mode_; }

  /// Uniform draw from the sample set.
  std::uint64_t draw(const SampleSet& s) {
    return s.at(uniform_below(s.size(), [this] { return next_word(); }));
  }

  la::Vector draw_vector(const SampleSet& s, std::size_t n) {
    la::Vector v(n);
    for (auto& x : v) x = draw(s);
    return v;
  }

  /// Folds a serialized prover message into the hash chain. No effect in
  /// interactive mode.
  void absorb(std::span<const std::uint8_t> record) {
    if (mode_ != Mode::FiatShamir) return;
    state_ = sha256(state_, record);
    buffer_.clear();
  }

  const Digest& state() const { return state_; }

 private:
  explicit ChallengeSource(Mode m) : mode_(m) {}

  std::uint64_t next_word() {
    if (mode_ == Mode::Interactive) return engine_();
    if (buffer_.empty()) {
      Bytes tail{'c', 'h', 'a', 'l'};
      put_le(tail, counter_++, 8);
      const Digest block = sha256(state_, tail);
      for (std::size_t k = 4; k-- > 0;) buffer_.push_back(get_le(std::span(block).subspan(8 * k), 8));
    }
    const std::uint64_t w = buffer_.back();
    buffer_.pop_back();
    return w;
  }

  Mode mode_;
  std::mt19937_64 engine_;
  Digest state_{};
  std::uint64_t counter_ = 0;
  std::vector<std::uint64_t> buffer_;
};

}  // namespace rkcert::proto
