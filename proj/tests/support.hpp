#pragma once

// Instance builders shared by the unit tests and the acceptance binary.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rkcert/rkcert.hpp"

namespace rkcert::testing {

using proto::Inputs;
using proto::ProtocolId;

inline std::vector<ProtocolId> all_protocols() {
  std::vector<ProtocolId> ids;
  for (const auto& p : proto::kProtocols) ids.push_back(p.id);
  return ids;
}

/// Protocols with at least one challenge-then-response step.
inline std::vector<ProtocolId> ordered_protocols() {
  return {ProtocolId::TriEquiv, ProtocolId::Grp, ProtocolId::Ldup, ProtocolId::Crp, ProtocolId::RpmInv};
}

inline bool nonsingular(const la::DenseMatrix& a) {
  return a.rows() == a.cols() && oracle::oracle_rank(a) == a.rows();
}

/// Honest inputs built around `a`, or nullopt when the protocol's
/// precondition fails on `a`. Random side inputs come from `rng`.
inline std::optional<Inputs> honest_inputs(ProtocolId id, const la::DenseMatrix& a, RandomSource& rng) {
  const auto& f = a.field();
  Inputs in(a);
  switch (id) {
    case ProtocolId::Freivalds:
      in.b = la::random_matrix(f, a.cols(), a.rows(), rng);
      return in;
    case ProtocolId::TriEquiv: {
      if (a.rows() < a.cols() || oracle::oracle_rank(a) != a.cols()) return std::nullopt;
      la::DenseMatrix t = la::random_unit_lower(f, a.cols(), rng);
      for (std::size_t i = 0; i < a.cols(); ++i) t(i, i) = sample(SampleSet::nonzero(f), rng);
      in.b = la::multiply(a, t);
      return in;
    }
    case ProtocolId::Grp:
      if (!nonsingular(a) || !oracle::has_grp(a)) return std::nullopt;
      return in;
    case ProtocolId::Ldup:
    case ProtocolId::RpmInv:
      if (!nonsingular(a)) return std::nullopt;
      return in;
    case ProtocolId::Det:
      if (a.rows() != a.cols()) return std::nullopt;
      return in;
    default: return in;
  }
}

/// Compares a certified result with the oracles. Empty string on agreement.
inline std::string oracle_mismatch(ProtocolId id, const la::DenseMatrix& a, const proto::Certified& c) {
  auto need = [](bool ok, const char* what) { return ok ? std::string() : std::string(what); };
  switch (id) {
    case ProtocolId::RankLower: return need(c.rank == oracle::oracle_rank(a), "rank");
    case ProtocolId::Crp:
    case ProtocolId::CrpStatic:
      if (!c.profile) return "missing profile";
      if (*c.profile != oracle::oracle_crp(a)) return "column rank profile";
      return need(c.rank == oracle::oracle_rank(a), "rank");
    case ProtocolId::Rrp:
      if (!c.profile) return "missing profile";
      if (*c.profile != oracle::oracle_rrp(a)) return "row rank profile";
      return need(c.rank == oracle::oracle_rank(a), "rank");
    case ProtocolId::Rpm:
    case ProtocolId::RpmStatic:
    case ProtocolId::RpmInv:
      if (!c.rpm) return "missing rank profile matrix";
      if (*c.rpm != oracle::oracle_rpm(a)) return "rank profile matrix";
      return need(c.rank == oracle::oracle_rank(a), "rank");
    case ProtocolId::Det: return need(c.determinant == oracle::oracle_det(a), "determinant");
    case ProtocolId::RankUpper: return need(c.rank == oracle::oracle_rank(a), "rank");
    default: return {};
  }
  return {};
}

/// Whether `id` yields a value the oracles can check.
inline bool oracle_checked(ProtocolId id) {
  switch (id) {
    case ProtocolId::Crp:
    case ProtocolId::CrpStatic:
    case ProtocolId::RankLower:
    case ProtocolId::RankUpper:
    case ProtocolId::Rrp:
    case ProtocolId::Rpm:
    case ProtocolId::RpmStatic:
    case ProtocolId::RpmInv:
    case ProtocolId::Det: return true;
    default: return false;
  }
}

/// Every m x n matrix over F_p.
inline void for_each_matrix(const PrimeField& f, std::size_t m, std::size_t n,
                            const std::function<void(const la::DenseMatrix&)>& fn) {
  const std::size_t cells = m * n;
  std::vector<std::uint64_t> digits(cells, 0);
  for (;;) {
    la::DenseMatrix a(f, m, n);
    for (std::size_t k = 0; k < cells; ++k) a.data()[k] = digits[k];
    fn(a);
    std::size_t k = 0;
    while (k < cells && ++digits[k] == f.modulus()) digits[k++] = 0;
    if (k == cells) return;
  }
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 15]);
  }
  return s;
}

}  // namespace rkcert::testing
