#pragma once

// Protocol catalogue: names, wire ids, statement serialization and factories
// for verifiers and honest provers.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rkcert/error.hpp"
#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/channel.hpp"
#include "rkcert/proto/crp.hpp"
#include "rkcert/proto/grp.hpp"
#include "rkcert/proto/ldup.hpp"
#include "rkcert/proto/message.hpp"
#include "rkcert/proto/noninteractive.hpp"
#include "rkcert/proto/rank.hpp"
#include "rkcert/proto/rpm.hpp"
#include "rkcert/proto/triangular.hpp"

namespace rkcert::proto {

enum class ProtocolId : std::uint8_t {
  Freivalds = 1,
  CrpStatic = 2,
  RpmStatic = 3,
  RankUpper = 4,
  RankLower = 5,
  TriEquiv = 6,
  Grp = 7,
  Ldup = 8,
  Det = 9,
  Crp = 10,
  Rrp = 11,
  RpmInv = 12,
  Rpm = 13,
};

struct ProtocolInfo {
  ProtocolId id;
  std::string_view name;
  bool square;      // input must be square
  bool needs_rhs;   // second matrix B
};

inline constexpr std::array<ProtocolInfo, 13> kProtocols{{
    {ProtocolId::Freivalds, "freivalds", false, true},
    {ProtocolId::CrpStatic, "crp-static", false, false},
    {ProtocolId::RpmStatic, "rpm-static", false, false},
    {ProtocolId::RankUpper, "rank-upper", false, false},
    {ProtocolId::RankLower, "rank-lower", false, false},
    {ProtocolId::TriEquiv, "tri-equiv", false, true},
    {ProtocolId::Grp, "grp", true, false},
    {ProtocolId::Ldup, "ldup", true, false},
    {ProtocolId::Det, "det", true, false},
    {ProtocolId::Crp, "crp", false, false},
    {ProtocolId::Rrp, "rrp", false, false},
    {ProtocolId::RpmInv, "rpm-inv", true, false},
    {ProtocolId::Rpm, "rpm", false, false},
}};

inline const ProtocolInfo& info(ProtocolId id) {
  for (const auto& p : kProtocols)
    if (p.id == id) return p;
  throw Error("unknown protocol id " + std::to_string(static_cast<int>(id)));
}

inline std::string_view name(ProtocolId id) { return info(id).name; }

inline std::optional<ProtocolId> protocol_from_name(std::string_view s) {
  for (const auto& p : kProtocols)
    if (p.name == s) return p.id;
  return std::nullopt;
}

inline std::optional<ProtocolId> protocol_from_byte(std::uint8_t b) {
  for (const auto& p : kProtocols)
    if (static_cast<std::uint8_t>(p.id) == b) return p.id;
  return std::nullopt;
}

/// Everything the verifier knows besides A. Machines keep references into
/// this object, which must outlive them.
struct Inputs {
  la::DenseMatrix a;
  std::optional<la::DenseMatrix> b;      // freivalds, tri-equiv
  Side side = Side::Lower;               // tri-equiv
  std::size_t repetitions = 1;           // freivalds
  std::optional<std::size_t> rank_claim; // rank-upper

  explicit Inputs(la::DenseMatrix m) : a(std::move(m)) {}
};

/// Throws DimensionMismatch when the inputs do not fit the protocol.
inline void validate(ProtocolId id, const Inputs& in) {
  const auto& p = info(id);
  if (p.square && in.a.rows() != in.a.cols())
    throw DimensionMismatch(std::string(p.name) + ": square matrix required");
  if (p.needs_rhs && !in.b) throw DimensionMismatch(std::string(p.name) + ": second matrix required");
  if (in.b && in.b->field() != in.a.field()) throw ModulusMismatch(in.a.field().modulus(), in.b->field().modulus());
  if (id == ProtocolId::Freivalds && in.a.cols() != in.b->rows())
    throw DimensionMismatch("freivalds: A and B are not conformal");
  if (id == ProtocolId::TriEquiv) {
    if (in.a.rows() != in.b->rows() || in.a.cols() != in.b->cols())
      throw DimensionMismatch("tri-equiv: A and B must have the same shape");
    if (in.a.rows() < in.a.cols()) throw DimensionMismatch("tri-equiv: needs m >= n");
  }
}

/// Statement bytes hashed at the start of a Fiat-Shamir chain.
inline Bytes statement(ProtocolId id, const Inputs& in) {
  Bytes extra;
  if (in.b) {
    put_le(extra, in.b->rows(), 4);
    put_le(extra, in.b->cols(), 4);
    for (auto v : in.b->data()) put_le(extra, v, 8);
  }
  if (id == ProtocolId::TriEquiv) extra.push_back(static_cast<std::uint8_t>(in.side));
  if (id == ProtocolId::Freivalds) put_le(extra, in.repetitions, 4);
  if (id == ProtocolId::RankUpper && in.rank_claim) put_le(extra, *in.rank_claim, 4);
  return statement_bytes(static_cast<std::uint8_t>(id), in.a, extra);
}

inline std::unique_ptr<VerifierMachine> make_verifier(ProtocolId id, const Inputs& in, ChallengeSource& cs,
                                                      CostMeter& meter) {
  validate(id, in);
  const auto& a = in.a;
  switch (id) {
    case ProtocolId::Freivalds: return std::make_unique<FreivaldsVerifier>(a, *in.b, in.repetitions, cs, meter);
    case ProtocolId::CrpStatic:
      return std::make_unique<PluqCertificateVerifier>(a, PluqKind::ColumnProfile, cs, meter);
    case ProtocolId::RpmStatic:
      return std::make_unique<PluqCertificateVerifier>(a, PluqKind::RankProfileMatrix, cs, meter);
    case ProtocolId::RankUpper: return std::make_unique<UpperRankVerifier>(a, cs, meter, in.rank_claim);
    case ProtocolId::RankLower: return std::make_unique<LowerRankVerifier>(a, cs, meter);
    case ProtocolId::TriEquiv: return std::make_unique<TriEquivVerifier>(a, *in.b, in.side, cs, meter);
    case ProtocolId::Grp: return std::make_unique<GrpVerifier>(a, cs, meter);
    case ProtocolId::Ldup: return std::make_unique<LdupVerifier>(a, cs, meter);
    case ProtocolId::Det: return std::make_unique<DetVerifier>(a, cs, meter);
    case ProtocolId::Crp: return std::make_unique<CrpVerifier>(a, cs, meter, Orientation::Columns);
    case ProtocolId::Rrp: return std::make_unique<CrpVerifier>(a, cs, meter, Orientation::Rows);
    case ProtocolId::RpmInv: return std::make_unique<RpmInvVerifier>(a, cs, meter);
    case ProtocolId::Rpm: return std::make_unique<RpmVerifier>(a, cs, meter);
  }
  throw Error("unknown protocol");
}

inline std::unique_ptr<ProverMachine> make_honest_prover(ProtocolId id, const Inputs& in) {
  validate(id, in);
  const auto& a = in.a;
  switch (id) {
    case ProtocolId::Freivalds:
      return std::make_unique<FreivaldsProver>(FreivaldsProver::honest(a, *in.b));
    case ProtocolId::CrpStatic:
      return std::make_unique<ScriptedProver>(std::vector<Message>{encode_pluq(la::pluq_crp(a))});
    case ProtocolId::RpmStatic:
      return std::make_unique<ScriptedProver>(std::vector<Message>{encode_pluq(la::pluq_rpm(a))});
    case ProtocolId::RankUpper:
      return std::make_unique<UpperRankProver>(a, in.rank_claim.value_or(la::pluq_crp(a).rank));
    case ProtocolId::RankLower: return std::make_unique<LowerRankProver>(a);
    case ProtocolId::TriEquiv: return std::make_unique<TriEquivProver>(a, *in.b, in.side);
    case ProtocolId::Grp: return std::make_unique<GrpProver>(a);
    case ProtocolId::Ldup: return std::make_unique<LdupProver>(a);
    case ProtocolId::Det: return std::make_unique<DetProver>(a);
    case ProtocolId::Crp: return std::make_unique<CrpProver>(a, Orientation::Columns);
    case ProtocolId::Rrp: return std::make_unique<CrpProver>(a, Orientation::Rows);
    case ProtocolId::RpmInv: return std::make_unique<RpmInvProver>(a);
    case ProtocolId::Rpm: return std::make_unique<RpmProver>(a);
  }
  throw Error("unknown protocol");
}

struct Execution {
  RunResult run;
  CostMeter meter;
};

/// One interactive run with a seeded challenge source.
inline Execution execute(ProtocolId id, const Inputs& in, ProverMachine& prover, std::uint64_t seed,
                         const RunOptions& options = {}) {
  Execution out;
  auto cs = ChallengeSource::interactive(seed);
  auto verifier = make_verifier(id, in, cs, out.meter);
  out.run = run(prover, *verifier, cs, out.meter, options);
  return out;
}

inline Execution execute_honest(ProtocolId id, const Inputs& in, std::uint64_t seed,
                                const RunOptions& options = {}) {
  auto prover = make_honest_prover(id, in);
  return execute(id, in, *prover, seed, options);
}

}  // namespace rkcert::proto
