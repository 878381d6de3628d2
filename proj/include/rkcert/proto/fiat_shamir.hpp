#pragma once

// Non-interactive certificates. Sealing runs the prover against a verifier
// whose challenges come from the hash chain and stores the prover messages;
// checking replays those messages against a fresh verifier, which recomputes
// every challenge.
//
// Blob layout: "RKC1", protocol id (1 byte), p (8 bytes), m, n (4 bytes
// each), then one record per prover message (see encode_record). All
// integers are little-endian.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/channel.hpp"
#include "rkcert/proto/message.hpp"
#include "rkcert/proto/registry.hpp"

namespace rkcert::proto {

inline constexpr std::size_t kBlobHeaderSize = 4 + 1 + 8 + 4 + 4;

inline Bytes blob_header(ProtocolId id, const la::DenseMatrix& a) {
  Bytes out{'R', 'K', 'C', '1', static_cast<std::uint8_t>(id)};
  put_le(out, a.field().modulus(), 8);
  put_le(out, a.rows(), 4);
  put_le(out, a.cols(), 4);
  return out;
}

struct Sealed {
  Bytes blob;
  Execution execution;
};

/// Runs `prover` in Fiat-Shamir mode and serializes its messages.
inline Sealed seal(ProtocolId id, const Inputs& in, ProverMachine& prover) {
  Sealed out;
  auto cs = ChallengeSource::fiat_shamir(statement(id, in));
  auto verifier = make_verifier(id, in, cs, out.execution.meter);
  out.execution.run = run(prover, *verifier, cs, out.execution.meter);
  out.blob = blob_header(id, in.a);
  for (const auto& m : out.execution.run.transcript) {
    if (m.direction != Direction::ProverToVerifier) continue;
    const Bytes rec = encode_record(m);
    out.blob.insert(out.blob.end(), rec.begin(), rec.end());
  }
  return out;
}

inline Sealed seal_honest(ProtocolId id, const Inputs& in) {
  auto prover = make_honest_prover(id, in);
  return seal(id, in, *prover);
}

/// Serves the records of a blob in order.
class BlobProver final : public ProverMachine {
 public:
  BlobProver(std::span<const std::uint8_t> blob, std::size_t pos) : blob_(blob), pos_(pos) {}

  bool ready_to_send() const override { return true; }
  bool ready_to_receive() const override { return true; }
  bool finished() const override { return pos_ == blob_.size(); }
  bool exhausted() const { return pos_ == blob_.size(); }

 protected:
  Message do_send() override {
    if (pos_ == blob_.size()) throw ProtocolAbort(Cause::MalformedCertificate, "certificate ends early");
    auto m = decode_record(blob_, pos_);
    if (!m) throw ProtocolAbort(Cause::MalformedCertificate, "truncated or malformed record");
    return *m;
  }
  void do_receive(const Message&) override {}

 private:
  std::span<const std::uint8_t> blob_;
  std::size_t pos_;
};

/// Replays a blob. Header mismatches abort with InputMismatch, structural
/// defects with MalformedCertificate.
inline Execution check(ProtocolId id, const Inputs& in, std::span<const std::uint8_t> blob) {
  Execution out;
  if (blob.size() < kBlobHeaderSize || blob[0] != 'R' || blob[1] != 'K' || blob[2] != 'C' || blob[3] != '1') {
    out.run.verdict = Verdict::abort(Cause::MalformedCertificate, "missing certificate header");
    return out;
  }
  const Bytes expected = blob_header(id, in.a);
  if (!std::equal(expected.begin(), expected.end(), blob.begin())) {
    out.run.verdict = Verdict::abort(Cause::InputMismatch, "certificate was issued for another statement");
    return out;
  }
  auto cs = ChallengeSource::fiat_shamir(statement(id, in));
  auto verifier = make_verifier(id, in, cs, out.meter);
  BlobProver prover(blob, kBlobHeaderSize);
  out.run = run(prover, *verifier, cs, out.meter);
  if (out.run.verdict.accepted() && !prover.exhausted()) {
    out.run.verdict = Verdict::abort(Cause::MalformedCertificate, "trailing data after the last message");
    out.run.result = {};
  }
  return out;
}

}  // namespace rkcert::proto
