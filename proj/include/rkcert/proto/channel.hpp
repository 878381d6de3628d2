#pragma once

// The channel drives a prover and a verifier to completion, records the
// transcript, meters communication and folds prover messages into the
// challenge source. It can also misdeliver a message on purpose to exercise
// the ordering contract.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rkcert/meter.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"

namespace rkcert::proto {

/// Wire record of one prover message: u32 body length, then the body
/// (u32 integer count, the integers as u32, the elements as u64), all LE.
inline Bytes encode_record(const Message& m) {
  Bytes body;
  put_le(body, m.integers.size(), 4);
  for (auto v : m.integers) put_le(body, v, 4);
  for (auto v : m.elements) put_le(body, v, 8);
  Bytes out;
  put_le(out, body.size(), 4);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

/// Parses the record at `pos`, advancing it. Empty on truncation or a body
/// whose length does not split into integers and 8-byte elements.
inline std::optional<Message> decode_record(std::span<const std::uint8_t> blob, std::size_t& pos) {
  if (blob.size() - pos < 4) return std::nullopt;
  const std::uint64_t len = get_le(blob.subspan(pos), 4);
  if (len < 4 || blob.size() - pos - 4 < len) return std::nullopt;
  auto body = blob.subspan(pos + 4, len);
  const std::uint64_t k = get_le(body, 4);
  if (k > (len - 4) / 4) return std::nullopt;
  const std::uint64_t rest = len - 4 - 4 * k;
  if (rest % 8 != 0) return std::nullopt;
  Message m;
  m.direction = Direction::ProverToVerifier;
  for (std::uint64_t i = 0; i < k; ++i)
    m.integers.push_back(static_cast<std::uint32_t>(get_le(body.subspan(4 + 4 * i), 4)));
  for (std::uint64_t i = 0; i < rest / 8; ++i)
    m.elements.push_back(get_le(body.subspan(4 + 4 * k + 8 * i), 8));
  pos += 4 + len;
  return m;
}

/// A deliberate misdelivery at the k-th point (0-based) where the prover owes
/// a response to a challenge it has just received.
struct Fault {
  enum class Kind {
    ChallengeToVerifierEarly,  // ask the verifier for its next challenge now
    ChallengeToProverEarly,    // push a duplicate challenge to the prover now
  };
  Kind kind = Kind::ChallengeToVerifierEarly;
  std::size_t at_response = 0;
};

struct RunOptions {
  std::optional<Fault> fault;
  bool timing = false;
};

struct RunResult {
  Verdict verdict;
  Certified result;
  std::vector<Message> transcript;
  /// Response points where the fault could fire (challenge then response).
  std::size_t response_points = 0;
  bool fault_fired = false;
  double verifier_seconds = 0;
  double prover_seconds = 0;
};

inline void meter_message(CostMeter& meter, const Message& m) {
  if (m.direction == Direction::ProverToVerifier)
    meter.elements_prover_to_verifier += m.elements.size();
  else
    meter.elements_verifier_to_prover += m.elements.size();
  meter.integers_sent += m.integers.size();
}

inline RunResult run(ProverMachine& prover, VerifierMachine& verifier, ChallengeSource& cs,
                     CostMeter& meter, const RunOptions& options = {}) {
  using Clock = std::chrono::steady_clock;
  RunResult out;
  auto timed = [&](double& acc, auto&& fn) {
    if (!options.timing) return fn();
    const auto t0 = Clock::now();
    struct Guard {
      double& acc;
      Clock::time_point t0;
      ~Guard() { acc += std::chrono::duration<double>(Clock::now() - t0).count(); }
    } guard{acc, t0};
    return fn();
  };

  std::optional<Message> last_challenge;
  bool awaiting_response = false;
  try {
    while (!verifier.finished()) {
      if (verifier.ready_to_send()) {
        Message m = timed(out.verifier_seconds, [&] { return verifier.send(); });
        out.transcript.push_back(m);
        meter_message(meter, m);
        timed(out.prover_seconds, [&] { prover.receive(m); });
        last_challenge = m;
        awaiting_response = true;
        continue;
      }
      if (awaiting_response) {
        const std::size_t point = out.response_points++;
        if (options.fault && options.fault->at_response == point) {
          out.fault_fired = true;
          if (options.fault->kind == Fault::Kind::ChallengeToVerifierEarly) {
            (void)verifier.send();
          } else {
            prover.receive(*last_challenge);
          }
        }
      }
      awaiting_response = false;
      Message m = timed(out.prover_seconds, [&] { return prover.send(); });
      out.transcript.push_back(m);
      meter_message(meter, m);
      cs.absorb(encode_record(m));
      timed(out.verifier_seconds, [&] { verifier.receive(m); });
    }
    out.verdict = verifier.verdict();
    if (out.verdict.accepted()) out.result = verifier.result();
  } catch (const ProtocolAbort& e) {
    out.verdict = Verdict::abort(e.cause(), e.what());
  } catch (const Error& e) {
    out.verdict = Verdict::abort(Cause::NoWitness, e.what());
  }
  return out;
}

}  // namespace rkcert::proto
