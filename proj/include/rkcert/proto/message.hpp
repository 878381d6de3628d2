#pragma once

// Messages, verdicts and the turn-taking base classes shared by every
// protocol. A party may only send when it owes the next message and may only
// receive when it is waiting for one; anything else is an ordering violation
// and aborts the run.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rkcert/error.hpp"
#include "rkcert/ff.hpp"
#include "rkcert/la.hpp"
#include "rkcert/meter.hpp"

namespace rkcert::proto {

enum class Direction : std::uint8_t { ProverToVerifier, VerifierToProver };

/// Integers carry indices, ranks and flags; elements carry field residues.
struct Message {
  Direction direction = Direction::ProverToVerifier;
  std::vector<std::uint32_t> integers;
  std::vector<std::uint64_t> elements;

  friend bool operator==(const Message&, const Message&) = default;
};

inline Message prover_message(std::vector<std::uint32_t> ints = {},
                              std::vector<std::uint64_t> elems = {}) {
  return {Direction::ProverToVerifier, std::move(ints), std::move(elems)};
}
inline Message verifier_message(std::vector<std::uint64_t> elems) {
  return {Direction::VerifierToProver, {}, std::move(elems)};
}

enum class Status : std::uint8_t { Accept, Reject, Abort };

enum class Cause : std::uint8_t {
  None,
  ProductMismatch,
  NotRowEchelon,
  NotLowerTriangular,
  NotUpperTriangular,
  MalformedWitness,
  MalformedCommitment,
  MalformedMessage,
  MalformedCertificate,
  HammingWeight,
  CoefficientMismatch,
  FinalCheck,
  ProjectionCheck,
  RankMismatch,
  OrderViolation,
  NoWitness,
  NoGrpWitness,
  InputMismatch,
};

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Accept: return "accept";
    case Status::Reject: return "reject";
    case Status::Abort: return "abort";
  }
  return "?";
}

inline std::string_view to_string(Cause c) {
  switch (c) {
    case Cause::None: return "None";
    case Cause::ProductMismatch: return "ProductMismatch";
    case Cause::NotRowEchelon: return "NotRowEchelon";
    case Cause::NotLowerTriangular: return "NotLowerTriangular";
    case Cause::NotUpperTriangular: return "NotUpperTriangular";
    case Cause::MalformedWitness: return "MalformedWitness";
    case Cause::MalformedCommitment: return "MalformedCommitment";
    case Cause::MalformedMessage: return "MalformedMessage";
    case Cause::MalformedCertificate: return "MalformedCertificate";
    case Cause::HammingWeight: return "HammingWeight";
    case Cause::CoefficientMismatch: return "CoefficientMismatch";
    case Cause::FinalCheck: return "FinalCheck";
    case Cause::ProjectionCheck: return "ProjectionCheck";
    case Cause::RankMismatch: return "RankMismatch";
    case Cause::OrderViolation: return "OrderViolation";
    case Cause::NoWitness: return "NoWitness";
    case Cause::NoGrpWitness: return "NoGrpWitness";
    case Cause::InputMismatch: return "InputMismatch";
  }
  return "?";
}

/// Accept carries Cause::None; Reject and Abort carry exactly one cause.
struct Verdict {
  Status status = Status::Abort;
  Cause cause = Cause::None;
  std::string detail;

  static Verdict accept() { return {Status::Accept, Cause::None, {}}; }
  static Verdict reject(Cause c, std::string d = {}) { return {Status::Reject, c, std::move(d)}; }
  static Verdict abort(Cause c, std::string d = {}) { return {Status::Abort, c, std::move(d)}; }

  bool accepted() const { return status == Status::Accept; }
  friend bool operator==(const Verdict& a, const Verdict& b) {
    return a.status == b.status && a.cause == b.cause;
  }
};

/// Thrown by either party to stop a run; maps to an Abort verdict.
class ProtocolAbort : public Error {
 public:
  ProtocolAbort(Cause cause, const std::string& what) : Error(what), cause_(cause) {}
  Cause cause() const { return cause_; }

 private:
  Cause cause_;
};

/// What an accepting verifier has been convinced of.
struct Certified {
  std::optional<std::size_t> rank;
  std::optional<std::uint64_t> determinant;
  std::optional<la::RankProfile> profile;
  std::optional<la::RankProfileMatrix> rpm;
  std::optional<la::Permutation> permutation;
  std::optional<la::Vector> diagonal;
};

class Party {
 public:
  virtual ~Party() = default;

  virtual bool ready_to_send() const = 0;
  virtual bool finished() const = 0;
  virtual bool ready_to_receive() const { return !ready_to_send() && !finished(); }

  Message send() {
    if (!ready_to_send()) throw ProtocolAbort(Cause::OrderViolation, name() + ": not its turn to send");
    Message m = do_send();
    m.direction = outgoing();
    return m;
  }

  void receive(const Message& m) {
    if (m.direction == outgoing())
      throw ProtocolAbort(Cause::OrderViolation, name() + ": message in the wrong direction");
    if (!ready_to_receive())
      throw ProtocolAbort(Cause::OrderViolation, name() + ": message arrived out of turn");
    do_receive(m);
  }

 protected:
  virtual Direction outgoing() const = 0;
  virtual std::string name() const = 0;
  virtual Message do_send() = 0;
  virtual void do_receive(const Message& m) = 0;
};

class ProverMachine : public Party {
 protected:
  Direction outgoing() const override { return Direction::ProverToVerifier; }
  std::string name() const override { return "prover"; }
};

class ChallengeSource;

class VerifierMachine : public Party {
 public:
  VerifierMachine(ChallengeSource& cs, CostMeter& meter) : cs_(&cs), meter_(&meter) {}

  bool finished() const override { return verdict_.has_value(); }
  const Verdict& verdict() const {
    static const Verdict pending = Verdict::abort(Cause::None, "verifier has not finished");
    return verdict_ ? *verdict_ : pending;
  }
  const Certified& result() const { return result_; }

 protected:
  Direction outgoing() const override { return Direction::VerifierToProver; }
  std::string name() const override { return "verifier"; }

  void accept() { verdict_ = Verdict::accept(); }
  void reject(Cause c, std::string detail = {}) { verdict_ = Verdict::reject(c, std::move(detail)); }
  void finish_with(const Verdict& v) { verdict_ = v; }

  /// Rejects with MalformedMessage unless the message has exactly the given
  /// counts and every element is a canonical residue.
  bool well_formed(const Message& m, std::size_t ints, std::size_t elems, const PrimeField& f) {
    if (m.integers.size() != ints || m.elements.size() != elems) {
      reject(Cause::MalformedMessage, "expected " + std::to_string(ints) + " integers and " +
                                          std::to_string(elems) + " elements");
      return false;
    }
    for (auto e : m.elements) {
      if (!f.is_canonical(e)) {
        reject(Cause::MalformedMessage, "non-canonical field element");
        return false;
      }
    }
    return true;
  }

  ChallengeSource& cs() { return *cs_; }
  CostMeter& meter() { return *meter_; }

  Certified result_;

 private:
  ChallengeSource* cs_;
  CostMeter* meter_;
  std::optional<Verdict> verdict_;
};

/// Replays a fixed list of prover messages regardless of the challenges; used
/// for static certificates and for tests.
class ScriptedProver final : public ProverMachine {
 public:
  explicit ScriptedProver(std::vector<Message> script) : script_(std::move(script)) {}
  bool ready_to_send() const override { return next_ < script_.size(); }
  bool ready_to_receive() const override { return true; }
  bool finished() const override { return next_ >= script_.size(); }

 protected:
  Message do_send() override { return script_[next_++]; }
  void do_receive(const Message&) override {}

 private:
  std::vector<Message> script_;
  std::size_t next_ = 0;
};

}  // namespace rkcert::proto
