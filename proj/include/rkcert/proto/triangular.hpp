#pragma once

// Triangular right equivalence: A*T = B for a lower (or upper) triangular T.
// The verifier reveals x one coordinate at a time and the prover must commit
// y_i = (T x)_i before seeing the coordinates T_i does not depend on. Upper
// triangular T streams the coordinates in reverse order.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"

namespace rkcert::proto {

enum class Side : std::uint8_t { Lower = 0, Upper = 1 };

/// Index revealed in round k.
inline std::size_t round_index(Side side, std::size_t n, std::size_t k) {
  return side == Side::Lower ? k : n - 1 - k;
}

/// The unique T with A*T = B when A has full column rank; empty otherwise.
inline std::optional<la::DenseMatrix> right_quotient(const la::DenseMatrix& a, const la::DenseMatrix& b) {
  const auto fac = la::pluq_crp(a);
  if (fac.rank < a.cols()) return std::nullopt;
  la::DenseMatrix t(a.field(), a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    la::Vector col(b.rows());
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    auto x = la::solve(fac, col);
    if (!x) return std::nullopt;
    for (std::size_t i = 0; i < a.cols(); ++i) t(i, j) = (*x)[i];
  }
  return t;
}

/// Answers y_i = T_{i,*} x from the coordinates of x received so far; a
/// coordinate not yet received is taken from `fill` (zero for the honest
/// prover).
class TriEquivProver : public ProverMachine {
 public:
  TriEquivProver(const la::DenseMatrix& a, const la::DenseMatrix& b, Side side)
      : a_(a), b_(b), side_(side), x_(a.cols(), 0) {}

  bool ready_to_send() const override { return !claimed_ || awaiting_reply_; }
  bool finished() const override { return claimed_ && round_ == a_.cols() && !awaiting_reply_; }

 protected:
  /// Builds T; throws to abort when no suitable T exists.
  virtual la::DenseMatrix witness() {
    auto t = right_quotient(a_, b_);
    if (!t) throw ProtocolAbort(Cause::NoWitness, "A is not regular or B is not in its column span");
    const bool ok = side_ == Side::Lower ? la::is_lower_triangular(*t) : la::is_upper_triangular(*t);
    if (!ok) throw ProtocolAbort(Cause::NoWitness, "the equivalence is not triangular");
    return *t;
  }
  /// Value used for a coordinate of x not revealed yet.
  virtual std::uint64_t fill(std::size_t) { return 0; }

  Message do_send() override {
    if (!claimed_) {
      t_ = witness();
      claimed_ = true;
      return prover_message();
    }
    const std::size_t n = a_.cols();
    const std::size_t i = round_index(side_, n, round_ - 1);
    la::Vector view = x_;
    for (std::size_t j = 0; j < n; ++j)
      if (!known(j)) view[j] = fill(j);
    awaiting_reply_ = false;
    return prover_message({}, {la::dot(a_.field(), t_->row(i), view)});
  }
  void do_receive(const Message& m) override {
    if (m.elements.size() != 1) throw ProtocolAbort(Cause::MalformedMessage, "one coordinate per round");
    x_[round_index(side_, a_.cols(), round_)] = m.elements[0];
    ++round_;
    awaiting_reply_ = true;
  }

  bool known(std::size_t j) const {
    const std::size_t n = a_.cols();
    return side_ == Side::Lower ? j < round_ : j >= n - round_;
  }

  const la::DenseMatrix& a_;
  const la::DenseMatrix& b_;
  Side side_;
  std::optional<la::DenseMatrix> t_;

 private:
  la::Vector x_;
  std::size_t round_ = 0;
  bool claimed_ = false;
  bool awaiting_reply_ = false;
};

class TriEquivVerifier final : public VerifierMachine {
 public:
  TriEquivVerifier(const la::DenseMatrix& a, const la::DenseMatrix& b, Side side,
                   ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a), b_(b), side_(side), x_(a.cols(), 0), y_(a.cols(), 0) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
      throw DimensionMismatch("tri-equiv: A and B must have the same shape");
    if (a.rows() < a.cols()) throw DimensionMismatch("tri-equiv: needs m >= n");
  }

  bool ready_to_send() const override { return !finished() && claimed_ && !awaiting_ && round_ < a_.cols(); }

 protected:
  Message do_send() override {
    const std::size_t i = round_index(side_, a_.cols(), round_);
    x_[i] = cs().draw(SampleSet(a_.field()));
    awaiting_ = true;
    return verifier_message({x_[i]});
  }
  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (!claimed_) {
      if (!well_formed(m, 0, 0, f)) return;
      claimed_ = true;
    } else {
      if (!well_formed(m, 0, 1, f)) return;
      y_[round_index(side_, a_.cols(), round_)] = m.elements[0];
      ++round_;
      awaiting_ = false;
    }
    if (round_ == a_.cols()) {
      if (la::matvec(a_, y_, &meter()) != la::matvec(b_, x_, &meter()))
        return reject(Cause::FinalCheck, "Ay != Bx");
      accept();
    }
  }

 private:
  const la::DenseMatrix& a_;
  const la::DenseMatrix& b_;
  Side side_;
  la::Vector x_, y_;
  std::size_t round_ = 0;
  bool claimed_ = false;
  bool awaiting_ = false;
};

}  // namespace rkcert::proto
