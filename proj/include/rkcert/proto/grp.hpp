#pragma once

// Generic rank profile of a non-singular matrix: the prover holds A = L*U and
// streams [x y] = U [u v] and z^T = w^T L from the last index down, so each
// answer is committed before the challenges it must not depend on.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"

namespace rkcert::proto {

/// Honest prover. Subclasses may override the factors or individual answers.
class GrpProver : public ProverMachine {
 public:
  explicit GrpProver(const la::DenseMatrix& a)
      : a_(a), n_(a.rows()), u_(n_, 0), v_(n_, 0), w_(n_, 0), x_(n_, 0), y_(n_, 0), z_(n_, 0) {}

  bool ready_to_send() const override { return !claimed_ || pending_ != Pending::None; }
  bool finished() const override { return claimed_ && index_ == 0 && pending_ == Pending::None && phase_done_; }

 protected:
  enum class Pending { None, XY, Z };

  /// Produces the factorization; throws NoGrpWitness when A = LU is impossible.
  virtual void prepare() {
    auto lu = la::lu_no_pivoting(a_);
    if (!lu) throw ProtocolAbort(Cause::NoGrpWitness, "A does not have generic rank profile");
    l_ = std::move(lu->l);
    up_ = std::move(lu->u);
  }
  /// (x_i, y_i) from u_k, v_k with k >= i.
  virtual std::pair<std::uint64_t, std::uint64_t> answer_xy(std::size_t i) {
    const auto& f = a_.field();
    std::uint64_t x = 0, y = 0;
    for (std::size_t k = i; k < n_; ++k) {
      x = f.fma(x, (*up_)(i, k), u_[k]);
      y = f.fma(y, (*up_)(i, k), v_[k]);
    }
    return {x, y};
  }
  /// z_i from w_k with k >= i.
  virtual std::uint64_t answer_z(std::size_t i) {
    const auto& f = a_.field();
    std::uint64_t z = 0;
    for (std::size_t k = i; k < n_; ++k) z = f.fma(z, w_[k], (*l_)(k, i));
    return z;
  }

  Message do_send() override {
    if (!claimed_) {
      prepare();
      claimed_ = true;
      if (n_ == 0) phase_done_ = true;
      return prover_message();
    }
    if (pending_ == Pending::XY) {
      pending_ = Pending::None;
      std::tie(x_[index_], y_[index_]) = answer_xy(index_);
      return prover_message({}, {x_[index_], y_[index_]});
    }
    pending_ = Pending::None;
    z_[index_] = answer_z(index_);
    if (index_ == 0) phase_done_ = true;
    return prover_message({}, {z_[index_]});
  }
  void do_receive(const Message& m) override {
    if (!expect_uv_) {
      if (m.elements.size() != 1) throw ProtocolAbort(Cause::MalformedMessage, "expected w_i");
      w_[index_] = m.elements[0];
      pending_ = Pending::Z;
      expect_uv_ = true;
      return;
    }
    if (m.elements.size() != 2) throw ProtocolAbort(Cause::MalformedMessage, "expected u_i, v_i");
    index_ = started_ ? index_ - 1 : n_ - 1;
    started_ = true;
    u_[index_] = m.elements[0];
    v_[index_] = m.elements[1];
    pending_ = Pending::XY;
    expect_uv_ = false;
  }

  const la::DenseMatrix& a_;
  std::size_t n_;
  std::optional<la::DenseMatrix> l_, up_;
  la::Vector u_, v_, w_, x_, y_, z_;
  std::size_t index_ = 0;

 private:
  bool claimed_ = false;
  bool started_ = false;
  bool expect_uv_ = true;
  bool phase_done_ = false;
  Pending pending_ = Pending::None;
};

class GrpVerifier final : public VerifierMachine {
 public:
  GrpVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a), n_(a.rows()), u_(n_), v_(n_), w_(n_), x_(n_), y_(n_), z_(n_) {
    if (a.rows() != a.cols()) throw DimensionMismatch("grp: square matrix required");
  }

  bool ready_to_send() const override { return !finished() && claimed_ && !awaiting_ && remaining_ > 0; }

 protected:
  Message do_send() override {
    const SampleSet s(a_.field());
    const std::size_t i = remaining_ - 1;
    awaiting_ = true;
    if (!sent_uv_) {
      u_[i] = cs().draw(s);
      v_[i] = cs().draw(s);
      sent_uv_ = true;
      return verifier_message({u_[i], v_[i]});
    }
    w_[i] = cs().draw(s);
    return verifier_message({w_[i]});
  }
  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (!claimed_) {
      if (!well_formed(m, 0, 0, f)) return;
      claimed_ = true;
      remaining_ = n_;
    } else {
      const std::size_t i = remaining_ - 1;
      awaiting_ = false;
      if (sent_uv_ && x_pending_) {
        if (!well_formed(m, 0, 2, f)) return;
        x_[i] = m.elements[0];
        y_[i] = m.elements[1];
        x_pending_ = false;
        return;
      }
      if (!well_formed(m, 0, 1, f)) return;
      z_[i] = m.elements[0];
      sent_uv_ = false;
      x_pending_ = true;
      --remaining_;
    }
    if (remaining_ == 0) final_check();
  }

 private:
  void final_check() {
    const auto& f = a_.field();
    const auto wa = la::vecmat(w_, a_, &meter());
    const bool ok = la::dot(f, z_, x_) == la::dot(f, wa, u_) && la::dot(f, z_, y_) == la::dot(f, wa, v_);
    meter().verifier_field_ops += 4 * (2 * n_ - 1);
    if (!ok) return reject(Cause::FinalCheck, "z^T[x y] != (w^T A)[u v]");
    accept();
  }

  const la::DenseMatrix& a_;
  std::size_t n_;
  la::Vector u_, v_, w_, x_, y_, z_;
  std::size_t remaining_ = 0;
  bool claimed_ = false;
  bool awaiting_ = false;
  bool sent_uv_ = false;
  bool x_pending_ = true;
};

}  // namespace rkcert::proto
