#pragma once

// Rank profile matrix. For an invertible A the prover commits (P, D) of an
// LDUP decomposition with P the rank profile matrix, proves that
// U_bar = P^T U1 P is upper triangular by streaming f^T = e^T U_bar against
// challenges e, then runs the LDUP protocol; a final projection ties f to the
// x = U1 phi of that run. A general matrix first certifies its row and column
// rank profiles, then the invertible r x r selection they define.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/crp.hpp"
#include "rkcert/proto/ldup.hpp"
#include "rkcert/proto/message.hpp"

namespace rkcert::proto {

class RpmInvProver : public ProverMachine {
 public:
  explicit RpmInvProver(const la::DenseMatrix& a, std::unique_ptr<LdupProver> ldup = nullptr)
      : a_(a), n_(a.rows()), ldup_(ldup ? std::move(ldup) : std::make_unique<LdupProver>(a)), e_(n_, 0) {}

  bool ready_to_send() const override {
    if (!committed_) return true;
    if (round_ < n_ || replying_) return replying_;
    return ldup_->ready_to_send();
  }
  bool ready_to_receive() const override {
    if (!committed_) return false;
    if (round_ < n_ || replying_) return !replying_;
    return ldup_->ready_to_receive();
  }
  bool finished() const override { return committed_ && round_ == n_ && !replying_ && ldup_->finished(); }

 protected:
  /// f_i from e_0..e_i.
  virtual std::uint64_t answer_f(std::size_t i) {
    const auto& f = a_.field();
    std::uint64_t s = 0;
    for (std::size_t k = 0; k <= i; ++k) s = f.fma(s, e_[k], (*ubar_)(k, i));
    return s;
  }

  Message do_send() override {
    if (!committed_) {
      Message m = ldup_->send();
      committed_ = true;
      const auto& fac = ldup_->factorization();
      ubar_ = la::conjugate_by_permutations(fac.p, fac.u1, fac.p);
      return m;
    }
    if (replying_) {
      replying_ = false;
      return prover_message({}, {answer_f(round_ - 1)});
    }
    return ldup_->send();
  }
  void do_receive(const Message& m) override {
    if (round_ < n_) {
      if (m.elements.size() != 1) throw ProtocolAbort(Cause::MalformedMessage, "expected e_i");
      e_[round_++] = m.elements[0];
      replying_ = true;
      return;
    }
    ldup_->receive(m);
  }

  const la::DenseMatrix& a_;
  std::size_t n_;
  std::unique_ptr<LdupProver> ldup_;
  std::optional<la::DenseMatrix> ubar_;
  la::Vector e_;

 private:
  bool committed_ = false;
  bool replying_ = false;
  std::size_t round_ = 0;
};

class RpmInvVerifier final : public VerifierMachine {
 public:
  RpmInvVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a), n_(a.rows()), e_(n_, 0), f_(n_, 0) {
    if (a.rows() != a.cols()) throw DimensionMismatch("rpm-inv: square matrix required");
  }

  bool ready_to_send() const override {
    if (finished() || !commitment_) return false;
    if (ldup_) return ldup_->ready_to_send();
    return !awaiting_ && round_ < n_;
  }

 protected:
  Message do_send() override {
    if (ldup_) return ldup_->send();
    awaiting_ = true;
    e_[round_] = cs().draw(SampleSet(a_.field()));
    return verifier_message({e_[round_]});
  }

  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (!commitment_) {
      std::string error;
      auto c = parse_commitment(m, n_, f, error);
      if (!c) return reject(Cause::MalformedCommitment, error);
      p_ = c->first;
      commitment_ = m;
    } else if (!ldup_) {
      if (!well_formed(m, 0, 1, f)) return;
      f_[round_++] = m.elements[0];
      awaiting_ = false;
    } else {
      ldup_->receive(m);
    }
    if (!ldup_ && round_ == n_) {
      ldup_ = std::make_unique<LdupVerifier>(a_, cs(), meter());
      ldup_->receive(*commitment_);
    }
    if (ldup_ && ldup_->finished()) conclude();
  }

 private:
  void conclude() {
    if (!ldup_->verdict().accepted()) return finish_with(ldup_->verdict());
    const auto& f = a_.field();
    const auto& x = ldup_->x();
    const auto& phi = ldup_->phi();
    std::uint64_t lhs = 0, rhs = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      lhs = f.fma(lhs, e_[p_[i]], x[i]);
      rhs = f.fma(rhs, f_[p_[i]], phi[i]);
    }
    meter().verifier_field_ops += 2 * (2 * n_ - 1);
    if (lhs != rhs) return reject(Cause::ProjectionCheck, "e^T P^T x != f^T P^T phi");
    result_ = ldup_->result();
    la::RankProfileMatrix r{n_, n_, {}};
    for (std::size_t i = 0; i < n_; ++i) r.ones.emplace_back(i, p_[i]);
    r.normalize();
    result_.rpm = r;
    result_.rank = n_;
    accept();
  }

  const la::DenseMatrix& a_;
  std::size_t n_;
  std::optional<Message> commitment_;
  la::Permutation p_;
  la::Vector e_, f_;
  std::size_t round_ = 0;
  bool awaiting_ = false;
  std::unique_ptr<LdupVerifier> ldup_;
};

// ---------------------------------------------------------------------------
// General matrices

class RpmProver final : public ProverMachine {
 public:
  /// `columns` replaces the honest column rank profile stage.
  explicit RpmProver(const la::DenseMatrix& a, std::unique_ptr<CrpProver> columns = nullptr) : a_(a) {
    rows_ = la::column_rank_profile(la::pluq_crp(a.transpose())).indices;
    cols_ = la::column_rank_profile(la::pluq_crp(a)).indices;
    stages_.push_back(std::make_unique<CrpProver>(a, Orientation::Rows));
    stages_.push_back(columns ? std::move(columns) : std::make_unique<CrpProver>(a, Orientation::Columns));
    if (!cols_.empty()) {
      sub_ = a.select(rows_, cols_);
      stages_.push_back(std::make_unique<RpmInvProver>(*sub_));
    }
  }

  bool ready_to_send() const override { auto* s = current(); return s && s->ready_to_send(); }
  bool ready_to_receive() const override { auto* s = current(); return s && s->ready_to_receive(); }
  bool finished() const override { return current() == nullptr; }

 protected:
  Message do_send() override { return current()->send(); }
  void do_receive(const Message& m) override { current()->receive(m); }

 private:
  ProverMachine* current() const {
    for (const auto& s : stages_)
      if (!s->finished()) return s.get();
    return nullptr;
  }

  const la::DenseMatrix& a_;
  std::vector<std::size_t> rows_, cols_;
  std::optional<la::DenseMatrix> sub_;
  std::vector<std::unique_ptr<ProverMachine>> stages_;
};

class RpmVerifier final : public VerifierMachine {
 public:
  RpmVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a),
        rrp_(std::make_unique<CrpVerifier>(a, cs, meter, Orientation::Rows)) {}

  bool ready_to_send() const override {
    auto* s = current();
    return !finished() && s && s->ready_to_send();
  }

 protected:
  Message do_send() override { return current()->send(); }

  void do_receive(const Message& m) override {
    VerifierMachine* s = current();
    s->receive(m);
    if (!s->finished()) return;
    if (!s->verdict().accepted()) return finish_with(s->verdict());
    if (s == rrp_.get()) {
      crp_ = std::make_unique<CrpVerifier>(a_, cs(), meter(), Orientation::Columns);
      return;
    }
    if (s == crp_.get()) {
      rows_ = rrp_->result().profile->indices;
      cols_ = crp_->result().profile->indices;
      if (rows_.size() != cols_.size()) return reject(Cause::RankMismatch, "row and column ranks differ");
      if (cols_.empty()) return conclude(la::Permutation::identity(0));
      sub_ = a_.select(rows_, cols_);
      inv_ = std::make_unique<RpmInvVerifier>(*sub_, cs(), sub_meter_);
      return;
    }
    meter().verifier_submatrix_matvecs += sub_meter_.verifier_matvecs;
    meter().verifier_field_ops += sub_meter_.verifier_field_ops;
    conclude(*inv_->result().permutation);
  }

 private:
  VerifierMachine* current() const {
    if (inv_) return inv_.get();
    if (crp_) return crp_.get();
    return rrp_.get();
  }

  void conclude(const la::Permutation& p) {
    la::RankProfileMatrix r{a_.rows(), a_.cols(), {}};
    for (std::size_t i = 0; i < rows_.size(); ++i) r.ones.emplace_back(rows_[i], cols_[p[i]]);
    r.normalize();
    result_.rank = rows_.size();
    result_.rpm = std::move(r);
    accept();
  }

  const la::DenseMatrix& a_;
  std::unique_ptr<CrpVerifier> rrp_, crp_;
  std::unique_ptr<RpmInvVerifier> inv_;
  std::vector<std::size_t> rows_, cols_;
  std::optional<la::DenseMatrix> sub_;
  CostMeter sub_meter_;
};

}  // namespace rkcert::proto
