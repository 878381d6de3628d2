#pragma once

// LDUP decomposition with committed P and D, and the determinant built on it.
// After the commitment the prover only answers the strictly triangular parts:
// x~ = U1~ phi~, y~ = U1~ psi~, z~ = lambda~^T L~. The verifier completes the
// vectors itself, which pins L and U1 to unit diagonals.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"
#include "rkcert/proto/rank.hpp"

namespace rkcert::proto {

inline Message encode_commitment(const la::Permutation& p, const la::Vector& d) {
  Message m;
  m.direction = Direction::ProverToVerifier;
  for (auto v : p.images()) m.integers.push_back(static_cast<std::uint32_t>(v));
  m.elements = d;
  return m;
}

/// Honest prover; the hooks let adversaries change the commitment or answers.
class LdupProver : public ProverMachine {
 public:
  explicit LdupProver(const la::DenseMatrix& a)
      : a_(a), n_(a.rows()), phi_(n_, 0), psi_(n_, 0), lambda_(n_, 0) {}

  bool ready_to_send() const override { return !committed_ || pending_ != Pending::None; }
  bool finished() const override { return committed_ && pending_ == Pending::None && next_ == 0; }

  /// Valid once the commitment has been sent.
  const la::LdupFactorization& factorization() const { return *fac_; }

 protected:
  enum class Pending { None, XY, Z };

  virtual void prepare() {
    try {
      fac_ = la::ldup(a_);
    } catch (const SingularMatrix& e) {
      throw ProtocolAbort(Cause::NoWitness, e.what());
    }
  }
  virtual Message commitment() { return encode_commitment(fac_->p, fac_->d.entries()); }
  /// (x~_j, y~_j) = sum over k > j of U1[j,k] (phi_k, psi_k).
  virtual std::pair<std::uint64_t, std::uint64_t> answer_xy(std::size_t j) {
    const auto& f = a_.field();
    std::uint64_t x = 0, y = 0;
    for (std::size_t k = j + 1; k < n_; ++k) {
      x = f.fma(x, fac_->u1(j, k), phi_[k]);
      y = f.fma(y, fac_->u1(j, k), psi_[k]);
    }
    return {x, y};
  }
  /// z~_j = sum over k > j of lambda_k L[k,j].
  virtual std::uint64_t answer_z(std::size_t j) {
    const auto& f = a_.field();
    std::uint64_t z = 0;
    for (std::size_t k = j + 1; k < n_; ++k) z = f.fma(z, lambda_[k], fac_->l(k, j));
    return z;
  }

  Message do_send() override {
    if (!committed_) {
      prepare();
      committed_ = true;
      next_ = n_ == 0 ? 0 : n_ - 1;
      return commitment();
    }
    const std::size_t j = next_ - 1;
    if (pending_ == Pending::XY) {
      pending_ = Pending::None;
      auto [x, y] = answer_xy(j);
      return prover_message({}, {x, y});
    }
    pending_ = Pending::None;
    next_ = j;
    return prover_message({}, {answer_z(j)});
  }
  void do_receive(const Message& m) override {
    if (expect_phi_) {
      if (m.elements.size() != 2) throw ProtocolAbort(Cause::MalformedMessage, "expected phi_i, psi_i");
      phi_[next_] = m.elements[0];
      psi_[next_] = m.elements[1];
      pending_ = Pending::XY;
    } else {
      if (m.elements.size() != 1) throw ProtocolAbort(Cause::MalformedMessage, "expected lambda_i");
      lambda_[next_] = m.elements[0];
      pending_ = Pending::Z;
    }
    expect_phi_ = !expect_phi_;
  }

  const la::DenseMatrix& a_;
  std::size_t n_;
  std::optional<la::LdupFactorization> fac_;
  la::Vector phi_, psi_, lambda_;

 private:
  bool committed_ = false;
  bool expect_phi_ = true;
  Pending pending_ = Pending::None;
  std::size_t next_ = 0;  // current round index i; answers concern i - 1
};

/// Rejects with MalformedCommitment unless P is a permutation of size n and D
/// has n nonzero canonical entries.
inline std::optional<std::pair<la::Permutation, la::Vector>> parse_commitment(
    const Message& m, std::size_t n, const PrimeField& f, std::string& error) {
  if (m.integers.size() != n || m.elements.size() != n) {
    error = "commitment must hold n integers and n elements";
    return std::nullopt;
  }
  std::vector<std::size_t> im(m.integers.begin(), m.integers.end());
  if (!la::Permutation::is_bijection(im)) {
    error = "P is not a permutation";
    return std::nullopt;
  }
  for (auto d : m.elements) {
    if (d == 0 || !f.is_canonical(d)) {
      error = "D is not an invertible diagonal";
      return std::nullopt;
    }
  }
  return std::pair{la::Permutation(std::move(im)), m.elements};
}

class LdupVerifier final : public VerifierMachine {
 public:
  LdupVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a), n_(a.rows()),
        phi_(n_, 0), psi_(n_, 0), lambda_(n_, 0), xt_(n_, 0), yt_(n_, 0), zt_(n_, 0) {
    if (a.rows() != a.cols()) throw DimensionMismatch("ldup: square matrix required");
  }

  bool ready_to_send() const override { return !finished() && committed_ && !awaiting_ && round_ > 0; }

  /// Available after acceptance: the completed projections.
  const la::Vector& phi() const { return phi_; }
  const la::Vector& x() const { return x_; }
  const la::Permutation& permutation() const { return p_; }

 protected:
  Message do_send() override {
    const auto& f = a_.field();
    const std::size_t i = round_;
    awaiting_ = true;
    if (!sent_phi_) {
      sent_phi_ = true;
      phi_[i] = cs().draw(SampleSet(f).without(f.neg(xt_[i])));
      psi_[i] = cs().draw(SampleSet(f));
      return verifier_message({phi_[i], psi_[i]});
    }
    lambda_[i] = cs().draw(SampleSet(f));
    return verifier_message({lambda_[i]});
  }

  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (!committed_) {
      std::string error;
      auto c = parse_commitment(m, n_, f, error);
      if (!c) return reject(Cause::MalformedCommitment, error);
      p_ = std::move(c->first);
      d_ = std::move(c->second);
      committed_ = true;
      round_ = n_ == 0 ? 0 : n_ - 1;
    } else {
      awaiting_ = false;
      const std::size_t j = round_ - 1;
      if (xy_pending_) {
        if (!well_formed(m, 0, 2, f)) return;
        xt_[j] = m.elements[0];
        yt_[j] = m.elements[1];
        xy_pending_ = false;
        return;
      }
      if (!well_formed(m, 0, 1, f)) return;
      zt_[j] = m.elements[0];
      xy_pending_ = true;
      sent_phi_ = false;
      round_ = j;
    }
    if (round_ == 0) final_check();
  }

 private:
  void final_check() {
    const auto& f = a_.field();
    if (n_ == 0) {
      result_.permutation = p_;
      result_.diagonal = d_;
      return accept();
    }
    const SampleSet s(f);
    phi_[0] = cs().draw(s.without(f.neg(xt_[0])));
    psi_[0] = cs().draw(s);
    lambda_[0] = cs().draw(s);
    x_.assign(n_, 0);
    la::Vector y(n_), z(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      x_[i] = f.add(phi_[i], xt_[i]);
      y[i] = f.add(psi_[i], yt_[i]);
      z[i] = f.add(lambda_[i], zt_[i]);
    }
    const auto h = la::vecmat(lambda_, a_, &meter());
    std::uint64_t lx = 0, ly = 0, rx = 0, ry = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::uint64_t zd = f.mul(z[i], d_[i]);
      lx = f.fma(lx, zd, x_[i]);
      ly = f.fma(ly, zd, y[i]);
      rx = f.fma(rx, h[p_[i]], phi_[i]);
      ry = f.fma(ry, h[p_[i]], psi_[i]);
    }
    meter().verifier_field_ops += n_ + 3 * (n_ - 1) + 4 * (2 * n_ - 1);
    if (lx != rx || ly != ry) return reject(Cause::FinalCheck, "z^T D [x y] != (lambda^T A) P^T [phi psi]");
    result_.permutation = p_;
    result_.diagonal = d_;
    accept();
  }

  const la::DenseMatrix& a_;
  std::size_t n_;
  la::Permutation p_;
  la::Vector d_;
  la::Vector phi_, psi_, lambda_, xt_, yt_, zt_, x_;
  std::size_t round_ = 0;
  bool committed_ = false;
  bool awaiting_ = false;
  bool sent_phi_ = false;
  bool xy_pending_ = true;
};

// ---------------------------------------------------------------------------
// Determinant: flag 1 opens an LDUP run, flag 0 a rank-upper run with bound
// n - 1 certifying a zero determinant.

inline std::uint64_t signed_product(const PrimeField& f, const la::Permutation& p, const la::Vector& d) {
  std::uint64_t det = 1;
  for (auto v : d) det = f.mul(det, v);
  return p.sign() == 1 ? det : f.neg(det);
}

class DetProver final : public ProverMachine {
 public:
  explicit DetProver(const la::DenseMatrix& a) : a_(a) {}
  /// Uses the given LDUP-side prover for non-singular inputs.
  DetProver(const la::DenseMatrix& a, std::unique_ptr<LdupProver> ldup) : a_(a), ldup_(std::move(ldup)) {}

  bool ready_to_send() const override { return !child_ || child_->ready_to_send(); }
  bool ready_to_receive() const override { return child_ && child_->ready_to_receive(); }
  bool finished() const override { return child_ && child_->finished(); }

 protected:
  Message do_send() override {
    if (child_) return child_->send();
    const std::size_t n = a_.rows();
    if (la::pluq_crp(a_).rank == n) {
      if (!ldup_) ldup_ = std::make_unique<LdupProver>(a_);
      child_ = std::move(ldup_);
      Message m = child_->send();
      m.integers.insert(m.integers.begin(), 1);
      return m;
    }
    child_ = std::make_unique<UpperRankProver>(a_, n - 1);
    (void)child_->send();
    return prover_message({0});
  }
  void do_receive(const Message& m) override { child_->receive(m); }

 private:
  const la::DenseMatrix& a_;
  std::unique_ptr<LdupProver> ldup_;
  std::unique_ptr<ProverMachine> child_;
};

class DetVerifier final : public VerifierMachine {
 public:
  DetVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("det: square matrix required");
  }

  bool ready_to_send() const override { return !finished() && child_ && child_->ready_to_send(); }

 protected:
  Message do_send() override { return child_->send(); }
  void do_receive(const Message& m) override {
    const std::size_t n = a_.rows();
    if (!child_) {
      if (m.integers.empty()) return reject(Cause::MalformedMessage, "missing determinant flag");
      flag_ = m.integers[0];
      Message rest = m;
      rest.integers.erase(rest.integers.begin());
      if (flag_ == 1) {
        child_ = std::make_unique<LdupVerifier>(a_, cs(), meter());
        child_->receive(rest);
      } else if (flag_ == 0 && n > 0) {
        if (!well_formed(rest, 0, 0, a_.field())) return;
        child_ = std::make_unique<UpperRankVerifier>(a_, cs(), meter(), n - 1);
        child_->receive(prover_message({static_cast<std::uint32_t>(n - 1)}));
      } else {
        return reject(Cause::MalformedMessage, "unknown determinant flag");
      }
    } else {
      child_->receive(m);
    }
    if (!child_->finished()) return;
    if (!child_->verdict().accepted()) return finish_with(child_->verdict());
    result_ = child_->result();
    if (flag_ == 1) {
      result_.determinant = signed_product(a_.field(), *result_.permutation, *result_.diagonal);
      result_.rank = n;
      meter().verifier_field_ops += n;
    } else {
      result_.determinant = 0;
    }
    accept();
  }

 private:
  const la::DenseMatrix& a_;
  std::unique_ptr<VerifierMachine> child_;
  std::uint32_t flag_ = 0;
};

}  // namespace rkcert::proto
