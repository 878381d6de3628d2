#pragma once

// Column rank profile. The prover announces c_0 < ... < c_{r-1}; independence
// is checked by the lower-bound protocol, minimality by a triangular
// equivalence on a random projection. With c_r = n, column j of W (j = 0..r)
// selects the rows i < c_j, V = Diag(v) W, and the prover must know Gamma,
// r x (r+1) with Gamma[k,j] = 0 unless k < j, such that A_c Gamma = A V.
// Column 0 of A V must vanish, which pins c_0. The row rank profile runs the
// same protocol on the transpose.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"
#include "rkcert/proto/rank.hpp"

namespace rkcert::proto {

enum class Orientation : std::uint8_t { Columns, Rows };

/// Honest prover. Adversaries override the claimed columns, Gamma or the
/// answers y_k.
class CrpProver : public ProverMachine {
 public:
  CrpProver(const la::DenseMatrix& a, Orientation o = Orientation::Columns)
      : owned_(o == Orientation::Rows ? std::optional(a.transpose()) : std::nullopt),
        a_(owned_ ? *owned_ : a) {}

  bool ready_to_send() const override {
    if (!lower_ || !lower_->finished()) return !lower_ || lower_->ready_to_send();
    return stage_ == Stage::Claim || stage_ == Stage::Reply;
  }
  bool ready_to_receive() const override {
    if (lower_ && !lower_->finished()) return lower_->ready_to_receive();
    return stage_ == Stage::Projection || stage_ == Stage::Challenge;
  }
  bool finished() const override { return stage_ == Stage::Done; }

 protected:
  enum class Stage { Lower, Projection, Claim, Challenge, Reply, Done };

  /// Columns to claim.
  virtual std::vector<std::size_t> claim() { return la::column_rank_profile(la::pluq_crp(a_)).indices; }

  /// Gamma for the projection v; throws NoWitness if none exists.
  virtual la::DenseMatrix gamma(const la::Vector& v) {
    auto g = solve_gamma(v, false);
    if (!g) throw ProtocolAbort(Cause::NoWitness, "claimed columns are not the lexicographically minimal basis");
    return *g;
  }

  /// y_k from the x_j received so far (j > k).
  virtual std::uint64_t answer_y(std::size_t k) {
    const auto& f = a_.field();
    std::uint64_t y = 0;
    for (std::size_t j = k + 1; j <= cols_.size(); ++j) y = f.fma(y, (*gamma_)(k, j), x_[j]);
    return y;
  }

  /// Column j of Gamma solves A_c g = A (v restricted to i < c_j). With
  /// `unconstrained`, the support condition is not enforced and unsolvable
  /// columns are left empty; otherwise any failure returns nullopt.
  std::optional<la::DenseMatrix> solve_gamma(const la::Vector& v, bool unconstrained,
                                             std::vector<bool>* solvable = nullptr) const {
    const auto& f = a_.field();
    const std::size_t m = a_.rows(), n = a_.cols(), r = cols_.size();
    std::vector<std::size_t> rows(m);
    for (std::size_t i = 0; i < m; ++i) rows[i] = i;
    const auto fac = la::pluq_crp(a_.select(rows, cols_));
    la::DenseMatrix g(f, r, r + 1);
    if (solvable) solvable->assign(r + 1, false);
    la::Vector b(m, 0);
    std::size_t i = 0;
    for (std::size_t j = 0; j <= r; ++j) {
      const std::size_t bound = j < r ? cols_[j] : n;
      for (; i < bound; ++i) {
        if (v[i] == 0) continue;
        for (std::size_t t = 0; t < m; ++t) b[t] = f.fma(b[t], v[i], a_(t, i));
      }
      auto col = la::solve(fac, b);
      if (!col) {
        if (!unconstrained) return std::nullopt;
        continue;
      }
      for (std::size_t k = j; k < r && !unconstrained; ++k)
        if ((*col)[k] != 0) return std::nullopt;
      if (solvable) (*solvable)[j] = true;
      for (std::size_t k = 0; k < r; ++k) g(k, j) = (*col)[k];
    }
    return g;
  }

  Message do_send() override {
    if (!lower_) {
      cols_ = claim();
      lower_ = std::make_unique<LowerRankProver>(a_, cols_);
    }
    if (!lower_->finished()) {
      Message m = lower_->send();
      if (lower_->finished()) stage_ = Stage::Projection;
      return m;
    }
    if (stage_ == Stage::Claim) {
      gamma_ = gamma(v_);
      stage_ = cols_.empty() ? Stage::Done : Stage::Challenge;
      return prover_message();
    }
    const std::size_t k = next_ - 1;
    const std::uint64_t y = answer_y(k);
    next_ = k;
    stage_ = next_ == 0 ? Stage::Done : Stage::Challenge;
    return prover_message({}, {y});
  }

  void do_receive(const Message& m) override {
    if (lower_ && !lower_->finished()) return lower_->receive(m);
    if (stage_ == Stage::Projection) {
      if (m.elements.size() != a_.cols()) throw ProtocolAbort(Cause::MalformedMessage, "expected v");
      v_ = m.elements;
      x_.assign(cols_.size() + 1, 0);
      next_ = cols_.size();
      stage_ = Stage::Claim;
      return;
    }
    if (m.elements.size() != 1) throw ProtocolAbort(Cause::MalformedMessage, "expected x_j");
    x_[next_] = m.elements[0];
    stage_ = Stage::Reply;
  }

  std::optional<la::DenseMatrix> owned_;
  const la::DenseMatrix& a_;
  std::vector<std::size_t> cols_;
  std::unique_ptr<LowerRankProver> lower_;
  la::Vector v_, x_;
  std::optional<la::DenseMatrix> gamma_;
  std::size_t next_ = 0;  // index j of the next x_j expected; replies concern j - 1
  Stage stage_ = Stage::Lower;
};

class CrpVerifier final : public VerifierMachine {
 public:
  CrpVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter,
              Orientation o = Orientation::Columns)
      : VerifierMachine(cs, meter),
        owned_(o == Orientation::Rows ? std::optional(a.transpose()) : std::nullopt),
        a_(owned_ ? *owned_ : a),
        lower_(a_, cs, meter) {}

  bool ready_to_send() const override {
    if (finished()) return false;
    if (!lower_.finished()) return lower_.ready_to_send();
    return stage_ == Stage::Projection || (stage_ == Stage::Rounds && !awaiting_);
  }

 protected:
  enum class Stage { Lower, Projection, Claim, Rounds };

  Message do_send() override {
    if (!lower_.finished()) return lower_.send();
    const auto& f = a_.field();
    if (stage_ == Stage::Projection) {
      v_ = cs().draw_vector(SampleSet::nonzero(f), a_.cols());
      stage_ = Stage::Claim;
      return verifier_message(v_);
    }
    awaiting_ = true;
    x_[next_] = cs().draw(SampleSet(f));
    return verifier_message({x_[next_]});
  }

  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (!lower_.finished()) {
      lower_.receive(m);
      if (!lower_.finished()) return;
      if (!lower_.verdict().accepted()) return finish_with(lower_.verdict());
      cols_ = lower_.columns();
      x_.assign(cols_.size() + 1, 0);
      y_.assign(cols_.size(), 0);
      next_ = cols_.size();
      stage_ = Stage::Projection;
      return;
    }
    if (stage_ == Stage::Claim) {
      if (!well_formed(m, 0, 0, f)) return;
      stage_ = Stage::Rounds;
    } else {
      if (!well_formed(m, 0, 1, f)) return;
      awaiting_ = false;
      y_[next_ - 1] = m.elements[0];
      --next_;
    }
    if (next_ == 0) final_check();
  }

 private:
  void final_check() {
    const auto& f = a_.field();
    const std::size_t n = a_.cols(), r = cols_.size();
    x_[0] = cs().draw(SampleSet(f));
    // suffix[j] = x_j + ... + x_r; entry i of W x sums x_j over c_j > i.
    la::Vector z(n, 0);
    std::uint64_t s = 0;
    for (std::size_t j = 0; j <= r; ++j) s = f.add(s, x_[j]);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (j < r && cols_[j] <= i) s = f.sub(s, x_[j++]);
      z[i] = f.mul(v_[i], s);
    }
    for (std::size_t k = 0; k < r; ++k) z[cols_[k]] = f.sub(z[cols_[k]], y_[k]);
    meter().verifier_field_ops += n + 2 * r;
    const auto az = la::matvec(a_, z, &meter());
    for (auto e : az)
      if (e != 0) return reject(Cause::FinalCheck, "A z != 0");
    result_.rank = r;
    result_.profile = la::RankProfile{cols_};
    accept();
  }

  std::optional<la::DenseMatrix> owned_;
  const la::DenseMatrix& a_;
  LowerRankVerifier lower_;
  std::vector<std::size_t> cols_;
  la::Vector v_, x_, y_;
  std::size_t next_ = 0;
  Stage stage_ = Stage::Lower;
  bool awaiting_ = false;
};

}  // namespace rkcert::proto
