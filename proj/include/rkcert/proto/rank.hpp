#pragma once

// Rank bounds. Upper bound: the prover expresses a random vector of the image
// of A with at most r columns. Lower bound: the prover recovers the secret
// coefficients of a combination of r claimed-independent columns.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"

namespace rkcert::proto {

// ---------------------------------------------------------------------------
// Upper bound

class UpperRankProver final : public ProverMachine {
 public:
  UpperRankProver(const la::DenseMatrix& a, std::size_t claim) : a_(a), claim_(claim) {}

  bool ready_to_send() const override { return step_ == 0 || step_ == 2; }
  bool finished() const override { return step_ == 3; }

 protected:
  Message do_send() override {
    if (step_ == 0) {
      fac_ = la::pluq_crp(a_);
      if (fac_->rank > claim_)
        throw ProtocolAbort(Cause::NoWitness, "rank exceeds the claimed upper bound");
      step_ = 1;
      return prover_message({static_cast<std::uint32_t>(claim_)});
    }
    step_ = 3;
    return prover_message({}, std::move(gamma_));
  }
  void do_receive(const Message& m) override {
    if (m.elements.size() != a_.rows()) throw ProtocolAbort(Cause::MalformedMessage, "bad challenge length");
    auto g = la::solve(*fac_, m.elements);
    if (!g) throw ProtocolAbort(Cause::NoWitness, "challenge is not in the image of A");
    gamma_ = std::move(*g);
    step_ = 2;
  }

 private:
  const la::DenseMatrix& a_;
  std::size_t claim_;
  std::optional<la::PluqFactorization> fac_;
  la::Vector gamma_;
  int step_ = 0;
};

class UpperRankVerifier final : public VerifierMachine {
 public:
  /// A claim above `max_claim` is rejected with RankMismatch.
  UpperRankVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter,
                    std::optional<std::size_t> max_claim = std::nullopt)
      : VerifierMachine(cs, meter), a_(a), max_claim_(max_claim) {}

  bool ready_to_send() const override { return !finished() && step_ == 1; }

 protected:
  Message do_send() override {
    const auto v = cs().draw_vector(SampleSet(a_.field()), a_.cols());
    w_ = la::matvec(a_, v, &meter());
    step_ = 2;
    return verifier_message(w_);
  }
  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (step_ == 0) {
      if (!well_formed(m, 1, 0, f)) return;
      r_ = m.integers[0];
      if (max_claim_ && r_ > *max_claim_) return reject(Cause::RankMismatch, "claimed bound too large");
      step_ = 1;
      return;
    }
    if (!well_formed(m, 0, a_.cols(), f)) return;
    std::size_t weight = 0;
    for (auto g : m.elements) weight += g != 0;
    meter().verifier_field_ops += a_.cols();
    if (weight > r_) return reject(Cause::HammingWeight, "gamma has too many nonzeros");
    if (la::matvec(a_, m.elements, &meter()) != w_) return reject(Cause::ProductMismatch, "A*gamma != w");
    result_.rank = r_;
    accept();
  }

 private:
  const la::DenseMatrix& a_;
  std::optional<std::size_t> max_claim_;
  std::size_t r_ = 0;
  la::Vector w_;
  int step_ = 0;
};

// ---------------------------------------------------------------------------
// Lower bound

inline std::vector<std::uint32_t> to_u32(const std::vector<std::size_t>& v) {
  return {v.begin(), v.end()};
}

class LowerRankProver final : public ProverMachine {
 public:
  /// Claims the given columns; by default the column rank profile.
  explicit LowerRankProver(const la::DenseMatrix& a,
                           std::optional<std::vector<std::size_t>> cols = std::nullopt)
      : a_(a), cols_(std::move(cols)) {}

  bool ready_to_send() const override { return step_ == 0 || step_ == 2; }
  bool finished() const override { return step_ == 3; }
  const std::vector<std::size_t>& columns() const { return *cols_; }

 protected:
  Message do_send() override {
    if (step_ == 0) {
      if (!cols_) cols_ = la::column_rank_profile(la::pluq_crp(a_)).indices;
      fac_ = la::pluq_crp(a_.select(all_rows(), *cols_));
      step_ = 1;
      return prover_message(to_u32(*cols_));
    }
    step_ = 3;
    return prover_message({}, std::move(beta_));
  }
  void do_receive(const Message& m) override {
    if (m.elements.size() != a_.rows()) throw ProtocolAbort(Cause::MalformedMessage, "bad challenge length");
    auto b = la::solve(*fac_, m.elements);
    if (!b) throw ProtocolAbort(Cause::NoWitness, "challenge is not spanned by the claimed columns");
    beta_ = std::move(*b);
    step_ = 2;
  }

 private:
  std::vector<std::size_t> all_rows() const {
    std::vector<std::size_t> r(a_.rows());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = i;
    return r;
  }

  const la::DenseMatrix& a_;
  std::optional<std::vector<std::size_t>> cols_;
  std::optional<la::PluqFactorization> fac_;
  la::Vector beta_;
  int step_ = 0;
};

class LowerRankVerifier final : public VerifierMachine {
 public:
  LowerRankVerifier(const la::DenseMatrix& a, ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a) {}

  bool ready_to_send() const override { return !finished() && step_ == 1; }
  const std::vector<std::size_t>& columns() const { return cols_; }

 protected:
  Message do_send() override {
    const std::size_t n = a_.cols();
    la::Vector alpha(n, 0);
    const auto nonzero = SampleSet::nonzero(a_.field());
    for (auto c : cols_) alpha[c] = cs().draw(nonzero);
    alpha_c_.clear();
    for (auto c : cols_) alpha_c_.push_back(alpha[c]);
    step_ = 2;
    return verifier_message(la::matvec(a_, alpha, &meter()));
  }
  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (step_ == 0) {
      if (!m.elements.empty() || m.integers.size() > std::min(a_.rows(), a_.cols()))
        return reject(Cause::MalformedMessage, "bad column list");
      for (std::size_t k = 0; k < m.integers.size(); ++k) {
        if (m.integers[k] >= a_.cols() || (k > 0 && m.integers[k] <= m.integers[k - 1]))
          return reject(Cause::MalformedMessage, "column indices must increase within range");
      }
      cols_.assign(m.integers.begin(), m.integers.end());
      step_ = 1;
      return;
    }
    if (!well_formed(m, 0, cols_.size(), f)) return;
    meter().verifier_field_ops += cols_.size();
    if (m.elements != alpha_c_) return reject(Cause::CoefficientMismatch, "beta != alpha");
    result_.rank = cols_.size();
    result_.profile = la::RankProfile{cols_};
    accept();
  }

 private:
  const la::DenseMatrix& a_;
  std::vector<std::size_t> cols_;
  la::Vector alpha_c_;
  int step_ = 0;
};

}  // namespace rkcert::proto
