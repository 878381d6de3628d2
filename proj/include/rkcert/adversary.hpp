#pragma once

// Cheating provers. Each one sends well-formed messages in the right order
// and guesses the challenges it has not seen yet, so that rejections come
// only from the verifier's algebraic checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rkcert/error.hpp"
#include "rkcert/ff.hpp"
#include "rkcert/la.hpp"
#include "rkcert/proto/crp.hpp"
#include "rkcert/proto/grp.hpp"
#include "rkcert/proto/ldup.hpp"
#include "rkcert/proto/noninteractive.hpp"
#include "rkcert/proto/registry.hpp"
#include "rkcert/proto/rpm.hpp"
#include "rkcert/proto/triangular.hpp"

namespace rkcert::adversary {

using proto::Cause;
using proto::Message;

/// Raised when an adversary is built for an instance that violates its
/// precondition.
class Precondition : public Error {
 public:
  using Error::Error;
};

inline la::Vector guesses(const PrimeField& f, std::size_t n, RandomSource& rng) {
  la::Vector g(n);
  for (auto& v : g) v = sample(SampleSet(f), rng);
  return g;
}

// ---------------------------------------------------------------------------
// GRP forge. Rounds i >= 1 answer honestly for A + t*I (the first shift with
// generic rank profile). Round 0 guesses w_0 and answers (x_0, y_0) so that
// the final check holds for that guess; z_0 then satisfies the first check
// for the actual w_0.

class GrpForge final : public proto::GrpProver {
 public:
  GrpForge(const la::DenseMatrix& a, RandomSource& rng) : GrpProver(a), rng_(rng) {
    if (a.rows() != a.cols() || la::pluq_crp(a).rank != a.rows())
      throw Precondition("grp-forge: A must be non-singular");
    if (la::lu_no_pivoting(a)) throw Precondition("grp-forge: A has generic rank profile");
  }

 protected:
  void prepare() override {
    const auto& f = a_.field();
    la::DenseMatrix shifted = a_;
    for (std::uint64_t t = 1; t < f.modulus(); ++t) {
      for (std::size_t i = 0; i < n_; ++i) shifted(i, i) = f.add(a_(i, i), t);
      if (auto lu = la::lu_no_pivoting(shifted)) {
        l_ = std::move(lu->l);
        up_ = std::move(lu->u);
        return;
      }
    }
    l_ = la::DenseMatrix::identity(f, n_);
    up_ = la::DenseMatrix::identity(f, n_);
  }

  std::pair<std::uint64_t, std::uint64_t> answer_xy(std::size_t i) override {
    if (i > 0) return GrpProver::answer_xy(i);
    guess_ = sample(SampleSet(a_.field()), rng_);
    return targets(guess_);
  }

  std::uint64_t answer_z(std::size_t i) override {
    if (i > 0) return GrpProver::answer_z(i);
    const auto& f = a_.field();
    const auto [tx, ty] = targets(w_[0]);
    if (x_[0] != 0) return f.div(tx, x_[0]);
    if (y_[0] != 0) return f.div(ty, y_[0]);
    return 0;
  }

 private:
  /// (w^T A u - sum_{i>0} z_i x_i, same with v) for w_0 = w0.
  std::pair<std::uint64_t, std::uint64_t> targets(std::uint64_t w0) const {
    const auto& f = a_.field();
    la::Vector w = w_;
    w[0] = w0;
    const auto wa = la::vecmat(w, a_);
    std::uint64_t tx = la::dot(f, wa, u_), ty = la::dot(f, wa, v_);
    for (std::size_t i = 1; i < n_; ++i) {
      tx = f.sub(tx, f.mul(z_[i], x_[i]));
      ty = f.sub(ty, f.mul(z_[i], y_[i]));
    }
    return {tx, ty};
  }

  RandomSource& rng_;
  std::uint64_t guess_ = 0;
};

// ---------------------------------------------------------------------------
// D scaling. Commits c*D_i for the chosen indices (all by default) and
// otherwise answers as the honest prover: x~, y~ and z~ do not involve D, so
// there is nothing to rescale.

class ScaleD final : public proto::LdupProver {
 public:
  ScaleD(const la::DenseMatrix& a, std::uint64_t c, std::optional<std::size_t> index = std::nullopt)
      : LdupProver(a), c_(c), index_(index) {
    if (a.field().reduce(c) == 0) throw Precondition("scale-d: the factor must be nonzero");
  }

 protected:
  Message commitment() override {
    const auto& f = a_.field();
    la::Vector d = fac_->d.entries();
    for (std::size_t i = 0; i < d.size(); ++i)
      if (!index_ || *index_ == i) d[i] = f.mul(d[i], f.reduce(c_));
    return proto::encode_commitment(fac_->p, d);
  }

 private:
  std::uint64_t c_;
  std::optional<std::size_t> index_;
};

/// Determinant prover claiming `claimed` instead of det(A) != 0 by scaling D_0.
inline std::unique_ptr<proto::DetProver> det_shift(const la::DenseMatrix& a, std::uint64_t claimed) {
  const auto& f = a.field();
  const auto fac = la::ldup(a);
  const std::uint64_t det = proto::signed_product(f, fac.p, fac.d.entries());
  const std::uint64_t c = f.div(f.reduce(claimed), det);
  return std::make_unique<proto::DetProver>(a, std::make_unique<ScaleD>(a, c, 0));
}

// ---------------------------------------------------------------------------
// CRP shift. Claims the column rank profile with c_0 replaced by the first
// later column that keeps the set independent. Gamma solves every column it
// can without the support condition; the other columns are random. Unknown
// x_j are guessed.

class CrpShift final : public proto::CrpProver {
 public:
  CrpShift(const la::DenseMatrix& a, RandomSource& rng) : CrpProver(a), rng_(rng) {
    auto honest = la::column_rank_profile(la::pluq_crp(a)).indices;
    if (honest.empty()) throw Precondition("crp-shift: A is zero");
    std::vector<std::size_t> rows(a.rows());
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
    for (std::size_t k = honest[0] + 1; k < a.cols() && shifted_.empty(); ++k) {
      if (std::find(honest.begin(), honest.end(), k) != honest.end()) continue;
      auto cand = honest;
      cand[0] = k;
      std::sort(cand.begin(), cand.end());
      if (la::pluq_crp(a.select(rows, cand)).rank == cand.size()) shifted_ = cand;
    }
    if (shifted_.empty()) throw Precondition("crp-shift: no later column can replace c_0");
    g_ = guesses(a.field(), honest.size() + 1, rng_);
  }

  const std::vector<std::size_t>& claimed() const { return shifted_; }

 protected:
  std::vector<std::size_t> claim() override { return shifted_; }

  la::DenseMatrix gamma(const la::Vector& v) override {
    std::vector<bool> solvable;
    auto g = *solve_gamma(v, true, &solvable);
    const SampleSet s(a_.field());
    for (std::size_t j = 0; j < solvable.size(); ++j)
      if (!solvable[j])
        for (std::size_t k = 0; k < g.rows(); ++k) g(k, j) = sample(s, rng_);
    return g;
  }

  std::uint64_t answer_y(std::size_t k) override {
    const auto& f = a_.field();
    std::uint64_t y = 0;
    for (std::size_t j = 0; j <= cols_.size(); ++j) y = f.fma(y, (*gamma_)(k, j), j > k ? x_[j] : g_[j]);
    return y;
  }

 private:
  RandomSource& rng_;
  std::vector<std::size_t> shifted_;
  la::Vector g_;
};

/// Claims the column rank profile plus the first column outside it.
class RankInflate final : public proto::CrpProver {
 public:
  explicit RankInflate(const la::DenseMatrix& a) : CrpProver(a) {
    cols_claim_ = la::column_rank_profile(la::pluq_crp(a)).indices;
    if (cols_claim_.size() >= std::min(a.rows(), a.cols()))
      throw Precondition("rank-inflate: no room for a larger rank");
    std::size_t k = 0;
    while (std::find(cols_claim_.begin(), cols_claim_.end(), k) != cols_claim_.end()) ++k;
    cols_claim_.push_back(k);
    std::sort(cols_claim_.begin(), cols_claim_.end());
  }

 protected:
  std::vector<std::size_t> claim() override { return cols_claim_; }

 private:
  std::vector<std::size_t> cols_claim_;
};

// ---------------------------------------------------------------------------
// Triangular ghost: uses the true, non-triangular T and guessed future
// coordinates of x.

class TriGhost final : public proto::TriEquivProver {
 public:
  TriGhost(const la::DenseMatrix& a, const la::DenseMatrix& b, proto::Side side, RandomSource& rng)
      : TriEquivProver(a, b, side), g_(guesses(a.field(), a.cols(), rng)) {
    auto t = proto::right_quotient(a, b);
    if (!t) throw Precondition("tri-ghost: A is not regular or B is not in its span");
    const bool triangular = side == proto::Side::Lower ? la::is_lower_triangular(*t) : la::is_upper_triangular(*t);
    if (triangular) honest_ = true;
  }

  bool honest() const { return honest_; }

 protected:
  la::DenseMatrix witness() override { return *proto::right_quotient(a_, b_); }
  std::uint64_t fill(std::size_t j) override { return g_[j]; }

 private:
  la::Vector g_;
  bool honest_ = false;
};

// ---------------------------------------------------------------------------
// RPM permutation: commits an LDUP decomposition with a permutation other
// than the rank profile matrix. f_i guesses the e_k not yet received.

class CommittedLdup final : public proto::LdupProver {
 public:
  CommittedLdup(const la::DenseMatrix& a, la::Permutation p) : LdupProver(a), p_(std::move(p)) {
    if (!la::ldup_with(a, p_)) throw Precondition("rpm-perm: A*P^T lacks generic rank profile");
  }

 protected:
  void prepare() override { fac_ = la::ldup_with(a_, p_); }

 private:
  la::Permutation p_;
};

class RpmPerm final : public proto::RpmInvProver {
 public:
  RpmPerm(const la::DenseMatrix& a, la::Permutation p, RandomSource& rng)
      : RpmInvProver(a, std::make_unique<CommittedLdup>(a, p)), g_(guesses(a.field(), a.rows(), rng)) {
    if (p == la::ldup(a).p) throw Precondition("rpm-perm: the permutation is the rank profile matrix");
  }

 protected:
  std::uint64_t answer_f(std::size_t i) override {
    const auto& f = a_.field();
    std::uint64_t s = 0;
    for (std::size_t k = 0; k < n_; ++k) s = f.fma(s, k <= i ? e_[k] : g_[k], (*ubar_)(k, i));
    return s;
  }

 private:
  la::Vector g_;
};

// ---------------------------------------------------------------------------
// Trials

struct AttackReport {
  std::string name;
  std::uint64_t modulus = 0;
  std::size_t trials = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t aborted = 0;
  double rate = 0;
  double bound = 0;      // soundness error from the corresponding theorem
  double threshold = 0;  // bound + 3 sigma
  bool pass = false;
};

struct AttackInfo {
  std::string_view name;
  unsigned bound_numerator;  // bound = numerator / p
};

inline constexpr std::array<AttackInfo, 6> kAttacks{{
    {"grp-forge", 1},
    {"crp-shift", 1},
    {"tri-ghost", 1},
    {"freivalds", 1},
    {"scale-d", 2},
    {"rpm-perm", 2},
}};

inline std::optional<AttackInfo> attack_info(std::string_view name) {
  for (const auto& a : kAttacks)
    if (a.name == name) return a;
  return std::nullopt;
}

/// Per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// The fixed instance of an attack; random parts depend only on `seed`.
inline proto::Inputs attack_instance(std::string_view name, const PrimeField& f, std::uint64_t seed) {
  SeededRandom rng(splitmix64(seed ^ 0x1157a9ce5ULL));
  if (name == "grp-forge") return proto::Inputs(la::DenseMatrix::from_rows(f, {{0, 1}, {1, 0}}));
  if (name == "crp-shift") return proto::Inputs(la::DenseMatrix::from_rows(f, {{1, 1}, {2, 2}}));
  if (name == "rpm-perm") return proto::Inputs(la::DenseMatrix::from_rows(f, {{1, 1}, {1, 0}}));
  if (name == "scale-d") return proto::Inputs(la::random_nonsingular(f, 4, rng));
  if (name == "tri-ghost") {
    const std::size_t m = 4, n = 3;
    la::DenseMatrix a = la::random_rank_matrix(f, m, n, n, rng);
    la::DenseMatrix t = la::random_unit_lower(f, n, rng);
    t(0, n - 1) = sample(SampleSet::nonzero(f), rng);
    proto::Inputs in(a);
    in.b = la::multiply(a, t);
    return in;
  }
  if (name == "freivalds") {
    proto::Inputs in(la::random_matrix(f, 3, 3, rng));
    in.b = la::random_matrix(f, 3, 3, rng);
    return in;
  }
  throw Error("unknown adversary: " + std::string(name));
}

inline proto::ProtocolId attack_protocol(std::string_view name) {
  if (name == "grp-forge") return proto::ProtocolId::Grp;
  if (name == "crp-shift") return proto::ProtocolId::Crp;
  if (name == "tri-ghost") return proto::ProtocolId::TriEquiv;
  if (name == "freivalds") return proto::ProtocolId::Freivalds;
  if (name == "scale-d") return proto::ProtocolId::Ldup;
  if (name == "rpm-perm") return proto::ProtocolId::RpmInv;
  throw Error("unknown adversary: " + std::string(name));
}

inline std::unique_ptr<proto::ProverMachine> make_adversary(std::string_view name, const proto::Inputs& in,
                                                            RandomSource& rng) {
  const auto& f = in.a.field();
  if (name == "grp-forge") return std::make_unique<GrpForge>(in.a, rng);
  if (name == "crp-shift") return std::make_unique<CrpShift>(in.a, rng);
  if (name == "tri-ghost") return std::make_unique<TriGhost>(in.a, *in.b, in.side, rng);
  if (name == "scale-d") return std::make_unique<ScaleD>(in.a, 2);
  if (name == "rpm-perm") return std::make_unique<RpmPerm>(in.a, la::Permutation({1, 0}), rng);
  if (name == "freivalds") {
    la::DenseMatrix c = la::multiply(in.a, *in.b);
    c(0, 0) = f.add(c(0, 0), 1);
    return std::make_unique<proto::FreivaldsProver>(std::move(c));
  }
  throw Error("unknown adversary: " + std::string(name));
}

/// bound + 3 sqrt(bound (1 - bound) / N).
inline double threshold(double bound, std::size_t trials) {
  return bound + 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
}

inline AttackReport run_attack(std::string_view name, std::uint64_t p, std::size_t trials, std::uint64_t seed) {
  const auto info = attack_info(name);
  if (!info) throw Error("unknown adversary: " + std::string(name));
  if (trials == 0) throw Error("the number of trials must be positive");
  const PrimeField f(p);
  const proto::Inputs in = attack_instance(name, f, seed);
  const auto id = attack_protocol(name);
  AttackReport r;
  r.name = std::string(name);
  r.modulus = p;
  r.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t s = splitmix64(seed + 2 * t);
    SeededRandom rng(splitmix64(seed + 2 * t + 1));
    auto prover = make_adversary(name, in, rng);
    const auto v = proto::execute(id, in, *prover, s).run.verdict;
    switch (v.status) {
      case proto::Status::Accept: ++r.accepted; break;
      case proto::Status::Reject: ++r.rejected; break;
      case proto::Status::Abort: ++r.aborted; break;
    }
  }
  r.rate = static_cast<double>(r.accepted) / static_cast<double>(trials);
  r.bound = static_cast<double>(info->bound_numerator) / static_cast<double>(p);
  r.threshold = threshold(r.bound, trials);
  r.pass = r.rate <= r.threshold;
  return r;
}

}  // namespace rkcert::adversary
