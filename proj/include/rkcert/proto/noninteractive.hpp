#pragma once

// Static certificates: matrix product (Freivalds), and PLUQ factorizations
// revealing the column rank profile or the rank profile matrix. The prover
// sends a single message; the verifier checks its structure and projects the
// claimed product on random vectors.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rkcert/la.hpp"
#include "rkcert/proto/challenge.hpp"
#include "rkcert/proto/message.hpp"

namespace rkcert::proto {

// ---------------------------------------------------------------------------
// Freivalds: C = A*B

class FreivaldsProver final : public ProverMachine {
 public:
  /// Sends the claimed product C.
  explicit FreivaldsProver(la::DenseMatrix c) : c_(std::move(c)) {}
  static FreivaldsProver honest(const la::DenseMatrix& a, const la::DenseMatrix& b) {
    return FreivaldsProver(la::multiply(a, b));
  }
  bool ready_to_send() const override { return !sent_; }
  bool finished() const override { return sent_; }

 protected:
  Message do_send() override {
    sent_ = true;
    return prover_message({}, {c_.data().begin(), c_.data().end()});
  }
  void do_receive(const Message&) override {}

 private:
  la::DenseMatrix c_;
  bool sent_ = false;
};

class FreivaldsVerifier final : public VerifierMachine {
 public:
  FreivaldsVerifier(const la::DenseMatrix& a, const la::DenseMatrix& b, std::size_t repetitions,
                    ChallengeSource& cs, CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a), b_(b), k_(repetitions) {
    if (a.cols() != b.rows()) throw DimensionMismatch("freivalds: A and B are not conformal");
  }
  bool ready_to_send() const override { return false; }

 protected:
  Message do_send() override { throw ProtocolAbort(Cause::OrderViolation, "freivalds verifier never sends"); }
  void do_receive(const Message& m) override {
    const auto& f = a_.field();
    if (!well_formed(m, 0, a_.rows() * b_.cols(), f)) return;
    la::DenseMatrix c(f, a_.rows(), b_.cols());
    std::copy(m.elements.begin(), m.elements.end(), c.data().begin());
    const SampleSet s(f);
    for (std::size_t rep = 0; rep < k_; ++rep) {
      const auto v = cs().draw_vector(s, b_.cols());
      const auto lhs = la::matvec(a_, la::matvec(b_, v, &meter()), &meter());
      if (lhs != la::matvec(c, v, &meter())) return reject(Cause::ProductMismatch, "A(Bv) != Cv");
    }
    accept();
  }

 private:
  const la::DenseMatrix& a_;
  const la::DenseMatrix& b_;
  std::size_t k_;
};

// ---------------------------------------------------------------------------
// PLUQ certificates

/// integers: r, P images (m), Q images (n); elements: L (m x r), U (r x n),
/// both row-major.
inline Message encode_pluq(const la::PluqFactorization& f) {
  Message m;
  m.direction = Direction::ProverToVerifier;
  m.integers.push_back(static_cast<std::uint32_t>(f.rank));
  for (auto v : f.p.images()) m.integers.push_back(static_cast<std::uint32_t>(v));
  for (auto v : f.q.images()) m.integers.push_back(static_cast<std::uint32_t>(v));
  m.elements.assign(f.l.data().begin(), f.l.data().end());
  m.elements.insert(m.elements.end(), f.u.data().begin(), f.u.data().end());
  return m;
}

enum class PluqKind { ColumnProfile, RankProfileMatrix };

class PluqCertificateVerifier final : public VerifierMachine {
 public:
  PluqCertificateVerifier(const la::DenseMatrix& a, PluqKind kind, ChallengeSource& cs,
                          CostMeter& meter)
      : VerifierMachine(cs, meter), a_(a), kind_(kind) {}
  bool ready_to_send() const override { return false; }

 protected:
  Message do_send() override { throw ProtocolAbort(Cause::OrderViolation, "certificate verifier never sends"); }

  void do_receive(const Message& msg) override {
    const auto& f = a_.field();
    const std::size_t m = a_.rows(), n = a_.cols();
    if (msg.integers.empty()) return reject(Cause::MalformedMessage, "missing rank");
    const std::size_t r = msg.integers[0];
    if (r > std::min(m, n)) return reject(Cause::MalformedWitness, "rank exceeds dimensions");
    if (!well_formed(msg, 1 + m + n, m * r + r * n, f)) return;
    std::vector<std::size_t> pi(msg.integers.begin() + 1, msg.integers.begin() + 1 + static_cast<std::ptrdiff_t>(m));
    std::vector<std::size_t> qi(msg.integers.begin() + 1 + static_cast<std::ptrdiff_t>(m), msg.integers.end());
    if (!la::Permutation::is_bijection(pi) || !la::Permutation::is_bijection(qi))
      return reject(Cause::MalformedWitness, "P or Q is not a permutation");
    const la::Permutation p(pi), q(qi);
    la::DenseMatrix l(f, m, r), u(f, r, n);
    std::copy_n(msg.elements.begin(), m * r, l.data().begin());
    std::copy_n(msg.elements.begin() + static_cast<std::ptrdiff_t>(m * r), r * n, u.data().begin());
    for (std::size_t i = 0; i < r; ++i) {
      if (l(i, i) != 1) return reject(Cause::MalformedWitness, "L is not unit diagonal");
      for (std::size_t j = i + 1; j < r; ++j)
        if (l(i, j) != 0) return reject(Cause::MalformedWitness, "L is not lower triangular");
      if (u(i, i) == 0) return reject(Cause::MalformedWitness, "zero pivot in U");
      for (std::size_t j = 0; j < i; ++j)
        if (u(i, j) != 0) return reject(Cause::MalformedWitness, "U is not upper triangular");
    }

    if (kind_ == PluqKind::ColumnProfile) {
      la::DenseMatrix uq(f, r, n);
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < n; ++j) uq(i, q[j]) = u(i, j);
      if (!la::is_row_echelon(uq)) return reject(Cause::NotRowEchelon, "UQ is not in row echelon form");
    } else {
      const auto pl = la::conjugate_by_permutations(p, la::pad_columns(l, m), p);
      if (!la::is_lower_triangular(pl)) return reject(Cause::NotLowerTriangular, "P[L 0]P^T is not lower triangular");
      const auto uq = la::conjugate_by_permutations(q, la::pad_rows(u, n), q);
      if (!la::is_upper_triangular(uq)) return reject(Cause::NotUpperTriangular, "Q^T[U;0]Q is not upper triangular");
    }

    // Freivalds on A = P L U Q without forming the product.
    const auto v = cs().draw_vector(SampleSet(f), n);
    const auto av = la::matvec(a_, v, &meter());
    const auto qv = q.backward(std::span<const std::uint64_t>(v));
    la::Vector uqv(r, 0), luqv(m, 0);
    for (std::size_t i = 0; i < r; ++i) uqv[i] = la::dot(f, u.row(i), qv);
    for (std::size_t i = 0; i < m; ++i) luqv[i] = la::dot(f, l.row(i), uqv);
    meter().verifier_field_ops += 2 * r * (m + n);
    if (p.forward(std::span<const std::uint64_t>(luqv)) != av)
      return reject(Cause::ProductMismatch, "Av != PLUQv");

    la::PluqFactorization fac{p, std::move(l), std::move(u), q, r};
    result_.rank = r;
    if (kind_ == PluqKind::ColumnProfile) {
      result_.profile = la::column_rank_profile(fac);
    } else {
      result_.rpm = la::rank_profile_matrix(fac);
    }
    accept();
  }

 private:
  const la::DenseMatrix& a_;
  PluqKind kind_;
};

}  // namespace rkcert::proto
