#pragma once

// Brute-force references for rank, determinant, minors and rank profiles.
// Deliberately slow and independent of the elimination code in la.hpp; they
// share only the DenseMatrix container.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rkcert/error.hpp"
#include "rkcert/ff.hpp"
#include "rkcert/la.hpp"

namespace rkcert::oracle {

using Index = std::vector<std::size_t>;
using Rows = std::vector<std::vector<std::uint64_t>>;

namespace detail {

inline Rows extract(const la::DenseMatrix& a, const Index& rows, const Index& cols) {
  Rows s(rows.size(), std::vector<std::uint64_t>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) s[i][j] = a(rows[i], cols[j]);
  return s;
}

inline Index range(std::size_t lo, std::size_t hi) {
  Index r;
  for (std::size_t i = lo; i < hi; ++i) r.push_back(i);
  return r;
}

// Plain row reduction; returns the rank and the determinant when square.
inline std::size_t reduce(Rows s, const PrimeField& f, std::uint64_t* det) {
  const std::size_t m = s.size();
  const std::size_t n = m == 0 ? 0 : s[0].size();
  std::size_t rank = 0;
  std::uint64_t d = 1;
  for (std::size_t c = 0; c < n && rank < m; ++c) {
    std::size_t piv = rank;
    while (piv < m && s[piv][c] == 0) ++piv;
    if (piv == m) {
      d = 0;
      continue;
    }
    if (piv != rank) {
      std::swap(s[piv], s[rank]);
      d = f.neg(d);
    }
    d = f.mul(d, s[rank][c]);
    const std::uint64_t inv = f.inv(s[rank][c]);
    for (std::size_t i = rank + 1; i < m; ++i) {
      if (s[i][c] == 0) continue;
      const std::uint64_t t = f.mul(s[i][c], inv);
      for (std::size_t j = c; j < n; ++j) s[i][j] = f.sub(s[i][j], f.mul(t, s[rank][j]));
    }
    ++rank;
  }
  if (det != nullptr) *det = (rank == m && m == n) ? d : 0;
  return rank;
}

inline std::uint64_t leibniz(const Rows& s, const PrimeField& f) {
  const std::size_t n = s.size();
  Index perm = range(0, n);
  std::uint64_t total = 0;
  do {
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    std::uint64_t term = 1;
    for (std::size_t i = 0; i < n; ++i) term = f.mul(term, s[i][perm[i]]);
    total = inversions % 2 == 0 ? f.add(total, term) : f.sub(total, term);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

}  // namespace detail

/// [A]^I_J with 0-based row set I and column set J; the empty minor is 1.
inline std::uint64_t minor(const la::DenseMatrix& a, const Index& rows, const Index& cols) {
  if (rows.size() != cols.size()) throw DimensionMismatch("minor: |I| != |J|");
  for (auto i : rows)
    if (i >= a.rows()) throw DimensionMismatch("minor: row index out of range");
  for (auto j : cols)
    if (j >= a.cols()) throw DimensionMismatch("minor: column index out of range");
  if (rows.empty()) return 1;
  const auto s = detail::extract(a, rows, cols);
  if (rows.size() <= 4) return detail::leibniz(s, a.field());
  std::uint64_t d = 0;
  detail::reduce(s, a.field(), &d);
  return d;
}

inline std::size_t oracle_rank(const la::DenseMatrix& a) {
  return detail::reduce(detail::extract(a, detail::range(0, a.rows()), detail::range(0, a.cols())),
                        a.field(), nullptr);
}

inline std::uint64_t oracle_det(const la::DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("oracle_det: square matrix required");
  const auto all = detail::range(0, a.rows());
  const auto s = detail::extract(a, all, all);
  std::uint64_t d = 0;
  detail::reduce(s, a.field(), &d);
  if (a.rows() <= 4 && detail::leibniz(s, a.field()) != d)
    throw std::logic_error("oracle_det: elimination and Leibniz disagree");
  return a.rows() == 0 ? 1 : d;
}

/// The Desnanot-Jacobi identity and its cyclically shifted variant.
inline bool check_dodgson(const la::DenseMatrix& a) {
  const std::size_t n = a.rows();
  if (n < 2 || a.cols() != n) throw DimensionMismatch("check_dodgson: n >= 2 square");
  const auto& f = a.field();
  using detail::range;
  auto det2 = [&](std::uint64_t a11, std::uint64_t a12, std::uint64_t a21, std::uint64_t a22) {
    return f.sub(f.mul(a11, a22), f.mul(a12, a21));
  };
  const std::uint64_t full = minor(a, range(0, n), range(0, n));

  const std::uint64_t lhs1 = f.mul(full, minor(a, range(1, n - 1), range(1, n - 1)));
  const std::uint64_t rhs1 = det2(minor(a, range(0, n - 1), range(0, n - 1)),
                                  minor(a, range(1, n), range(0, n - 1)),
                                  minor(a, range(0, n - 1), range(1, n)),
                                  minor(a, range(1, n), range(1, n)));

  Index skip = range(0, n - 2);
  skip.push_back(n - 1);
  const Index head = range(0, n - 1);
  const std::uint64_t lhs2 = f.mul(full, minor(a, range(0, n - 2), range(0, n - 2)));
  const std::uint64_t rhs2 = det2(minor(a, skip, skip), minor(a, head, skip),
                                  minor(a, skip, head), minor(a, head, head));
  return lhs1 == rhs1 && lhs2 == rhs2;
}

/// Greedy: column j joins iff it raises the rank of the columns kept so far.
inline la::RankProfile oracle_crp(const la::DenseMatrix& a) {
  la::RankProfile c;
  const auto all_rows = detail::range(0, a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    Index trial = c.indices;
    trial.push_back(j);
    if (detail::reduce(detail::extract(a, all_rows, trial), a.field(), nullptr) == trial.size())
      c.indices.push_back(j);
  }
  return c;
}

inline la::RankProfile oracle_rrp(const la::DenseMatrix& a) {
  return oracle_crp(a.transpose());
}

/// Ranks of all leading submatrices: table[i][j] = rank(A[0..i, 0..j)),
/// with a zero first row and column.
inline std::vector<std::vector<std::size_t>> leading_ranks(const la::DenseMatrix& a) {
  std::vector<std::vector<std::size_t>> t(a.rows() + 1, std::vector<std::size_t>(a.cols() + 1, 0));
  for (std::size_t i = 1; i <= a.rows(); ++i)
    for (std::size_t j = 1; j <= a.cols(); ++j)
      t[i][j] = detail::reduce(detail::extract(a, detail::range(0, i), detail::range(0, j)),
                               a.field(), nullptr);
  return t;
}

/// The unique 0/1 matrix whose leading submatrices have the ranks of A's.
/// Entry (i, j) is the second difference of the leading-rank table.
inline la::RankProfileMatrix oracle_rpm(const la::DenseMatrix& a) {
  const auto t = leading_ranks(a);
  la::RankProfileMatrix r{a.rows(), a.cols(), {}};
  for (std::size_t i = 1; i <= a.rows(); ++i) {
    for (std::size_t j = 1; j <= a.cols(); ++j) {
      const auto plus = t[i][j] + t[i - 1][j - 1];
      const auto minus = t[i - 1][j] + t[i][j - 1];
      if (plus > minus) r.ones.emplace_back(i - 1, j - 1);
    }
  }
  return r;
}

/// Exhaustive search over partial permutation matrices for those matching
/// A's leading-rank table. Only for tiny shapes.
inline std::vector<la::RankProfileMatrix> oracle_rpm_exhaustive(const la::DenseMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  const auto target = leading_ranks(a);
  std::vector<la::RankProfileMatrix> found;
  // Each row picks a column or none (encoded as n).
  std::vector<std::size_t> choice(m, 0);
  for (;;) {
    std::vector<bool> used(n, false);
    bool ok = true;
    for (std::size_t i = 0; i < m && ok; ++i) {
      if (choice[i] == n) continue;
      if (used[choice[i]]) ok = false;
      used[choice[i]] = true;
    }
    if (ok) {
      for (std::size_t i = 1; i <= m && ok; ++i) {
        for (std::size_t j = 1; j <= n && ok; ++j) {
          std::size_t cnt = 0;
          for (std::size_t k = 0; k < i; ++k)
            if (choice[k] < j) ++cnt;
          if (cnt != target[i][j]) ok = false;
        }
      }
    }
    if (ok) {
      la::RankProfileMatrix r{m, n, {}};
      for (std::size_t i = 0; i < m; ++i)
        if (choice[i] < n) r.ones.emplace_back(i, choice[i]);
      found.push_back(r);
    }
    std::size_t k = 0;
    while (k < m && ++choice[k] > n) choice[k++] = 0;
    if (k == m) break;
  }
  return found;
}

/// All leading principal minors up to the rank are nonzero.
inline bool has_grp(const la::DenseMatrix& a) {
  const std::size_t r = oracle_rank(a);
  for (std::size_t i = 1; i <= r; ++i)
    if (minor(a, detail::range(0, i), detail::range(0, i)) == 0) return false;
  return true;
}

}  // namespace rkcert::oracle
