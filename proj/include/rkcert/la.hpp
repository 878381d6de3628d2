#pragma once

// Dense linear algebra over a prime field: matrices, permutations, the two
// PLUQ elimination variants and the LDUP factorization built on them.
//
// Permutation convention. A Permutation stores a destination map: index i is
// sent to images[i]. Used as a left factor (P*M) row i of M becomes row
// images[i]; as a matrix it has its ones at (images[i], i). Used as a right
// factor (M*Q) column i of M becomes column images[i]; as a matrix it has its
// ones at (i, images[i]). With this convention a PLUQ factorization whose UQ
// is echelonized has column rank profile (Q[0], ..., Q[r-1]), and the rank
// profile matrix P [I_r 0; 0 0] Q has its ones at (P[i], Q[i]) for i < r.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rkcert/error.hpp"
#include "rkcert/ff.hpp"
#include "rkcert/meter.hpp"

namespace rkcert::la {

using Vector = std::vector<std::uint64_t>;

class DenseMatrix {
 public:
  DenseMatrix(const PrimeField& field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

  static DenseMatrix identity(const PrimeField& field, std::size_t n) {
    DenseMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  /// Entries are reduced into [0, p); negative values are allowed.
  static DenseMatrix from_rows(
      const PrimeField& field,
      const std::vector<std::vector<std::int64_t>>& rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.front().size();
    DenseMatrix a(field, m, n);
    for (std::size_t i = 0; i < m; ++i) {
      if (rows[i].size() != n) throw DimensionMismatch("ragged row list");
      for (std::size_t j = 0; j < n; ++j) a(i, j) = field.from_int(rows[i][j]);
    }
    return a;
  }

  const PrimeField& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::uint64_t& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  std::uint64_t operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<std::uint64_t> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const std::uint64_t> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const std::uint64_t> data() const { return data_; }
  std::span<std::uint64_t> data() { return data_; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](std::uint64_t v) { return v == 0; });
  }

  DenseMatrix transpose() const {
    DenseMatrix t(field_, cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix select(std::span<const std::size_t> row_idx,
                     std::span<const std::size_t> col_idx) const {
    DenseMatrix s(field_, row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i)
      for (std::size_t j = 0; j < col_idx.size(); ++j)
        s(i, j) = (*this)(row_idx[i], col_idx[j]);
    return s;
  }

  /// Leading rows x cols block.
  DenseMatrix leading(std::size_t rows, std::size_t cols) const {
    DenseMatrix s(field_, rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) s(i, j) = (*this)(i, j);
    return s;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
           a.data_ == b.data_;
  }

 private:
  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint64_t> data_;
};

class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> images)
      : images_(std::move(images)) {
    if (!is_bijection(images_)) throw Error("permutation images are not a bijection");
  }

  static Permutation identity(std::size_t n) {
    std::vector<std::size_t> im(n);
    std::iota(im.begin(), im.end(), std::size_t{0});
    return Permutation(std::move(im));
  }

  static bool is_bijection(std::span<const std::size_t> images) {
    std::vector<bool> seen(images.size(), false);
    for (std::size_t v : images) {
      if (v >= images.size() || seen[v]) return false;
      seen[v] = true;
    }
    return true;
  }

  std::size_t size() const { return images_.size(); }
  std::size_t operator[](std::size_t i) const { return images_[i]; }
  const std::vector<std::size_t>& images() const { return images_; }

  Permutation inverse() const {
    std::vector<std::size_t> inv(images_.size());
    for (std::size_t i = 0; i < images_.size(); ++i) inv[images_[i]] = i;
    return Permutation(std::move(inv));
  }

  /// +1 or -1.
  int sign() const {
    std::vector<bool> seen(images_.size(), false);
    int s = 1;
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (seen[i]) continue;
      std::size_t len = 0;
      for (std::size_t j = i; !seen[j]; j = images_[j]) {
        seen[j] = true;
        ++len;
      }
      if (len % 2 == 0) s = -s;
    }
    return s;
  }

  /// y[images[i]] = x[i]: P*x for a left factor, x^T*Q for a right factor.
  template <class T>
  std::vector<T> forward(std::span<const T> x) const {
    check(x.size());
    std::vector<T> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[images_[i]] = x[i];
    return y;
  }
  /// y[i] = x[images[i]]: P^T*x for a left factor, Q*x for a right factor.
  template <class T>
  std::vector<T> backward(std::span<const T> x) const {
    check(x.size());
    std::vector<T> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[images_[i]];
    return y;
  }

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  void check(std::size_t n) const {
    if (n != images_.size()) throw DimensionMismatch("permutation size mismatch");
  }

  std::vector<std::size_t> images_;
};

/// Invertible diagonal matrix.
class Diagonal {
 public:
  Diagonal(const PrimeField& field, Vector entries)
      : field_(field), entries_(std::move(entries)) {
    for (auto v : entries_) {
      if (v == 0 || v >= field_.modulus())
        throw Error("diagonal entries must be nonzero residues");
    }
  }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t operator[](std::size_t i) const { return entries_[i]; }
  const Vector& entries() const { return entries_; }
  std::uint64_t determinant() const {
    std::uint64_t d = 1;
    for (auto v : entries_) d = field_.mul(d, v);
    return d;
  }

 private:
  PrimeField field_;
  Vector entries_;
};

/// Strictly increasing 0-based row or column indices.
struct RankProfile {
  std::vector<std::size_t> indices;
  std::size_t size() const { return indices.size(); }
  friend bool operator==(const RankProfile&, const RankProfile&) = default;
};

/// m x n 0/1 matrix stored as the positions of its ones, sorted by row.
struct RankProfileMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ones;

  std::size_t rank() const { return ones.size(); }

  DenseMatrix to_dense(const PrimeField& f) const {
    DenseMatrix d(f, rows, cols);
    for (auto [i, j] : ones) d(i, j) = 1;
    return d;
  }

  /// At most one 1 per row and column.
  bool is_valid() const {
    std::vector<bool> r(rows, false), c(cols, false);
    for (auto [i, j] : ones) {
      if (i >= rows || j >= cols || r[i] || c[j]) return false;
      r[i] = c[j] = true;
    }
    return true;
  }

  void normalize() { std::sort(ones.begin(), ones.end()); }

  friend bool operator==(const RankProfileMatrix&, const RankProfileMatrix&) = default;
};

struct PluqFactorization {
  Permutation p;   // m
  DenseMatrix l;   // m x r, unit lower triangular leading block
  DenseMatrix u;   // r x n, upper triangular with nonzero diagonal
  Permutation q;   // n
  std::size_t rank = 0;
};

struct LdupFactorization {
  DenseMatrix l;   // unit lower
  Diagonal d;
  DenseMatrix u1;  // unit upper
  Permutation p;
};

// ---------------------------------------------------------------------------
// Products

inline std::uint64_t dot(const PrimeField& f, std::span<const std::uint64_t> a,
                         std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s = f.fma(s, a[i], b[i]);
  return s;
}

/// A*v; charges one mu(A) and 2mn-m field operations to the meter.
inline Vector matvec(const DenseMatrix& a, std::span<const std::uint64_t> v,
                     CostMeter* meter = nullptr) {
  if (v.size() != a.cols()) throw DimensionMismatch("matvec: dimension mismatch");
  const auto& f = a.field();
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) out[i] = dot(f, a.row(i), v);
  if (meter != nullptr) {
    meter->verifier_matvecs += 1;
    if (a.cols() > 0) meter->verifier_field_ops += 2 * a.rows() * a.cols() - a.rows();
  }
  return out;
}

/// w^T*A, counted like matvec.
inline Vector vecmat(std::span<const std::uint64_t> w, const DenseMatrix& a,
                     CostMeter* meter = nullptr) {
  if (w.size() != a.rows()) throw DimensionMismatch("vecmat: dimension mismatch");
  const auto& f = a.field();
  Vector out(a.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (w[i] == 0) continue;
    auto row = a.row(i);
    for (std::size_t j = 0; j < a.cols(); ++j) out[j] = f.fma(out[j], w[i], row[j]);
  }
  if (meter != nullptr) {
    meter->verifier_matvecs += 1;
    if (a.rows() > 0) meter->verifier_field_ops += 2 * a.rows() * a.cols() - a.cols();
  }
  return out;
}

inline DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("multiply: dimension mismatch");
  const auto& f = a.field();
  DenseMatrix c(f, a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto crow = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const std::uint64_t aik = a(i, k);
      if (aik == 0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) crow[j] = f.fma(crow[j], aik, brow[j]);
    }
  }
  return c;
}

inline DenseMatrix permutation_matrix_left(const PrimeField& f, const Permutation& p) {
  DenseMatrix m(f, p.size(), p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m(p[i], i) = 1;
  return m;
}

inline DenseMatrix permutation_matrix_right(const PrimeField& f, const Permutation& q) {
  DenseMatrix m(f, q.size(), q.size());
  for (std::size_t i = 0; i < q.size(); ++i) m(i, q[i]) = 1;
  return m;
}

/// P*M*Q with both permutations applied as index maps:
/// result(P[i], Q[j]) = M(i, j). With Q == P this is P*M*P^T in matrix terms.
inline DenseMatrix conjugate_by_permutations(const Permutation& p, const DenseMatrix& m,
                                             const Permutation& q) {
  if (p.size() != m.rows() || q.size() != m.cols())
    throw DimensionMismatch("conjugate_by_permutations: dimension mismatch");
  DenseMatrix out(m.field(), m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(p[i], q[j]) = m(i, j);
  return out;
}

enum class PadBlock { Zero, Identity };

/// [M | X] with X of width cols - M.cols(): zero, or [0; I] below the top
/// M.cols() rows when Identity.
inline DenseMatrix pad_columns(const DenseMatrix& m, std::size_t cols,
                               PadBlock block = PadBlock::Zero) {
  if (cols < m.cols()) throw DimensionMismatch("pad_columns: narrowing");
  DenseMatrix out(m.field(), m.rows(), cols);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  if (block == PadBlock::Identity)
    for (std::size_t j = m.cols(); j < cols && j < m.rows(); ++j) out(j, j) = 1;
  return out;
}

/// [M ; X] with X of height rows - M.rows(): zero, or [0 I] when Identity.
inline DenseMatrix pad_rows(const DenseMatrix& m, std::size_t rows,
                            PadBlock block = PadBlock::Zero) {
  if (rows < m.rows()) throw DimensionMismatch("pad_rows: narrowing");
  DenseMatrix out(m.field(), rows, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  if (block == PadBlock::Identity)
    for (std::size_t i = m.rows(); i < rows && i < m.cols(); ++i) out(i, i) = 1;
  return out;
}

// ---------------------------------------------------------------------------
// Structural predicates

/// Pivot columns (first nonzero of each row) strictly increase and zero rows
/// trail.
inline bool is_row_echelon(const DenseMatrix& m) {
  std::size_t last_pivot = 0;
  bool seen_zero_row = false;
  bool first = true;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto row = m.row(i);
    auto it = std::find_if(row.begin(), row.end(), [](auto v) { return v != 0; });
    if (it == row.end()) {
      seen_zero_row = true;
      continue;
    }
    if (seen_zero_row) return false;
    const auto pivot = static_cast<std::size_t>(it - row.begin());
    if (!first && pivot <= last_pivot) return false;
    last_pivot = pivot;
    first = false;
  }
  return true;
}

inline bool is_lower_triangular(const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != 0) return false;
  return true;
}

inline bool is_upper_triangular(const DenseMatrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < i && j < m.cols(); ++j)
      if (m(i, j) != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Triangular solves

inline Vector trsv_lower(const DenseMatrix& t, std::span<const std::uint64_t> b,
                         bool unit_diagonal = false) {
  if (t.rows() != t.cols() || b.size() != t.rows())
    throw DimensionMismatch("trsv_lower: dimension mismatch");
  const auto& f = t.field();
  Vector x(b.begin(), b.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::uint64_t s = x[i];
    for (std::size_t j = 0; j < i; ++j) s = f.sub(s, f.mul(t(i, j), x[j]));
    if (!unit_diagonal) {
      if (t(i, i) == 0) throw SingularMatrix("trsv_lower: zero diagonal entry");
      s = f.div(s, t(i, i));
    }
    x[i] = s;
  }
  return x;
}

inline Vector trsv_upper(const DenseMatrix& t, std::span<const std::uint64_t> b,
                         bool unit_diagonal = false) {
  if (t.rows() != t.cols() || b.size() != t.rows())
    throw DimensionMismatch("trsv_upper: dimension mismatch");
  const auto& f = t.field();
  Vector x(b.begin(), b.end());
  for (std::size_t i = x.size(); i-- > 0;) {
    std::uint64_t s = x[i];
    for (std::size_t j = i + 1; j < x.size(); ++j) s = f.sub(s, f.mul(t(i, j), x[j]));
    if (!unit_diagonal) {
      if (t(i, i) == 0) throw SingularMatrix("trsv_upper: zero diagonal entry");
      s = f.div(s, t(i, i));
    }
    x[i] = s;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Elimination

namespace detail {

// Working state shared by both PLUQ variants: the matrix being reduced in
// place (L below the diagonal, U on and above) and the row/column origins.
struct Elimination {
  DenseMatrix w;
  std::vector<std::size_t> row_origin;
  std::vector<std::size_t> col_origin;

  explicit Elimination(const DenseMatrix& a)
      : w(a), row_origin(a.rows()), col_origin(a.cols()) {
    std::iota(row_origin.begin(), row_origin.end(), std::size_t{0});
    std::iota(col_origin.begin(), col_origin.end(), std::size_t{0});
  }

  // Moves row `from` to position `to` (to <= from), shifting the rows in
  // between down by one.
  void rotate_rows(std::size_t to, std::size_t from) {
    if (to == from) return;
    const std::size_t n = w.cols();
    auto d = w.data();
    std::rotate(d.begin() + static_cast<std::ptrdiff_t>(to * n),
                d.begin() + static_cast<std::ptrdiff_t>(from * n),
                d.begin() + static_cast<std::ptrdiff_t>((from + 1) * n));
    std::rotate(row_origin.begin() + static_cast<std::ptrdiff_t>(to),
                row_origin.begin() + static_cast<std::ptrdiff_t>(from),
                row_origin.begin() + static_cast<std::ptrdiff_t>(from + 1));
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    auto ra = w.row(a);
    auto rb = w.row(b);
    std::swap_ranges(ra.begin(), ra.end(), rb.begin());
    std::swap(row_origin[a], row_origin[b]);
  }

  void rotate_cols(std::size_t to, std::size_t from) {
    if (to == from) return;
    for (std::size_t i = 0; i < w.rows(); ++i) {
      auto r = w.row(i);
      std::rotate(r.begin() + static_cast<std::ptrdiff_t>(to),
                  r.begin() + static_cast<std::ptrdiff_t>(from),
                  r.begin() + static_cast<std::ptrdiff_t>(from + 1));
    }
    std::rotate(col_origin.begin() + static_cast<std::ptrdiff_t>(to),
                col_origin.begin() + static_cast<std::ptrdiff_t>(from),
                col_origin.begin() + static_cast<std::ptrdiff_t>(from + 1));
  }

  // Eliminates below the pivot at (k, k), storing multipliers in column k.
  void eliminate(std::size_t k) {
    const auto& f = w.field();
    const std::uint64_t pinv = f.inv(w(k, k));
    const std::size_t n = w.cols();
    const std::uint64_t* prow = w.row(k).data();
    for (std::size_t t = k + 1; t < w.rows(); ++t) {
      std::uint64_t* trow = w.row(t).data();
      if (trow[k] == 0) continue;
      const std::uint64_t l = f.mul(trow[k], pinv);
      trow[k] = l;
      const std::uint64_t nl = f.neg(l);
      for (std::size_t c = k + 1; c < n; ++c) trow[c] = f.reduce(trow[c] + nl * prow[c]);
    }
  }

  PluqFactorization finish(std::size_t r) const {
    const auto& f = w.field();
    DenseMatrix l(f, w.rows(), r);
    DenseMatrix u(f, r, w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < r; ++j) {
        if (i > j) l(i, j) = w(i, j);
        else if (i == j) l(i, j) = 1;
      }
    }
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = i; j < w.cols(); ++j) u(i, j) = w(i, j);
    return {Permutation(row_origin), std::move(l), std::move(u), Permutation(col_origin), r};
  }
};

}  // namespace detail

/// PLUQ with column-order pivot search: the pivot is the first nonzero (by
/// row) of the earliest column that still has one. Rows are exchanged by
/// transposition, columns by rotation, so UQ is in row echelon form and
/// (Q[0], ..., Q[r-1]) is the column rank profile.
inline PluqFactorization pluq_crp(const DenseMatrix& a) {
  detail::Elimination e(a);
  const std::size_t m = a.rows(), n = a.cols();
  std::size_t k = 0;
  std::size_t scan_from = 0;
  while (k < m && k < n) {
    std::size_t pivot_row = m, pivot_col = n;
    for (std::size_t j = std::max(k, scan_from); j < n && pivot_row == m; ++j) {
      for (std::size_t i = k; i < m; ++i) {
        if (e.w(i, j) != 0) {
          pivot_row = i;
          pivot_col = j;
          break;
        }
      }
    }
    if (pivot_row == m) break;
    e.swap_rows(k, pivot_row);
    e.rotate_cols(k, pivot_col);
    e.eliminate(k);
    ++k;
    // Columns k..pivot_col were zero below row k-1 and stay zero.
    scan_from = pivot_col + 1;
  }
  return e.finish(k);
}

/// PLUQ revealing the rank profile matrix: the pivot is the lexicographically
/// smallest nonzero (row first, then column) of the remaining block, and both
/// rows and columns are moved by rotations. The result satisfies
/// P [L 0] P^T lower triangular and Q^T [U; 0] Q upper triangular.
inline PluqFactorization pluq_rpm(const DenseMatrix& a) {
  detail::Elimination e(a);
  const std::size_t m = a.rows(), n = a.cols();
  std::size_t k = 0;
  while (k < m && k < n) {
    std::size_t pivot_row = m, pivot_col = n;
    for (std::size_t i = k; i < m && pivot_row == m; ++i) {
      auto row = e.w.row(i);
      for (std::size_t j = k; j < n; ++j) {
        if (row[j] != 0) {
          pivot_row = i;
          pivot_col = j;
          break;
        }
      }
    }
    if (pivot_row == m) break;
    e.rotate_rows(k, pivot_row);
    e.rotate_cols(k, pivot_col);
    e.eliminate(k);
    ++k;
  }
  return e.finish(k);
}

/// A = L*U without pivoting (L unit lower, U upper). Empty when a zero pivot
/// appears, i.e. when A lacks generic rank profile.
struct LuFactorization {
  DenseMatrix l;
  DenseMatrix u;
};

inline std::optional<LuFactorization> lu_no_pivoting(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("lu: square matrix required");
  detail::Elimination e(a);
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k) {
    if (e.w(k, k) == 0) return std::nullopt;
    e.eliminate(k);
  }
  auto f = e.finish(n);
  return LuFactorization{std::move(f.l), std::move(f.u)};
}

/// P*[I_r 0; 0 0]*Q.
inline RankProfileMatrix rank_profile_matrix(const PluqFactorization& f) {
  RankProfileMatrix r{f.p.size(), f.q.size(), {}};
  for (std::size_t i = 0; i < f.rank; ++i) r.ones.emplace_back(f.p[i], f.q[i]);
  r.normalize();
  return r;
}

inline RankProfile column_rank_profile(const PluqFactorization& f) {
  RankProfile c;
  c.indices.assign(f.q.images().begin(),
                   f.q.images().begin() + static_cast<std::ptrdiff_t>(f.rank));
  return c;
}

/// The permutation R with A*R^T of generic rank profile: the rank profile
/// matrix of an invertible A, as a right factor.
inline Permutation rpm_permutation(const PluqFactorization& f) {
  if (f.rank != f.p.size() || f.rank != f.q.size())
    throw SingularMatrix("rank profile permutation needs an invertible matrix");
  std::vector<std::size_t> im(f.rank);
  for (std::size_t i = 0; i < f.rank; ++i) im[f.p[i]] = f.q[i];
  return Permutation(std::move(im));
}

/// A*P^T for a right-factor permutation: column j is column P[j] of A.
inline DenseMatrix times_transpose(const DenseMatrix& a, const Permutation& p) {
  if (p.size() != a.cols()) throw DimensionMismatch("times_transpose: size mismatch");
  DenseMatrix out(a.field(), a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, p[j]);
  return out;
}

/// A = L*D*U1*P for the given P; empty when A*P^T lacks generic rank
/// profile.
inline std::optional<LdupFactorization> ldup_with(const DenseMatrix& a, const Permutation& p) {
  if (a.rows() != a.cols()) throw DimensionMismatch("ldup: square matrix required");
  const auto& f = a.field();
  const std::size_t n = a.rows();
  auto lu = lu_no_pivoting(times_transpose(a, p));
  if (!lu) return std::nullopt;
  Vector d(n);
  DenseMatrix u1 = lu->u;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = lu->u(i, i);
    const std::uint64_t dinv = f.inv(d[i]);
    for (std::size_t j = i; j < n; ++j) u1(i, j) = f.mul(u1(i, j), dinv);
  }
  return LdupFactorization{std::move(lu->l), Diagonal(f, std::move(d)), std::move(u1), p};
}

/// A = L*D*U1*P with P the rank profile matrix of A, so that P^T*U1*P is
/// upper triangular.
inline LdupFactorization ldup(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("ldup: square matrix required");
  auto pluq = pluq_rpm(a);
  if (pluq.rank < a.rows()) throw SingularMatrix("ldup: matrix is singular");
  auto fac = ldup_with(a, rpm_permutation(pluq));
  if (!fac) throw SingularMatrix("ldup: A*P^T lacks generic rank profile");
  return std::move(*fac);
}

/// One solution of A*x = b from a PLUQ factorization of A, with the free
/// coordinates set to zero (so x is supported on Q[0..r)). Empty when the
/// system is inconsistent.
inline std::optional<Vector> solve(const PluqFactorization& f,
                                   std::span<const std::uint64_t> b) {
  const std::size_t m = f.p.size(), n = f.q.size(), r = f.rank;
  if (b.size() != m) throw DimensionMismatch("solve: right-hand side length");
  const auto& fld = f.l.field();
  Vector pb = f.p.backward(b);
  // Forward substitution with the unit lower r x r block.
  Vector y(pb.begin(), pb.begin() + static_cast<std::ptrdiff_t>(r));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < i; ++j) y[i] = fld.sub(y[i], fld.mul(f.l(i, j), y[j]));
  for (std::size_t i = r; i < m; ++i) {
    std::uint64_t s = pb[i];
    for (std::size_t j = 0; j < r; ++j) s = fld.sub(s, fld.mul(f.l(i, j), y[j]));
    if (s != 0) return std::nullopt;
  }
  Vector xp(n, 0);
  for (std::size_t i = r; i-- > 0;) {
    std::uint64_t s = y[i];
    for (std::size_t j = i + 1; j < r; ++j) s = fld.sub(s, fld.mul(f.u(i, j), xp[j]));
    xp[i] = fld.div(s, f.u(i, i));
  }
  return f.q.forward(std::span<const std::uint64_t>(xp));
}

inline DenseMatrix reconstruct(const PluqFactorization& f) {
  return conjugate_by_permutations(f.p, multiply(f.l, f.u), f.q);
}

inline DenseMatrix reconstruct(const LdupFactorization& f) {
  const auto& fld = f.l.field();
  DenseMatrix ld = f.l;
  for (std::size_t i = 0; i < ld.rows(); ++i)
    for (std::size_t j = 0; j < ld.cols(); ++j) ld(i, j) = fld.mul(ld(i, j), f.d[j]);
  DenseMatrix ldu = multiply(ld, f.u1);
  return conjugate_by_permutations(Permutation::identity(ldu.rows()), ldu, f.p);
}

// ---------------------------------------------------------------------------
// Random instances

inline DenseMatrix random_matrix(const PrimeField& f, std::size_t m, std::size_t n,
                                 RandomSource& rng) {
  DenseMatrix a(f, m, n);
  const SampleSet all(f);
  for (auto& v : a.data()) v = sample(all, rng);
  return a;
}

inline DenseMatrix random_unit_lower(const PrimeField& f, std::size_t n, RandomSource& rng) {
  DenseMatrix t(f, n, n);
  const SampleSet all(f);
  for (std::size_t i = 0; i < n; ++i) {
    t(i, i) = 1;
    for (std::size_t j = 0; j < i; ++j) t(i, j) = sample(all, rng);
  }
  return t;
}

/// Random matrix of the requested rank: product of random m x r and r x n
/// factors, retried until the rank is exact.
inline DenseMatrix random_rank_matrix(const PrimeField& f, std::size_t m, std::size_t n,
                                      std::size_t r, RandomSource& rng) {
  if (r > std::min(m, n)) throw DimensionMismatch("random_rank_matrix: rank too large");
  for (;;) {
    DenseMatrix a = multiply(random_matrix(f, m, r, rng), random_matrix(f, r, n, rng));
    if (pluq_crp(a).rank == r) return a;
  }
}

inline DenseMatrix random_nonsingular(const PrimeField& f, std::size_t n, RandomSource& rng) {
  for (;;) {
    DenseMatrix a = random_matrix(f, n, n, rng);
    if (pluq_crp(a).rank == n) return a;
  }
}

// ---------------------------------------------------------------------------
// Text format: "m n p" then m lines of n base-10 residues.

inline void write_matrix(std::ostream& os, const DenseMatrix& a) {
  os << a.rows() << ' ' << a.cols() << ' ' << a.field().modulus() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j > 0) os << ' ';
      os << a(i, j);
    }
    os << '\n';
  }
}

inline std::string format_matrix(const DenseMatrix& a) {
  std::ostringstream os;
  write_matrix(os, a);
  return os.str();
}

inline DenseMatrix read_matrix(std::istream& is) {
  std::uint64_t m = 0, n = 0, p = 0;
  if (!(is >> m >> n >> p)) throw ParseError("matrix header must be 'm n p'");
  const PrimeField f(p);
  DenseMatrix a(f, m, n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      std::uint64_t v = 0;
      if (!(is >> v)) {
        throw ParseError("matrix entry (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ") missing or malformed");
      }
      if (v >= p) {
        throw ParseError("matrix entry (" + std::to_string(i + 1) + "," +
                         std::to_string(j + 1) + ") is not a residue mod " +
                         std::to_string(p));
      }
      a(i, j) = v;
    }
  }
  std::string extra;
  if (is >> extra) throw ParseError("trailing data after matrix entries");
  return a;
}

inline DenseMatrix parse_matrix(const std::string& text) {
  std::istringstream is(text);
  return read_matrix(is);
}

}  // namespace rkcert::la
