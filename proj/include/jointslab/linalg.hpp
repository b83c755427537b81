#pragma once

// Dense exact linear algebra over an ExactField.

#include <optional>
#include <utility>
#include <vector>

#include "jointslab/field.hpp"

namespace jointslab {

template <ExactField F>
using Vec = std::vector<typename F::Element>;

template <ExactField F>
using Matrix = std::vector<Vec<F>>;  // row-major

/// Incrementally maintained echelon form. Each stored row has a pivot column
/// where it is 1 and where every later stored row is 0, so an incoming row is
/// reduced by a single pass over the stored rows in insertion order.
template <ExactField F>
class EchelonBasis {
 public:
  using Element = typename F::Element;

  EchelonBasis(F field, std::size_t ncols) : field_(std::move(field)), ncols_(ncols) {}

  std::size_t rank() const noexcept { return rows_.size(); }
  std::size_t ncols() const noexcept { return ncols_; }
  bool full() const noexcept { return rows_.size() == ncols_; }
  const Matrix<F>& rows() const noexcept { return rows_; }

  /// `row` reduced modulo the stored span.
  Vec<F> reduce(Vec<F> row) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto c = row[pivots_[i]];
      if (field_.is_zero(c)) continue;
      const auto& r = rows_[i];
      for (std::size_t j = pivots_[i]; j < ncols_; ++j)
        if (!field_.is_zero(r[j])) row[j] = field_.sub(row[j], field_.mul(c, r[j]));
    }
    return row;
  }

  bool in_span(const Vec<F>& row) const { return first_nonzero(reduce(row)) == ncols_; }

  /// Adds `row` if it is independent of the stored rows; returns whether it was.
  bool insert(const Vec<F>& row) {
    if (row.size() != ncols_) throw Error(ErrorCode::DimensionMismatch, "row length differs from basis width");
    if (full()) return false;
    Vec<F> r = reduce(row);
    std::size_t piv = first_nonzero(r);
    if (piv == ncols_) return false;
    const auto inv = field_.inv(r[piv]);
    for (std::size_t j = piv; j < ncols_; ++j) r[j] = field_.mul(r[j], inv);
    rows_.push_back(std::move(r));
    pivots_.push_back(piv);
    return true;
  }

 private:
  std::size_t first_nonzero(const Vec<F>& r) const {
    for (std::size_t j = 0; j < ncols_; ++j)
      if (!field_.is_zero(r[j])) return j;
    return ncols_;
  }

  F field_;
  std::size_t ncols_;
  Matrix<F> rows_;
  std::vector<std::size_t> pivots_;
};

/// Reduced row echelon form in place, pivoting only in the first `ncols`
/// columns (later columns are carried along); returns pivot columns.
template <ExactField F>
std::vector<std::size_t> rref(Matrix<F>& m, const F& field, std::size_t ncols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < ncols && row < m.size(); ++col) {
    std::size_t sel = row;
    while (sel < m.size() && field.is_zero(m[sel][col])) ++sel;
    if (sel == m.size()) continue;
    std::swap(m[row], m[sel]);
    const std::size_t width = m[row].size();
    const auto inv = field.inv(m[row][col]);
    for (std::size_t j = col; j < width; ++j) m[row][j] = field.mul(m[row][j], inv);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i == row || field.is_zero(m[i][col])) continue;
      const auto c = m[i][col];
      for (std::size_t j = col; j < width; ++j) m[i][j] = field.sub(m[i][j], field.mul(c, m[row][j]));
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <ExactField F>
std::size_t rank(Matrix<F> m, const F& field) {
  if (m.empty()) return 0;
  return rref(m, field, m[0].size()).size();
}

template <ExactField F>
typename F::Element determinant(Matrix<F> m, const F& field) {
  const std::size_t n = m.size();
  auto det = field.one();
  for (std::size_t col = 0; col < n; ++col) {
    if (m[col].size() != n) throw Error(ErrorCode::DimensionMismatch, "determinant of a non-square matrix");
    std::size_t sel = col;
    while (sel < n && field.is_zero(m[sel][col])) ++sel;
    if (sel == n) return field.zero();
    if (sel != col) {
      std::swap(m[sel], m[col]);
      det = field.neg(det);
    }
    det = field.mul(det, m[col][col]);
    const auto inv = field.inv(m[col][col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      if (field.is_zero(m[i][col])) continue;
      const auto c = field.mul(m[i][col], inv);
      for (std::size_t j = col; j < n; ++j) m[i][j] = field.sub(m[i][j], field.mul(c, m[col][j]));
    }
  }
  return det;
}

/// Throws SingularMap when `m` is not invertible.
template <ExactField F>
Matrix<F> inverse(const Matrix<F>& m, const F& field) {
  const std::size_t n = m.size();
  Matrix<F> aug(n, Vec<F>(2 * n, field.zero()));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw Error(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = m[i][j];
    aug[i][n + i] = field.one();
  }
  auto piv = rref(aug, field, n);
  if (piv.size() != n) throw Error(ErrorCode::SingularMap, "matrix is singular");
  Matrix<F> out(n, Vec<F>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i][j] = aug[i][n + j];
  return out;
}

/// Some x with A x = b, or nullopt when the system is inconsistent.
template <ExactField F>
std::optional<Vec<F>> solve(const Matrix<F>& a, const Vec<F>& b, std::size_t ncols, const F& field) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "right-hand side length differs from row count");
  Matrix<F> aug(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != ncols) throw Error(ErrorCode::DimensionMismatch, "ragged matrix");
    aug[i] = a[i];
    aug[i].push_back(b[i]);
  }
  auto piv = rref(aug, field, ncols + 1);
  if (!piv.empty() && piv.back() == ncols) return std::nullopt;
  Vec<F> x(ncols, field.zero());
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug[r][ncols];
  return x;
}

/// Basis of {x : A x = 0}.
template <ExactField F>
Matrix<F> nullspace(Matrix<F> a, std::size_t ncols, const F& field) {
  auto piv = rref(a, field, ncols);
  std::vector<bool> is_pivot(ncols, false);
  for (auto c : piv) is_pivot[c] = true;
  Matrix<F> basis;
  for (std::size_t free = 0; free < ncols; ++free) {
    if (is_pivot[free]) continue;
    Vec<F> v(ncols, field.zero());
    v[free] = field.one();
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = field.neg(a[r][free]);
    basis.push_back(std::move(v));
  }
  return basis;
}

template <ExactField F>
Vec<F> mat_vec(const Matrix<F>& a, const Vec<F>& x, const F& field) {
  Vec<F> y(a.size(), field.zero());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw Error(ErrorCode::DimensionMismatch, "matrix-vector size mismatch");
    for (std::size_t j = 0; j < x.size(); ++j) y[i] = field.add(y[i], field.mul(a[i][j], x[j]));
  }
  return y;
}

template <ExactField F>
Matrix<F> identity_matrix(std::size_t n, const F& field) {
  Matrix<F> m(n, Vec<F>(n, field.zero()));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = field.one();
  return m;
}

template <ExactField F>
Matrix<F> transpose(const Matrix<F>& m, std::size_t ncols) {
  Matrix<F> t(ncols, Vec<F>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < ncols; ++j) t[j][i] = m[i][j];
  return t;
}

}  // namespace jointslab
