#pragma once

#include "jointslab/linalg.hpp"
#include "jointslab/polynomial.hpp"

namespace jointslab {

/// The invertible substitution x -> A x + b.
template <ExactField F>
class AffineMap {
 public:
  using Element = typename F::Element;

  AffineMap(F field, Matrix<F> a, Vec<F> b) : field_(std::move(field)), a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size()) throw Error(ErrorCode::DimensionMismatch, "affine map translation has wrong length");
    for (const auto& row : a_)
      if (row.size() != a_.size()) throw Error(ErrorCode::DimensionMismatch, "affine map matrix is not square");
    if (field_.is_zero(determinant(a_, field_))) throw Error(ErrorCode::SingularMap, "affine map matrix is singular");
  }

  static AffineMap identity(const F& field, std::size_t d) {
    return AffineMap(field, identity_matrix(d, field), Vec<F>(d, field.zero()));
  }

  const F& field() const noexcept { return field_; }
  std::size_t dim() const noexcept { return b_.size(); }
  const Matrix<F>& matrix() const noexcept { return a_; }
  const Vec<F>& translation() const noexcept { return b_; }

  Vec<F> apply(const Vec<F>& x) const {
    Vec<F> y = mat_vec(a_, x, field_);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = field_.add(y[i], b_[i]);
    return y;
  }

  /// Column j of A: the image of e_j under the linear part.
  Vec<F> column(std::size_t j) const {
    Vec<F> c(dim());
    for (std::size_t i = 0; i < dim(); ++i) c[i] = a_[i][j];
    return c;
  }

  AffineMap inverse() const {
    Matrix<F> ai = jointslab::inverse(a_, field_);
    Vec<F> t = mat_vec(ai, b_, field_);
    for (auto& v : t) v = field_.neg(v);
    return AffineMap(field_, std::move(ai), std::move(t));
  }

  /// The images x_i = (A y + b)_i as polynomials in y.
  std::vector<Polynomial<F>> coordinate_images() const {
    const std::size_t d = dim();
    std::vector<Polynomial<F>> images;
    images.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      Polynomial<F> q = Polynomial<F>::constant(field_, d, b_[i]);
      for (std::size_t j = 0; j < d; ++j) q.add_term(ExponentVector::unit(d, j), a_[i][j]);
      images.push_back(std::move(q));
    }
    return images;
  }

 private:
  F field_;
  Matrix<F> a_;
  Vec<F> b_;
};

/// g o T, i.e. g(A y + b) expanded in y.
template <ExactField F>
Polynomial<F> pullback(const Polynomial<F>& g, const AffineMap<F>& t) {
  if (g.nvars() != t.dim()) throw Error(ErrorCode::DimensionMismatch, "pullback dimension mismatch");
  auto images = t.coordinate_images();
  return substitute<F>(g, images);
}

}  // namespace jointslab
