#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "jointslab/error.hpp"

namespace jointslab {

inline constexpr std::size_t kMaxVars = 16;

/// A multi-index (omega, delta, gamma) of fixed length d <= kMaxVars.
class ExponentVector {
 public:
  ExponentVector() = default;
  explicit ExponentVector(std::size_t nvars) : size_(check_size(nvars)) {}
  ExponentVector(std::initializer_list<unsigned> exps);
  explicit ExponentVector(std::span<const unsigned> exps);

  static ExponentVector unit(std::size_t nvars, std::size_t i, unsigned power = 1) {
    ExponentVector e(nvars);
    e[i] = static_cast<std::uint16_t>(power);
    return e;
  }

  std::size_t size() const noexcept { return size_; }
  std::uint16_t operator[](std::size_t i) const noexcept { return exps_[i]; }
  std::uint16_t& operator[](std::size_t i) noexcept { return exps_[i]; }

  unsigned total_degree() const noexcept {
    unsigned s = 0;
    for (std::size_t i = 0; i < size_; ++i) s += exps_[i];
    return s;
  }

  bool is_zero() const noexcept { return total_degree() == 0; }

  /// Coordinatewise a >= b.
  bool dominates(const ExponentVector& other) const noexcept {
    for (std::size_t i = 0; i < size_; ++i)
      if (exps_[i] < other.exps_[i]) return false;
    return true;
  }

  ExponentVector operator+(const ExponentVector& o) const;
  /// Requires dominates(o).
  ExponentVector operator-(const ExponentVector& o) const;

  /// Entries [begin, begin+count) as a new vector.
  ExponentVector slice(std::size_t begin, std::size_t count) const;
  /// This vector followed by `tail`.
  ExponentVector concat(const ExponentVector& tail) const;
  /// This vector padded with zeros to `nvars` entries.
  ExponentVector extended(std::size_t nvars) const;

  std::vector<unsigned> to_vector() const { return {exps_.begin(), exps_.begin() + size_}; }
  std::string to_string() const;  // JSON array text, e.g. "[2,0,1]"

  friend bool operator==(const ExponentVector& a, const ExponentVector& b) noexcept {
    if (a.size_ != b.size_) return false;
    for (std::size_t i = 0; i < a.size_; ++i)
      if (a.exps_[i] != b.exps_[i]) return false;
    return true;
  }

  std::size_t hash() const noexcept {
    std::size_t h = size_;
    for (std::size_t i = 0; i < size_; ++i) h = h * 1000003u ^ exps_[i];
    return h;
  }

 private:
  static std::size_t check_size(std::size_t n) {
    if (n > kMaxVars) throw Error(ErrorCode::DimensionMismatch, "at most 16 variables are supported");
    return n;
  }

  std::array<std::uint16_t, kMaxVars> exps_{};
  std::size_t size_ = 0;
};

/// Graded order: lower total degree first; within a degree, lexicographically
/// larger vectors first (x1^2, x1x2, x2^2, ...).
struct GradedLexLess {
  bool operator()(const ExponentVector& a, const ExponentVector& b) const noexcept {
    unsigned da = a.total_degree(), db = b.total_degree();
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] > b[i];
    return false;
  }
};

struct ExponentHash {
  std::size_t operator()(const ExponentVector& e) const noexcept { return e.hash(); }
};

/// All exponent vectors of `nvars` entries with total degree in [lo, hi], in
/// graded-lex order.
std::vector<ExponentVector> exponents_in_degree_range(std::size_t nvars, unsigned lo, unsigned hi);

/// Number of monomials of degree <= n in d variables, C(n+d, d).
std::size_t monomial_count(std::size_t nvars, unsigned max_degree);

/// The graded-lex monomial basis of F[x_1..x_d]_{<=n}.
class MonomialBasis {
 public:
  MonomialBasis(std::size_t nvars, unsigned max_degree);

  std::size_t nvars() const noexcept { return nvars_; }
  unsigned max_degree() const noexcept { return max_degree_; }
  std::size_t size() const noexcept { return monomials_.size(); }
  const ExponentVector& operator[](std::size_t i) const { return monomials_[i]; }
  const std::vector<ExponentVector>& monomials() const noexcept { return monomials_; }

  /// Index of `e`, or -1 when deg(e) > n.
  std::ptrdiff_t index_of(const ExponentVector& e) const;

  /// Number of basis elements of degree <= m (a prefix of the basis).
  std::size_t prefix_size(unsigned m) const;

 private:
  std::size_t nvars_;
  unsigned max_degree_;
  std::vector<ExponentVector> monomials_;
  std::unordered_map<ExponentVector, std::size_t, ExponentHash> index_;
};

}  // namespace jointslab
