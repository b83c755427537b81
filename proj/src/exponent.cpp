#include "jointslab/exponent.hpp"

#include <algorithm>

#include "jointslab/field.hpp"

namespace jointslab {

ExponentVector::ExponentVector(std::initializer_list<unsigned> exps) : size_(check_size(exps.size())) {
  std::size_t i = 0;
  for (unsigned e : exps) exps_[i++] = static_cast<std::uint16_t>(e);
}

ExponentVector::ExponentVector(std::span<const unsigned> exps) : size_(check_size(exps.size())) {
  for (std::size_t i = 0; i < exps.size(); ++i) exps_[i] = static_cast<std::uint16_t>(exps[i]);
}

ExponentVector ExponentVector::operator+(const ExponentVector& o) const {
  if (o.size_ != size_) throw Error(ErrorCode::DimensionMismatch, "exponent vector lengths differ");
  ExponentVector r(size_);
  for (std::size_t i = 0; i < size_; ++i) r.exps_[i] = static_cast<std::uint16_t>(exps_[i] + o.exps_[i]);
  return r;
}

ExponentVector ExponentVector::operator-(const ExponentVector& o) const {
  if (o.size_ != size_) throw Error(ErrorCode::DimensionMismatch, "exponent vector lengths differ");
  ExponentVector r(size_);
  for (std::size_t i = 0; i < size_; ++i) r.exps_[i] = static_cast<std::uint16_t>(exps_[i] - o.exps_[i]);
  return r;
}

ExponentVector ExponentVector::slice(std::size_t begin, std::size_t count) const {
  ExponentVector r(count);
  for (std::size_t i = 0; i < count; ++i) r.exps_[i] = exps_[begin + i];
  return r;
}

ExponentVector ExponentVector::concat(const ExponentVector& tail) const {
  ExponentVector r(size_ + tail.size_);
  for (std::size_t i = 0; i < size_; ++i) r.exps_[i] = exps_[i];
  for (std::size_t i = 0; i < tail.size_; ++i) r.exps_[size_ + i] = tail.exps_[i];
  return r;
}

ExponentVector ExponentVector::extended(std::size_t nvars) const {
  ExponentVector r(nvars);
  for (std::size_t i = 0; i < std::min(size_, nvars); ++i) r.exps_[i] = exps_[i];
  return r;
}

std::string ExponentVector::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < size_; ++i) {
    if (i) s += ",";
    s += std::to_string(exps_[i]);
  }
  return s + "]";
}

namespace {

// Appends all vectors of total degree exactly `degree`, lexicographically
// decreasing.
void append_degree(std::size_t nvars, unsigned degree, std::vector<ExponentVector>& out) {
  if (nvars == 0) {
    if (degree == 0) out.emplace_back(0);
    return;
  }
  ExponentVector e(nvars);
  // Recursive fill: position i takes values from `left` down to 0.
  auto rec = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i + 1 == nvars) {
      e[i] = static_cast<std::uint16_t>(left);
      out.push_back(e);
      return;
    }
    for (unsigned v = left + 1; v-- > 0;) {
      e[i] = static_cast<std::uint16_t>(v);
      self(self, i + 1, left - v);
    }
    e[i] = 0;
  };
  rec(rec, 0, degree);
}

}  // namespace

std::vector<ExponentVector> exponents_in_degree_range(std::size_t nvars, unsigned lo, unsigned hi) {
  std::vector<ExponentVector> out;
  for (unsigned deg = lo; deg <= hi; ++deg) append_degree(nvars, deg, out);
  return out;
}

std::size_t monomial_count(std::size_t nvars, unsigned max_degree) {
  return binom_integer(max_degree + nvars, nvars).get_ui();
}

MonomialBasis::MonomialBasis(std::size_t nvars, unsigned max_degree)
    : nvars_(nvars), max_degree_(max_degree), monomials_(exponents_in_degree_range(nvars, 0, max_degree)) {
  index_.reserve(monomials_.size() * 2);
  for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], i);
}

std::ptrdiff_t MonomialBasis::index_of(const ExponentVector& e) const {
  auto it = index_.find(e);
  return it == index_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::size_t MonomialBasis::prefix_size(unsigned m) const {
  if (m >= max_degree_) return monomials_.size();
  return monomial_count(nvars_, m);
}

}  // namespace jointslab
