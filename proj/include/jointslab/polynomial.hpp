#pragma once

// Sparse multivariate polynomials over an exact field, keyed by exponent
// vector in graded-lex order, plus Hasse derivative operators.

#include <algorithm>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jointslab/exponent.hpp"
#include "jointslab/field.hpp"

namespace jointslab {

template <ExactField F>
class Polynomial {
 public:
  using Element = typename F::Element;
  using TermMap = std::map<ExponentVector, Element, GradedLexLess>;

  /// Degree of the zero polynomial.
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  Polynomial(F field, std::size_t nvars) : field_(std::move(field)), nvars_(nvars) {}

  static Polynomial constant(const F& field, std::size_t nvars, const Element& c) {
    Polynomial p(field, nvars);
    p.add_term(ExponentVector(nvars), c);
    return p;
  }
  static Polynomial monomial(const F& field, const ExponentVector& e, const Element& c) {
    Polynomial p(field, e.size());
    p.add_term(e, c);
    return p;
  }
  static Polynomial variable(const F& field, std::size_t nvars, std::size_t i) {
    return monomial(field, ExponentVector::unit(nvars, i), field.one());
  }

  const F& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return nvars_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }

  int degree() const {
    if (terms_.empty()) return kZeroDegree;
    return static_cast<int>(terms_.rbegin()->first.total_degree());
  }
  /// Lowest total degree of a term; kZeroDegree for the zero polynomial.
  int min_degree() const {
    if (terms_.empty()) return kZeroDegree;
    return static_cast<int>(terms_.begin()->first.total_degree());
  }

  Element coefficient(const ExponentVector& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? field_.zero() : it->second;
  }

  /// Adds c * x^e, dropping the term if it cancels.
  void add_term(const ExponentVector& e, const Element& c) {
    if (e.size() != nvars_) throw Error(ErrorCode::DimensionMismatch, "term has wrong number of variables");
    if (field_.is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second = field_.add(it->second, c);
      if (field_.is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    check_compatible(o);
    for (const auto& [e, c] : o.terms_) add_term(e, field_.neg(c));
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) { return a.multiply(b, std::nullopt); }

  Polynomial operator-() const { return scaled(field_.neg(field_.one())); }

  Polynomial scaled(const Element& c) const {
    Polynomial r(field_, nvars_);
    if (field_.is_zero(c)) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace_hint(r.terms_.end(), e, field_.mul(v, c));
    return r;
  }

  /// Product, dropping terms of total degree above `max_degree` when given.
  Polynomial multiply(const Polynomial& o, std::optional<unsigned> max_degree) const {
    check_compatible(o);
    Polynomial r(field_, nvars_);
    for (const auto& [ea, ca] : terms_) {
      unsigned da = ea.total_degree();
      if (max_degree && da > *max_degree) break;
      for (const auto& [eb, cb] : o.terms_) {
        if (max_degree && da + eb.total_degree() > *max_degree) break;
        r.add_term(ea + eb, field_.mul(ca, cb));
      }
    }
    return r;
  }

  Polynomial pow(unsigned e, std::optional<unsigned> max_degree = std::nullopt) const {
    Polynomial result = constant(field_, nvars_, field_.one());
    Polynomial base = max_degree ? truncated(*max_degree) : *this;
    while (e) {
      if (e & 1) result = result.multiply(base, max_degree);
      e >>= 1;
      if (e) base = base.multiply(base, max_degree);
    }
    return result;
  }

  Polynomial truncated(unsigned max_degree) const {
    Polynomial r(field_, nvars_);
    for (const auto& [e, c] : terms_) {
      if (e.total_degree() > max_degree) break;
      r.terms_.emplace_hint(r.terms_.end(), e, c);
    }
    return r;
  }

  Polynomial homogeneous_part(unsigned degree) const {
    Polynomial r(field_, nvars_);
    for (const auto& [e, c] : terms_)
      if (e.total_degree() == degree) r.terms_.emplace_hint(r.terms_.end(), e, c);
    return r;
  }

  Element evaluate(std::span<const Element> point) const {
    if (point.size() != nvars_) throw Error(ErrorCode::DimensionMismatch, "evaluation point has wrong dimension");
    std::vector<std::vector<Element>> powers(nvars_);
    Element acc = field_.zero();
    for (const auto& [e, c] : terms_) {
      Element t = c;
      for (std::size_t i = 0; i < nvars_; ++i) {
        if (e[i] == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(field_.one());
        while (pw.size() <= e[i]) pw.push_back(field_.mul(pw.back(), point[i]));
        t = field_.mul(t, pw[e[i]]);
      }
      acc = field_.add(acc, t);
    }
    return acc;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  void check_compatible(const Polynomial& o) const {
    if (o.nvars_ != nvars_) throw Error(ErrorCode::DimensionMismatch, "polynomials live in different rings");
  }

  F field_;
  std::size_t nvars_;
  TermMap terms_;
};

/// prod_i C(top_i, bottom_i) reduced into the field (zero unless top >= bottom).
template <ExactField F>
typename F::Element multi_binom(const ExponentVector& top, const ExponentVector& bottom, const F& field) {
  mpz_class acc = 1;
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (bottom[i] > top[i]) return field.zero();
    acc *= binom_integer(top[i], bottom[i]);
  }
  return field.from_mpz(acc);
}

template <ExactField F>
typename F::Element multi_binom(const ExponentVector& top, const ExponentVector& bottom,
                                const BinomialTable<F>& table, const F& field) {
  auto acc = field.one();
  for (std::size_t i = 0; i < top.size(); ++i) {
    if (bottom[i] > top[i]) return field.zero();
    if (bottom[i] == 0 || bottom[i] == top[i]) continue;
    acc = field.mul(acc, table(top[i], bottom[i]));
  }
  return acc;
}

/// Hasse^omega g: each x^delta maps to C(delta, omega) x^(delta - omega).
template <ExactField F>
Polynomial<F> hasse_apply(const ExponentVector& omega, const Polynomial<F>& g) {
  if (omega.size() != g.nvars()) throw Error(ErrorCode::DimensionMismatch, "Hasse index has wrong length");
  Polynomial<F> r(g.field(), g.nvars());
  for (const auto& [delta, c] : g.terms()) {
    if (!delta.dominates(omega)) continue;
    r.add_term(delta - omega, g.field().mul(c, multi_binom(delta, omega, g.field())));
  }
  return r;
}

/// Finite linear combination of Hasse derivatives, sum_omega c_omega Hasse^omega.
template <ExactField F>
class HasseOperator {
 public:
  using Element = typename F::Element;
  using Combo = std::map<ExponentVector, Element, GradedLexLess>;

  HasseOperator(F field, std::size_t nvars) : field_(std::move(field)), nvars_(nvars) {}

  static HasseOperator identity(const F& field, std::size_t nvars) { return single(field, ExponentVector(nvars)); }
  static HasseOperator single(const F& field, const ExponentVector& omega, std::optional<Element> c = std::nullopt) {
    HasseOperator op(field, omega.size());
    op.add(omega, c ? *c : field.one());
    return op;
  }

  const F& field() const noexcept { return field_; }
  std::size_t nvars() const noexcept { return nvars_; }
  const Combo& combo() const noexcept { return combo_; }
  bool is_zero() const noexcept { return combo_.empty(); }

  /// Highest |omega| in the support (0 for the zero operator).
  unsigned order() const { return combo_.empty() ? 0 : combo_.rbegin()->first.total_degree(); }

  Element coefficient(const ExponentVector& omega) const {
    auto it = combo_.find(omega);
    return it == combo_.end() ? field_.zero() : it->second;
  }

  void add(const ExponentVector& omega, const Element& c) {
    if (omega.size() != nvars_) throw Error(ErrorCode::DimensionMismatch, "Hasse index has wrong length");
    if (field_.is_zero(c)) return;
    auto [it, inserted] = combo_.try_emplace(omega, c);
    if (!inserted) {
      it->second = field_.add(it->second, c);
      if (field_.is_zero(it->second)) combo_.erase(it);
    }
  }

  Polynomial<F> apply(const Polynomial<F>& g) const {
    if (g.nvars() != nvars_) throw Error(ErrorCode::DimensionMismatch, "operator and polynomial dimensions differ");
    Polynomial<F> r(field_, nvars_);
    for (const auto& [omega, c] : combo_) r += hasse_apply(omega, g).scaled(c);
    return r;
  }

  /// (D g)(point) without materializing D g.
  Element evaluate(const Polynomial<F>& g, std::span<const Element> point) const {
    return apply(g).evaluate(point);
  }

  /// The operator product (this o other); Hasse^a Hasse^b = C(a+b, a) Hasse^(a+b).
  /// Terms of order above `max_order` are dropped when given.
  HasseOperator compose(const HasseOperator& other, std::optional<unsigned> max_order = std::nullopt) const {
    if (other.nvars_ != nvars_) throw Error(ErrorCode::DimensionMismatch, "operators act on different rings");
    HasseOperator r(field_, nvars_);
    for (const auto& [a, ca] : combo_) {
      unsigned da = a.total_degree();
      for (const auto& [b, cb] : other.combo_) {
        if (max_order && da + b.total_degree() > *max_order) break;
        ExponentVector s = a + b;
        r.add(s, field_.mul(field_.mul(ca, cb), multi_binom(s, a, field_)));
      }
    }
    return r;
  }

  friend bool operator==(const HasseOperator& a, const HasseOperator& b) {
    return a.nvars_ == b.nvars_ && a.combo_ == b.combo_;
  }

 private:
  F field_;
  std::size_t nvars_;
  Combo combo_;
};

/// C(a+b, a) Hasse^(a+b), the composite Hasse^a Hasse^b.
template <ExactField F>
HasseOperator<F> hasse_compose(const ExponentVector& a, const ExponentVector& b, const F& field) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "Hasse indices have different lengths");
  HasseOperator<F> op(field, a.size());
  ExponentVector s = a + b;
  op.add(s, multi_binom(s, a, field));
  return op;
}

/// g(q_1, ..., q_d) where every q_i lives in a common ring; terms above
/// `max_degree` dropped when given.
template <ExactField F>
Polynomial<F> substitute(const Polynomial<F>& g, std::span<const Polynomial<F>> images,
                         std::optional<unsigned> max_degree = std::nullopt) {
  if (images.size() != g.nvars()) throw Error(ErrorCode::DimensionMismatch, "substitution needs one image per variable");
  if (images.empty()) return g;
  const std::size_t m = images[0].nvars();
  for (const auto& q : images)
    if (q.nvars() != m) throw Error(ErrorCode::DimensionMismatch, "substitution images live in different rings");
  std::vector<std::vector<Polynomial<F>>> powers(images.size());
  auto power = [&](std::size_t i, unsigned e) -> const Polynomial<F>& {
    auto& pw = powers[i];
    if (pw.empty()) pw.push_back(Polynomial<F>::constant(g.field(), m, g.field().one()));
    while (pw.size() <= e) pw.push_back(pw.back().multiply(images[i], max_degree));
    return pw[e];
  };
  Polynomial<F> result(g.field(), m);
  for (const auto& [e, c] : g.terms()) {
    Polynomial<F> term = Polynomial<F>::constant(g.field(), m, c);
    for (std::size_t i = 0; i < e.size() && !term.is_zero(); ++i)
      if (e[i]) term = term.multiply(power(i, e[i]), max_degree);
    result += term;
  }
  return result;
}

/// h(y) = g(a + y).
template <ExactField F>
Polynomial<F> taylor_shift(const Polynomial<F>& g, std::span<const typename F::Element> a) {
  if (a.size() != g.nvars()) throw Error(ErrorCode::DimensionMismatch, "shift point has wrong dimension");
  std::vector<Polynomial<F>> images;
  images.reserve(g.nvars());
  for (std::size_t i = 0; i < g.nvars(); ++i) {
    auto yi = Polynomial<F>::variable(g.field(), g.nvars(), i);
    yi.add_term(ExponentVector(g.nvars()), a[i]);
    images.push_back(std::move(yi));
  }
  return substitute<F>(g, images);
}

/// Minimum total degree of a term of g(p + y); nullopt (infinite) iff g = 0.
template <ExactField F>
std::optional<unsigned> vanishing_order(const Polynomial<F>& g, std::span<const typename F::Element> p) {
  if (g.is_zero()) return std::nullopt;
  return static_cast<unsigned>(taylor_shift(g, p).min_degree());
}

// Text format: terms in graded-lex order joined by " + ", each written as
// "c * x1^e1 * x3^e3" (zero exponents omitted, constant terms bare); the zero
// polynomial is "0". Parsing additionally accepts general expressions with
// + - * / ^ and parentheses, variables x1..xd, and x, y, z, w as aliases for
// x1..x4 when d <= 4.
template <ExactField F>
std::string to_string(const Polynomial<F>& g) {
  if (g.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : g.terms()) {
    if (!first) out += " + ";
    first = false;
    out += g.field().to_string(c);
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i]) out += " * x" + std::to_string(i + 1) + "^" + std::to_string(e[i]);
  }
  return out;
}

template <ExactField F>
Polynomial<F> parse_polynomial(std::string_view text, const F& field, std::size_t nvars);

template <ExactField F>
std::string to_string(const HasseOperator<F>& op) {
  if (op.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [omega, c] : op.combo()) {
    if (!first) out += " + ";
    first = false;
    out += op.field().to_string(c) + " * H" + omega.to_string();
  }
  return out;
}

}  // namespace jointslab

#include "jointslab/detail/polynomial_parser.hpp"
