#pragma once

// Exact scalar arithmetic: prime fields F_p (p < 2^62) and the rationals.
//
// Fields are small immutable value objects; elements are plain values whose
// arithmetic goes through the field object (`f.add(a, b)`), so every element
// is always in canonical form.

#include <compare>
#include <concepts>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "jointslab/error.hpp"

namespace jointslab {

enum class FieldKind { Prime, Rational };

/// Runtime field descriptor, as read from a configuration file.
struct FieldSpec {
  FieldKind kind = FieldKind::Prime;
  std::uint64_t modulus = 0;  // meaningful iff kind == Prime

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

inline constexpr std::uint64_t kDefaultPrime = 2147483629ULL;  // 2^31 - 19

bool is_prime_u64(std::uint64_t n);

/// Residue in [0, p).
struct ModP {
  std::uint64_t v = 0;
  friend bool operator==(ModP, ModP) = default;
  friend auto operator<=>(ModP, ModP) = default;
};

class PrimeField {
 public:
  using Element = ModP;

  explicit PrimeField(std::uint64_t p = kDefaultPrime);

  std::uint64_t modulus() const noexcept { return p_; }
  FieldSpec spec() const { return {FieldKind::Prime, p_}; }
  std::uint64_t characteristic() const noexcept { return p_; }

  Element zero() const noexcept { return {0}; }
  Element one() const noexcept { return {1}; }
  Element from_int(std::int64_t x) const noexcept {
    std::int64_t r = x % static_cast<std::int64_t>(p_);
    if (r < 0) r += static_cast<std::int64_t>(p_);
    return {static_cast<std::uint64_t>(r)};
  }
  Element from_uint(std::uint64_t x) const noexcept { return {x % p_}; }
  Element from_mpz(const mpz_class& x) const;
  Element from_mpq(const mpq_class& x) const;

  Element add(Element a, Element b) const noexcept {
    std::uint64_t s = a.v + b.v;
    return {s >= p_ ? s - p_ : s};
  }
  Element sub(Element a, Element b) const noexcept { return {a.v >= b.v ? a.v - b.v : a.v + p_ - b.v}; }
  Element neg(Element a) const noexcept { return {a.v == 0 ? 0 : p_ - a.v}; }
  Element mul(Element a, Element b) const noexcept {
    return {static_cast<std::uint64_t>(static_cast<unsigned __int128>(a.v) * b.v % p_)};
  }
  Element inv(Element a) const;
  Element div(Element a, Element b) const { return mul(a, inv(b)); }
  Element pow(Element a, std::uint64_t e) const noexcept;

  bool is_zero(Element a) const noexcept { return a.v == 0; }
  bool is_one(Element a) const noexcept { return a.v == 1; }
  bool equal(Element a, Element b) const noexcept { return a.v == b.v; }

  std::string to_string(Element a) const { return std::to_string(a.v); }
  Element parse(std::string_view text) const;
  Element random(std::mt19937_64& rng) const;

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

 private:
  std::uint64_t p_;
};

class RationalField {
 public:
  using Element = mpq_class;

  FieldSpec spec() const { return {FieldKind::Rational, 0}; }
  std::uint64_t characteristic() const noexcept { return 0; }

  Element zero() const { return 0; }
  Element one() const { return 1; }
  Element from_int(std::int64_t x) const { return mpq_class(mpz_class(static_cast<long>(x))); }
  Element from_uint(std::uint64_t x) const { return mpq_class(mpz_class(static_cast<unsigned long>(x))); }
  Element from_mpz(const mpz_class& x) const { return mpq_class(x); }
  Element from_mpq(const mpq_class& x) const { return x; }

  Element add(const Element& a, const Element& b) const { return a + b; }
  Element sub(const Element& a, const Element& b) const { return a - b; }
  Element neg(const Element& a) const { return -a; }
  Element mul(const Element& a, const Element& b) const { return a * b; }
  Element inv(const Element& a) const;
  Element div(const Element& a, const Element& b) const;
  Element pow(const Element& a, std::uint64_t e) const;

  bool is_zero(const Element& a) const { return sgn(a) == 0; }
  bool is_one(const Element& a) const { return a == 1; }
  bool equal(const Element& a, const Element& b) const { return a == b; }

  std::string to_string(const Element& a) const { return a.get_str(); }
  Element parse(std::string_view text) const;
  /// Small random rationals num/den with |num| <= 50, 1 <= den <= 9.
  Element random(std::mt19937_64& rng) const;

  friend bool operator==(const RationalField&, const RationalField&) { return true; }
};

template <class F>
concept ExactField = requires(const F& f, const typename F::Element& a, std::mt19937_64& rng) {
  { f.zero() } -> std::convertible_to<typename F::Element>;
  { f.one() } -> std::convertible_to<typename F::Element>;
  { f.add(a, a) } -> std::convertible_to<typename F::Element>;
  { f.mul(a, a) } -> std::convertible_to<typename F::Element>;
  { f.div(a, a) } -> std::convertible_to<typename F::Element>;
  { f.is_zero(a) } -> std::convertible_to<bool>;
  { f.random(rng) } -> std::convertible_to<typename F::Element>;
  { f.spec() } -> std::same_as<FieldSpec>;
};

/// Unbiased uniform integer in [0, bound) from a 64-bit engine (portable, unlike
/// std::uniform_int_distribution).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// C(n, k) as an exact integer; zero when k > n.
mpz_class binom_integer(std::uint64_t n, std::uint64_t k);

/// C(n, k) reduced into the field.
template <ExactField F>
typename F::Element binom_in_field(std::uint64_t n, std::uint64_t k, const F& field) {
  if (k > n) return field.zero();
  return field.from_mpz(binom_integer(n, k));
}

/// Pascal triangle reduced into the field for 0 <= k <= n <= max_n. Row sums
/// in the field equal the reduced integer binomials, so this agrees with
/// binom_in_field on its range.
template <ExactField F>
class BinomialTable {
 public:
  using Element = typename F::Element;

  BinomialTable(const F& field, unsigned max_n) : field_(field), max_n_(max_n) {
    rows_.resize(max_n + 1);
    for (unsigned n = 0; n <= max_n; ++n) {
      rows_[n].assign(n + 1, field.one());
      for (unsigned k = 1; k < n; ++k) rows_[n][k] = field.add(rows_[n - 1][k - 1], rows_[n - 1][k]);
    }
  }

  unsigned max_n() const noexcept { return max_n_; }

  Element operator()(unsigned n, unsigned k) const {
    if (k > n) return field_.zero();
    if (n > max_n_) return binom_in_field<F>(n, k, field_);
    return rows_[n][k];
  }

 private:
  F field_;
  unsigned max_n_;
  std::vector<std::vector<Element>> rows_;
};

/// Invokes `fn` with a PrimeField or RationalField according to `spec`.
template <class Fn>
decltype(auto) with_field(const FieldSpec& spec, Fn&& fn) {
  if (spec.kind == FieldKind::Prime) return fn(PrimeField(spec.modulus));
  return fn(RationalField{});
}

std::string field_name(const FieldSpec& spec);

}  // namespace jointslab
