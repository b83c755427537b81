#include "jointslab/field.hpp"

namespace jointslab {

namespace {

using u128 = unsigned __int128;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

bool parse_integer(std::string_view text, mpz_class& out) {
  if (text.empty()) return false;
  std::string s(text);
  if (s[0] == '+') s.erase(0, 1);
  if (s.empty()) return false;
  for (std::size_t i = (s[0] == '-' ? 1 : 0); i < s.size(); ++i)
    if (s[i] < '0' || s[i] > '9') return false;
  if (s == "-") return false;
  return out.set_str(s, 10) == 0;
}

// Accepts "a" or "a/b" with integer a, b.
bool parse_fraction(std::string_view text, mpz_class& num, mpz_class& den) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    den = 1;
    return parse_integer(text, num);
  }
  return parse_integer(text.substr(0, slash), num) && parse_integer(text.substr(slash + 1), den);
}

}  // namespace

// Deterministic Miller-Rabin; the first twelve primes are a complete witness
// set for all 64-bit inputs.
bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  static constexpr std::uint64_t kBases[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (std::uint64_t b : kBases) {
    if (n % b == 0) return n == b;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : kBases) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p) {
  if (p >= (std::uint64_t{1} << 62)) throw Error(ErrorCode::ModulusTooLarge, "modulus must be below 2^62");
  if (!is_prime_u64(p)) throw Error(ErrorCode::NotPrime, std::to_string(p) + " is not prime");
}

PrimeField::Element PrimeField::from_mpz(const mpz_class& x) const {
  mpz_class r;
  mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p_));
  return {r.get_ui()};
}

PrimeField::Element PrimeField::from_mpq(const mpq_class& x) const {
  if (is_zero(from_mpz(x.get_den())))
    throw Error(ErrorCode::DivisionByZero, "denominator vanishes mod " + std::to_string(p_));
  return div(from_mpz(x.get_num()), from_mpz(x.get_den()));
}

PrimeField::Element PrimeField::inv(Element a) const {
  if (a.v == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero in F_" + std::to_string(p_));
  return {powmod(a.v, p_ - 2, p_)};
}

PrimeField::Element PrimeField::pow(Element a, std::uint64_t e) const noexcept { return {powmod(a.v, e, p_)}; }

PrimeField::Element PrimeField::parse(std::string_view text) const {
  mpz_class num, den;
  if (!parse_fraction(text, num, den)) throw Error(ErrorCode::ParseError, "bad field element '" + std::string(text) + "'");
  Element d = from_mpz(den);
  if (is_zero(d)) throw Error(ErrorCode::DivisionByZero, "denominator vanishes in '" + std::string(text) + "'");
  return div(from_mpz(num), d);
}

PrimeField::Element PrimeField::random(std::mt19937_64& rng) const { return {uniform_below(rng, p_)}; }

RationalField::Element RationalField::inv(const Element& a) const {
  if (sgn(a) == 0) throw Error(ErrorCode::DivisionByZero, "inverse of zero rational");
  return 1 / a;
}

RationalField::Element RationalField::div(const Element& a, const Element& b) const {
  if (sgn(b) == 0) throw Error(ErrorCode::DivisionByZero, "rational division by zero");
  return a / b;
}

RationalField::Element RationalField::pow(const Element& a, std::uint64_t e) const {
  mpz_class n, d;
  mpz_pow_ui(n.get_mpz_t(), a.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(d.get_mpz_t(), a.get_den_mpz_t(), static_cast<unsigned long>(e));
  mpq_class r(n, d);
  r.canonicalize();
  return r;
}

RationalField::Element RationalField::parse(std::string_view text) const {
  mpz_class num, den;
  if (!parse_fraction(text, num, den)) throw Error(ErrorCode::ParseError, "bad rational '" + std::string(text) + "'");
  if (den == 0) throw Error(ErrorCode::DivisionByZero, "zero denominator in '" + std::string(text) + "'");
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

RationalField::Element RationalField::random(std::mt19937_64& rng) const {
  auto num = static_cast<long>(uniform_below(rng, 101)) - 50;
  auto den = static_cast<long>(uniform_below(rng, 9)) + 1;
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

mpz_class binom_integer(std::uint64_t n, std::uint64_t k) {
  mpz_class r;
  if (k > n) return r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

std::string field_name(const FieldSpec& spec) {
  return spec.kind == FieldKind::Prime ? "F_" + std::to_string(spec.modulus) : "Q";
}

}  // namespace jointslab
