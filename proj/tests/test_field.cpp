#include <doctest.h>

#include "jointslab/field.hpp"

using namespace jointslab;

TEST_CASE("prime field arithmetic") {
  PrimeField f7(7);
  CHECK(f7.mul(f7.from_int(3), f7.from_int(5)) == f7.from_int(1));
  CHECK(f7.div(f7.from_int(3), f7.from_int(5)) == f7.from_int(2));
  CHECK(f7.from_int(-1) == f7.from_int(6));
  CHECK(f7.parse("3/5") == f7.from_int(2));
  CHECK_THROWS_AS(f7.inv(f7.zero()), Error);
  CHECK_THROWS_AS(f7.parse("1/7"), Error);
  CHECK_THROWS_AS(f7.parse("abc"), Error);
}

TEST_CASE("prime field construction guards") {
  CHECK(is_prime_u64(kDefaultPrime));
  CHECK(is_prime_u64(2));
  CHECK_FALSE(is_prime_u64(1));
  CHECK_FALSE(is_prime_u64(561));
  CHECK_FALSE(is_prime_u64(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
  CHECK(is_prime_u64(4611686018427387847ULL));  // largest prime below 2^62
  try {
    PrimeField f(15);
    FAIL("composite modulus accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotPrime);
  }
  try {
    PrimeField f((1ULL << 62) + 135);
    FAIL("oversized modulus accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ModulusTooLarge);
  }
}

TEST_CASE("rational arithmetic stays canonical") {
  RationalField q;
  auto s = q.add(q.parse("1/2"), q.parse("1/3"));
  CHECK(q.to_string(s) == "5/6");
  CHECK(q.to_string(q.parse("4/6")) == "2/3");
  CHECK(q.to_string(q.parse("-4/-6")) == "2/3");
  CHECK_THROWS_AS(q.parse("1/0"), Error);
  CHECK_THROWS_AS(q.div(q.one(), q.zero()), Error);
}

TEST_CASE_TEMPLATE("field axioms on random elements", F, PrimeField, RationalField) {
  F f{};
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    auto a = f.random(rng), b = f.random(rng), c = f.random(rng);
    CHECK(f.equal(f.add(f.add(a, b), c), f.add(a, f.add(b, c))));
    CHECK(f.equal(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c))));
    CHECK(f.equal(f.sub(f.add(a, b), b), a));
    if (!f.is_zero(a)) CHECK(f.is_one(f.mul(a, f.inv(a))));
  }
}

TEST_CASE("binomials reduced into the field") {
  PrimeField f2(2), f7(7);
  CHECK(binom_in_field<PrimeField>(2, 1, f2) == f2.zero());
  CHECK(binom_in_field<PrimeField>(4, 2, f7) == f7.from_int(6));
  CHECK(binom_in_field<PrimeField>(3, 5, f7) == f7.zero());
  CHECK(binom_in_field<RationalField>(3, 5, RationalField{}) == 0);

  for (std::uint64_t p : std::vector<std::uint64_t>{2, 3, 7, kDefaultPrime}) {
    PrimeField f(p);
    for (unsigned n = 1; n <= 200; ++n)
      for (unsigned k = 1; k <= n; ++k)
        REQUIRE(binom_in_field<PrimeField>(n, k, f) ==
                f.add(binom_in_field<PrimeField>(n - 1, k, f), binom_in_field<PrimeField>(n - 1, k - 1, f)));
    BinomialTable<PrimeField> table(f, 60);
    for (unsigned n = 0; n <= 80; ++n)
      for (unsigned k = 0; k <= n + 1; ++k) REQUIRE(table(n, k) == binom_in_field<PrimeField>(n, k, f));
  }
}

TEST_CASE("uniform_below is deterministic and in range") {
  std::mt19937_64 a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    auto x = uniform_below(a, 17);
    CHECK(x < 17);
    CHECK(x == uniform_below(b, 17));
  }
}
