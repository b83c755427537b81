#include <doctest.h>

#include <random>

#include "jointslab/verification.hpp"
#include "oracles.hpp"

using namespace jointslab;
using namespace testsupport;

namespace {

PrimeField P;
using Cfg = std::shared_ptr<const JointsConfiguration<PrimeField>>;

Cfg share(JointsConfiguration<PrimeField> cfg) {
  return std::make_shared<const JointsConfiguration<PrimeField>>(std::move(cfg));
}

Cfg coordinate() { return share(detect_joints(generate(GenerateParams{"coordinate-flats", 6, 6, 2, 3}, P))); }

Cfg hyperplanes(std::size_t d, std::size_t h, std::uint64_t seed = 1) {
  GenerateParams g;
  g.kind = "generic-hyperplanes";
  g.d = d;
  g.h = h;
  g.m = d == 6 ? 3 : d;
  g.seed = seed;
  return share(detect_joints(generate(g, P)));
}

/// Joints 0 and e1 on span(e1, e2), each with its own two coordinate planes.
Cfg shared_plane() {
  Vec<PrimeField> p(6, P.zero()), q(6, P.zero());
  q[0] = P.one();
  std::vector<VarietySpec<PrimeField>> members{coordinate_flat(P, 6, {0, 1}, "A")};
  for (const auto& at : {p, q}) {
    members.push_back(make_flat(P, at, unit_vectors(P, 6, {2, 3})));
    members.push_back(make_flat(P, at, unit_vectors(P, 6, {4, 5})));
  }
  ConfigInput<PrimeField> in{P, 6, {}, std::vector<Vec<PrimeField>>{p, q}, 0};
  in.families.push_back(Family<PrimeField>{2, 3, members});
  return share(detect_joints(in));
}

void check_witness(const Vec<PrimeField>& p, const std::vector<Chart<PrimeField>>& charts,
                   const Polynomial<PrimeField>& g) {
  auto w = hasse_vanishing_witness(p, charts, g);
  CHECK(w.pass);
  CHECK_FALSE(P.is_zero(w.value));
  CHECK(reapply(w, g, p) == w.value);
  unsigned sum = 0;
  for (auto r : w.orders) sum += r;
  CHECK(sum == w.order);
  CHECK(vanishing_order(g, std::span<const PrimeField::Element>(p)) == w.order);
}

}  // namespace

TEST_CASE("product-derivative rank on coordinate flats") {
  auto cfg = coordinate();
  for (unsigned n : {1u, 2u}) {
    LedgerContext<PrimeField> ctx(cfg, n);
    auto ledger = build_ledgers(ctx, Handicap::zero(1));
    auto rc = vanishing_rank_check(ctx, ledger);
    CHECK(rc.pass);
    CHECK(rc.expected == (n == 1 ? 7u : 28u));
    CHECK(rc.rank == rc.expected);
    auto cc = parameter_count_check(ctx, ledger);
    CHECK(cc.pass);
    CHECK(cc.rhs == rc.expected);
    if (n == 2) CHECK(cc.lhs == 216);
  }
}

TEST_CASE("dropping a joint breaks fullness") {
  auto cfg = shared_plane();
  REQUIRE(cfg->joints.size() == 2);
  LedgerContext<PrimeField> ctx(cfg, 2);
  auto ledger = build_ledgers(ctx, Handicap::zero(2));
  CHECK(vanishing_rank_check(ctx, ledger).pass);
  for (std::size_t p = 0; p < 2; ++p) {
    RankOptions opt;
    opt.drop_joint = p;
    auto rc = vanishing_rank_check(ctx, ledger, opt);
    CHECK_FALSE(rc.pass);
    CHECK(rc.rank < rc.expected);
  }
}

TEST_CASE("size guard") {
  auto cfg = coordinate();
  LedgerContext<PrimeField> ctx(cfg, 2);
  auto ledger = build_ledgers(ctx, Handicap::zero(1));
  RankOptions opt;
  opt.max_width = 10;
  auto rc = vanishing_rank_check(ctx, ledger, opt);
  CHECK(rc.skipped == std::optional<std::string>("size"));
  CHECK_FALSE(rc.pass);
}

TEST_CASE("rank holds for every handicap and implies the count" * doctest::timeout(300)) {
  auto cfg = hyperplanes(6, 7);
  REQUIRE(cfg->joints.size() == 7);
  std::mt19937_64 rng(2);
  for (unsigned n = 1; n <= 2; ++n) {
    LedgerContext<PrimeField> ctx(cfg, n);
    std::vector<Handicap> hs{Handicap::zero(7)};
    std::vector<std::int64_t> a;
    for (int i = 0; i < 7; ++i) a.push_back(static_cast<std::int64_t>(uniform_below(rng, 7)) - 3);
    hs.push_back(Handicap::from_alpha(a));
    hs.push_back(balance(ctx).alpha);
    for (const auto& h : hs) {
      auto ledger = build_ledgers(ctx, h);
      auto rc = vanishing_rank_check(ctx, ledger);
      CHECK(rc.pass);
      if (rc.pass) CHECK(parameter_count_check(ctx, ledger).pass);
    }
  }
}

TEST_CASE("witness examples") {
  Vec<PrimeField> o(6, P.zero());
  auto split = [&](std::size_t a, unsigned truncation) {
    return charts_at(P, {o, {coordinate_flat(P, 6, {0, 1}), coordinate_flat(P, 6, {a, a + 1}),
                             coordinate_flat(P, 6, {4, 5})}}, truncation);
  };
  auto charts = split(2, 3);
  auto g = parse_polynomial("x1*x3*x5", P, 6);
  auto w = hasse_vanishing_witness(o, charts, g);
  CHECK(w.orders == std::vector<unsigned>{1, 1, 1});
  CHECK(w.value == P.one());
  CHECK(w.pass);

  auto one = Polynomial<PrimeField>::constant(P, 6, P.one());
  auto w0 = hasse_vanishing_witness(o, charts, one);
  CHECK(w0.orders == std::vector<unsigned>{0, 0, 0});
  CHECK(w0.value == P.one());
  for (const auto& op : w0.ambient) CHECK(op.combo().size() == 1);

  Vec<PrimeField> o2(2, P.zero());
  auto cl = charts_at(P, {o2, {circle(P), coordinate_flat(P, 2, {1}, "line")}}, 2);
  auto wc = hasse_vanishing_witness(o2, cl, parse_polynomial("y - x^2 - y^2", P, 2));
  CHECK(wc.order == 1);
  CHECK(wc.orders[0] + wc.orders[1] == 1);
  CHECK(wc.pass);

  CHECK_THROWS_AS(hasse_vanishing_witness(o, charts, Polynomial<PrimeField>(P, 6)), Error);
  CHECK_THROWS_AS(hasse_vanishing_witness(o, split(1, 3), g), Error);
  CHECK_THROWS_AS(hasse_vanishing_witness(o, split(2, 2), g), Error);
}

TEST_CASE("witness soundness on random instances" * doctest::timeout(120)) {
  std::mt19937_64 rng(31);
  auto lines = hyperplanes(3, 5);
  auto planes = hyperplanes(6, 7);
  for (int trial = 0; trial < 80; ++trial) {
    const unsigned order = static_cast<unsigned>(uniform_below(rng, 4));
    const unsigned degree = order + static_cast<unsigned>(uniform_below(rng, 3));
    Vec<PrimeField> p;
    std::vector<Chart<PrimeField>> charts;
    switch (trial % 4) {
      case 0: {
        auto j = uniform_below(rng, lines->joints.size());
        p = lines->joints[j];
        charts = joint_charts(*lines, j, degree);
        break;
      }
      case 1: {
        auto j = uniform_below(rng, planes->joints.size());
        p = planes->joints[j];
        charts = joint_charts(*planes, j, degree);
        break;
      }
      case 2: {
        auto j = circle_joint(P, rng);
        p = j.first;
        charts = charts_at(P, j, degree);
        break;
      }
      default: {
        auto j = saddle_joint(P, rng);
        p = j.first;
        charts = charts_at(P, j, degree);
        break;
      }
    }
    auto g = random_polynomial_at(P, p, order, degree, rng);
    CHECK(vanishing_order(g, std::span<const PrimeField::Element>(p)) >= std::optional<unsigned>(order));
    check_witness(p, charts, g);
  }
}

TEST_CASE("Schwartz-Zippel with multiplicities") {
  auto xy = parse_polynomial("x*y", P, 2);
  auto sz = schwartz_zippel_mult(xy, {P.zero(), P.one()});
  CHECK(sz.lhs == 4);
  CHECK(sz.rhs == 4);
  CHECK(sz.pass);

  auto c = schwartz_zippel_mult(Polynomial<PrimeField>::constant(P, 2, P.from_int(5)), {P.zero(), P.one()});
  CHECK(c.lhs == 0);
  CHECK(c.rhs == 0);
  CHECK(c.pass);
  CHECK_THROWS_AS(schwartz_zippel_mult(Polynomial<PrimeField>(P, 2), {P.zero()}), Error);

  PrimeField small(31);
  std::mt19937_64 rng(8);
  std::vector<PrimeField::Element> A{small.from_int(0), small.from_int(3), small.from_int(7), small.from_int(30)};
  for (int i = 0; i < 200; ++i) {
    auto g = random_polynomial(small, 2, 5, 6, rng);
    if (g.is_zero()) continue;
    auto r = schwartz_zippel_mult(g, A);
    CHECK(r.pass);
    // Brute-force left side.
    mpz_class lhs = 0;
    for (auto a : A)
      for (auto b : A) {
        Vec<PrimeField> pt{a, b};
        lhs += *vanishing_order(g, std::span<const PrimeField::Element>(pt));
      }
    CHECK(r.lhs == lhs);
    CHECK(r.rhs == mpz_class(4 * g.degree()));
  }
}

TEST_CASE("bound reports") {
  auto planes = hyperplanes(6, 8);
  REQUIRE(planes->varieties.size() == 70);
  REQUIRE(planes->joints.size() == 28);
  auto b = bound_report(*planes);
  CHECK(b.applicable);
  CHECK(b.s == 3);
  CHECK(b.joint_count == 28);
  CHECK(b.constant_a_power == mpq_class(10, 3));
  CHECK(b.constant_b_power == 15);
  CHECK(b.degree_product == 70 * 70 * 70);
  CHECK(b.pass_a);
  CHECK(b.pass_b);
  CHECK(b.pass());
  CHECK(decimal(b.constant_a) == "1.82574185835");

  auto lines = hyperplanes(3, 6);
  REQUIRE(lines->varieties.size() == 15);
  REQUIRE(lines->joints.size() == 20);
  auto l = bound_report(*lines);
  CHECK(l.constant_a_power == mpq_class(2, 9));
  CHECK(l.pass());
  // A single joint per point: the multiplicity sum is exact.
  CHECK(l.multiplicity_exact);
  CHECK(l.multiplicity_lo == 20);

  std::mt19937_64 rng(5);
  std::vector<VarietySpec<PrimeField>> members;
  for (int i = 0; i < 3; ++i) {
    Vec<PrimeField> u = random_point(P, 6, rng), w = random_point(P, 6, rng);
    u[5] = w[5] = P.zero();
    members.push_back(make_flat(P, Vec<PrimeField>(6, P.zero()), {u, w}));
  }
  ConfigInput<PrimeField> in{P, 6, {}, std::nullopt, 0};
  in.families.push_back(Family<PrimeField>{2, 3, members});
  auto empty = bound_report(detect_joints(in));
  CHECK(empty.joint_count == 0);
  CHECK(empty.pass());
}

TEST_CASE("multiplicity brackets") {
  // One joint of multiplicity 15 on six generic hyperplanes: 15^(1/2) is irrational.
  auto b = bound_report(*hyperplanes(6, 6));
  CHECK_FALSE(b.multiplicity_exact);
  CHECK(b.multiplicity_lo * b.multiplicity_lo <= 15);
  CHECK(b.multiplicity_hi * b.multiplicity_hi >= 15);
  CHECK(b.multiplicity_hi - b.multiplicity_lo <= mpq_class(1, 1ul << 48));
  CHECK(b.pass());
}

TEST_CASE("decimal rendering") {
  CHECK(decimal(mpq_class(1, 3)) == "0.333333333333");
  CHECK(decimal(mpq_class(28)) == "28");
  CHECK(decimal(RootValue{1, mpq_class(10, 3), 2}) == "1.82574185835");
}
