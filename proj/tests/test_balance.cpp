#include <doctest.h>

#include <random>

#include "jointslab/balance.hpp"
#include "support.hpp"

using namespace jointslab;
using namespace testsupport;

namespace {

PrimeField P;

RootValue root(mpq_class radicand, unsigned k, mpq_class scale = 1) { return RootValue{scale, radicand, k}; }

/// Joints p = 0 and q = e1 on the shared plane span(e1, e2); each has its own
/// pair of complementary planes. With `skew` the planes at q are random.
std::shared_ptr<const JointsConfiguration<PrimeField>> two_joints(std::mt19937_64* skew = nullptr) {
  Vec<PrimeField> p(6, P.zero()), q(6, P.zero());
  q[0] = P.one();
  std::vector<VarietySpec<PrimeField>> members{coordinate_flat(P, 6, {0, 1}, "A"),
                                               make_flat(P, p, unit_vectors(P, 6, {2, 3}), "Bp"),
                                               make_flat(P, p, unit_vectors(P, 6, {4, 5}), "Cp")};
  if (skew) {
    Vec<PrimeField> u = random_point(P, 6, *skew), w = random_point(P, 6, *skew);
    Vec<PrimeField> y = random_point(P, 6, *skew), z = random_point(P, 6, *skew);
    members.push_back(make_flat(P, q, {u, w}, "Bq"));
    members.push_back(make_flat(P, q, {y, z}, "Cq"));
  } else {
    members.push_back(make_flat(P, q, unit_vectors(P, 6, {2, 3}), "Bq"));
    members.push_back(make_flat(P, q, unit_vectors(P, 6, {4, 5}), "Cq"));
  }
  ConfigInput<PrimeField> in{P, 6, {}, std::vector<Vec<PrimeField>>{p, q}, 0};
  in.families.push_back(Family<PrimeField>{2, 3, members});
  return std::make_shared<const JointsConfiguration<PrimeField>>(detect_joints(in));
}

std::shared_ptr<const JointsConfiguration<PrimeField>> coordinate(std::size_t copies = 1) {
  GenerateParams g{"coordinate-flats", 6, 6, 2, 3};
  g.copies = copies;
  return std::make_shared<const JointsConfiguration<PrimeField>>(detect_joints(generate(g, P)));
}

}  // namespace

TEST_CASE("root values compare exactly") {
  CHECK(compare(root(2, 2), root(mpq_class(3, 2), 1)) < 0);
  CHECK(compare(root(8, 3), root(4, 2)) == 0);
  CHECK(compare(root(3, 2, 2), root(12, 2)) == 0);
  CHECK(compare(root(0, 3), RootValue{}) == 0);
  CHECK(gap_exceeds(root(2, 2), root(1, 1), mpq_class(2, 5)));
  CHECK_FALSE(gap_exceeds(root(2, 2), root(1, 1), mpq_class(21, 50)));
  CHECK_FALSE(gap_exceeds(root(5, 1), root(4, 1), mpq_class(1)));
  auto [lo, hi] = root(2, 2).bounds(40);
  CHECK(lo * lo <= 2);
  CHECK(hi * hi >= 2);
  CHECK(hi - lo <= mpq_class(1, 1ul << 40));
  CHECK(root(2, 2, 3).to_string() == "3 * (2)^(1/2)");
  CHECK(root(6, 1, mpq_class(1, 4)).to_string() == "3/2");
}

TEST_CASE("normalizers") {
  CHECK(normalizer_value(Normalizer::Binomial, 4, 2) == 6);
  CHECK(normalizer_value(Normalizer::Binomial, 1, 2) == 3);
  CHECK(normalizer_value(Normalizer::FlatDimension, 2, 2) == 6);
}

TEST_CASE("W of a single coordinate joint") {
  auto cfg = coordinate();
  LedgerContext<PrimeField> ctx(cfg, 2);
  auto ledger = build_ledgers(ctx, Handicap::zero(1));
  for (std::size_t v = 0; v < 3; ++v) CHECK(ledger.at(v).total(0) == 6);
  auto w = compute_W(*cfg, ledger, 2, {}, Normalizer::FlatDimension);
  CHECK(compare(w[0], root(1, 1)) == 0);
  auto half = compute_W(*cfg, ledger, 2, {mpq_class(2)}, Normalizer::FlatDimension);
  CHECK(compare(half[0], root(mpq_class(1, 2), 1)) == 0);
  CHECK_THROWS_AS(compute_W(*cfg, BasisLedger<PrimeField>{}, 2), Error);
}

TEST_CASE("W on two joints of a shared plane") {
  auto cfg = two_joints();
  REQUIRE(cfg->joints.size() == 2);
  LedgerContext<PrimeField> ctx(cfg, 1);
  auto ledger = build_ledgers(ctx, Handicap::zero(2));
  // On linear functions a + b x1 + c x2 of the shared plane, p contributes a
  // and c, q contributes a + b; the private planes take all three at their joint.
  CHECK(ledger.at(0).total(0) == 2);
  CHECK(ledger.at(0).total(1) == 1);
  auto w = compute_W(*cfg, ledger, 1);
  CHECK(compare(w[0], root(mpq_class(2, 3), 1)) == 0);
  CHECK(compare(w[1], root(mpq_class(1, 3), 1)) == 0);

  // Far behind q, p gets nothing on the shared plane.
  auto starved = build_ledgers(ctx, Handicap::from_alpha({0, 5}));
  CHECK(compute_W(*cfg, starved, 1)[0].is_zero());
}

TEST_CASE("shift invariance") {
  std::mt19937_64 rng(5);
  auto cfg = two_joints(&rng);
  LedgerContext<PrimeField> ctx(cfg, 3);
  for (std::int64_t a : {-2, 0, 1, 4}) {
    auto w1 = compute_W(*cfg, build_ledgers(ctx, Handicap::from_alpha({a, 0})), 3);
    auto w2 = compute_W(*cfg, build_ledgers(ctx, Handicap::from_alpha({a + 11, 11})), 3);
    for (std::size_t p = 0; p < 2; ++p) CHECK(compare(w1[p], w2[p]) == 0);
  }
}

TEST_CASE("a single joint is balanced at once") {
  LedgerContext<PrimeField> ctx(coordinate(), 2);
  auto st = balance(ctx);
  CHECK(st.status == BalanceStatus::Balanced);
  CHECK(st.iteration == 0);
  CHECK(st.rebuilds == 1);
}

TEST_CASE("descent strictly decreases the sorted W vector" * doctest::timeout(120)) {
  std::size_t moves = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    std::mt19937_64 rng(seed);
    auto cfg = two_joints(&rng);
    LedgerContext<PrimeField> ctx(cfg, 2 + seed % 2);
    BalanceOptions opt;
    opt.tau = mpq_class(1, 100);
    opt.initial_alpha = std::vector<std::int64_t>{static_cast<std::int64_t>(seed % 3), 0};
    auto st = balance(ctx, opt);
    for (const auto& row : st.trace) CHECK(row.lex_decreased);
    CHECK_FALSE(st.revisited);
    CHECK(st.distinct_profiles == st.iteration + 1);
    moves += st.iteration;
    if (st.status == BalanceStatus::Balanced) {
      auto max = st.W[st.sorted.front()], min = st.W[st.sorted.back()];
      CHECK_FALSE(gap_exceeds(max, min, *opt.tau));
    }
    // The final ledger belongs to the final handicap.
    auto again = compute_W(*cfg, build_ledgers(ctx, st.alpha), ctx.n());
    for (std::size_t p = 0; p < 2; ++p) CHECK(compare(again[p], st.W[p]) == 0);
  }
  CHECK(moves > 0);
}

TEST_CASE("rebuild cap") {
  auto cfg = two_joints();
  LedgerContext<PrimeField> ctx(cfg, 1);
  BalanceOptions opt;
  opt.tau = mpq_class(1, 100);
  opt.cap = 1;
  auto st = balance(ctx, opt);
  CHECK(st.status == BalanceStatus::CapHit);
  CHECK(st.rebuilds == 1);
}

TEST_CASE("disconnected configurations are refused") {
  LedgerContext<PrimeField> ctx(coordinate(2), 2);
  CHECK_THROWS_AS(balance(ctx), Error);
}

TEST_CASE("sorted W vectors compare lexicographically") {
  std::vector<RootValue> a{root(3, 1), root(1, 1)}, b{root(3, 1), root(2, 1)};
  CHECK(lex_less(a, b));
  CHECK_FALSE(lex_less(b, a));
  CHECK_FALSE(lex_less(a, a));
}

TEST_CASE("trace csv") {
  BalanceTraceRow row;
  row.iteration = 1;
  row.t = 1;
  row.decrement = 2;
  row.rebuilds = 3;
  row.min_w = root(1, 1);
  row.max_w = root(mpq_class(3, 2), 1);
  row.lex_decreased = true;
  auto csv = balance_trace_csv({row});
  CHECK(csv == "iteration,t,min_w,max_w,lex_changed\n1,1,1,1.5,1\n");
}
