#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "jointslab/configuration.hpp"
#include "jointslab/json_io.hpp"
#include "support.hpp"

using namespace jointslab;
using namespace testsupport;

namespace {

PrimeField P;

std::vector<std::vector<std::size_t>> subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<bool> mask(n, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(std::min(k, n)), true);
  if (k > n) return out;
  do {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask[i]) s.push_back(i);
    out.push_back(s);
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

/// Number of member choices at p (m_i per family) whose flats all pass
/// through p and whose direction vectors have full rank.
template <ExactField F>
std::size_t brute_multiplicity(const ConfigInput<F>& in, const Vec<F>& p) {
  std::vector<std::vector<std::vector<std::size_t>>> per_family;
  for (const auto& fam : in.families) {
    std::vector<std::size_t> through;
    for (std::size_t i = 0; i < fam.members.size(); ++i)
      if (contains_point(fam.members[i], p, in.field)) through.push_back(i);
    std::vector<std::vector<std::size_t>> picks;
    for (const auto& s : subsets(through.size(), fam.m)) {
      std::vector<std::size_t> pick;
      for (auto i : s) pick.push_back(through[i]);
      picks.push_back(pick);
    }
    per_family.push_back(picks);
  }
  std::size_t count = 0;
  std::vector<std::size_t> idx(per_family.size(), 0);
  for (const auto& picks : per_family)
    if (picks.empty()) return 0;
  while (true) {
    Matrix<F> dirs;
    for (std::size_t f = 0; f < per_family.size(); ++f)
      for (auto i : per_family[f][idx[f]])
        for (const auto& v : in.families[f].members[i].directions) dirs.push_back(v);
    if (rank(dirs, in.field) == in.ambient) ++count;
    std::size_t f = 0;
    while (f < idx.size() && ++idx[f] == per_family[f].size()) idx[f++] = 0;
    if (f == idx.size()) break;
  }
  return count;
}

ConfigInput<PrimeField> single_family(std::size_t d, std::size_t k, std::size_t m,
                                      std::vector<VarietySpec<PrimeField>> members,
                                      std::optional<std::vector<Vec<PrimeField>>> candidates = std::nullopt) {
  ConfigInput<PrimeField> in{P, d, {}, std::move(candidates), 0};
  in.families.push_back(Family<PrimeField>{k, m, std::move(members)});
  return in;
}

GenerateParams params(std::string kind, std::size_t d, std::size_t h, std::uint64_t seed = 1) {
  GenerateParams g;
  g.kind = std::move(kind);
  g.d = d;
  g.h = h;
  g.m = d;
  g.seed = seed;
  if (g.kind == "generic-hyperplanes" && d == 6) g.m = 3;
  return g;
}

}  // namespace

TEST_CASE("is_joint on coordinate splits") {
  auto c = [](std::initializer_list<std::size_t> axes) {
    return make_chart(coordinate_flat(P, 6, axes), Vec<PrimeField>(6, P.zero()), 1, P);
  };
  auto a = c({0, 1}), b = c({2, 3}), e = c({4, 5}), overlap = c({1, 2});
  CHECK(is_joint<PrimeField>(Vec<PrimeField>(6, P.zero()), {&a, &b, &e}, P));
  CHECK_FALSE(is_joint<PrimeField>(Vec<PrimeField>(6, P.zero()), {&a, &overlap, &e}, P));
  CHECK_THROWS_AS(is_joint<PrimeField>(Vec<PrimeField>(6, P.zero()), {&a, &b}, P), Error);

  // Three planes inside x6 = 0.
  auto f1 = c({0, 1}), f2 = c({2, 3});
  auto f3 = make_chart(make_flat(P, Vec<PrimeField>(6, P.zero()), unit_vectors(P, 6, {4, 0})),
                       Vec<PrimeField>(6, P.zero()), 1, P);
  CHECK_FALSE(is_joint<PrimeField>(Vec<PrimeField>(6, P.zero()), {&f1, &f2, &f3}, P));
}

TEST_CASE("coordinate flats form one joint") {
  auto in = generate(GenerateParams{"coordinate-flats", 6, 6, 2, 3}, P);
  auto cfg = detect_joints(in);
  REQUIRE(cfg.joints.size() == 1);
  CHECK(cfg.joints[0] == Vec<PrimeField>(6, P.zero()));
  CHECK(cfg.multiplicity(0) == 1);
  CHECK(cfg.designated(0) == Tuple{0, 1, 2});
  CHECK(connected_components(cfg).size() == 1);
}

TEST_CASE("four generic planes through the origin") {
  std::mt19937_64 rng(11);
  std::vector<VarietySpec<PrimeField>> members;
  for (int i = 0; i < 4; ++i)
    members.push_back(make_flat(P, Vec<PrimeField>(6, P.zero()),
                                {random_point(P, 6, rng), random_point(P, 6, rng)}, "G" + std::to_string(i)));
  auto in = single_family(6, 2, 3, members);
  auto cfg = detect_joints(in);
  REQUIRE(cfg.joints.size() == 1);
  CHECK(cfg.multiplicity(0) == 4);
  CHECK(cfg.designated(0) == Tuple{0, 1, 2});
  CHECK(brute_multiplicity(in, cfg.joints[0]) == 4);
}

TEST_CASE("planes inside a 4-space have no joints") {
  std::mt19937_64 rng(5);
  std::vector<VarietySpec<PrimeField>> members;
  for (int i = 0; i < 5; ++i) {
    auto pt = random_point(P, 6, rng);
    pt[4] = pt[5] = P.zero();
    auto u = random_point(P, 6, rng), w = random_point(P, 6, rng);
    u[4] = u[5] = w[4] = w[5] = P.zero();
    members.push_back(make_flat(P, pt, {u, w}));
  }
  CHECK(detect_joints(single_family(6, 2, 3, members)).joints.empty());
}

TEST_CASE("non-flat members need candidates") {
  auto v = circle(P);
  auto line = coordinate_flat(P, 2, {1}, "line");
  auto in = single_family(2, 1, 2, {v, line});
  CHECK_THROWS_AS(detect_joints(in), Error);
  in.candidates = std::vector<Vec<PrimeField>>{{P.zero(), P.zero()}, {P.one(), P.one()}};
  auto cfg = detect_joints(in);
  REQUIRE(cfg.joints.size() == 1);
  CHECK(cfg.joints[0] == Vec<PrimeField>(2, P.zero()));
}

TEST_CASE("validation rejects bad bookkeeping") {
  auto in = single_family(6, 2, 2, {coordinate_flat(P, 6, {0, 1}), coordinate_flat(P, 6, {2, 3})});
  CHECK_THROWS_AS(validate_input(in), Error);
}

TEST_CASE("disjoint copies split into components") {
  GenerateParams g{"coordinate-flats", 6, 6, 2, 3};
  g.copies = 2;
  auto cfg = detect_joints(generate(g, P));
  REQUIRE(cfg.joints.size() == 2);
  auto parts = connected_components(cfg);
  REQUIRE(parts.size() == 2);
  for (const auto& part : parts) {
    CHECK(part.joints.size() == 1);
    CHECK(part.varieties.size() == 3);
  }
  CHECK(parts[1].joint_id(0) == cfg.joint_id(1));
}

TEST_CASE("generic hyperplanes in three dimensions") {
  auto in = generate(params("generic-hyperplanes", 3, 5), P);
  CHECK(in.families.at(0).members.size() == 10);
  REQUIRE(in.candidates);
  CHECK(in.candidates->size() == 10);
  auto cfg = detect_joints(in);
  CHECK(cfg.joints.size() == 10);
  for (std::size_t p = 0; p < cfg.joints.size(); ++p) CHECK(cfg.multiplicity(p) == 1);
  CHECK(connected_components(cfg).size() == 1);
}

TEST_CASE("generic hyperplanes in six dimensions") {
  auto cfg = detect_joints(generate(params("generic-hyperplanes", 6, 6), P));
  CHECK(cfg.varieties.size() == 15);
  REQUIRE(cfg.joints.size() == 1);
  // Members are 4-subsets of hyperplanes in lexicographic order. A triple is
  // a joint iff the omitted pairs partition the six hyperplanes.
  std::vector<std::string> ids;
  for (auto v : cfg.designated(0)) ids.push_back(cfg.varieties[v].id);
  CHECK(ids == std::vector<std::string>{"H1.2.3.4", "H1.2.5.6", "H3.4.5.6"});
  CHECK(cfg.multiplicity(0) == 15);

  auto big = detect_joints(generate(params("generic-hyperplanes", 6, 8), P));
  CHECK(big.varieties.size() == 70);
  CHECK(big.joints.size() == 28);
  CHECK(connected_components(big).size() == 1);
}

TEST_CASE("generic hyperplane pass rate" * doctest::timeout(60)) {
  std::size_t good = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto h = 3 + seed % 6;
    auto in = generate(params("generic-hyperplanes", 3, h, seed), P);
    if (detect_joints(in).joints.size() == in.candidates->size()) ++good;
  }
  CHECK(good >= 99);
}

TEST_CASE("grid points") {
  GenerateParams g{"grid", 2, 0, 0, 1};
  g.t = 3;
  g.seed = 7;
  auto in = generate(g, P);
  REQUIRE(in.candidates);
  CHECK(in.candidates->size() == 9);
  std::set<PrimeField::Element> xs, ys;
  for (const auto& p : *in.candidates) {
    xs.insert(p[0]);
    ys.insert(p[1]);
  }
  CHECK(xs == ys);
  CHECK(xs.size() == 3);
  CHECK(detect_joints(in).joints.size() == 9);
}

TEST_CASE("small fields are rejected") {
  PrimeField small(101);
  CHECK_THROWS_AS(generate(params("generic-hyperplanes", 3, 5), small), Error);
}

TEST_CASE("generation is deterministic") {
  for (const auto* kind : {"generic-hyperplanes", "random-flats", "grid", "composite"}) {
    auto g = params(kind, kind == std::string("grid") ? 2 : 6, 7, 3);
    if (g.kind == "random-flats") g.m = 3;
    auto a = write_config(generate(g, P));
    auto b = write_config(generate(g, P));
    CHECK(a == b);
    g.seed = 4;
    CHECK(write_config(generate(g, P)) != a);
  }
}

TEST_CASE("multiplicities match a brute-force count" * doctest::timeout(60)) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    GenerateParams g;
    g.kind = "random-flats";
    g.seed = seed;
    g.d = seed % 2 ? 4 : 6;
    g.m = g.d / 2;
    g.flats = 6;
    g.points = 2 + seed % 2;
    auto in = generate(g, P);
    auto cfg = detect_joints(in);
    for (std::size_t p = 0; p < cfg.joints.size(); ++p)
      CHECK(cfg.multiplicity(p) == brute_multiplicity(in, cfg.joints[p]));
    std::size_t brute_joints = 0;
    for (const auto& q : *in.candidates)
      if (brute_multiplicity(in, q) > 0) ++brute_joints;
    CHECK(cfg.joints.size() == brute_joints);
  }
}
