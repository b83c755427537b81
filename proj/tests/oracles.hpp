#pragma once

// Brute-force oracles and random instances shared by the unit tests and the
// acceptance run. Everything here is over PrimeField.

#include <random>
#include <utility>

#include "jointslab/verification.hpp"
#include "support.hpp"

namespace testsupport {

inline PrimeField::Element power(const PrimeField& f, PrimeField::Element x, unsigned k) {
  auto r = f.one();
  while (k--) r = f.mul(r, x);
  return r;
}

/// Coefficient of (x-p)^(a,b) in g, expanded monomial by monomial.
inline PrimeField::Element shifted_coefficient(const Polynomial<PrimeField>& g, const Vec<PrimeField>& p, unsigned a,
                                               unsigned b) {
  const auto& f = g.field();
  auto acc = f.zero();
  for (const auto& [e, c] : g.terms()) {
    if (e[0] < a || e[1] < b) continue;
    mpz_class m = binom_integer(e[0], a) * binom_integer(e[1], b);
    acc = f.add(acc, f.mul(c, f.mul(f.from_mpz(m), f.mul(power(f, p[0], e[0] - a), power(f, p[1], e[1] - b)))));
  }
  return acc;
}

/// Vanishing order of a nonzero bivariate g at p, by direct expansion.
inline unsigned brute_order(const Polynomial<PrimeField>& g, const Vec<PrimeField>& p) {
  for (unsigned r = 0;; ++r)
    for (unsigned a = 0; a <= r; ++a)
      if (!g.field().is_zero(shifted_coefficient(g, p, a, r - a))) return r;
}

/// dim {g in F[x,y]_{<=n} : g vanishes to order >= v[i] at pts[i]}, by
/// eliminating the Taylor-coefficient functionals written out monomial by
/// monomial.
inline std::size_t brute_T_plane(const PrimeField& f, const std::vector<Vec<PrimeField>>& pts,
                                 const std::vector<unsigned>& v, unsigned n) {
  std::vector<std::pair<unsigned, unsigned>> mons;
  for (unsigned deg = 0; deg <= n; ++deg)
    for (unsigned i = 0; i <= deg; ++i) mons.emplace_back(deg - i, i);
  Matrix<PrimeField> rows;
  for (std::size_t k = 0; k < pts.size(); ++k)
    for (unsigned a = 0; a < v[k]; ++a)
      for (unsigned b = 0; a + b < v[k]; ++b) {
        Vec<PrimeField> row;
        for (auto [i, j] : mons) {
          if (i < a || j < b) {
            row.push_back(f.zero());
            continue;
          }
          mpz_class c = binom_integer(i, a) * binom_integer(j, b);
          row.push_back(f.mul(f.from_mpz(c), f.mul(power(f, pts[k][0], i - a), power(f, pts[k][1], j - b))));
        }
        rows.push_back(row);
      }
  return mons.size() - rank(rows, f);
}

/// A random 2-flat in F^3 and random points on it.
struct FlatInstance {
  VarietySpec<PrimeField> flat;
  std::vector<Vec<PrimeField>> points;
};

inline FlatInstance random_flat_instance(const PrimeField& f, std::mt19937_64& rng, std::size_t count) {
  auto base = random_point(f, 3, rng);
  Matrix<PrimeField> dirs{random_point(f, 3, rng), random_point(f, 3, rng)};
  FlatInstance inst{make_flat(f, base, dirs, "F"), {}};
  for (std::size_t i = 0; i < count; ++i) {
    auto s = f.random(rng), t = f.random(rng);
    Vec<PrimeField> q(3);
    for (std::size_t j = 0; j < 3; ++j) q[j] = f.add(base[j], f.add(f.mul(s, dirs[0][j]), f.mul(t, dirs[1][j])));
    inst.points.push_back(q);
  }
  return inst;
}

/// Points of y = x^2 + y^2 away from the origin, from the lines y = t x.
inline std::vector<Vec<PrimeField>> circle_points(const PrimeField& f, std::mt19937_64& rng, std::size_t count) {
  std::vector<Vec<PrimeField>> pts;
  while (pts.size() < count) {
    auto t = f.random(rng);
    auto den = f.add(f.one(), f.mul(t, t));
    if (f.is_zero(den) || f.is_zero(t)) continue;
    auto inv = f.inv(den);
    pts.push_back({f.mul(t, inv), f.mul(f.mul(t, t), inv)});
  }
  return pts;
}

using JointCharts = std::pair<Vec<PrimeField>, std::vector<VarietySpec<PrimeField>>>;

/// A random point of the circle with a random line through it.
inline JointCharts circle_joint(const PrimeField& f, std::mt19937_64& rng) {
  auto pt = circle_points(f, rng, 1).front();
  return {pt, {circle(f), make_flat(f, pt, {random_point(f, 2, rng)}, "line")}};
}

/// The surface x3 = x1 x2 with a transversal line through a random point of it.
inline JointCharts saddle_joint(const PrimeField& f, std::mt19937_64& rng) {
  VarietySpec<PrimeField> s;
  s.kind = VarietyKind::Graph;
  s.id = "saddle";
  s.dim = 2;
  s.ambient = 3;
  s.degree = 2;
  s.equations = {parse_polynomial("x1*x2", f, 2)};
  validate(s, f);
  auto a = f.random(rng), b = f.random(rng);
  Vec<PrimeField> pt{a, b, f.mul(a, b)};
  Vec<PrimeField> dir = random_point(f, 3, rng);
  dir[2] = f.add(dir[2], f.one());
  return {pt, {s, make_flat(f, pt, {dir}, "line")}};
}

inline std::vector<Chart<PrimeField>> charts_at(const PrimeField& f, const JointCharts& j, unsigned truncation) {
  std::vector<Chart<PrimeField>> out;
  for (const auto& v : j.second) out.push_back(make_chart(v, j.first, truncation, f));
  return out;
}

/// Applies the witness operators one after another and evaluates at p.
inline PrimeField::Element reapply(const Witness<PrimeField>& w, const Polynomial<PrimeField>& g,
                                   const Vec<PrimeField>& p) {
  Polynomial<PrimeField> h = g;
  for (const auto& op : w.ambient) h = op.apply(h);
  return h.evaluate(p);
}

inline std::vector<std::int64_t> random_alpha(std::mt19937_64& rng, std::size_t count, int spread) {
  std::vector<std::int64_t> a;
  for (std::size_t i = 0; i < count; ++i)
    a.push_back(static_cast<std::int64_t>(uniform_below(rng, 2 * static_cast<std::uint64_t>(spread) + 1)) - spread);
  return a;
}

}  // namespace testsupport
