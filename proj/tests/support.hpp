#pragma once

#include <random>

#include "jointslab/polynomial.hpp"

namespace testsupport {

using namespace jointslab;

template <ExactField F>
Polynomial<F> random_polynomial(const F& field, std::size_t nvars, unsigned max_degree, std::size_t terms,
                                std::mt19937_64& rng) {
  auto exps = exponents_in_degree_range(nvars, 0, max_degree);
  Polynomial<F> g(field, nvars);
  for (std::size_t i = 0; i < terms; ++i) g.add_term(exps[uniform_below(rng, exps.size())], field.random(rng));
  return g;
}

template <ExactField F>
std::vector<typename F::Element> random_point(const F& field, std::size_t nvars, std::mt19937_64& rng) {
  std::vector<typename F::Element> p;
  for (std::size_t i = 0; i < nvars; ++i) p.push_back(field.random(rng));
  return p;
}

}  // namespace testsupport

#include "jointslab/variety.hpp"

namespace testsupport {

template <ExactField F>
Matrix<F> unit_vectors(const F& field, std::size_t d, std::initializer_list<std::size_t> axes) {
  Matrix<F> out;
  for (auto a : axes) {
    Vec<F> e(d, field.zero());
    e[a] = field.one();
    out.push_back(std::move(e));
  }
  return out;
}

/// y = x^2 + y^2 in the plane, through the origin.
template <ExactField F>
VarietySpec<F> circle(const F& field) {
  VarietySpec<F> v;
  v.kind = VarietyKind::HypersurfaceInFlat;
  v.id = "circle";
  v.dim = 1;
  v.ambient = 2;
  v.degree = 2;
  v.point = Vec<F>(2, field.zero());
  v.directions = unit_vectors(field, 2, {0, 1});
  v.equations = {parse_polynomial("y - x^2 - y^2", field, 2)};
  validate(v, field);
  return v;
}

template <ExactField F>
VarietySpec<F> coordinate_flat(const F& field, std::size_t d, std::initializer_list<std::size_t> axes,
                               std::string id = "flat") {
  return make_flat(field, Vec<F>(d, field.zero()), unit_vectors(field, d, axes), std::move(id));
}

}  // namespace testsupport
