#pragma once

// Varieties of the supported kinds, local-coordinate charts at regular points,
// and the derivative operators D^gamma built from a chart's series.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jointslab/affine.hpp"
#include "jointslab/linalg.hpp"
#include "jointslab/polynomial.hpp"

namespace jointslab {

enum class VarietyKind { Flat, Graph, HypersurfaceInFlat, RawIdealSlice };

std::string variety_kind_name(VarietyKind kind);
VarietyKind parse_variety_kind(const std::string& name);

/// A chart at `center`: ambient x = frame(z) with frame(0) = center, the
/// variety given near z = 0 by z_{k+j} = series[j](z_1..z_k).
template <ExactField F>
struct Chart {
  std::size_t dim = 0;  // k
  Vec<F> center;
  AffineMap<F> frame;
  std::vector<Polynomial<F>> series;  // d - k entries in k variables
  unsigned truncation = 0;

  std::size_t ambient() const { return center.size(); }
};

template <ExactField F>
struct VarietySpec {
  VarietyKind kind = VarietyKind::Flat;
  std::size_t dim = 0;
  std::size_t ambient = 0;
  unsigned degree = 1;
  std::string id;

  // Flat: base point and k directions. HypersurfaceInFlat: the containing
  // (k+1)-flat, whose internal coordinates u give x = point + sum u_i dir_i.
  Vec<F> point;
  Matrix<F> directions;

  // Graph: x = frame(y) with y_{k+j} = equations[j](y_1..y_k).
  std::optional<AffineMap<F>> frame;

  // Graph: f_{k+1..d} in k variables. HypersurfaceInFlat: one polynomial in
  // the k+1 internal coordinates. RawIdealSlice: a spanning set of
  // I(V) intersected with polynomials of degree <= slice_degree.
  std::vector<Polynomial<F>> equations;
  unsigned slice_degree = 0;
  std::vector<Chart<F>> supplied_charts;  // RawIdealSlice only
};

/// Throws InvalidVariety when the spec breaks its kind's invariants.
template <ExactField F>
void validate(const VarietySpec<F>& v, const F& field);

/// Generators of I(V) in the ambient variables.
template <ExactField F>
std::vector<Polynomial<F>> defining_equations(const VarietySpec<F>& v, const F& field);

template <ExactField F>
bool contains_point(const VarietySpec<F>& v, const Vec<F>& p, const F& field);

/// t with p = point + sum t_i directions_i, or nullopt when p is off the flat.
template <ExactField F>
std::optional<Vec<F>> flat_parameters(const VarietySpec<F>& v, const Vec<F>& p, const F& field);

/// Flat through `point` with the given directions.
template <ExactField F>
VarietySpec<F> make_flat(const F& field, Vec<F> point, Matrix<F> directions, std::string id = {});

template <ExactField F>
Chart<F> make_chart(const VarietySpec<F>& v, const Vec<F>& p, unsigned truncation, const F& field);

/// Images of the first k framed coordinate directions.
template <ExactField F>
Matrix<F> tangent_space(const Chart<F>& c);

/// D^gamma in framed coordinates; support |omega| <= min(|gamma|, max_order).
template <ExactField F>
HasseOperator<F> derivative_operator(const Chart<F>& c, const ExponentVector& gamma,
                                     std::optional<unsigned> max_order = std::nullopt);

template <ExactField F>
struct DerivativeSpace {
  unsigned order = 0;
  std::vector<ExponentVector> gammas;       // graded-lex, |gamma| = order, k entries
  std::vector<HasseOperator<F>> operators;  // framed coordinates
};

template <ExactField F>
DerivativeSpace<F> derivative_space(const Chart<F>& c, unsigned r);

/// The ambient operator E with (E g)(center) = (D (g o frame))(0), keeping
/// terms of order <= max_order.
template <ExactField F>
HasseOperator<F> to_ambient(const Chart<F>& c, const HasseOperator<F>& framed, unsigned max_order);

struct WellDefinedReport {
  bool pass = true;
  std::size_t checks = 0;
  std::string counterexample;  // "equation * multiplier" text when failing
};

/// Checks D((e o frame) * q)(0) = 0 for every defining generator e and q = 1
/// plus `trials` random framed multipliers.
template <ExactField F>
WellDefinedReport well_defined_check(const VarietySpec<F>& v, const Chart<F>& c, const HasseOperator<F>& framed,
                                     std::size_t trials, std::mt19937_64& rng, const F& field);

/// dim R_{V,<=n}.
template <ExactField F>
std::size_t dim_regular_functions(const VarietySpec<F>& v, unsigned n, const F& field);

/// Hilbert-function reference for HypersurfaceInFlat of degree e in a (k+1)-flat.
std::size_t hypersurface_in_flat_dimension(std::size_t k, unsigned e, unsigned n);

/// Caches everything that derives from one chart: products of series powers,
/// symmetric powers of the frame, derivative spaces and their ambient forms.
/// Thread-safe.
template <ExactField F>
class ChartOperators {
 public:
  explicit ChartOperators(Chart<F> chart);

  const Chart<F>& chart() const noexcept { return chart_; }

  /// Framed D^gamma for all |gamma| = r.
  const DerivativeSpace<F>& framed_space(unsigned r);
  /// Ambient forms of framed_space(r), truncated at order n.
  const std::vector<HasseOperator<F>>& ambient_space(unsigned r, unsigned n);

 private:
  HasseOperator<F> convert(const HasseOperator<F>& framed, unsigned max_order);
  // For |omega| = m: the (delta, coefficient of z^omega in (A z)^delta) pairs.
  using Expansion =
      std::unordered_map<ExponentVector, std::vector<std::pair<ExponentVector, typename F::Element>>, ExponentHash>;

  const Polynomial<F>& symmetric_power(const ExponentVector& delta);
  const Expansion& expansion(unsigned m);

  Chart<F> chart_;
  std::mutex mutex_;
  std::map<unsigned, DerivativeSpace<F>> framed_;
  std::map<std::pair<unsigned, unsigned>, std::vector<HasseOperator<F>>> ambient_;
  std::unordered_map<ExponentVector, Polynomial<F>, ExponentHash> powers_;
  std::map<unsigned, Expansion> expansions_;
};

}  // namespace jointslab
