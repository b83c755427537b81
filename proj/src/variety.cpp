#include "jointslab/variety.hpp"

#include <algorithm>

namespace jointslab {

std::string variety_kind_name(VarietyKind kind) {
  switch (kind) {
    case VarietyKind::Flat: return "flat";
    case VarietyKind::Graph: return "graph";
    case VarietyKind::HypersurfaceInFlat: return "hypersurface";
    case VarietyKind::RawIdealSlice: return "raw";
  }
  return "?";
}

VarietyKind parse_variety_kind(const std::string& name) {
  if (name == "flat") return VarietyKind::Flat;
  if (name == "graph") return VarietyKind::Graph;
  if (name == "hypersurface") return VarietyKind::HypersurfaceInFlat;
  if (name == "raw") return VarietyKind::RawIdealSlice;
  throw Error(ErrorCode::InvalidVariety, "unknown variety kind '" + name + "'");
}

std::size_t hypersurface_in_flat_dimension(std::size_t k, unsigned e, unsigned n) {
  mpz_class full = binom_integer(n + k + 1, k + 1);
  if (n >= e) full -= binom_integer(n - e + k + 1, k + 1);
  return full.get_ui();
}

namespace {

template <ExactField F>
[[noreturn]] void invalid(const VarietySpec<F>& v, const std::string& what) {
  throw Error(ErrorCode::InvalidVariety, (v.id.empty() ? std::string("variety") : "variety " + v.id) + ": " + what);
}

/// Standard basis vectors completing the rows of `vectors` to a basis of F^d.
template <ExactField F>
Matrix<F> complement(const Matrix<F>& vectors, std::size_t d, const F& field) {
  EchelonBasis<F> basis(field, d);
  for (const auto& v : vectors) basis.insert(v);
  Matrix<F> out;
  for (std::size_t i = 0; i < d && !basis.full(); ++i) {
    Vec<F> e(d, field.zero());
    e[i] = field.one();
    if (basis.insert(e)) out.push_back(std::move(e));
  }
  return out;
}

/// The matrix whose columns are the given vectors.
template <ExactField F>
Matrix<F> from_columns(const Matrix<F>& columns, std::size_t d) {
  Matrix<F> m(d, Vec<F>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (std::size_t i = 0; i < d; ++i) m[i][j] = columns[j][i];
  return m;
}

/// Linear polynomials (row . (x - base)) in d variables.
template <ExactField F>
Polynomial<F> affine_form(const Vec<F>& row, const Vec<F>& base, const F& field) {
  const std::size_t d = row.size();
  Polynomial<F> p(field, d);
  auto c = field.zero();
  for (std::size_t i = 0; i < d; ++i) {
    p.add_term(ExponentVector::unit(d, i), row[i]);
    c = field.sub(c, field.mul(row[i], base[i]));
  }
  p.add_term(ExponentVector(d), c);
  return p;
}

/// Equations of the flat through `base` spanned by `directions`.
template <ExactField F>
std::vector<Polynomial<F>> flat_equations(const Vec<F>& base, const Matrix<F>& directions, const F& field) {
  const std::size_t d = base.size();
  std::vector<Polynomial<F>> eqs;
  Matrix<F> normals = directions.empty() ? identity_matrix(d, field) : nullspace(directions, d, field);
  for (const auto& n : normals) eqs.push_back(affine_form(n, base, field));
  return eqs;
}

/// Internal coordinates u with base + U u = p, or nullopt when p is off the flat.
template <ExactField F>
std::optional<Vec<F>> flat_coordinates(const Vec<F>& base, const Matrix<F>& directions, const Vec<F>& p,
                                       const F& field) {
  const std::size_t d = base.size();
  Matrix<F> u = from_columns<F>(directions, d);
  Vec<F> rhs(d);
  for (std::size_t i = 0; i < d; ++i) rhs[i] = field.sub(p[i], base[i]);
  return solve(u, rhs, directions.size(), field);
}

template <ExactField F>
void check_point(const VarietySpec<F>& v, const Vec<F>& p) {
  if (p.size() != v.ambient) throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension for " + v.id);
}

template <ExactField F>
AffineMap<F> graph_frame(const VarietySpec<F>& v, const F& field) {
  return v.frame ? *v.frame : AffineMap<F>::identity(field, v.ambient);
}

/// Polynomial images of every basis monomial under x_i -> images[i].
template <ExactField F>
std::vector<Polynomial<F>> basis_images(const std::vector<Polynomial<F>>& images, const MonomialBasis& basis,
                                        const F& field) {
  const std::size_t m = images.empty() ? 0 : images[0].nvars();
  std::vector<Polynomial<F>> out;
  out.reserve(basis.size());
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const auto& e = basis[idx];
    if (e.is_zero()) {
      out.push_back(Polynomial<F>::constant(field, m, field.one()));
      continue;
    }
    std::size_t i = 0;
    while (e[i] == 0) ++i;
    auto parent = basis.index_of(e - ExponentVector::unit(e.size(), i));
    out.push_back(out[static_cast<std::size_t>(parent)] * images[i]);
  }
  return out;
}

/// Rank of a family of polynomials as vectors of coefficients.
template <ExactField F>
std::size_t polynomial_rank(const std::vector<Polynomial<F>>& polys, const F& field) {
  std::map<ExponentVector, std::size_t, GradedLexLess> columns;
  for (const auto& p : polys)
    for (const auto& [e, c] : p.terms()) columns.emplace(e, 0);
  std::size_t j = 0;
  for (auto& [e, idx] : columns) idx = j++;
  EchelonBasis<F> basis(field, columns.size());
  for (const auto& p : polys) {
    Vec<F> row(columns.size(), field.zero());
    for (const auto& [e, c] : p.terms()) row[columns[e]] = c;
    basis.insert(row);
    if (basis.full()) break;
  }
  return basis.rank();
}

template <ExactField F>
typename F::Element origin_value(const HasseOperator<F>& op, const Polynomial<F>& g) {
  const auto& f = op.field();
  auto acc = f.zero();
  for (const auto& [w, c] : op.combo()) acc = f.add(acc, f.mul(c, g.coefficient(w)));
  return acc;
}

}  // namespace

template <ExactField F>
std::optional<Vec<F>> flat_parameters(const VarietySpec<F>& v, const Vec<F>& p, const F& field) {
  if (v.kind != VarietyKind::Flat) throw Error(ErrorCode::UnsupportedKind, "flat parameters need a flat");
  check_point(v, p);
  return flat_coordinates(v.point, v.directions, p, field);
}

template <ExactField F>
VarietySpec<F> make_flat(const F& field, Vec<F> point, Matrix<F> directions, std::string id) {
  VarietySpec<F> v;
  v.kind = VarietyKind::Flat;
  v.ambient = point.size();
  v.dim = directions.size();
  v.degree = 1;
  v.id = std::move(id);
  v.point = std::move(point);
  v.directions = std::move(directions);
  validate(v, field);
  return v;
}

template <ExactField F>
void validate(const VarietySpec<F>& v, const F& field) {
  const std::size_t d = v.ambient, k = v.dim;
  if (d == 0 || d > kMaxVars) invalid(v, "ambient dimension must be in 1..16");
  if (k > d) invalid(v, "dimension exceeds ambient dimension");
  if (v.degree == 0) invalid(v, "degree must be positive");
  switch (v.kind) {
    case VarietyKind::Flat: {
      if (v.point.size() != d) invalid(v, "base point has wrong dimension");
      if (v.directions.size() != k) invalid(v, "flat needs exactly dim direction vectors");
      for (const auto& dir : v.directions)
        if (dir.size() != d) invalid(v, "direction vector has wrong dimension");
      if (rank(v.directions, field) != k) invalid(v, "direction vectors are dependent");
      if (v.degree != 1) invalid(v, "flats have degree 1");
      break;
    }
    case VarietyKind::Graph: {
      if (v.frame && v.frame->dim() != d) invalid(v, "frame has wrong dimension");
      if (v.equations.size() != d - k) invalid(v, "graph needs ambient - dim functions");
      for (const auto& f : v.equations) {
        if (f.nvars() != k) invalid(v, "graph functions must be in the dim tangent variables");
        if (!f.is_zero() && f.min_degree() < 2) invalid(v, "graph functions need vanishing constant and linear parts");
      }
      break;
    }
    case VarietyKind::HypersurfaceInFlat: {
      if (k + 1 > d) invalid(v, "containing flat would exceed ambient dimension");
      if (v.point.size() != d) invalid(v, "base point has wrong dimension");
      if (v.directions.size() != k + 1) invalid(v, "hypersurface needs dim + 1 flat directions");
      for (const auto& dir : v.directions)
        if (dir.size() != d) invalid(v, "direction vector has wrong dimension");
      if (rank(v.directions, field) != k + 1) invalid(v, "flat directions are dependent");
      if (v.equations.size() != 1) invalid(v, "hypersurface needs exactly one equation");
      if (v.equations[0].nvars() != k + 1) invalid(v, "equation must be in the flat's dim + 1 coordinates");
      if (v.equations[0].degree() < 1) invalid(v, "equation must be nonconstant");
      if (static_cast<int>(v.degree) != v.equations[0].degree()) invalid(v, "degree must equal the equation's degree");
      break;
    }
    case VarietyKind::RawIdealSlice: {
      for (const auto& e : v.equations)
        if (e.nvars() != d) invalid(v, "slice polynomials must be in the ambient variables");
      for (const auto& e : v.equations)
        if (e.degree() > static_cast<int>(v.slice_degree)) invalid(v, "slice polynomial exceeds the slice degree");
      for (const auto& c : v.supplied_charts) {
        if (c.dim != k || c.ambient() != d || c.series.size() != d - k) invalid(v, "supplied chart has wrong shape");
        for (const auto& h : c.series)
          if (h.nvars() != k || (!h.is_zero() && h.min_degree() < 2))
            invalid(v, "supplied chart series must start in degree >= 2");
      }
      break;
    }
  }
}

template <ExactField F>
std::vector<Polynomial<F>> defining_equations(const VarietySpec<F>& v, const F& field) {
  const std::size_t d = v.ambient, k = v.dim;
  switch (v.kind) {
    case VarietyKind::Flat: return flat_equations(v.point, v.directions, field);
    case VarietyKind::Graph: {
      AffineMap<F> inv = graph_frame(v, field).inverse();
      auto y = inv.coordinate_images();  // y_i as affine polynomials in x
      std::vector<Polynomial<F>> tangent(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(k));
      std::vector<Polynomial<F>> eqs;
      for (std::size_t j = 0; j < d - k; ++j) eqs.push_back(y[k + j] - substitute<F>(v.equations[j], tangent));
      return eqs;
    }
    case VarietyKind::HypersurfaceInFlat: {
      auto eqs = flat_equations(v.point, v.directions, field);
      Matrix<F> cols = v.directions;
      for (auto& c : complement(v.directions, d, field)) cols.push_back(std::move(c));
      Matrix<F> left = inverse(from_columns<F>(cols, d), field);
      std::vector<Polynomial<F>> u;
      for (std::size_t i = 0; i <= k; ++i) u.push_back(affine_form(left[i], v.point, field));
      eqs.push_back(substitute<F>(v.equations[0], u));
      return eqs;
    }
    case VarietyKind::RawIdealSlice: return v.equations;
  }
  return {};
}

template <ExactField F>
bool contains_point(const VarietySpec<F>& v, const Vec<F>& p, const F& field) {
  check_point(v, p);
  for (const auto& e : defining_equations(v, field))
    if (!field.is_zero(e.evaluate(p))) return false;
  return true;
}

template <ExactField F>
Chart<F> make_chart(const VarietySpec<F>& v, const Vec<F>& p, unsigned truncation, const F& field) {
  check_point(v, p);
  const std::size_t d = v.ambient, k = v.dim;
  auto not_on = [&]() -> Error { return Error(ErrorCode::NotOnVariety, "point does not lie on " + v.id); };

  switch (v.kind) {
    case VarietyKind::Flat: {
      if (!flat_coordinates(v.point, v.directions, p, field)) throw not_on();
      Matrix<F> cols = v.directions;
      for (auto& c : complement(v.directions, d, field)) cols.push_back(std::move(c));
      std::vector<Polynomial<F>> series(d - k, Polynomial<F>(field, k));
      return Chart<F>{k, p, AffineMap<F>(field, from_columns<F>(cols, d), p), std::move(series), truncation};
    }
    case VarietyKind::Graph: {
      AffineMap<F> t = graph_frame(v, field);
      Vec<F> y0 = t.inverse().apply(p);
      Vec<F> t0(y0.begin(), y0.begin() + static_cast<std::ptrdiff_t>(k));
      // Frame B: tangent z_i -> y_i, normal z_{k+j} -> y_{k+j} + grad f_j . z_t.
      Matrix<F> b = identity_matrix(d, field);
      std::vector<Polynomial<F>> series;
      for (std::size_t j = 0; j < d - k; ++j) {
        const auto& f = v.equations[j];
        if (!field.equal(f.evaluate(t0), y0[k + j])) throw not_on();
        Polynomial<F> shifted = taylor_shift(f, t0);
        Polynomial<F> h(field, k);
        for (const auto& [e, c] : shifted.terms()) {
          unsigned deg = e.total_degree();
          if (deg == 1) {
            for (std::size_t i = 0; i < k; ++i)
              if (e[i]) b[k + j][i] = c;
          } else if (deg >= 2 && deg <= truncation) {
            h.add_term(e, c);
          }
        }
        series.push_back(std::move(h));
      }
      Matrix<F> ab(d, Vec<F>(d, field.zero()));
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t l = 0; l < d; ++l) ab[i][j] = field.add(ab[i][j], field.mul(t.matrix()[i][l], b[l][j]));
      return Chart<F>{k, p, AffineMap<F>(field, std::move(ab), p), std::move(series), truncation};
    }
    case VarietyKind::HypersurfaceInFlat: {
      auto u0 = flat_coordinates(v.point, v.directions, p, field);
      const auto& poly = v.equations[0];
      if (!u0 || !field.is_zero(poly.evaluate(*u0))) throw not_on();
      const std::size_t m = k + 1;
      Vec<F> grad(m);
      std::optional<std::size_t> normal;
      for (std::size_t i = 0; i < m; ++i) {
        grad[i] = hasse_apply(ExponentVector::unit(m, i), poly).evaluate(*u0);
        if (!field.is_zero(grad[i])) normal = i;
      }
      if (!normal) throw Error(ErrorCode::SingularPoint, "all partial derivatives vanish at the point on " + v.id);
      const std::size_t jn = *normal;
      // Internal frame u = u0 + M w: tangent columns e_i - (g_i/g_j) e_j, then e_j.
      Matrix<F> mcols;
      for (std::size_t i = 0; i < m; ++i) {
        if (i == jn) continue;
        Vec<F> col(m, field.zero());
        col[i] = field.one();
        col[jn] = field.neg(field.div(grad[i], grad[jn]));
        mcols.push_back(std::move(col));
      }
      Vec<F> ej(m, field.zero());
      ej[jn] = field.one();
      mcols.push_back(ej);
      AffineMap<F> internal(field, from_columns<F>(mcols, m), *u0);
      Polynomial<F> q = pullback(poly, internal);
      const auto a = q.coefficient(ExponentVector::unit(m, k));
      if (field.is_zero(a)) throw Error(ErrorCode::SingularPoint, "linear normal coefficient vanishes on " + v.id);
      const auto inv_a = field.inv(a);

      // Solve q(w_t, h(w_t)) = 0 degree by degree.
      std::vector<Polynomial<F>> images;
      for (std::size_t i = 0; i < k; ++i) images.push_back(Polynomial<F>::variable(field, k, i));
      images.push_back(Polynomial<F>(field, k));
      for (unsigned e = 2; e <= truncation; ++e) {
        Polynomial<F> residual = substitute<F>(q, images, e).homogeneous_part(e);
        images[k] += residual.scaled(field.neg(inv_a));
      }
      Polynomial<F> h = images[k];

      Matrix<F> cols;
      for (const auto& mc : mcols) {
        Vec<F> col(d, field.zero());
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t r = 0; r < d; ++r) col[r] = field.add(col[r], field.mul(v.directions[i][r], mc[i]));
        cols.push_back(std::move(col));
      }
      for (auto& c : complement(v.directions, d, field)) cols.push_back(std::move(c));
      std::vector<Polynomial<F>> series{h};
      for (std::size_t j = 1; j < d - k; ++j) series.emplace_back(field, k);
      return Chart<F>{k, p, AffineMap<F>(field, from_columns<F>(cols, d), p), std::move(series), truncation};
    }
    case VarietyKind::RawIdealSlice: {
      for (const auto& c : v.supplied_charts) {
        if (c.center != p) continue;
        if (c.truncation < truncation)
          throw Error(ErrorCode::TruncationTooLow, "supplied chart on " + v.id + " is truncated below the requested degree");
        return c;
      }
      throw Error(ErrorCode::UnsupportedKind, "charts on raw ideal slices must be supplied (" + v.id + ")");
    }
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown variety kind");
}

template <ExactField F>
Matrix<F> tangent_space(const Chart<F>& c) {
  Matrix<F> dirs;
  for (std::size_t j = 0; j < c.dim; ++j) dirs.push_back(c.frame.column(j));
  return dirs;
}

namespace {

/// prod_j h_j^{nu_j} truncated at degree `cap`.
template <ExactField F>
Polynomial<F> series_power(const Chart<F>& c, const ExponentVector& nu, unsigned cap, const F& field) {
  Polynomial<F> acc = Polynomial<F>::constant(field, c.dim, field.one());
  for (std::size_t j = 0; j < nu.size() && !acc.is_zero(); ++j)
    if (nu[j]) acc = acc.multiply(c.series[j].pow(nu[j], cap), cap);
  return acc;
}

template <ExactField F>
void add_gamma_terms(HasseOperator<F>& op, const ExponentVector& gamma, const ExponentVector& nu,
                     const Polynomial<F>& power, std::optional<unsigned> max_order) {
  for (const auto& [beta, coef] : power.terms()) {
    if (!gamma.dominates(beta)) continue;
    ExponentVector omega = (gamma - beta).concat(nu);
    if (max_order && omega.total_degree() > *max_order) continue;
    op.add(omega, coef);
  }
}

}  // namespace

template <ExactField F>
HasseOperator<F> derivative_operator(const Chart<F>& c, const ExponentVector& gamma, std::optional<unsigned> max_order) {
  const F& field = c.frame.field();
  if (gamma.size() != c.dim) throw Error(ErrorCode::DimensionMismatch, "gamma must have one entry per local coordinate");
  const unsigned r = gamma.total_degree();
  if (r > c.truncation)
    throw Error(ErrorCode::TruncationTooLow,
                "order " + std::to_string(r) + " exceeds chart truncation " + std::to_string(c.truncation));
  HasseOperator<F> op(field, c.ambient());
  const std::size_t nn = c.ambient() - c.dim;
  for (const auto& nu : exponents_in_degree_range(nn, 0, r / 2)) {
    Polynomial<F> power = series_power(c, nu, r, field);
    add_gamma_terms(op, gamma, nu, power, max_order);
  }
  return op;
}

template <ExactField F>
DerivativeSpace<F> derivative_space(const Chart<F>& c, unsigned r) {
  DerivativeSpace<F> s;
  s.order = r;
  s.gammas = exponents_in_degree_range(c.dim, r, r);
  for (const auto& g : s.gammas) s.operators.push_back(derivative_operator(c, g));
  return s;
}

template <ExactField F>
HasseOperator<F> to_ambient(const Chart<F>& c, const HasseOperator<F>& framed, unsigned max_order) {
  const F& field = c.frame.field();
  const std::size_t d = c.ambient();
  std::vector<Polynomial<F>> linear;
  for (std::size_t i = 0; i < d; ++i) {
    Polynomial<F> l(field, d);
    for (std::size_t j = 0; j < d; ++j) l.add_term(ExponentVector::unit(d, j), c.frame.matrix()[i][j]);
    linear.push_back(std::move(l));
  }
  MonomialBasis basis(d, std::min(max_order, framed.order()));
  auto powers = basis_images(linear, basis, field);
  HasseOperator<F> out(field, d);
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    auto acc = field.zero();
    for (const auto& [w, a] : powers[idx].terms()) {
      auto cw = framed.coefficient(w);
      if (!field.is_zero(cw)) acc = field.add(acc, field.mul(a, cw));
    }
    out.add(basis[idx], acc);
  }
  return out;
}

template <ExactField F>
WellDefinedReport well_defined_check(const VarietySpec<F>& v, const Chart<F>& c, const HasseOperator<F>& framed,
                                     std::size_t trials, std::mt19937_64& rng, const F& field) {
  WellDefinedReport report;
  const std::size_t d = v.ambient;
  std::vector<Polynomial<F>> eqs;
  for (const auto& e : defining_equations(v, field)) eqs.push_back(pullback(e, c.frame));
  auto terms = exponents_in_degree_range(d, 0, 3);
  for (std::size_t t = 0; t <= trials; ++t) {
    Polynomial<F> q = Polynomial<F>::constant(field, d, field.one());
    if (t > 0) {
      q = Polynomial<F>(field, d);
      for (int i = 0; i < 4; ++i) q.add_term(terms[uniform_below(rng, terms.size())], field.random(rng));
    }
    for (const auto& e : eqs) {
      ++report.checks;
      if (!field.is_zero(origin_value(framed, e * q))) {
        report.pass = false;
        report.counterexample = "(" + to_string(e) + ") * (" + to_string(q) + ")";
        return report;
      }
    }
  }
  return report;
}

template <ExactField F>
std::size_t dim_regular_functions(const VarietySpec<F>& v, unsigned n, const F& field) {
  const std::size_t d = v.ambient, k = v.dim;
  switch (v.kind) {
    case VarietyKind::Flat: return monomial_count(k, n);
    case VarietyKind::HypersurfaceInFlat: return hypersurface_in_flat_dimension(k, v.degree, n);
    case VarietyKind::Graph: {
      // x = frame(y_t, f(y_t)) as polynomials in the k tangent variables.
      AffineMap<F> t = graph_frame(v, field);
      std::vector<Polynomial<F>> y;
      for (std::size_t i = 0; i < k; ++i) y.push_back(Polynomial<F>::variable(field, k, i));
      for (const auto& f : v.equations) y.push_back(f);
      std::vector<Polynomial<F>> x;
      for (std::size_t i = 0; i < d; ++i) {
        Polynomial<F> xi = Polynomial<F>::constant(field, k, t.translation()[i]);
        for (std::size_t j = 0; j < d; ++j) xi += y[j].scaled(t.matrix()[i][j]);
        x.push_back(std::move(xi));
      }
      return polynomial_rank(basis_images(x, MonomialBasis(d, n), field), field);
    }
    case VarietyKind::RawIdealSlice: {
      if (n > v.slice_degree)
        throw Error(ErrorCode::InvalidArgument, "raw slice of " + v.id + " only covers degree " +
                                                    std::to_string(v.slice_degree));
      // dim(span(slice) restricted to degree <= n) = rank - rank of the part above degree n.
      std::vector<Polynomial<F>> high;
      for (const auto& e : v.equations) {
        Polynomial<F> h(field, d);
        for (const auto& [ex, c] : e.terms())
          if (ex.total_degree() > n) h.add_term(ex, c);
        high.push_back(std::move(h));
      }
      std::size_t in_degree = polynomial_rank(v.equations, field) - polynomial_rank(high, field);
      return monomial_count(d, n) - in_degree;
    }
  }
  throw Error(ErrorCode::UnsupportedKind, "unknown variety kind");
}

template <ExactField F>
ChartOperators<F>::ChartOperators(Chart<F> chart) : chart_(std::move(chart)) {}

template <ExactField F>
const Polynomial<F>& ChartOperators<F>::symmetric_power(const ExponentVector& delta) {
  auto it = powers_.find(delta);
  if (it != powers_.end()) return it->second;
  const F& field = chart_.frame.field();
  const std::size_t d = chart_.ambient();
  Polynomial<F> value(field, d);
  if (delta.is_zero()) {
    value = Polynomial<F>::constant(field, d, field.one());
  } else {
    std::size_t i = 0;
    while (delta[i] == 0) ++i;
    Polynomial<F> l(field, d);
    for (std::size_t j = 0; j < d; ++j) l.add_term(ExponentVector::unit(d, j), chart_.frame.matrix()[i][j]);
    value = symmetric_power(delta - ExponentVector::unit(d, i)) * l;
  }
  return powers_.emplace(delta, std::move(value)).first->second;
}

template <ExactField F>
const typename ChartOperators<F>::Expansion& ChartOperators<F>::expansion(unsigned m) {
  auto it = expansions_.find(m);
  if (it != expansions_.end()) return it->second;
  Expansion e;
  for (const auto& delta : exponents_in_degree_range(chart_.ambient(), m, m))
    for (const auto& [w, a] : symmetric_power(delta).terms()) e[w].emplace_back(delta, a);
  return expansions_.emplace(m, std::move(e)).first->second;
}

template <ExactField F>
HasseOperator<F> ChartOperators<F>::convert(const HasseOperator<F>& framed, unsigned max_order) {
  const F& field = chart_.frame.field();
  HasseOperator<F> out(field, chart_.ambient());
  for (const auto& [w, c] : framed.combo()) {
    if (w.total_degree() > max_order) continue;
    const auto& e = expansion(w.total_degree());
    auto it = e.find(w);
    if (it == e.end()) continue;
    for (const auto& [delta, a] : it->second) out.add(delta, field.mul(a, c));
  }
  return out;
}

template <ExactField F>
const DerivativeSpace<F>& ChartOperators<F>::framed_space(unsigned r) {
  std::lock_guard lock(mutex_);
  auto it = framed_.find(r);
  if (it == framed_.end()) it = framed_.emplace(r, derivative_space(chart_, r)).first;
  return it->second;
}

template <ExactField F>
const std::vector<HasseOperator<F>>& ChartOperators<F>::ambient_space(unsigned r, unsigned n) {
  const DerivativeSpace<F>& framed = framed_space(r);
  std::lock_guard lock(mutex_);
  auto key = std::make_pair(r, n);
  auto it = ambient_.find(key);
  if (it != ambient_.end()) return it->second;
  std::vector<HasseOperator<F>> ops;
  ops.reserve(framed.operators.size());
  for (const auto& op : framed.operators) ops.push_back(convert(op, n));
  return ambient_.emplace(key, std::move(ops)).first->second;
}

#define JOINTSLAB_INSTANTIATE(F)                                                                                   \
  template void validate<F>(const VarietySpec<F>&, const F&);                                                      \
  template std::vector<Polynomial<F>> defining_equations<F>(const VarietySpec<F>&, const F&);                      \
  template bool contains_point<F>(const VarietySpec<F>&, const Vec<F>&, const F&);                                 \
  template std::optional<Vec<F>> flat_parameters<F>(const VarietySpec<F>&, const Vec<F>&, const F&);             \
  template VarietySpec<F> make_flat<F>(const F&, Vec<F>, Matrix<F>, std::string);                                  \
  template Chart<F> make_chart<F>(const VarietySpec<F>&, const Vec<F>&, unsigned, const F&);                       \
  template Matrix<F> tangent_space<F>(const Chart<F>&);                                                            \
  template HasseOperator<F> derivative_operator<F>(const Chart<F>&, const ExponentVector&, std::optional<unsigned>); \
  template DerivativeSpace<F> derivative_space<F>(const Chart<F>&, unsigned);                                      \
  template HasseOperator<F> to_ambient<F>(const Chart<F>&, const HasseOperator<F>&, unsigned);                     \
  template WellDefinedReport well_defined_check<F>(const VarietySpec<F>&, const Chart<F>&, const HasseOperator<F>&, \
                                                   std::size_t, std::mt19937_64&, const F&);                       \
  template std::size_t dim_regular_functions<F>(const VarietySpec<F>&, unsigned, const F&);                        \
  template class ChartOperators<F>;

JOINTSLAB_INSTANTIATE(PrimeField)
JOINTSLAB_INSTANTIATE(RationalField)

}  // namespace jointslab
