#include "jointslab/verification.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>

#include "jointslab/parallel.hpp"

namespace jointslab {

namespace {

std::size_t saturating_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) return std::numeric_limits<std::size_t>::max();
  return a * b;
}

mpq_class factorial(unsigned long n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return mpq_class(f);
}

mpq_class pow_q(const mpq_class& x, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), x.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), x.get_den_mpz_t(), e);
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

template <ExactField F>
RankCheck vanishing_rank_check(LedgerContext<F>& ctx, const BasisLedger<F>& ledger, const RankOptions& options) {
  const auto& cfg = ctx.config();
  const F& field = ctx.field();
  const std::size_t nj = cfg.joints.size();
  RankCheck out;
  out.expected = ctx.basis().size();
  for (std::size_t p = 0; p < nj; ++p) {
    if (options.drop_joint == p) continue;
    std::size_t prod = 1;
    for (auto v : cfg.designated(p)) prod = saturating_mul(prod, ledger.at(v).total(p));
    out.rows = std::min(out.rows + prod, std::numeric_limits<std::size_t>::max() - 1);
  }
  if (out.expected > options.max_width || out.rows > options.max_rows) {
    out.skipped = "size";
    return out;
  }

  const unsigned n = ctx.n();
  BinomialTable<F> binom(field, n);
  std::vector<EchelonBasis<F>> local;
  local.reserve(nj);
  for (std::size_t p = 0; p < nj; ++p) local.emplace_back(field, out.expected);

  parallel_for(nj, [&](std::size_t p) {
    if (options.drop_joint == p) return;
    std::vector<std::vector<const HasseOperator<F>*>> lists;
    for (auto v : cfg.designated(p)) {
      lists.push_back(selected_operators(ctx, ledger.at(v), p));
      if (lists.back().empty()) return;
    }
    auto& eb = local[p];
    // Depth-first over one operator per variety, composing prefixes once.
    std::vector<HasseOperator<F>> prefix(lists.size() + 1, HasseOperator<F>::identity(field, cfg.ambient));
    auto recurse = [&](auto&& self, std::size_t depth) -> void {
      if (eb.full()) return;
      if (depth == lists.size()) {
        eb.insert(operator_row(prefix[depth], cfg.joints[p], ctx.basis(), binom));
        return;
      }
      for (const auto* op : lists[depth]) {
        prefix[depth + 1] = prefix[depth].compose(*op, n);
        self(self, depth + 1);
      }
    };
    recurse(recurse, 0);
  });

  EchelonBasis<F> global(field, out.expected);
  for (std::size_t p = 0; p < nj && !global.full(); ++p)
    for (const auto& row : local[p].rows()) global.insert(row);
  out.rank = global.rank();
  out.pass = out.rank == out.expected;
  return out;
}

template <ExactField F>
CountCheck parameter_count_check(const LedgerContext<F>& ctx, const BasisLedger<F>& ledger) {
  const auto& cfg = ctx.config();
  CountCheck out;
  out.lhs = 0;
  for (std::size_t p = 0; p < cfg.joints.size(); ++p) {
    mpz_class prod = 1;
    for (auto v : cfg.designated(p)) prod *= static_cast<unsigned long>(ledger.at(v).total(p));
    out.lhs += prod;
  }
  out.rhs = binom_integer(ctx.n() + cfg.ambient, cfg.ambient);
  out.pass = out.lhs >= out.rhs;
  return out;
}

template <ExactField F>
Witness<F> hasse_vanishing_witness(const Vec<F>& p, const std::vector<Chart<F>>& charts, const Polynomial<F>& g) {
  if (g.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "the witness needs a nonzero polynomial");
  const F& field = g.field();
  const std::size_t d = p.size();
  if (g.nvars() != d) throw Error(ErrorCode::DimensionMismatch, "polynomial and point dimensions differ");
  Matrix<F> stacked;
  std::size_t total = 0;
  for (const auto& c : charts) {
    if (c.ambient() != d || c.center != p) throw Error(ErrorCode::NotAJoint, "every chart must be centered at the joint");
    total += c.dim;
    for (auto& row : tangent_space(c)) stacked.push_back(std::move(row));
  }
  if (total != d || rank(stacked, field) != d)
    throw Error(ErrorCode::NotAJoint, "tangent spaces do not split the ambient space");

  const unsigned deg = static_cast<unsigned>(g.degree());
  for (const auto& c : charts)
    if (c.truncation < deg)
      throw Error(ErrorCode::TruncationTooLow, "charts must be truncated at least at deg g");

  const Polynomial<F> framed = pullback(g, AffineMap<F>(field, transpose<F>(stacked, d), p));
  const ExponentVector gamma = framed.terms().begin()->first;

  Witness<F> w;
  w.order = gamma.total_degree();
  HasseOperator<F> product = HasseOperator<F>::identity(field, d);
  std::size_t offset = 0;
  for (const auto& chart : charts) {
    ExponentVector gi = gamma.slice(offset, chart.dim);
    offset += chart.dim;
    w.orders.push_back(gi.total_degree());
    w.gammas.push_back(gi);
    w.framed.push_back(derivative_operator(chart, gi));
    w.ambient.push_back(to_ambient(chart, w.framed.back(), deg));
    product = product.compose(w.ambient.back(), deg);
  }
  w.value = product.evaluate(g, p);
  unsigned sum = 0;
  for (auto r : w.orders) sum += r;
  w.pass = !field.is_zero(w.value) && sum == w.order && vanishing_order(g, std::span<const typename F::Element>(p)) == w.order;
  return w;
}

template <ExactField F>
std::vector<Chart<F>> joint_charts(const JointsConfiguration<F>& cfg, std::size_t p, unsigned truncation) {
  if (p >= cfg.joints.size()) throw Error(ErrorCode::UnknownJoint, "joint " + std::to_string(p) + " does not exist");
  std::vector<Chart<F>> out;
  for (auto v : cfg.designated(p)) out.push_back(make_chart(cfg.varieties[v], cfg.joints[p], truncation, cfg.field));
  return out;
}

template <ExactField F>
Polynomial<F> random_polynomial_at(const F& field, const Vec<F>& p, unsigned order, unsigned degree,
                                   std::mt19937_64& rng) {
  const std::size_t d = p.size();
  order = std::min(order, degree);
  Polynomial<F> g = Polynomial<F>::constant(field, d, field.one());
  for (unsigned i = 0; i < order; ++i) {
    Polynomial<F> lin(field, d);
    for (std::size_t j = 0; j < d; ++j) {
      const auto a = field.random(rng);
      lin += Polynomial<F>::variable(field, d, j).scaled(a);
      lin.add_term(ExponentVector(d), field.neg(field.mul(a, p[j])));
    }
    if (lin.is_zero()) lin = Polynomial<F>::variable(field, d, 0) - Polynomial<F>::constant(field, d, p[0]);
    g = g * lin;
  }
  Polynomial<F> q(field, d);
  auto exps = exponents_in_degree_range(d, 0, degree - order);
  for (std::size_t i = 0; i < 4; ++i) q.add_term(exps[uniform_below(rng, exps.size())], field.random(rng));
  if (q.is_zero()) q = Polynomial<F>::constant(field, d, field.one());
  return g * q;
}

template <ExactField F>
SchwartzZippelCheck schwartz_zippel_mult(const Polynomial<F>& g, const std::vector<typename F::Element>& A) {
  if (g.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "Schwartz-Zippel needs a nonzero polynomial");
  const std::size_t d = g.nvars();
  SchwartzZippelCheck out;
  out.lhs = 0;
  mpz_ui_pow_ui(out.rhs.get_mpz_t(), A.size(), d == 0 ? 0 : d - 1);
  out.rhs *= static_cast<unsigned long>(g.degree());
  if (A.empty() || d == 0) {
    out.pass = out.lhs <= out.rhs;
    return out;
  }
  std::vector<std::size_t> idx(d, 0);
  Vec<F> point(d, A[0]);
  for (;;) {
    out.lhs += *vanishing_order(g, std::span<const typename F::Element>(point));
    std::size_t i = 0;
    while (i < d && ++idx[i] == A.size()) {
      idx[i] = 0;
      point[i] = A[0];
      ++i;
    }
    if (i == d) break;
    point[i] = A[idx[i]];
  }
  out.pass = out.lhs <= out.rhs;
  return out;
}

template <ExactField F>
BoundReport bound_report(const JointsConfiguration<F>& cfg) {
  BoundReport r;
  r.joint_count = cfg.joints.size();
  r.s = cfg.s();
  r.degree_product = 1;
  mpq_class denom_a = 1, denom_b = 1;
  for (const auto& fam : cfg.families) {
    mpz_class deg = 0;
    for (const auto& v : fam.members) deg += v.degree;
    r.family_degrees.push_back(deg);
    mpz_class dp;
    mpz_pow_ui(dp.get_mpz_t(), deg.get_mpz_t(), fam.m);
    r.degree_product *= dp;
    const mpq_class kf = pow_q(factorial(fam.k), fam.m);
    denom_a *= kf * pow_q(mpq_class(static_cast<unsigned long>(fam.m)), fam.m);
    denom_b *= kf * factorial(fam.m);
  }
  r.constant_a_power = factorial(cfg.ambient) / denom_a;
  r.constant_b_power = factorial(cfg.ambient) / denom_b;
  if (r.s <= 1) {
    r.applicable = false;
    return r;
  }
  const unsigned e = static_cast<unsigned>(r.s - 1);
  r.constant_a = RootValue{1, r.constant_a_power, e};
  r.constant_b = RootValue{1, r.constant_b_power, e};
  const mpq_class rhs_a_power = r.constant_a_power * r.degree_product;
  const mpq_class rhs_b_power = r.constant_b_power * r.degree_product;
  r.rhs_a = RootValue{1, rhs_a_power, e};
  r.rhs_b = RootValue{1, rhs_b_power, e};

  r.pass_a = pow_q(mpq_class(static_cast<unsigned long>(r.joint_count)), e) <= rhs_a_power;

  auto bracket = [&](unsigned bits) {
    mpq_class lo = 0, hi = 0;
    for (std::size_t p = 0; p < cfg.joints.size(); ++p) {
      auto [l, h] = RootValue{1, mpq_class(static_cast<unsigned long>(cfg.multiplicity(p))), e}.bounds(bits);
      lo += l;
      hi += h;
    }
    return std::pair{lo, hi};
  };
  mpz_class exact = 0;
  r.multiplicity_exact = true;
  for (std::size_t p = 0; p < cfg.joints.size() && r.multiplicity_exact; ++p) {
    mpz_class root;
    mpz_class m(static_cast<unsigned long>(cfg.multiplicity(p)));
    if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), e) == 0) r.multiplicity_exact = false;
    exact += root;
  }
  if (r.multiplicity_exact) {
    r.multiplicity_lo = r.multiplicity_hi = mpq_class(exact);
    r.pass_b = pow_q(mpq_class(exact), e) <= rhs_b_power;
    return r;
  }
  std::tie(r.multiplicity_lo, r.multiplicity_hi) = bracket(r.bracket_bits);
  r.decided_b = false;
  for (unsigned bits = r.bracket_bits; bits <= 4096; bits *= 2) {
    auto [lo, hi] = bracket(bits);
    if (pow_q(hi, e) <= rhs_b_power) {
      r.pass_b = true;
      r.decided_b = true;
      break;
    }
    if (pow_q(lo, e) > rhs_b_power) {
      r.pass_b = false;
      r.decided_b = true;
      break;
    }
  }
  if (!r.decided_b) r.pass_b = false;
  return r;
}

std::string decimal(const mpq_class& x) {
  mpf_class f(x, 256);
  char buf[64];
  gmp_snprintf(buf, sizeof buf, "%.12Fg", f.get_mpf_t());
  return buf;
}

std::string decimal(const RootValue& x) {
  if (x.root == 1) return decimal(mpq_class(x.scale * x.radicand));
  return decimal(x.bounds(64).first);
}

#define JOINTSLAB_INSTANTIATE(F)                                                                                 \
  template RankCheck vanishing_rank_check<F>(LedgerContext<F>&, const BasisLedger<F>&, const RankOptions&);     \
  template CountCheck parameter_count_check<F>(const LedgerContext<F>&, const BasisLedger<F>&);                 \
  template Witness<F> hasse_vanishing_witness<F>(const Vec<F>&, const std::vector<Chart<F>>&, const Polynomial<F>&); \
  template std::vector<Chart<F>> joint_charts<F>(const JointsConfiguration<F>&, std::size_t, unsigned);         \
  template SchwartzZippelCheck schwartz_zippel_mult<F>(const Polynomial<F>&, const std::vector<typename F::Element>&); \
  template Polynomial<F> random_polynomial_at<F>(const F&, const Vec<F>&, unsigned, unsigned, std::mt19937_64&); \
  template BoundReport bound_report<F>(const JointsConfiguration<F>&);

JOINTSLAB_INSTANTIATE(PrimeField)
JOINTSLAB_INSTANTIATE(RationalField)

}  // namespace jointslab
