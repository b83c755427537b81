#include "jointslab/vanishing_basis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "jointslab/parallel.hpp"

namespace jointslab {

Handicap Handicap::zero(std::size_t joints) { return from_alpha(std::vector<std::int64_t>(joints, 0)); }

Handicap Handicap::from_alpha(std::vector<std::int64_t> alpha) {
  Handicap h;
  h.position.resize(alpha.size());
  std::iota(h.position.begin(), h.position.end(), 0);
  h.alpha = std::move(alpha);
  return h;
}

namespace {

void check_joint(const Handicap& h, std::size_t p) {
  if (p >= h.alpha.size() || p >= h.position.size())
    throw Error(ErrorCode::UnknownJoint, "joint " + std::to_string(p) + " has no handicap");
}

}  // namespace

bool priority_less(const PriorityKey& a, const PriorityKey& b, const Handicap& h) {
  check_joint(h, a.joint);
  check_joint(h, b.joint);
  const std::int64_t ka = static_cast<std::int64_t>(a.r) - h.alpha[a.joint];
  const std::int64_t kb = static_cast<std::int64_t>(b.r) - h.alpha[b.joint];
  if (ka != kb) return ka < kb;
  if (a.joint == b.joint) return false;
  return h.precedes(a.joint, b.joint);
}

std::map<std::size_t, unsigned> v_vector(std::size_t p, unsigned r, const Handicap& h,
                                         const std::vector<std::size_t>& on_variety) {
  check_joint(h, p);
  if (std::find(on_variety.begin(), on_variety.end(), p) == on_variety.end())
    throw Error(ErrorCode::UnknownJoint, "joint " + std::to_string(p) + " is not among the variety's joints");
  std::map<std::size_t, unsigned> v;
  for (auto q : on_variety) {
    check_joint(h, q);
    if (q == p) {
      v[q] = r;
      continue;
    }
    std::int64_t value = static_cast<std::int64_t>(r) - h.alpha[p] + h.alpha[q];
    if (h.precedes(q, p)) value += 1;
    v[q] = static_cast<unsigned>(std::max<std::int64_t>(value, 0));
  }
  return v;
}

template <ExactField F>
Vec<F> operator_row(const HasseOperator<F>& ambient, const Vec<F>& p, const MonomialBasis& basis,
                    const BinomialTable<F>& binom) {
  const F& field = ambient.field();
  const std::size_t d = p.size();
  const unsigned n = basis.max_degree();
  Vec<F> row(basis.size(), field.zero());
  const bool at_origin = std::all_of(p.begin(), p.end(), [&](const auto& x) { return field.is_zero(x); });
  std::vector<std::vector<typename F::Element>> powers(d);
  if (!at_origin)
    for (std::size_t i = 0; i < d; ++i) {
      powers[i].assign(n + 1, field.one());
      for (unsigned e = 1; e <= n; ++e) powers[i][e] = field.mul(powers[i][e - 1], p[i]);
    }
  for (const auto& [delta, c] : ambient.combo()) {
    const unsigned deg = delta.total_degree();
    if (deg > n) continue;
    if (at_origin) {
      auto idx = basis.index_of(delta);
      row[idx] = field.add(row[idx], c);
      continue;
    }
    // Monomials x^m with m >= delta: (E x^m)(p) gains c * C(m, delta) p^(m - delta).
    const std::size_t tail = basis.prefix_size(n - deg);
    for (std::size_t j = 0; j < tail; ++j) {
      const ExponentVector& mu = basis[j];
      auto term = c;
      for (std::size_t i = 0; i < d && !field.is_zero(term); ++i)
        if (mu[i]) term = field.mul(term, powers[i][mu[i]]);
      if (field.is_zero(term)) continue;
      ExponentVector m = delta + mu;
      term = field.mul(term, multi_binom(m, delta, binom, field));
      auto idx = basis.index_of(m);
      row[idx] = field.add(row[idx], term);
    }
  }
  return row;
}

template <ExactField F>
std::vector<FunctionalRow<F>> functional_rows(const Chart<F>& c, unsigned r, unsigned n) {
  const F& field = c.frame.field();
  if (r > c.truncation)
    throw Error(ErrorCode::TruncationTooLow, "order " + std::to_string(r) + " exceeds chart truncation " +
                                                 std::to_string(c.truncation));
  MonomialBasis basis(c.ambient(), n);
  BinomialTable<F> binom(field, n);
  auto space = derivative_space(c, r);
  std::vector<FunctionalRow<F>> out;
  for (std::size_t i = 0; i < space.operators.size(); ++i) {
    FunctionalRow<F> row;
    row.coeffs = operator_row(to_ambient(c, space.operators[i], n), c.center, basis, binom);
    row.r = r;
    row.gamma = space.gammas[i];
    out.push_back(std::move(row));
  }
  return out;
}

template <ExactField F>
LedgerContext<F>::LedgerContext(std::shared_ptr<const JointsConfiguration<F>> cfg, unsigned n)
    : cfg_(std::move(cfg)), n_(n), basis_(cfg_->ambient, n), binom_(cfg_->field, n) {
  const std::size_t nv = cfg_->varieties.size();
  joints_on_.resize(nv);
  dims_.assign(nv, 0);
  for (std::size_t p = 0; p < cfg_->joints.size(); ++p)
    for (auto v : cfg_->varieties_at(p)) joints_on_[v].push_back(p);
  for (const auto& v : cfg_->varieties)
    if (v.kind == VarietyKind::Flat && !flat_bases_.count(v.dim)) flat_bases_.emplace(v.dim, MonomialBasis(v.dim, n));
  parallel_for(nv, [&](std::size_t v) {
    if (!joints_on_[v].empty()) dims_[v] = dim_regular_functions(cfg_->varieties[v], n_, cfg_->field);
  });
}

template <ExactField F>
unsigned LedgerContext<F>::order_cap(std::size_t v) const {
  return n_ * std::max(1u, cfg_->varieties.at(v).degree);
}

template <ExactField F>
std::size_t LedgerContext<F>::row_width(std::size_t v) const {
  const auto& variety = cfg_->varieties.at(v);
  return variety.kind == VarietyKind::Flat ? flat_basis(variety.dim).size() : basis_.size();
}

template <ExactField F>
typename LedgerContext<F>::Site& LedgerContext<F>::site(std::size_t v, std::size_t p) {
  const auto& on = joints_on_.at(v);
  if (!std::binary_search(on.begin(), on.end(), p))
    throw Error(ErrorCode::ChartMissing, "joint " + std::to_string(p) + " is not incident to variety " +
                                             std::to_string(v));
  std::lock_guard lock(sites_mutex_);
  auto& slot = sites_[{v, p}];
  if (!slot) slot = std::make_unique<Site>();
  return *slot;
}

template <ExactField F>
ChartOperators<F>& LedgerContext<F>::chart_ops(std::size_t v, std::size_t p, Site& s) {
  if (!s.ops) {
    const unsigned truncation = std::max(order_cap(v), n_);
    s.ops = std::make_unique<ChartOperators<F>>(make_chart(cfg_->varieties[v], cfg_->joints[p], truncation, cfg_->field));
  }
  return *s.ops;
}

template <ExactField F>
const typename LedgerContext<F>::OrderBlock& LedgerContext<F>::block(std::size_t v, std::size_t p, unsigned r) {
  Site& s = site(v, p);
  std::lock_guard lock(s.mutex);
  auto it = s.blocks.find(r);
  if (it != s.blocks.end()) return it->second;
  const auto& variety = cfg_->varieties[v];
  const F& field = cfg_->field;
  OrderBlock b;
  b.gammas = exponents_in_degree_range(variety.dim, r, r);
  if (variety.kind == VarietyKind::Flat) {
    // In flat coordinates D^gamma is Hasse^gamma at the joint's parameters.
    const auto& fb = flat_basis(variety.dim);
    if (!s.flat_t) s.flat_t = flat_parameters(variety, cfg_->joints[p], field);
    for (const auto& g : b.gammas)
      b.rows.push_back(r > n_ ? Vec<F>(fb.size(), field.zero())
                              : operator_row(HasseOperator<F>::single(field, g), *s.flat_t, fb, binom_));
  } else {
    for (const auto& op : chart_ops(v, p, s).ambient_space(r, n_))
      b.rows.push_back(operator_row(op, cfg_->joints[p], basis_, binom_));
  }
  return s.blocks.emplace(r, std::move(b)).first->second;
}

template <ExactField F>
const std::vector<HasseOperator<F>>& LedgerContext<F>::operators(std::size_t v, std::size_t p, unsigned r) {
  Site& s = site(v, p);
  std::lock_guard lock(s.mutex);
  return chart_ops(v, p, s).ambient_space(r, n_);
}

template <ExactField F>
std::size_t VarietyLedger<F>::total(std::size_t p) const {
  auto it = totals.find(p);
  return it == totals.end() ? 0 : it->second;
}

template <ExactField F>
std::size_t VarietyLedger<F>::count(std::size_t p, unsigned r) const {
  for (const auto& s : steps)
    if (s.joint == p && s.r == r) return s.selected.size();
  return 0;
}

namespace {

// Steps (p, r) of the joints in `on`, r in [0, cap], in priority order.
std::vector<PriorityKey> priority_sequence(const std::vector<std::size_t>& on, const Handicap& h, unsigned cap) {
  std::vector<PriorityKey> keys;
  for (auto p : on)
    for (unsigned r = 0; r <= cap; ++r) keys.push_back({p, r});
  std::sort(keys.begin(), keys.end(), [&](const PriorityKey& a, const PriorityKey& b) { return priority_less(a, b, h); });
  return keys;
}

}  // namespace

template <ExactField F>
VarietyLedger<F> build_ledger(LedgerContext<F>& ctx, std::size_t v, const Handicap& h) {
  VarietyLedger<F> ledger;
  ledger.variety = v;
  ledger.n = ctx.n();
  ledger.joints = ctx.joints_on(v);
  ledger.dim = ctx.dim(v);
  for (auto p : ledger.joints) {
    check_joint(h, p);
    ledger.totals[p] = 0;
  }
  if (ledger.joints.empty()) return ledger;
  EchelonBasis<F> eb(ctx.field(), ctx.row_width(v));
  for (const auto& key : priority_sequence(ledger.joints, h, ctx.order_cap(v))) {
    if (eb.rank() >= ledger.dim) break;
    const auto& block = ctx.block(v, key.joint, key.r);
    LedgerStep step{key.joint, key.r, {}};
    for (std::size_t i = 0; i < block.rows.size() && eb.rank() < ledger.dim; ++i)
      if (eb.insert(block.rows[i])) step.selected.push_back(i);
    if (!step.selected.empty()) {
      ledger.totals[key.joint] += step.selected.size();
      ledger.steps.push_back(std::move(step));
    }
  }
  ledger.rank = eb.rank();
  ledger.cap_hit = ledger.rank < ledger.dim;
  return ledger;
}

template <ExactField F>
const VarietyLedger<F>& BasisLedger<F>::at(std::size_t v) const {
  if (v >= per_variety.size() || !per_variety[v])
    throw Error(ErrorCode::LedgerMissing, "no ledger for variety " + std::to_string(v));
  return *per_variety[v];
}

template <ExactField F>
bool BasisLedger<F>::cap_hit() const {
  for (const auto& l : per_variety)
    if (l && l->cap_hit) return true;
  return false;
}

template <ExactField F>
BasisLedger<F> build_ledgers(LedgerContext<F>& ctx, const Handicap& h) {
  const std::size_t nv = ctx.config().varieties.size();
  BasisLedger<F> out;
  out.per_variety.resize(nv);
  parallel_for(nv, [&](std::size_t v) {
    if (!ctx.joints_on(v).empty()) out.per_variety[v] = build_ledger(ctx, v, h);
  });
  return out;
}

template <ExactField F>
std::vector<const HasseOperator<F>*> selected_operators(LedgerContext<F>& ctx, const VarietyLedger<F>& ledger,
                                                        std::size_t p) {
  std::vector<const HasseOperator<F>*> out;
  for (const auto& s : ledger.steps) {
    if (s.joint != p) continue;
    const auto& ops = ctx.operators(ledger.variety, p, s.r);
    for (auto i : s.selected) out.push_back(&ops[i]);
  }
  return out;
}

template <ExactField F>
std::size_t T_dimension(LedgerContext<F>& ctx, std::size_t v, const std::map<std::size_t, unsigned>& orders) {
  const auto& on = ctx.joints_on(v);
  const std::size_t dim = ctx.dim(v);
  EchelonBasis<F> eb(ctx.field(), ctx.row_width(v));
  const unsigned cap = ctx.order_cap(v);
  for (const auto& [p, order] : orders) {
    if (!std::binary_search(on.begin(), on.end(), p))
      throw Error(ErrorCode::ChartMissing, "joint " + std::to_string(p) + " is not on the variety");
    for (unsigned r = 0; r < order && r <= cap && eb.rank() < dim; ++r)
      for (const auto& row : ctx.block(v, p, r).rows) {
        eb.insert(row);
        if (eb.rank() == dim) break;
      }
  }
  return dim - eb.rank();
}

template <ExactField F>
std::size_t b_p(LedgerContext<F>& ctx, std::size_t v, std::map<std::size_t, unsigned> orders, std::size_t p) {
  const std::size_t before = T_dimension(ctx, v, orders);
  orders[p] += 1;
  return before - T_dimension(ctx, v, orders);
}

template <ExactField F>
std::shared_ptr<const JointsConfiguration<F>> single_variety_config(const VarietySpec<F>& v,
                                                                    const std::vector<Vec<F>>& points,
                                                                    const F& field) {
  auto cfg = std::make_shared<JointsConfiguration<F>>();
  cfg->field = field;
  cfg->ambient = v.ambient;
  cfg->families.push_back({v.dim, 1, {v}});
  cfg->varieties.push_back(v);
  cfg->family_of.push_back(0);
  for (const auto& p : points) {
    if (!contains_point(v, p, field)) throw Error(ErrorCode::NotOnVariety, "point is not on the variety");
    cfg->joints.push_back(p);
    cfg->tuples.push_back({Tuple{0}});
  }
  return cfg;
}

namespace {

template <ExactField F>
std::string variety_label(const JointsConfiguration<F>& cfg, std::size_t v) {
  const auto& id = cfg.varieties.at(v).id;
  return id.empty() ? "V" + std::to_string(v) : id;
}

}  // namespace

template <ExactField F>
std::string ledger_csv(const JointsConfiguration<F>& cfg, const BasisLedger<F>& ledger) {
  std::ostringstream out;
  out << "variety,joint,r,count\n";
  for (std::size_t v = 0; v < ledger.per_variety.size(); ++v) {
    if (!ledger.per_variety[v]) continue;
    for (const auto& s : ledger.per_variety[v]->steps)
      out << variety_label(cfg, v) << ',' << cfg.joint_id(s.joint) << ',' << s.r << ',' << s.selected.size() << '\n';
  }
  return out.str();
}

template <ExactField F>
std::string ledger_summary_json(const JointsConfiguration<F>& cfg, const BasisLedger<F>& ledger) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t v = 0; v < ledger.per_variety.size(); ++v) {
    if (!ledger.per_variety[v]) continue;
    auto& entry = j[variety_label(cfg, v)];
    entry = nlohmann::ordered_json::object();
    for (const auto& [p, total] : ledger.per_variety[v]->totals) entry[cfg.joint_id(p)] = total;
  }
  return j.dump(2);
}

#define JOINTSLAB_INSTANTIATE(F)                                                                                   \
  template Vec<F> operator_row<F>(const HasseOperator<F>&, const Vec<F>&, const MonomialBasis&,                    \
                                  const BinomialTable<F>&);                                                        \
  template std::vector<FunctionalRow<F>> functional_rows<F>(const Chart<F>&, unsigned, unsigned);                  \
  template class LedgerContext<F>;                                                                                 \
  template struct VarietyLedger<F>;                                                                                \
  template struct BasisLedger<F>;                                                                                  \
  template VarietyLedger<F> build_ledger<F>(LedgerContext<F>&, std::size_t, const Handicap&);                      \
  template BasisLedger<F> build_ledgers<F>(LedgerContext<F>&, const Handicap&);                                    \
  template std::vector<const HasseOperator<F>*> selected_operators<F>(LedgerContext<F>&, const VarietyLedger<F>&,  \
                                                                      std::size_t);                                \
  template std::size_t T_dimension<F>(LedgerContext<F>&, std::size_t, const std::map<std::size_t, unsigned>&);     \
  template std::size_t b_p<F>(LedgerContext<F>&, std::size_t, std::map<std::size_t, unsigned>, std::size_t);       \
  template std::shared_ptr<const JointsConfiguration<F>> single_variety_config<F>(                                 \
      const VarietySpec<F>&, const std::vector<Vec<F>>&, const F&);                                                \
  template std::string ledger_csv<F>(const JointsConfiguration<F>&, const BasisLedger<F>&);                        \
  template std::string ledger_summary_json<F>(const JointsConfiguration<F>&, const BasisLedger<F>&);

JOINTSLAB_INSTANTIATE(PrimeField)
JOINTSLAB_INSTANTIATE(RationalField)

}  // namespace jointslab
