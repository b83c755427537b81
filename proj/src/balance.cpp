#include "jointslab/balance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace jointslab {

namespace {

mpq_class mpq_pow(const mpq_class& base, unsigned long e) {
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), e);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), e);
  mpq_class r(num, den);
  r.canonicalize();
  return r;
}

}  // namespace

std::pair<mpq_class, mpq_class> RootValue::bounds(unsigned bits) const {
  if (root == 1) {
    mpq_class v = scale * radicand;
    return {v, v};
  }
  mpz_class shifted;
  mpz_mul_2exp(shifted.get_mpz_t(), radicand.get_num_mpz_t(), static_cast<mp_bitcnt_t>(bits) * root);
  mpz_class n = shifted / radicand.get_den();
  mpz_class lo;
  mpz_root(lo.get_mpz_t(), n.get_mpz_t(), root);
  mpz_class unit;
  mpz_ui_pow_ui(unit.get_mpz_t(), 2, bits);
  mpq_class l(lo, unit), h(lo + 1, unit);
  l.canonicalize();
  h.canonicalize();
  return {scale * l, scale * h};
}

double RootValue::to_double() const {
  return scale.get_d() * std::pow(radicand.get_d(), 1.0 / static_cast<double>(root));
}

std::string RootValue::to_string() const {
  if (is_zero()) return "0";
  if (root == 1) return mpq_class(scale * radicand).get_str();
  std::string s = "(" + radicand.get_str() + ")^(1/" + std::to_string(root) + ")";
  return scale == 1 ? s : scale.get_str() + " * " + s;
}

int compare(const RootValue& a, const RootValue& b) {
  if (a.root == 1 && b.root == 1) {
    int c = cmp(a.scale * a.radicand, b.scale * b.radicand);
    return (c > 0) - (c < 0);
  }
  const unsigned long l = std::lcm(a.root, b.root);
  mpq_class x = mpq_pow(a.scale, l) * mpq_pow(a.radicand, l / a.root);
  mpq_class y = mpq_pow(b.scale, l) * mpq_pow(b.radicand, l / b.root);
  int c = cmp(x, y);
  return (c > 0) - (c < 0);
}

bool gap_exceeds(const RootValue& a, const RootValue& b, const mpq_class& tau) {
  if (a.root == 1 && b.root == 1) return a.scale * a.radicand - b.scale * b.radicand > tau;
  for (unsigned bits = 64; bits <= 4096; bits *= 2) {
    auto [alo, ahi] = a.bounds(bits);
    auto [blo, bhi] = b.bounds(bits);
    if (alo - bhi > tau) return true;
    if (ahi - blo <= tau) return false;
  }
  return false;
}

mpq_class normalizer_value(Normalizer kind, unsigned n, std::size_t dim) {
  if (kind == Normalizer::Binomial && n >= dim) return mpq_class(binom_integer(n, dim));
  return mpq_class(binom_integer(n + dim, dim));
}

template <ExactField F>
std::vector<RootValue> compute_W(const JointsConfiguration<F>& cfg, const BasisLedger<F>& ledger, unsigned n,
                                 const std::vector<mpq_class>& weights, Normalizer normalizer) {
  std::vector<RootValue> out(cfg.joints.size());
  for (std::size_t p = 0; p < cfg.joints.size(); ++p) {
    RootValue w;
    w.root = static_cast<unsigned>(cfg.multiplicity(p));
    if (!weights.empty()) {
      if (weights.size() != cfg.joints.size() || sgn(weights[p]) <= 0)
        throw Error(ErrorCode::InvalidArgument, "weights must be positive, one per joint");
      w.scale = 1 / weights[p];
    }
    mpq_class product = 1;
    for (const auto& tuple : cfg.tuples[p])
      for (auto v : tuple)
        product *= mpq_class(ledger.at(v).total(p)) / normalizer_value(normalizer, n, cfg.varieties[v].dim);
    w.radicand = product;
    out[p] = w;
  }
  return out;
}

std::string balance_status_name(BalanceStatus s) { return s == BalanceStatus::Balanced ? "Balanced" : "CapHit"; }

bool lex_less(const std::vector<RootValue>& a, const std::vector<RootValue>& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    int c = compare(a[i], b[i]);
    if (c != 0) return c < 0;
  }
  return a.size() < b.size();
}

template <ExactField F>
mpq_class default_tau(const JointsConfiguration<F>& cfg, unsigned n) {
  const std::size_t s = cfg.s();
  unsigned deg = 1;
  for (const auto& v : cfg.varieties) deg = std::max(deg, v.degree);
  mpz_class k = 8 * static_cast<unsigned long>(s);
  mpz_class dpow;
  mpz_ui_pow_ui(dpow.get_mpz_t(), deg, s);
  mpq_class tau(k * dpow, mpz_class(std::max(1u, n)));
  tau.canonicalize();
  return tau;
}

namespace {

std::vector<std::size_t> sort_desc(const std::vector<RootValue>& w) {
  std::vector<std::size_t> idx(w.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return compare(w[a], w[b]) > 0; });
  return idx;
}

std::vector<RootValue> profile(const std::vector<RootValue>& w, const std::vector<std::size_t>& order) {
  std::vector<RootValue> out;
  for (auto i : order) out.push_back(w[i]);
  return out;
}

struct ProfileLess {
  bool operator()(const std::vector<RootValue>& a, const std::vector<RootValue>& b) const { return lex_less(a, b); }
};

// Ledgers keyed by the handicap restricted to the variety's joints, shifted
// to start at zero.
template <ExactField F>
class LedgerCache {
 public:
  explicit LedgerCache(LedgerContext<F>& ctx) : ctx_(ctx) {}

  BasisLedger<F> build(const Handicap& h) {
    const auto& cfg = ctx_.config();
    BasisLedger<F> out;
    out.per_variety.resize(cfg.varieties.size());
    for (std::size_t v = 0; v < cfg.varieties.size(); ++v) {
      const auto& on = ctx_.joints_on(v);
      if (on.empty()) continue;
      std::int64_t lo = h.alpha[on[0]];
      for (auto p : on) lo = std::min(lo, h.alpha[p]);
      std::vector<std::int64_t> key;
      for (auto p : on) key.push_back(h.alpha[p] - lo);
      auto it = cache_.find({v, key});
      if (it == cache_.end()) it = cache_.emplace(std::make_pair(v, key), build_ledger(ctx_, v, h)).first;
      out.per_variety[v] = it->second;
    }
    return out;
  }

 private:
  LedgerContext<F>& ctx_;
  std::map<std::pair<std::size_t, std::vector<std::int64_t>>, VarietyLedger<F>> cache_;
};

}  // namespace

template <ExactField F>
BalanceState<F> balance(LedgerContext<F>& ctx, const BalanceOptions& options) {
  const auto& cfg = ctx.config();
  if (component_joint_sets(cfg).size() > 1)
    throw Error(ErrorCode::Disconnected, "balance needs a connected configuration; split it into components first");
  const std::size_t nj = cfg.joints.size();
  const unsigned n = ctx.n();

  BalanceState<F> st;
  st.tau = options.tau.value_or(default_tau(cfg, n));
  st.alpha = options.initial_alpha ? Handicap::from_alpha(*options.initial_alpha) : Handicap::zero(nj);
  if (st.alpha.size() != nj) throw Error(ErrorCode::InvalidArgument, "initial handicap needs one entry per joint");

  LedgerCache<F> cache(ctx);
  auto evaluate = [&](const Handicap& h, BasisLedger<F>& ledger) {
    ledger = cache.build(h);
    ++st.rebuilds;
    return compute_W(cfg, ledger, n, options.weights, options.normalizer);
  };

  st.W = evaluate(st.alpha, st.ledger);
  st.sorted = sort_desc(st.W);
  std::set<std::vector<RootValue>, ProfileLess> seen;
  seen.insert(profile(st.W, st.sorted));
  const std::size_t max_step = std::max<std::size_t>(1, 4 * static_cast<std::size_t>(n) * nj);

  for (;;) {
    std::size_t t = 0;
    for (std::size_t i = 0; i + 1 < nj; ++i)
      if (gap_exceeds(st.W[st.sorted[i]], st.W[st.sorted[i + 1]], st.tau)) {
        t = i + 1;
        break;
      }
    if (t == 0) {
      st.status = BalanceStatus::Balanced;
      break;
    }
    const auto before = profile(st.W, st.sorted);
    bool moved = false;
    bool capped = false;
    for (std::size_t step = 1;; step = std::min(step * 2, max_step)) {
      if (st.rebuilds >= options.cap) {
        capped = true;
        break;
      }
      Handicap next = st.alpha;
      for (std::size_t i = 0; i < t; ++i) next.alpha[st.sorted[i]] -= static_cast<std::int64_t>(step);
      BasisLedger<F> ledger;
      auto w = evaluate(next, ledger);
      auto order = sort_desc(w);
      auto after = profile(w, order);
      if (lex_less(after, before)) {
        st.alpha = std::move(next);
        st.W = std::move(w);
        st.sorted = std::move(order);
        st.ledger = std::move(ledger);
        ++st.iteration;
        if (!seen.insert(after).second) st.revisited = true;
        BalanceTraceRow row;
        row.iteration = st.iteration;
        row.t = t;
        row.decrement = step;
        row.rebuilds = st.rebuilds;
        row.max_w = st.W[st.sorted.front()];
        row.min_w = st.W[st.sorted.back()];
        row.lex_decreased = lex_less(after, before);
        st.trace.push_back(row);
        moved = true;
        break;
      }
      if (step == max_step) break;
    }
    if (!moved || capped) {
      st.status = BalanceStatus::CapHit;
      break;
    }
  }
  st.distinct_profiles = seen.size();
  return st;
}

std::string balance_trace_csv(const std::vector<BalanceTraceRow>& trace) {
  std::ostringstream out;
  out << "iteration,t,min_w,max_w,lex_changed\n";
  out.precision(12);
  for (const auto& r : trace)
    out << r.iteration << ',' << r.t << ',' << r.min_w.to_double() << ',' << r.max_w.to_double() << ','
        << (r.lex_decreased ? 1 : 0) << '\n';
  return out.str();
}

#define JOINTSLAB_INSTANTIATE(F)                                                                               \
  template std::vector<RootValue> compute_W<F>(const JointsConfiguration<F>&, const BasisLedger<F>&, unsigned, \
                                               const std::vector<mpq_class>&, Normalizer);                     \
  template mpq_class default_tau<F>(const JointsConfiguration<F>&, unsigned);                                  \
  template BalanceState<F> balance<F>(LedgerContext<F>&, const BalanceOptions&);

JOINTSLAB_INSTANTIATE(PrimeField)
JOINTSLAB_INSTANTIATE(RationalField)

}  // namespace jointslab
