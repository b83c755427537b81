#pragma once

// Priority orders from handicaps, functional rows g -> D g(p) on F[x]_{<=n},
// per-variety ledgers of selected vanishing conditions, and the T(v, n)
// dimension counts.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "jointslab/configuration.hpp"

namespace jointslab {

/// alpha[p] for each joint index p; `position[p]` is p's place in the
/// preassigned order (a permutation of 0..|J|-1).
struct Handicap {
  std::vector<std::int64_t> alpha;
  std::vector<std::size_t> position;

  static Handicap zero(std::size_t joints);
  static Handicap from_alpha(std::vector<std::int64_t> alpha);
  std::size_t size() const noexcept { return alpha.size(); }
  bool precedes(std::size_t p, std::size_t q) const { return position.at(p) < position.at(q); }
};

struct PriorityKey {
  std::size_t joint = 0;
  unsigned r = 0;
};

/// (p, r) before (p', r') iff r - alpha_p < r' - alpha_p', ties broken by the
/// preassigned order. Throws UnknownJoint.
bool priority_less(const PriorityKey& a, const PriorityKey& b, const Handicap& h);

/// Orders already imposed at each joint of `on_variety` when step (p, r) starts.
std::map<std::size_t, unsigned> v_vector(std::size_t p, unsigned r, const Handicap& h,
                                         const std::vector<std::size_t>& on_variety);

/// Row of g -> (E g)(p) over the graded-lex monomial basis of degree <= n.
template <ExactField F>
Vec<F> operator_row(const HasseOperator<F>& ambient, const Vec<F>& p, const MonomialBasis& basis,
                    const BinomialTable<F>& binom);

template <ExactField F>
struct FunctionalRow {
  Vec<F> coeffs;
  std::size_t joint = 0;
  std::size_t variety = 0;
  unsigned r = 0;
  ExponentVector gamma;
};

/// One row per D^gamma, |gamma| = r, in graded-lex gamma order.
template <ExactField F>
std::vector<FunctionalRow<F>> functional_rows(const Chart<F>& c, unsigned r, unsigned n);

/// Charts and rows for every (variety, joint) incidence at degree n. Rows do
/// not depend on the handicap, so one context serves every rebuild. Rows of a
/// flat are taken in the flat's own coordinates t (x = point + sum t_i dir_i),
/// where restriction F[x]_{<=n} -> F[t]_{<=n} is onto, so ranks agree with the
/// ambient rows. Thread-safe.
template <ExactField F>
class LedgerContext {
 public:
  struct OrderBlock {
    std::vector<ExponentVector> gammas;
    std::vector<Vec<F>> rows;
  };

  LedgerContext(std::shared_ptr<const JointsConfiguration<F>> cfg, unsigned n);

  const JointsConfiguration<F>& config() const noexcept { return *cfg_; }
  const F& field() const noexcept { return cfg_->field; }
  unsigned n() const noexcept { return n_; }
  /// The ambient monomial basis of F[x]_{<=n}.
  const MonomialBasis& basis() const noexcept { return basis_; }
  const std::vector<std::size_t>& joints_on(std::size_t v) const { return joints_on_.at(v); }

  /// dim R_{V,<=n}.
  std::size_t dim(std::size_t v) const { return dims_.at(v); }
  /// Largest order used at a joint of V: n * deg V.
  unsigned order_cap(std::size_t v) const;
  /// Length of the rows of V's blocks.
  std::size_t row_width(std::size_t v) const;

  const OrderBlock& block(std::size_t v, std::size_t p, unsigned r);
  /// Ambient D^gamma operators of the (p, r) block, truncated at order n.
  const std::vector<HasseOperator<F>>& operators(std::size_t v, std::size_t p, unsigned r);

 private:
  struct Site {
    std::mutex mutex;
    std::unique_ptr<ChartOperators<F>> ops;
    std::optional<Vec<F>> flat_t;
    std::map<unsigned, OrderBlock> blocks;
  };
  Site& site(std::size_t v, std::size_t p);
  ChartOperators<F>& chart_ops(std::size_t v, std::size_t p, Site& s);
  const MonomialBasis& flat_basis(std::size_t k) const { return flat_bases_.at(k); }

  std::shared_ptr<const JointsConfiguration<F>> cfg_;
  unsigned n_;
  MonomialBasis basis_;
  BinomialTable<F> binom_;
  std::map<std::size_t, MonomialBasis> flat_bases_;
  std::vector<std::vector<std::size_t>> joints_on_;
  std::vector<std::size_t> dims_;
  std::mutex sites_mutex_;
  std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<Site>> sites_;
};

struct LedgerStep {
  std::size_t joint = 0;
  unsigned r = 0;
  std::vector<std::size_t> selected;  // indices into the (p, r) block
};

/// The B/D record of one variety under one handicap.
template <ExactField F>
struct VarietyLedger {
  std::size_t variety = 0;
  unsigned n = 0;
  std::size_t dim = 0;
  std::size_t rank = 0;
  bool cap_hit = false;
  std::vector<std::size_t> joints;
  std::vector<LedgerStep> steps;             // nonempty selections, in priority order
  std::map<std::size_t, std::size_t> totals;  // |B_{p,V}| for every joint on V

  std::size_t total(std::size_t p) const;
  std::size_t count(std::size_t p, unsigned r) const;
};

template <ExactField F>
VarietyLedger<F> build_ledger(LedgerContext<F>& ctx, std::size_t v, const Handicap& h);

/// Ledgers for every variety with at least one joint (nullopt otherwise),
/// built in parallel.
template <ExactField F>
struct BasisLedger {
  std::vector<std::optional<VarietyLedger<F>>> per_variety;

  const VarietyLedger<F>& at(std::size_t v) const;
  bool cap_hit() const;
};

template <ExactField F>
BasisLedger<F> build_ledgers(LedgerContext<F>& ctx, const Handicap& h);

/// Ambient operators selected for D_{p,V}, in step order.
template <ExactField F>
std::vector<const HasseOperator<F>*> selected_operators(LedgerContext<F>& ctx, const VarietyLedger<F>& ledger,
                                                        std::size_t p);

/// dim {g in R_{V,<=n} : order_p(g) >= v_p for all joints p on V}.
/// Orders beyond order_cap(V) + 1 impose nothing new.
template <ExactField F>
std::size_t T_dimension(LedgerContext<F>& ctx, std::size_t v, const std::map<std::size_t, unsigned>& orders);

template <ExactField F>
std::size_t b_p(LedgerContext<F>& ctx, std::size_t v, std::map<std::size_t, unsigned> orders, std::size_t p);

/// Single-variety context over explicit points; joint i is points[i].
template <ExactField F>
std::shared_ptr<const JointsConfiguration<F>> single_variety_config(const VarietySpec<F>& v,
                                                                    const std::vector<Vec<F>>& points,
                                                                    const F& field);

template <ExactField F>
std::string ledger_csv(const JointsConfiguration<F>& cfg, const BasisLedger<F>& ledger);

/// {varietyId: {jointId: total}}.
template <ExactField F>
std::string ledger_summary_json(const JointsConfiguration<F>& cfg, const BasisLedger<F>& ledger);

}  // namespace jointslab
