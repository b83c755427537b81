#pragma once

// Per-joint products W_p of ledger counts and the handicap descent that
// evens them out.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "jointslab/vanishing_basis.hpp"

namespace jointslab {

/// scale * radicand^(1/root), exact; radicand, scale >= 0.
struct RootValue {
  mpq_class scale = 1;
  mpq_class radicand = 0;
  unsigned root = 1;

  bool is_zero() const { return sgn(scale) == 0 || sgn(radicand) == 0; }
  /// Rational lower and upper bounds within 2^-bits of the value.
  std::pair<mpq_class, mpq_class> bounds(unsigned bits) const;
  double to_double() const;
  std::string to_string() const;  // exact text, e.g. "3/2" or "2 * (5)^(1/3)"
};

/// -1, 0, 1 by cross-powering.
int compare(const RootValue& a, const RootValue& b);

/// Decides a - b > tau by interval refinement; exact whenever both roots are 1.
bool gap_exceeds(const RootValue& a, const RootValue& b, const mpq_class& tau);

enum class Normalizer {
  Binomial,       // C(n, dim V), or C(n + dim V, dim V) when n < dim V
  FlatDimension,  // C(n + dim V, dim V)
};

mpq_class normalizer_value(Normalizer kind, unsigned n, std::size_t dim);

/// W_p = (1/w_p) [prod over tuples in M(p), V in tuple of |D_{p,V}| / norm(V)]^(1/M(p)).
/// `weights` defaults to 1. Throws LedgerMissing.
template <ExactField F>
std::vector<RootValue> compute_W(const JointsConfiguration<F>& cfg, const BasisLedger<F>& ledger, unsigned n,
                                 const std::vector<mpq_class>& weights = {},
                                 Normalizer normalizer = Normalizer::Binomial);

enum class BalanceStatus { Balanced, CapHit };

std::string balance_status_name(BalanceStatus s);

struct BalanceTraceRow {
  std::size_t iteration = 0;
  std::size_t t = 0;         // size of the decremented top group
  std::size_t decrement = 0;  // final step size of the move
  std::size_t rebuilds = 0;  // cumulative
  RootValue min_w, max_w;    // after the move
  bool lex_decreased = false;
};

struct BalanceOptions {
  std::optional<mpq_class> tau;  // default K / n, K = 8 s (max degree)^s
  std::size_t cap = 10000;       // total ledger rebuilds
  std::vector<mpq_class> weights;
  Normalizer normalizer = Normalizer::Binomial;
  std::optional<std::vector<std::int64_t>> initial_alpha;
};

template <ExactField F>
struct BalanceState {
  Handicap alpha;
  std::vector<RootValue> W;
  std::vector<std::size_t> sorted;  // joints by W descending, ties by joint index
  std::size_t iteration = 0;        // effective moves
  std::size_t rebuilds = 0;
  BalanceStatus status = BalanceStatus::Balanced;
  mpq_class tau;
  std::vector<BalanceTraceRow> trace;
  std::size_t distinct_profiles = 0;  // sorted-W vectors seen
  bool revisited = false;             // some effective move returned to a seen profile
  BasisLedger<F> ledger;              // for the final alpha
};

template <ExactField F>
mpq_class default_tau(const JointsConfiguration<F>& cfg, unsigned n);

/// Lexicographic descent on the descending-sorted W vector. A move is kept
/// only when it lowers that vector; when no step size up to the per-move cap
/// does, the run stops with CapHit. Throws Disconnected when the joint graph
/// has more than one component.
template <ExactField F>
BalanceState<F> balance(LedgerContext<F>& ctx, const BalanceOptions& options = {});

/// Sorted descending W vector, lexicographic strict comparison.
bool lex_less(const std::vector<RootValue>& a, const std::vector<RootValue>& b);

std::string balance_trace_csv(const std::vector<BalanceTraceRow>& trace);

}  // namespace jointslab
