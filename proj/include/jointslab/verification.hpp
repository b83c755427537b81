#pragma once

// Executable checks: product-derivative rank, parameter counting, the
// blockwise Hasse witness, Schwartz-Zippel with multiplicities, and the
// joints-count bounds.

#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "jointslab/balance.hpp"

namespace jointslab {

struct RankOptions {
  std::optional<std::size_t> drop_joint;  // leave this joint's rows out
  std::size_t max_rows = 2'000'000;       // size guard on sum_p prod |D|
  std::size_t max_width = 20'000;         // size guard on C(n+d, d)
};

struct RankCheck {
  std::size_t rank = 0;
  std::size_t expected = 0;  // C(n+d, d)
  std::size_t rows = 0;      // products examined
  bool pass = false;
  std::optional<std::string> skipped;
};

/// Stacks the rows g -> (D_1...D_s g)(p), D_i in D_{p,V_i(p)} over the
/// designated tuple, and asks for full rank on F[x]_{<=n}.
template <ExactField F>
RankCheck vanishing_rank_check(LedgerContext<F>& ctx, const BasisLedger<F>& ledger, const RankOptions& options = {});

struct CountCheck {
  mpz_class lhs;  // sum_p prod_i |D_{p,V_i(p)}|
  mpz_class rhs;  // C(n+d, d)
  bool pass = false;
};

template <ExactField F>
CountCheck parameter_count_check(const LedgerContext<F>& ctx, const BasisLedger<F>& ledger);

template <ExactField F>
struct Witness {
  std::vector<unsigned> orders;              // r_i
  std::vector<ExponentVector> gammas;        // per chart, in its tangent coordinates
  std::vector<HasseOperator<F>> framed;      // D_i in chart i's framed coordinates
  std::vector<HasseOperator<F>> ambient;     // D_i as ambient operators
  typename F::Element value{};               // (D_1...D_s g)(p)
  unsigned order = 0;                        // vanishing order of g at p
  bool pass = false;                         // value != 0 and sum r_i = order
};

/// Charts must be centered at p with truncation >= deg g. Throws
/// ZeroPolynomial, NotAJoint.
template <ExactField F>
Witness<F> hasse_vanishing_witness(const Vec<F>& p, const std::vector<Chart<F>>& charts, const Polynomial<F>& g);

/// Charts of the designated tuple at joint p, truncated at `truncation`.
template <ExactField F>
std::vector<Chart<F>> joint_charts(const JointsConfiguration<F>& cfg, std::size_t p, unsigned truncation);

/// A random nonzero g with deg g <= degree and order at p >= min(order, degree):
/// a product of linear forms through p times a random cofactor.
template <ExactField F>
Polynomial<F> random_polynomial_at(const F& field, const Vec<F>& p, unsigned order, unsigned degree,
                                   std::mt19937_64& rng);

struct SchwartzZippelCheck {
  mpz_class lhs;  // sum over A^d of the vanishing order
  mpz_class rhs;  // |A|^(d-1) deg g
  bool pass = false;
};

/// Throws ZeroPolynomial.
template <ExactField F>
SchwartzZippelCheck schwartz_zippel_mult(const Polynomial<F>& g, const std::vector<typename F::Element>& A);

struct BoundReport {
  std::size_t joint_count = 0;
  std::size_t s = 0;
  bool applicable = true;  // false when s = 1
  std::vector<mpz_class> family_degrees;
  mpz_class degree_product;  // prod deg_i^{m_i}

  // C^(s-1) and C'^(s-1); the constants are their (s-1)-th roots.
  mpq_class constant_a_power, constant_b_power;
  RootValue constant_a, constant_b, rhs_a, rhs_b;

  // sum_p M(p)^(1/(s-1)) within [lo, hi], hi - lo <= |J| 2^-bits.
  mpq_class multiplicity_lo, multiplicity_hi;
  unsigned bracket_bits = 48;
  bool multiplicity_exact = false;

  bool pass_a = true;
  bool pass_b = true;
  bool decided_b = true;  // false if the brackets never separated
  bool pass() const { return pass_a && pass_b; }
};

template <ExactField F>
BoundReport bound_report(const JointsConfiguration<F>& cfg);

/// 12 significant digits.
std::string decimal(const mpq_class& x);
std::string decimal(const RootValue& x);

}  // namespace jointslab
