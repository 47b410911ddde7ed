// Non-archimedean machinery: unit-solution counts N(q), local densities at a
// prime, Gauss sums over unit residues, the truncated singular series, Euler
// products over primes, and Hensel solubility witnesses.
//
// Two computation routes coexist:
//   * enumeration with singular-survivor tracking -- exact counts plus a
//     verified stabilization level (all solutions nonsingular mod p), used
//     whenever the residue scans fit the budget;
//   * per-variable value-distribution convolution -- exact counts for
//     variable-separable (diagonal) systems at any feasible modulus, with no
//     stabilization claim.
// Every result records which route produced it.
#pragma once

#include "primeforms/numbers.hpp"
#include "primeforms/poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace primeforms {

// Hard cap on q^R table sizes and residue scans, overridable per call.
constexpr u64 kDefaultLocalBudget = 60'000'000;

// --------------------------------------------------------- value distribution

// Joint distribution of (F_1(h),...,F_R(h)) mod q over unit vectors h:
// entry at index sum_i v_i q^{i-1} counts the h with F_i(h) = v_i mod q.
// Diagonal systems use a per-variable convolution (cost ~ n*phi(q)*q^R);
// everything else scans the phi(q)^n unit tuples.  Exact integers.
std::vector<Int> value_distribution(const System& sys, u64 q,
                                    u64 budget = kDefaultLocalBudget);

// ------------------------------------------------------------- unit counts

struct UnitCount {
  u64 q = 1;
  Int value = 1;
};

// N(q) = #{h in units^n : F(h) = 0 mod q}, assembled multiplicatively from
// prime-power counts.
UnitCount count_unit_solutions(const System& sys, u64 q,
                               u64 budget = kDefaultLocalBudget);

// Counts N(p^k) for k = 1..k_max at a single prime, with lift bookkeeping.
struct LevelCounts {
  u64 p = 0;
  u32 computed_to = 0;                    // levels with a trustworthy count
  std::vector<Int> counts;                // counts[k-1] = N(p^k)
  // First level at which every solution is nonsingular mod p (witnessed by
  // an empty singular-survivor list, or by the unit-Jacobian certificate).
  std::optional<u32> all_nonsingular_from;
  bool budget_exhausted = false;
  std::string route;                      // "certified-lift" | "enumerated" | "counted" | mixes
};

LevelCounts level_counts(const System& sys, u64 p, u32 k_max,
                         u64 budget = kDefaultLocalBudget);

// Diagonal-system certificate that the Jacobian has rank R at EVERY unit
// point mod p: R distinct variables, the i-th appearing in form i only, with
// p dividing neither its coefficient nor the degree.  Sufficient, not
// necessary.
bool unit_jacobian_certificate(const System& sys, u64 p);

// ------------------------------------------------------------ local density

struct LocalDensity {
  u64 p = 0;
  std::vector<Rat> values;                // p^{Rk} N(p^k) / phi(p^k)^n, k = 1..
  bool stabilized = false;
  std::optional<u32> stabilization_k;
  bool budget_exhausted = false;
  std::string route;
};

// Exact rational sequence whose limit is the local density at p.  The
// stabilized flag is set only when some level k0 <= k_max has every counted
// solution nonsingular mod p (then the sequence is provably constant from
// k0 on and the limit is attained).
LocalDensity local_density(const System& sys, u64 p, u32 k_max,
                           u64 budget = kDefaultLocalBudget);

// ---------------------------------------------------------------- Gauss sums

struct GaussSumValue {
  u64 q = 1;
  std::vector<u64> a;
  CQuad value;
};

// C(q,a) = sum over unit vectors h of e(a . F(h) / q), accumulated in quad
// precision in a fixed order (values ascending).
GaussSumValue gauss_sum(const System& sys, u64 q, const std::vector<u64>& a,
                        u64 budget = kDefaultLocalBudget);

// All q^R Gauss sums at modulus q (index sum_i a_i q^{i-1}); the value
// distribution is computed once.  Memory/time guard via budget.
std::vector<CQuad> gauss_sum_table(const System& sys, u64 q,
                                   u64 budget = kDefaultLocalBudget);

// --------------------------------------------------------------------- B(q)

struct BValue {
  u64 q = 1;
  Int exact = 1;        // integer value via Ramanujan-sum regrouping
  double value = 1.0;   // phase-accumulated value when computed, else exact
  double im = 0.0;      // imaginary part of the phase-accumulated sum
  bool phase_path = false;  // true when the dagger sum over a was accumulated
};

// B(q) = sum of C(q,a) over a with gcd(a_1,...,a_R,q) = 1.  The exact value
// regroups the double sum over (a, h) into generalized Ramanujan sums
//   sum_a e(a.v/q) = sum_{d | gcd(v,q)} mu(q/d) d^R,
// which is an integer identity.  The phase-accumulated path (reported with
// its residual imaginary part) runs when q^{2R} fits the budget.
BValue B_of_q(const System& sys, u64 q, u64 budget = kDefaultLocalBudget);

// ---------------------------------------------------------- singular series

struct SeriesTruncation {
  u64 H = 1;
  Rat partial_exact = 1;                // sum of exact terms
  double partial = 1.0;
  std::vector<double> terms;            // terms[q-1] = B(q)/phi(q)^n
  // Least-squares slope of ln|tail(H')| against ln H' for H' in [H/4, H),
  // where tail(H') = partial(H) - partial(H'); NaN when too few usable
  // points.  The expected shape is an exponent <= -1/2 + eps.
  double fitted_decay_exponent = 0.0;
  std::string tail_note;
};

SeriesTruncation singular_series(const System& sys, u64 H,
                                 u64 budget = kDefaultLocalBudget,
                                 int threads = 0);

// ------------------------------------------------------------ Euler product

struct EulerFactor {
  u64 p = 0;
  Rat value = 0;
  bool stabilized = false;
  std::optional<u32> stabilization_k;
};

struct EulerProduct {
  double value = 1.0;
  bool provisional = false;             // some factor unstabilized
  std::optional<u64> obstruction_prime; // first p with factor exactly 0
  std::vector<EulerFactor> factors;
};

// Product of local densities over primes p <= p_max, each factor taken at
// its stabilization level when verified, otherwise at the deepest computed
// level (flagged provisional).  A zero factor is a local obstruction.
EulerProduct euler_product(const System& sys, u64 p_max, u32 k_max,
                           u64 budget = kDefaultLocalBudget);

// ------------------------------------------------------------- Hensel check

struct HenselWitness {
  enum class Outcome { Witness, Obstruction, Inconclusive };
  u64 p = 0;
  u32 k = 0;                 // witness: 1; obstruction: first empty level;
                             // inconclusive: deepest level checked
  std::vector<u64> h;        // witness point (units mod p), empty otherwise
  Outcome outcome = Outcome::Inconclusive;
  bool exhaustive = false;   // false when the unit search was randomized
  std::string note;
};

// Searches units mod p for h with F(h) = 0 mod p and full-rank Jacobian
// mod p (such h lifts to a nonsingular p-adic unit solution).  When the
// exhaustive scan shows no unit solutions mod p^k for some k <= k_budget,
// that is a local obstruction at level k (the smallest such k is reported).
HenselWitness hensel_check(const System& sys, u64 p, u32 k_budget,
                           u64 budget = kDefaultLocalBudget, u64 seed = 1);

// --------------------------------------------------------------- internals
// Exposed for tests: solutions of A t = b over F_p (A is rows x n), as the
// full solution list; empty when inconsistent.  Throws BudgetError when the
// solution count would exceed max_solutions.
std::vector<std::vector<u64>> solve_linear_mod_p(
    std::vector<std::vector<u64>> A, std::vector<u64> b, u64 p,
    u64 max_solutions);

// Generalized Ramanujan sum: sum over a in [1,q]^R, gcd(a_1,..,a_R,q)=1, of
// e(a.v/q) = sum_{d | gcd(g, q)} mu(q/d) d^R where g = gcd(v_1,...,v_R).
Int ramanujan_sum(u64 q, u64 g, u32 R);

}  // namespace primeforms
