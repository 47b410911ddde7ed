// Global/empirical side: von Mangoldt sieve, exact weighted prime-solution
// counts, exponential sums over prime inputs, major/minor arc classification,
// and the two decay probes (minor-arc norms, averaged Gauss sums).
#pragma once

#include "primeforms/arch.hpp"     // Box
#include "primeforms/numbers.hpp"
#include "primeforms/poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace primeforms {

// ------------------------------------------------------------------- sieve

struct LambdaTable {
  u64 P = 0;
  std::vector<double> lambda;   // lambda[m] = log p if m = p^k, else 0
  std::vector<u8> tag;          // 0 none, 1 prime, 2 proper prime power
  std::vector<u64> primes;
  double sum() const;           // sum of lambda[2..P]
};

// Segmented sieve of Eratosthenes with exact prime-power detection.
LambdaTable sieve_lambda(u64 P);

// ------------------------------------------------------------ exact counts

struct CountResult {
  u64 P = 0;
  Box box;
  double weighted = 0;     // sum over solutions of prod_j lambda(x_j)
  u64 unweighted = 0;      // solutions whose coordinates are all genuine primes
  std::vector<std::vector<u64>> solutions;  // capped listing, lexicographic
  bool solutions_truncated = false;
  u64 total_solutions = 0;
  std::string strategy;    // "full" | "hash-join"
};

constexpr u64 kDefaultCountCost = 500'000'000;

// Exact enumeration of prime-power tuples x with x_j in (lo_j P, hi_j P] and
// F(x) = 0.  strategy: "full" (grid scan), "hash-join" (requires a syntactic
// variable bipartition where every monomial's support lies wholly on one
// side), or "auto" (cheapest feasible).  Both strategies materialize the
// solution set and sum weights in lexicographic order, so their results are
// bit-identical.  Infeasible requests fail with the cost estimate.
CountResult count_prime_solutions(const System& sys, const Box& box, u64 P,
                                  const std::string& strategy = "auto",
                                  u64 max_cost = kDefaultCountCost,
                                  u64 solution_cap = 10'000, int threads = 0);

// The syntactic bipartition used by hash-join, if one exists: labels[j] is 0
// or 1; valid iff each monomial's variables carry one label and both sides
// are nonempty.  Exposed for tests.
std::optional<std::vector<int>> hash_join_split(const System& sys);

// -------------------------------------------------------- exponential sums

struct ExpSumSample {
  std::vector<double> alpha;
  CQuad value;
  double norm = 0;         // |S_F(alpha)| / P^n
};

// S_F(alpha) = sum over the box support of Lambda(x) e(alpha . F(x)), with
// F(x) exact and the phase reduced mod 1 in quad precision.  Deterministic
// accumulation order at any thread count.
ExpSumSample exp_sum(const System& sys, const Box& box, u64 P,
                     const std::vector<double>& alpha, int threads = 0);

// ------------------------------------------------------- arc classification

struct ArcLabel {
  bool major = false;
  u64 q = 0;                      // witness denominator (major only)
  std::vector<i64> a;             // witness numerators
  std::vector<double> distances;  // |alpha_i - a_i/q|
  std::vector<double> bounds;     // Q / (q P^{d_i})
  double measure_total = 0;       // total major-arc measure at this (P, Q)
  double measure_bound = 0;       // Q^{R+1} prod_d (2Q/P^d)^{r_d}
};

// Scans q = 1..floor(Q) for the (unique, by disjointness when Q < P^{1/4})
// major-arc witness: a_i = nearest integer to q alpha_i, gcd(a, q) = 1, and
// |alpha_i - a_i/q| <= Q/(q P^{d_i}) for every form.
ArcLabel classify_arc(const System& sys, const std::vector<double>& alpha,
                      double P, double Q);

// --------------------------------------------------------------- probes

struct MinorArcRow {
  u64 P = 0;
  double Q = 0;
  double max_norm = 0;
  double q90_norm = 0;
};

struct MinorArcProbe {
  std::vector<MinorArcRow> rows;
  double fitted_exponent = 0;     // slope of ln(max_norm) against ln P
  double predicted_exponent = 0;  // -varpi / (2^D R)
  u64 samples = 0;
};

// Samples alpha uniformly from the minor arcs (rejection against
// classify_arc) at each P, recording normalized |S_F| statistics.  Report
// only: the bound's implied constant is non-effective.  Requires the top
// coefficient block to have rank R under the all-w partition.
MinorArcProbe minor_arc_probe(const System& sys, const Box& box,
                              const std::vector<u64>& Ps, u64 n_samples,
                              u64 seed = 1, u64 max_cost = kDefaultCountCost,
                              int threads = 0);

struct GaussAverageRow {
  u64 q = 0;
  double dagger_sum_abs = 0;      // sum over dagger a of |C(q, a)|
  double ratio = 0;               // dagger_sum_abs / q^{n - 3/2}
};

// Averaged Gauss-sum probe: the ratio column tracks the q^{n-3/2} shape.
std::vector<GaussAverageRow> gauss_average_probe(const System& sys, u64 q_max,
                                                 u64 budget = 60'000'000);

}  // namespace primeforms
