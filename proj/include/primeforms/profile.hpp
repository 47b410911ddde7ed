// Degree-profile combinatorics and the exact rational "power saving"
// quantities attached to a system: the sequences s_d, t_d, u_d, the
// admissibility inequalities, the simplified bounds A_1/A_2, the explicit
// variable-count thresholds, and finite-field estimates of the singular-locus
// dimensions that feed them.
//
// Everything here is exact integer/rational arithmetic; the inequalities are
// strict and evaluated near boundaries, so floating point is never used.
#pragma once

#include "primeforms/numbers.hpp"
#include "primeforms/poly.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace primeforms {

// ------------------------------------------------------------ degree profile

struct DegreeProfile {
  std::vector<u32> delta;      // distinct degrees, ascending
  std::map<u32, u32> r;        // multiplicity per degree (only degrees in delta)
  u32 R = 0;                   // total number of forms
  u32 C = 0;                   // min degree
  u32 D = 0;                   // max degree
  u64 weight = 0;              // sum over forms of their degrees

  u32 r_of(u32 d) const {
    auto it = r.find(d);
    return it == r.end() ? 0 : it->second;
  }
  // Partial weight: sum of d * r_d over degrees d <= j (zero for j = 0).
  u64 partial_weight(u32 j) const {
    u64 s = 0;
    for (auto& [d, rd] : r) {
      if (d <= j) s += static_cast<u64>(d) * rd;
    }
    return s;
  }
};

DegreeProfile degree_profile(const System& sys);
DegreeProfile profile_from_degrees(const std::vector<u32>& degrees);

// ------------------------------------------------- singular-locus dimension

// Estimated dimension of the degree-d singular slice
//   S_d = { x in F_p^n : rank(Jacobian of the degree-d forms at x) < r_d },
// from finite-field point counts: dim ~= log_p #S_d(F_p).
struct BirchEstimate {
  u32 d = 0;
  i64 estimate = 0;            // rounded dimension estimate
  std::string method;          // "exact-pointcount" | "sampled" | "user-supplied" | "upper-bound-R"
  std::vector<std::pair<u64, u64>> counts;  // (p, points counted in S_d)
  std::vector<std::string> warnings;
};

// Exhaustive count when p^n fits the budget for some listed prime; otherwise
// Monte Carlo sampling (`samples` points per prime, counter-based RNG).
// Zero points maps to estimate 0 with a warning.
BirchEstimate estimate_birch_dim(const System& sys, u32 d,
                                 const std::vector<u64>& primes,
                                 u64 max_exhaustive,
                                 u64 samples = 200000, u64 seed = 1,
                                 int threads = 0);

// Rank over F_p of the Jacobian of the degree-d forms at point x.
u32 jacobian_rank_mod_p(const System& sys, u32 d, const std::vector<u64>& x, u64 p);

// ----------------------------------------------------------- power saving

// Result of the admissibility inequality, evaluated exactly for d = 0 and
// every d in delta.  Failing entries are listed by degree (0 stands for the
// d = 0 condition).
struct Admissibility {
  bool admissible = false;
  std::vector<u32> failing;
  std::map<u32, Rat> lhs;      // per-condition left-hand side (< 1 required)
};

struct PowerSavingProfile {
  DegreeProfile profile;
  u64 n = 0;
  std::map<u32, i64> B;        // per degree in delta (0 for absent degrees)
  i64 dim_vstar = 0;           // whole-system singular-locus dimension bound

  std::vector<Rat> s;          // s[d] for d = 1..D+1; s[0] unused; s[D+1] = 0
  Rat t0;                      // t_0
  std::map<u32, Rat> t;        // t_d for d in delta
  std::vector<Int> u;          // u[d] for d = 1..D; u[0] unused
  Rat A1, A2;                  // simplified bounds
  Rat t0_lower;                // 1 - A1 * (R+1)
  Admissibility adm;           // filled at construction
};

// Exact computation of every quantity above.
//   s_d   = sum over degrees i >= d of 2^{i-1} (i-1) r_i / (n - B_i),
//           which automatically fills s_d = s_k, k = min{j in delta, j > d},
//           for d outside the profile; s_{D+1} = 0.
//   t_d   = (1 - s_{d+1} - sum_{j>d} s_j r_j) / (2^{d-1}/(n-B_d) + s_{d+1})
//           - partial_weight(d), for d in delta.
//   t_0   = 1 - s_1 - sum_j s_j r_j.
//   u_d   = sum over degrees i >= d of 2^{i-1} (i-1) r_i.
//   A_1   = 2^{D-1} (D-1) R / (n - dim_vstar).
//   A_2   = (n - dim_vstar - 2^{D-1}(D-1)R(R+1)) / (2^{D-1} + 2^{D-1}(D-1)R)
//           - weight + D.
// Requires B_d < n for all d in delta and dim_vstar < n; otherwise InputError.
// dim_vstar defaults to max(0, max B_d) when not supplied.
PowerSavingProfile power_saving_profile(u64 n, const DegreeProfile& profile,
                                        const std::map<u32, i64>& birch,
                                        std::optional<i64> dim_vstar = std::nullopt);

// Admissibility inequality:
//   partial_weight(d) * (2^{d-1}/(n-B_d) + s_{d+1})
//     + s_{d+1} + sum_{j>d} s_j r_j  <  1.
Admissibility admissible(const PowerSavingProfile& psp);

// -------------------------------------------------------------- thresholds

struct KappaCondition {
  std::string name;            // "i".."iv"
  Rat rhs;                     // right-hand side of the condition
  std::optional<Rat> lhs;      // codim - 2^{D-1}(D-1)R(R+1), when codim given
  std::optional<bool> pass;
};

struct ThresholdReport {
  Int n_min_theorem;           // D^2 * 4^{D+6} * R^5
  Int iota1, iota2, iota3;
  Rat varpi;                   // 1 / (4(R+1))
  Int remark_bound;            // D^2 * 4^{D+2} * R^5
  bool remark_holds = false;   // iota3 <= remark_bound
  std::vector<KappaCondition> kappa;  // i, ii (need codim_f); iii, iv (codim_g)
};

// Explicit thresholds from the degree profile alone; the four rank-condition
// checks are evaluated only when the corresponding codimension is supplied.
// codim_f applies to conditions i-ii, codim_g to iii-iv.
ThresholdReport threshold_report(const DegreeProfile& profile,
                                 std::optional<Int> codim_f = std::nullopt,
                                 std::optional<Int> codim_g = std::nullopt);

// Major-arc exponent parameter 1/(4(R+1)).
Rat varpi_of(u32 R);

}  // namespace primeforms
