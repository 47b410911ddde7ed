// Degree-profile arithmetic: exact rational power-saving quantities,
// admissibility, explicit thresholds, and finite-field singular-locus
// dimension estimates.

#include "primeforms/profile.hpp"
#include "primeforms/errors.hpp"
#include "primeforms/parallel.hpp"
#include "primeforms/rng.hpp"

#include <algorithm>
#include <cmath>

namespace primeforms {

DegreeProfile profile_from_degrees(const std::vector<u32>& degrees) {
  if (degrees.empty()) throw InputError("degree profile needs at least one form");
  DegreeProfile p;
  for (u32 d : degrees) {
    if (d < 2) throw InputError("degrees must be at least 2");
    p.r[d] += 1;
    p.weight += d;
  }
  for (auto& [d, rd] : p.r) p.delta.push_back(d);
  p.R = static_cast<u32>(degrees.size());
  p.C = p.delta.front();
  p.D = p.delta.back();
  return p;
}

DegreeProfile degree_profile(const System& sys) {
  return profile_from_degrees(sys.degrees());
}

// ------------------------------------------------- singular-locus dimension

namespace {

// Rank over F_p of a small dense matrix (rows destroyed in place).
u32 rank_mod_p(std::vector<std::vector<u64>>& m, u64 p) {
  u32 rank = 0;
  size_t rows = m.size();
  size_t cols = rows ? m[0].size() : 0;
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows; ++col) {
    size_t piv = row;
    while (piv < rows && m[piv][col] % p == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[row]);
    u64 inv = pow_mod(m[row][col] % p, p - 2, p);
    for (size_t r = row + 1; r < rows; ++r) {
      u64 f = mul_mod(m[r][col] % p, inv, p);
      if (f == 0) continue;
      for (size_t c = col; c < cols; ++c) {
        u64 sub = mul_mod(f, m[row][c] % p, p);
        m[r][c] = (m[r][c] % p + p - sub) % p;
      }
    }
    ++row;
    ++rank;
  }
  return rank;
}

// Gradients of all degree-d forms, precomputed once per scan.
std::vector<std::vector<SparsePoly>> degree_slice_gradients(const System& sys, u32 d) {
  std::vector<std::vector<SparsePoly>> grads;
  for (const auto& f : sys.forms) {
    if (f.degree == d) grads.push_back(gradient(f));
  }
  return grads;
}

bool jacobian_singular_at(const std::vector<std::vector<SparsePoly>>& grads,
                          const std::vector<u64>& x, u64 p) {
  const size_t rd = grads.size();
  const size_t n = x.size();
  std::vector<std::vector<u64>> m(rd, std::vector<u64>(n, 0));
  for (size_t i = 0; i < rd; ++i) {
    for (size_t j = 0; j < n; ++j) m[i][j] = evaluate_mod(grads[i][j], x, p);
  }
  return rank_mod_p(m, p) < rd;
}

void decode_point(u64 index, u64 p, std::vector<u64>& x) {
  for (size_t j = 0; j < x.size(); ++j) {
    x[j] = index % p;
    index /= p;
  }
}

}  // namespace

u32 jacobian_rank_mod_p(const System& sys, u32 d, const std::vector<u64>& x, u64 p) {
  auto grads = degree_slice_gradients(sys, d);
  std::vector<std::vector<u64>> m(grads.size(), std::vector<u64>(sys.n, 0));
  for (size_t i = 0; i < grads.size(); ++i) {
    for (size_t j = 0; j < sys.n; ++j) m[i][j] = evaluate_mod(grads[i][j], x, p);
  }
  return rank_mod_p(m, p);
}

BirchEstimate estimate_birch_dim(const System& sys, u32 d,
                                 const std::vector<u64>& primes,
                                 u64 max_exhaustive,
                                 u64 samples, u64 seed, int threads) {
  if (primes.empty()) throw InputError("estimate_birch_dim needs at least one prime");
  {
    std::vector<u64> ps = primes;
    std::sort(ps.begin(), ps.end());
    if (std::adjacent_find(ps.begin(), ps.end()) != ps.end()) {
      throw InputError("estimate_birch_dim: primes must be distinct");
    }
    for (u64 p : ps) {
      if (!is_prime_u64(p)) throw InputError("estimate_birch_dim: " + std::to_string(p) + " is not prime");
    }
  }
  BirchEstimate est;
  est.d = d;

  DegreeProfile prof = degree_profile(sys);
  if (prof.r_of(d) == 0) {
    // Degrees absent from the profile contribute B_d = 0 by convention.
    est.estimate = 0;
    est.method = "exact-pointcount";
    est.warnings.push_back("degree " + std::to_string(d) +
                           " absent from profile; B_d = 0 by convention");
    return est;
  }

  auto grads = degree_slice_gradients(sys, d);
  const u32 n = sys.n;

  // p^n if it fits the exhaustive budget, otherwise 0.
  auto exhaustive_size = [&](u64 p) -> u64 {
    unsigned __int128 t = 1;
    for (u32 j = 0; j < n; ++j) {
      t *= p;
      if (t > max_exhaustive) return 0;
    }
    return static_cast<u64>(t);
  };

  u64 best_p = 0;
  for (u64 p : primes) {
    if (exhaustive_size(p) != 0 && p > best_p) best_p = p;
  }

  if (best_p != 0) {
    est.method = "exact-pointcount";
    for (u64 p : primes) {
      u64 total = exhaustive_size(p);
      if (total == 0) continue;
      u64 grain = std::max<u64>(total / 256, 1024);
      u64 hits = parallel_reduce<u64>(
          total, grain, threads, 0,
          [&](u64 lo, u64 hi) {
            std::vector<u64> x(n);
            u64 h = 0;
            for (u64 idx = lo; idx < hi; ++idx) {
              decode_point(idx, p, x);
              if (jacobian_singular_at(grads, x, p)) ++h;
            }
            return h;
          },
          [](const u64& a, const u64& b) { return a + b; });
      est.counts.emplace_back(p, hits);
    }
    u64 N = 0;
    for (auto& [p, c] : est.counts) {
      if (p == best_p) N = c;
    }
    if (N == 0) {
      est.estimate = 0;
      est.warnings.push_back("no singular points found over F_" + std::to_string(best_p) +
                             "; estimate 0");
    } else {
      est.estimate = std::llround(std::log(static_cast<double>(N)) /
                                  std::log(static_cast<double>(best_p)));
    }
    return est;
  }

  // Monte Carlo path: sample points per prime, estimate the density.
  est.method = "sampled";
  std::vector<i64> per_prime;
  for (size_t pi = 0; pi < primes.size(); ++pi) {
    u64 p = primes[pi];
    u64 grain = std::max<u64>(samples / 256, 4096);
    u64 hits = parallel_reduce<u64>(
        samples, grain, threads, 0,
        [&](u64 lo, u64 hi) {
          std::vector<u64> x(n);
          u64 h = 0;
          for (u64 i = lo; i < hi; ++i) {
            for (u32 j = 0; j < n; ++j) {
              x[j] = rng_below(seed, i, j + n * pi, p);
            }
            if (jacobian_singular_at(grads, x, p)) ++h;
          }
          return h;
        },
        [](const u64& a, const u64& b) { return a + b; });
    est.counts.emplace_back(p, hits);
    if (hits == 0) {
      per_prime.push_back(0);
      est.warnings.push_back("no singular points in " + std::to_string(samples) +
                             " samples over F_" + std::to_string(p) + "; estimate 0");
    } else {
      double share = static_cast<double>(hits) / static_cast<double>(samples);
      i64 e = std::llround(n + std::log(share) / std::log(static_cast<double>(p)));
      per_prime.push_back(std::clamp<i64>(e, 0, n));
    }
  }
  std::sort(per_prime.begin(), per_prime.end());
  est.estimate = per_prime[(per_prime.size() - 1) / 2];  // lower median
  est.warnings.push_back("sampled estimate; not an exact point count");
  return est;
}

// ----------------------------------------------------------- power saving

PowerSavingProfile power_saving_profile(u64 n, const DegreeProfile& profile,
                                        const std::map<u32, i64>& birch,
                                        std::optional<i64> dim_vstar) {
  PowerSavingProfile psp;
  psp.profile = profile;
  psp.n = n;
  i64 maxB = 0;
  for (u32 d : profile.delta) {
    auto it = birch.find(d);
    i64 Bd = it == birch.end() ? 0 : it->second;
    if (Bd < 0) throw InputError("B_d must be non-negative");
    if (static_cast<u64>(Bd) >= n) {
      throw InputError("B_" + std::to_string(d) + " = " + std::to_string(Bd) +
                       " must be smaller than n = " + std::to_string(n));
    }
    psp.B[d] = Bd;
    maxB = std::max(maxB, Bd);
  }
  psp.dim_vstar = dim_vstar.value_or(maxB);
  if (psp.dim_vstar < 0 || static_cast<u64>(psp.dim_vstar) >= n) {
    throw InputError("dim V* must lie in [0, n)");
  }

  const u32 D = profile.D;
  const u32 R = profile.R;

  // s_d = sum_{i >= d} 2^{i-1} (i-1) r_i / (n - B_i), computed top-down; the
  // convention s_d = s_{next degree above d} for d outside the profile falls
  // out automatically because absent degrees contribute nothing.
  psp.s.assign(D + 2, Rat(0));
  for (u32 d = D; d >= 1; --d) {
    psp.s[d] = psp.s[d + 1];
    u32 rd = profile.r_of(d);
    if (rd > 0) {
      Int num = ipow(2, d - 1) * (d - 1) * rd;
      psp.s[d] += Rat(num, Int(n) - psp.B[d]);
    }
    if (d == 1) break;
  }

  // u_d = sum_{i >= d} 2^{i-1} (i-1) r_i.
  psp.u.assign(D + 1, Int(0));
  {
    Int acc = 0;
    for (u32 d = D; d >= 1; --d) {
      u32 rd = profile.r_of(d);
      if (rd > 0) acc += ipow(2, d - 1) * (d - 1) * rd;
      psp.u[d] = acc;
      if (d == 1) break;
    }
  }

  // Tail sums sum_{j > d} s_j r_j, then t_d and t_0.
  auto tail = [&](u32 d) {
    Rat s = 0;
    for (auto& [j, rj] : profile.r) {
      if (j > d) s += psp.s[j] * rj;
    }
    return s;
  };
  for (u32 d : profile.delta) {
    Rat denom = Rat(ipow(2, d - 1), Int(n) - psp.B[d]) + psp.s[d + 1];
    Rat numer = Rat(1) - psp.s[d + 1] - tail(d);
    psp.t[d] = numer / denom - Rat(profile.partial_weight(d));
  }
  psp.t0 = Rat(1) - psp.s[1] - tail(0);

  // Simplified bounds in terms of the whole-system singular dimension.
  Int lead = ipow(2, D - 1) * (D - 1) * R;
  psp.A1 = Rat(lead, Int(n) - psp.dim_vstar);
  psp.A2 = Rat(Int(n) - psp.dim_vstar - lead * (R + 1),
               ipow(2, D - 1) + lead) -
           Rat(profile.weight) + Rat(D);
  psp.t0_lower = Rat(1) - psp.A1 * (R + 1);

  psp.adm = admissible(psp);
  return psp;
}

Admissibility admissible(const PowerSavingProfile& psp) {
  Admissibility a;
  const DegreeProfile& prof = psp.profile;
  auto tail = [&](u32 d) {
    Rat s = 0;
    for (auto& [j, rj] : prof.r) {
      if (j > d) s += psp.s[j] * rj;
    }
    return s;
  };
  // d = 0 condition: partial weight is zero, so only the sums remain.
  a.lhs[0] = psp.s[1] + tail(0);
  for (u32 d : prof.delta) {
    Rat per_var = Rat(ipow(2, d - 1), Int(psp.n) - psp.B.at(d)) + psp.s[d + 1];
    a.lhs[d] = Rat(prof.partial_weight(d)) * per_var + psp.s[d + 1] + tail(d);
  }
  a.admissible = true;
  for (auto& [d, lhs] : a.lhs) {
    if (!(lhs < 1)) {
      a.admissible = false;
      a.failing.push_back(d);
    }
  }
  return a;
}

// -------------------------------------------------------------- thresholds

Rat varpi_of(u32 R) { return Rat(1, 4 * (Int(R) + 1)); }

ThresholdReport threshold_report(const DegreeProfile& profile,
                                 std::optional<Int> codim_f,
                                 std::optional<Int> codim_g) {
  const u32 D = profile.D;
  const Int R = profile.R;
  const Int calD = profile.weight;
  ThresholdReport rep;

  rep.n_min_theorem = Int(D) * D * ipow(4, D + 6) * ipow(R, 5);
  Int off = ipow(2, D - 1) * (D - 1) * R * (R + 1);
  Int block = (R + 1) * ipow(2, D - 1) * (D - 1);
  rep.iota1 = (calD - D + 1 + ipow(2, D + 3) * R * R * (R + 1)) * block + R + off;
  rep.iota2 = (calD - D + ipow(2, D + 3) * R * R * (R + 1) + 8 * R) * block + R + off;
  rep.iota3 = R * rep.iota2 + rep.iota1 + Int(D) * ipow(R, 3) + 2 * R * R + R;
  rep.varpi = varpi_of(profile.R);
  rep.remark_bound = Int(D) * D * ipow(4, D + 2) * ipow(R, 5);
  rep.remark_holds = rep.iota3 <= rep.remark_bound;

  Rat M = Rat(ipow(2, D - 1) + ipow(2, D - 1) * (D - 1) * R);
  Rat varpi = rep.varpi;
  std::vector<std::pair<std::string, Rat>> rhs = {
      {"i", (Rat(R + 1) * varpi + calD - D) * M + 1},
      {"ii", Rat(ipow(2, 2 * D + 2) * (D - 1) * R * R * (R + 1) * (R + 1) + 1)},
      {"iii", ((Rat(R + 1) + Rat(1, ipow(2, D) * R)) * varpi + calD - D) * M + 1},
      {"iv", Rat((8 * R + 8 + ipow(2, D + 3) * R * (R + 1) * (R + 1)) *
                 ipow(2, D - 1) * (D - 1) * R + 1)},
  };
  for (size_t i = 0; i < rhs.size(); ++i) {
    KappaCondition kc;
    kc.name = rhs[i].first;
    kc.rhs = rhs[i].second;
    const std::optional<Int>& codim = (i < 2) ? codim_f : codim_g;
    if (codim.has_value()) {
      kc.lhs = Rat(*codim - off);
      kc.pass = *kc.lhs >= kc.rhs;
    }
    rep.kappa.push_back(std::move(kc));
  }
  return rep;
}

}  // namespace primeforms
