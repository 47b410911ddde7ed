// Unit-solution counts, local densities, Gauss sums, singular series, Euler
// products, and Hensel witnesses.
//
// Counting routes:
//   * "enumerated": level-by-level lifting.  Solutions mod p^k are split into
//     a nonsingular count (each lifts to exactly p^{n-R} solutions one level
//     up, forever) and an explicit list of "survivors" whose reduction mod p
//     is singular; only survivors need re-examination.  An empty survivor
//     list at level k0 proves the density sequence is constant from k0 on.
//   * "counted": for variable-separable (diagonal) systems the joint value
//     distribution of F mod q is a convolution of per-variable distributions,
//     giving exact counts at moduli far beyond enumeration reach (no
//     stabilization claim).
//   * "certified-lift": a rank-R-at-every-unit-point certificate makes level
//     1 stabilization immediate; higher counts follow analytically.

#include "primeforms/local.hpp"
#include "primeforms/errors.hpp"
#include "primeforms/parallel.hpp"
#include "primeforms/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace primeforms {

namespace {

std::vector<u64> units_mod(u64 q) {
  if (q == 1) return {0};
  std::vector<u64> u;
  for (u64 a = 1; a < q; ++a) {
    if (std::gcd(a, q) == 1) u.push_back(a);
  }
  return u;
}

// q^R with overflow guard against the table budget.
u64 table_size(u64 q, u32 R, u64 budget) {
  unsigned __int128 t = 1;
  for (u32 i = 0; i < R; ++i) {
    t *= q;
    if (t > budget) return 0;
  }
  return static_cast<u64>(t);
}

u64 checked_prime_power(u64 p, u32 k) {
  unsigned __int128 t = 1;
  for (u32 i = 0; i < k; ++i) {
    t *= p;
    if (t > (1ull << 62)) {
      throw InputError("prime power " + std::to_string(p) + "^" + std::to_string(k) +
                       " exceeds the supported modulus range");
    }
  }
  return static_cast<u64>(t);
}

Int int_from_u128(unsigned __int128 v) {
  Int hi = static_cast<u64>(v >> 64);
  return (hi << 64) | Int(static_cast<u64>(v));
}

// Forms with coefficients reduced mod q, for fast repeated evaluation.
struct ModSystem {
  u64 q;
  std::vector<std::vector<std::pair<u64, const std::vector<u32>*>>> forms;
  explicit ModSystem(const System& sys, u64 qq) : q(qq) {
    for (const auto& f : sys.forms) {
      std::vector<std::pair<u64, const std::vector<u32>*>> mf;
      for (const auto& m : f.mono) {
        Int c = m.c % Int(q);
        if (c < 0) c += q;
        u64 cm = c.convert_to<u64>();
        if (cm != 0 || q == 1) mf.emplace_back(cm, &m.e);
      }
      forms.push_back(std::move(mf));
    }
  }
  // Evaluate form fi at x given a per-variable power table
  // pw[j*(D+1)+e] = x_j^e mod q.
  u64 eval(size_t fi, const std::vector<u64>& pw, u32 estride) const {
    u64 s = 0;
    for (const auto& [c, e] : forms[fi]) {
      u64 t = c;
      for (size_t j = 0; j < e->size() && t; ++j) {
        if ((*e)[j]) t = mul_mod(t, pw[j * estride + (*e)[j]], q);
      }
      s = add_mod(s, t, q);
    }
    return s;
  }
};

// Joint-value index packing: idx = sum_i v_i q^i.
struct Indexer {
  u64 q;
  u32 R;
  u64 size;
  u64 pack(const std::vector<u64>& v) const {
    u64 idx = 0;
    for (u32 i = R; i-- > 0;) idx = idx * q + v[i];
    return idx;
  }
  std::vector<u64> unpack(u64 idx) const {
    std::vector<u64> v(R);
    for (u32 i = 0; i < R; ++i) {
      v[i] = idx % q;
      idx /= q;
    }
    return v;
  }
};

// ----------------------------------------------- distribution: unit scan

std::vector<Int> scan_dist(const System& sys, u64 q, u64 budget) {
  const u32 n = sys.n;
  const u32 R = sys.R();
  std::vector<u64> units = units_mod(q);
  const u64 nu = units.size();
  // phi(q)^n feasibility.
  Int total = ipow(Int(nu), n);
  if (total > budget) {
    throw BudgetError("unit scan needs " + total.str() + " points at q = " +
                      std::to_string(q) + ", budget is " + std::to_string(budget));
  }
  Indexer ix{q, R, table_size(q, R, budget)};
  if (ix.size == 0) {
    throw BudgetError("value table q^R too large at q = " + std::to_string(q));
  }
  ModSystem ms(sys, q);
  u32 D = sys.max_degree();
  u32 estride = D + 1;
  // Power tables for every unit value.
  std::vector<u64> upow(nu * estride);
  for (u64 ui = 0; ui < nu; ++ui) {
    upow[ui * estride] = 1 % q;
    for (u32 e = 1; e <= D; ++e) {
      upow[ui * estride + e] = mul_mod(upow[ui * estride + e - 1], units[ui], q);
    }
  }
  std::vector<Int> dist(ix.size, Int(0));
  std::vector<u64> digit(n, 0);       // odometer over unit indices
  std::vector<u64> pw(n * estride);
  auto load_pw = [&](u32 j) {
    std::copy_n(upow.begin() + digit[j] * estride, estride, pw.begin() + j * estride);
  };
  for (u32 j = 0; j < n; ++j) load_pw(j);
  std::vector<u64> v(R);
  u64 count = total.convert_to<u64>();
  for (u64 it = 0; it < count; ++it) {
    for (u32 i = 0; i < R; ++i) v[i] = ms.eval(i, pw, estride);
    dist[ix.pack(v)] += 1;
    // Advance odometer.
    for (u32 j = 0; j < n; ++j) {
      if (++digit[j] < nu) {
        load_pw(j);
        break;
      }
      digit[j] = 0;
      load_pw(j);
    }
  }
  return dist;
}

// --------------------------------------- distribution: diagonal convolution

// Coefficient of x_j^{deg(form i)} in form i; 0 when x_j is absent.
std::vector<std::vector<Int>> diagonal_coefficients(const System& sys) {
  std::vector<std::vector<Int>> c(sys.R(), std::vector<Int>(sys.n, 0));
  for (size_t i = 0; i < sys.forms.size(); ++i) {
    for (const auto& m : sys.forms[i].mono) {
      for (size_t j = 0; j < m.e.size(); ++j) {
        if (m.e[j]) c[i][j] = m.c;
      }
    }
  }
  return c;
}

template <typename Cell>
std::vector<Cell> conv_dist_kernel(const System& sys, u64 q, const Indexer& ix,
                                   const std::vector<u64>& units) {
  const u32 R = sys.R();
  auto coef = diagonal_coefficients(sys);
  std::vector<u64> cmod(R * sys.n);
  for (u32 i = 0; i < R; ++i) {
    for (u32 j = 0; j < sys.n; ++j) {
      Int c = coef[i][j] % Int(q);
      if (c < 0) c += q;
      cmod[i * sys.n + j] = c.convert_to<u64>();
    }
  }
  std::vector<Cell> acc(ix.size, Cell(0)), next(ix.size, Cell(0));
  acc[0] = Cell(1);
  std::vector<u64> v(R), w(R);
  for (u32 j = 0; j < sys.n; ++j) {
    // Tally the value vector contributed by x_j = a over units a.
    std::map<u64, u64> tally;
    for (u64 a : units) {
      for (u32 i = 0; i < R; ++i) {
        w[i] = mul_mod(cmod[i * sys.n + j], pow_mod(a, sys.forms[i].degree, q), q);
      }
      tally[ix.pack(w)] += 1;
    }
    std::fill(next.begin(), next.end(), Cell(0));
    for (const auto& [sidx, mult] : tally) {
      std::vector<u64> s = ix.unpack(sidx);
      // Walk all v with a digit odometer, adding the shift digitwise mod q.
      std::fill(v.begin(), v.end(), 0);
      for (u64 vi = 0; vi < ix.size; ++vi) {
        u64 target = 0;
        for (u32 i = R; i-- > 0;) {
          u64 d = v[i] + s[i];
          if (d >= q) d -= q;
          target = target * q + d;
        }
        next[target] += acc[vi] * Cell(mult);
        for (u32 i = 0; i < R; ++i) {
          if (++v[i] < q) break;
          v[i] = 0;
        }
      }
    }
    acc.swap(next);
  }
  return acc;
}

std::vector<Int> conv_dist(const System& sys, u64 q, u64 budget) {
  const u32 R = sys.R();
  Indexer ix{q, R, table_size(q, R, budget)};
  if (ix.size == 0) {
    throw BudgetError("value table q^R exceeds budget at q = " + std::to_string(q));
  }
  std::vector<u64> units = units_mod(q);
  // Cell values never exceed phi(q)^n; pick the cheapest sufficient type.
  Int bound = ipow(Int(units.size()), sys.n);
  std::vector<Int> dist;
  if (bound < (Int(1) << 63)) {
    auto cells = conv_dist_kernel<u64>(sys, q, ix, units);
    dist.assign(cells.begin(), cells.end());
  } else if (bound < (Int(1) << 126)) {
    auto cells = conv_dist_kernel<unsigned __int128>(sys, q, ix, units);
    dist.reserve(cells.size());
    for (auto c : cells) dist.push_back(int_from_u128(c));
  } else {
    dist = conv_dist_kernel<Int>(sys, q, ix, units);
  }
  return dist;
}

}  // namespace

std::vector<Int> value_distribution(const System& sys, u64 q, u64 budget) {
  if (q == 0) throw InputError("modulus must be positive");
  if (sys.diagonal()) return conv_dist(sys, q, budget);
  return scan_dist(sys, q, budget);
}

// ------------------------------------------------------------- linear solve

std::vector<std::vector<u64>> solve_linear_mod_p(
    std::vector<std::vector<u64>> A, std::vector<u64> b, u64 p,
    u64 max_solutions) {
  const size_t rows = A.size();
  const size_t n = rows ? A[0].size() : 0;
  // Reduced row echelon form of [A | b].
  std::vector<size_t> pivot_col;
  size_t row = 0;
  for (size_t col = 0; col < n && row < rows; ++col) {
    size_t piv = row;
    while (piv < rows && A[piv][col] % p == 0) ++piv;
    if (piv == rows) continue;
    std::swap(A[piv], A[row]);
    std::swap(b[piv], b[row]);
    u64 inv = pow_mod(A[row][col] % p, p - 2, p);
    for (size_t c = col; c < n; ++c) A[row][c] = mul_mod(A[row][c], inv, p);
    b[row] = mul_mod(b[row], inv, p);
    for (size_t r = 0; r < rows; ++r) {
      if (r == row) continue;
      u64 f = A[r][col] % p;
      if (f == 0) continue;
      for (size_t c = col; c < n; ++c) {
        A[r][c] = (A[r][c] + p - mul_mod(f, A[row][c], p)) % p;
      }
      b[r] = (b[r] + p - mul_mod(f, b[row], p)) % p;
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (size_t r = row; r < rows; ++r) {
    if (b[r] % p != 0) return {};   // inconsistent
  }
  std::vector<bool> is_pivot(n, false);
  for (size_t c : pivot_col) is_pivot[c] = true;
  std::vector<size_t> free_cols;
  for (size_t c = 0; c < n; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }
  unsigned __int128 total = 1;
  for (size_t i = 0; i < free_cols.size(); ++i) {
    total *= p;
    if (total > max_solutions) {
      throw BudgetError("linear system has too many solutions to enumerate");
    }
  }
  std::vector<std::vector<u64>> out;
  out.reserve(static_cast<size_t>(total));
  std::vector<u64> fv(free_cols.size(), 0);
  for (u64 it = 0; it < static_cast<u64>(total); ++it) {
    std::vector<u64> t(n, 0);
    for (size_t i = 0; i < free_cols.size(); ++i) t[free_cols[i]] = fv[i];
    for (size_t r = 0; r < pivot_col.size(); ++r) {
      u64 val = b[r];
      for (size_t c : free_cols) {
        val = (val + p - mul_mod(A[r][c] % p, t[c], p)) % p;
      }
      t[pivot_col[r]] = val;
    }
    out.push_back(std::move(t));
    for (size_t i = 0; i < free_cols.size(); ++i) {
      if (++fv[i] < p) break;
      fv[i] = 0;
    }
  }
  return out;
}

// ----------------------------------------------------------- level counting

namespace {

struct Level1 {
  Int nonsingular = 0;
  std::vector<std::vector<u64>> survivors;   // singular solutions mod p
  std::optional<std::vector<u64>> witness;   // first nonsingular solution
};

std::vector<std::vector<SparsePoly>> all_gradients(const System& sys) {
  std::vector<std::vector<SparsePoly>> g;
  for (const auto& f : sys.forms) g.push_back(gradient(f));
  return g;
}

u32 point_jacobian_rank(const std::vector<std::vector<SparsePoly>>& grads,
                        const std::vector<u64>& x, u64 p,
                        std::vector<std::vector<u64>>* out = nullptr) {
  std::vector<std::vector<u64>> m(grads.size(), std::vector<u64>(x.size(), 0));
  for (size_t i = 0; i < grads.size(); ++i) {
    for (size_t j = 0; j < x.size(); ++j) m[i][j] = evaluate_mod(grads[i][j], x, p);
  }
  if (out) *out = m;
  // Row echelon over F_p.
  u32 rank = 0;
  size_t rows = m.size(), cols = rows ? m[0].size() : 0, row = 0;
  for (size_t col = 0; col < cols && row < rows; ++col) {
    size_t piv = row;
    while (piv < rows && m[piv][col] % p == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[row]);
    u64 inv = pow_mod(m[row][col] % p, p - 2, p);
    for (size_t r = row + 1; r < rows; ++r) {
      u64 f = mul_mod(m[r][col] % p, inv, p);
      if (!f) continue;
      for (size_t c = col; c < cols; ++c) {
        m[r][c] = (m[r][c] + p - mul_mod(f, m[row][c], p)) % p;
      }
    }
    ++row;
    ++rank;
  }
  return rank;
}

// Exhaustive scan of unit vectors mod p: split solutions into a nonsingular
// count and the explicit singular list.  Requires phi(p)^n <= budget.
std::optional<Level1> enumerate_level1(const System& sys, u64 p, u64 budget) {
  std::vector<u64> units = units_mod(p);
  Int total = ipow(Int(units.size()), sys.n);
  if (total > budget) return std::nullopt;
  auto grads = all_gradients(sys);
  ModSystem ms(sys, p);
  const u32 n = sys.n;
  const u32 R = sys.R();
  u32 estride = sys.max_degree() + 1;
  std::vector<u64> upow(units.size() * estride);
  for (u64 ui = 0; ui < units.size(); ++ui) {
    upow[ui * estride] = 1 % p;
    for (u32 e = 1; e < estride; ++e) {
      upow[ui * estride + e] = mul_mod(upow[ui * estride + e - 1], units[ui], p);
    }
  }
  Level1 out;
  std::vector<u64> digit(n, 0);
  std::vector<u64> pw(n * estride);
  for (u32 j = 0; j < n; ++j) {
    std::copy_n(upow.begin() + digit[j] * estride, estride, pw.begin() + j * estride);
  }
  u64 count = total.convert_to<u64>();
  std::vector<u64> x(n);
  for (u64 it = 0; it < count; ++it) {
    bool zero = true;
    for (u32 i = 0; i < R && zero; ++i) zero = (ms.eval(i, pw, estride) == 0);
    if (zero) {
      for (u32 j = 0; j < n; ++j) x[j] = units[digit[j]];
      if (point_jacobian_rank(grads, x, p) == R) {
        out.nonsingular += 1;
        if (!out.witness) out.witness = x;
      } else {
        if (out.survivors.size() >= budget) return std::nullopt;
        out.survivors.push_back(x);
      }
    }
    for (u32 j = 0; j < n; ++j) {
      if (++digit[j] < units.size()) {
        std::copy_n(upow.begin() + digit[j] * estride, estride, pw.begin() + j * estride);
        break;
      }
      digit[j] = 0;
      std::copy_n(upow.begin() + digit[j] * estride, estride, pw.begin() + j * estride);
    }
  }
  return out;
}

// Lift singular survivors from level k-1 to level k (k >= 2):
// x = x0 + p^{k-1} t solves F = 0 mod p^k iff  J(x0) t = -F(x0)/p^{k-1} mod p.
std::optional<std::vector<std::vector<u64>>> lift_survivors(
    const System& sys, const std::vector<std::vector<SparsePoly>>& grads,
    u64 p, u32 k, const std::vector<std::vector<u64>>& prev, u64 budget) {
  u64 pk = checked_prime_power(p, k);
  u64 pk1 = pk / p;
  std::vector<std::vector<u64>> out;
  for (const auto& x0 : prev) {
    std::vector<std::vector<u64>> A;
    point_jacobian_rank(grads, x0, p, &A);
    std::vector<u64> b(sys.R());
    for (u32 i = 0; i < sys.R(); ++i) {
      u64 val = evaluate_mod(sys.forms[i], x0, pk);
      if (val % pk1 != 0) {
        throw InternalError("survivor does not solve the previous level");
      }
      b[i] = (p - (val / pk1) % p) % p;
    }
    std::vector<std::vector<u64>> ts;
    try {
      ts = solve_linear_mod_p(A, b, p, budget);
    } catch (const BudgetError&) {
      return std::nullopt;
    }
    if (out.size() + ts.size() > budget) return std::nullopt;
    for (const auto& t : ts) {
      std::vector<u64> x(x0);
      for (u32 j = 0; j < sys.n; ++j) x[j] += pk1 * t[j];
      out.push_back(std::move(x));
    }
  }
  return out;
}

}  // namespace

bool unit_jacobian_certificate(const System& sys, u64 p) {
  if (!sys.diagonal()) return false;
  auto coef = diagonal_coefficients(sys);
  const u32 R = sys.R();
  // Look for R distinct variables, the i-th used by form i alone, whose
  // diagonal Jacobian entry d_i * c_ij is a unit mod p.
  std::vector<bool> used(sys.n, false);
  for (u32 i = 0; i < R; ++i) {
    bool found = false;
    for (u32 j = 0; j < sys.n && !found; ++j) {
      if (used[j] || coef[i][j] == 0) continue;
      bool pure = true;
      for (u32 i2 = 0; i2 < R; ++i2) {
        if (i2 != i && coef[i2][j] != 0) pure = false;
      }
      if (!pure) continue;
      Int entry = coef[i][j] * sys.forms[i].degree;
      if (entry % Int(p) != 0) {
        used[j] = true;
        found = true;
      }
    }
    if (!found) return false;
  }
  return true;
}

LevelCounts level_counts(const System& sys, u64 p, u32 k_max, u64 budget) {
  if (!is_prime_u64(p)) throw InputError(std::to_string(p) + " is not prime");
  if (k_max < 1) throw InputError("k_max must be at least 1");
  LevelCounts lc;
  lc.p = p;
  const u32 n = sys.n;
  const u32 R = sys.R();
  Int lift_factor = ipow(Int(p), n - R);

  // Route 1: certificate makes every unit point nonsingular mod p.
  if (unit_jacobian_certificate(sys, p)) {
    Int n1 = value_distribution(sys, p, budget)[0];
    lc.route = "certified-lift";
    lc.all_nonsingular_from = 1;
    lc.counts.resize(k_max);
    lc.counts[0] = n1;
    for (u32 k = 2; k <= k_max; ++k) lc.counts[k - 1] = lc.counts[k - 2] * lift_factor;
    lc.computed_to = k_max;
    return lc;
  }

  // Route 2: explicit enumeration with survivor tracking.
  auto l1 = enumerate_level1(sys, p, budget);
  if (l1) {
    lc.route = "enumerated";
    lc.counts.push_back(l1->nonsingular + Int(l1->survivors.size()));
    lc.computed_to = 1;
    Int ns = l1->nonsingular;
    std::vector<std::vector<u64>> survivors = std::move(l1->survivors);
    auto grads = all_gradients(sys);
    if (survivors.empty()) lc.all_nonsingular_from = 1;
    for (u32 k = 2; k <= k_max; ++k) {
      if (lc.all_nonsingular_from) {
        lc.counts.push_back(lc.counts.back() * lift_factor);
        lc.computed_to = k;
        continue;
      }
      std::optional<std::vector<std::vector<u64>>> lifted;
      try {
        lifted = lift_survivors(sys, grads, p, k, survivors, budget);
      } catch (const InputError&) {
        lifted = std::nullopt;   // modulus p^k left the machine range
      }
      if (!lifted) {
        // Survivor list outgrew the budget; fall through to counting if the
        // shape allows, otherwise stop with the partial sequence.
        break;
      }
      survivors = std::move(*lifted);
      ns *= lift_factor;
      lc.counts.push_back(ns + Int(survivors.size()));
      lc.computed_to = k;
      if (survivors.empty()) lc.all_nonsingular_from = k;
    }
    if (lc.computed_to == k_max) return lc;
  }

  // Route 3: pure counting via the value distribution at p^k.
  if (sys.diagonal()) {
    lc.route = lc.computed_to ? "enumerated+counted" : "counted";
    for (u32 k = lc.computed_to + 1; k <= k_max; ++k) {
      u64 pk;
      try {
        pk = checked_prime_power(p, k);
        lc.counts.push_back(value_distribution(sys, pk, budget)[0]);
      } catch (const BudgetError&) {
        lc.budget_exhausted = true;
        return lc;
      } catch (const InputError&) {
        lc.budget_exhausted = true;
        return lc;
      }
      lc.computed_to = k;
    }
    return lc;
  }

  lc.budget_exhausted = lc.computed_to < k_max;
  if (lc.computed_to == 0) lc.route = "infeasible";
  return lc;
}

UnitCount count_unit_solutions(const System& sys, u64 q, u64 budget) {
  if (q == 0) throw InputError("modulus must be positive");
  UnitCount uc;
  uc.q = q;
  uc.value = 1;
  for (auto [p, k] : factorize(q)) {
    LevelCounts lc = level_counts(sys, p, static_cast<u32>(k), budget);
    if (lc.computed_to < static_cast<u32>(k)) {
      throw BudgetError("count at " + std::to_string(p) + "^" + std::to_string(k) +
                        " exceeds the scan budget " + std::to_string(budget) +
                        " (no estimate is substituted)");
    }
    uc.value *= lc.counts[k - 1];
  }
  return uc;
}

LocalDensity local_density(const System& sys, u64 p, u32 k_max, u64 budget) {
  LevelCounts lc = level_counts(sys, p, k_max, budget);
  LocalDensity ld;
  ld.p = p;
  ld.route = lc.route;
  ld.budget_exhausted = lc.budget_exhausted;
  Int phi_pk = p - 1;                       // phi(p^k), grown per level
  for (u32 k = 1; k <= lc.computed_to; ++k) {
    if (k > 1) phi_pk *= p;
    ld.values.push_back(Rat(ipow(Int(p), sys.R() * k) * lc.counts[k - 1],
                            ipow(phi_pk, sys.n)));
  }
  if (lc.all_nonsingular_from && *lc.all_nonsingular_from <= lc.computed_to) {
    ld.stabilized = true;
    ld.stabilization_k = lc.all_nonsingular_from;
  }
  // A vanishing count at some level forces zero forever (solutions at level
  // k+1 reduce to solutions at level k), which also attains the limit.
  for (u32 k = 1; k <= lc.computed_to; ++k) {
    if (lc.counts[k - 1] == 0) {
      if (!ld.stabilized || *ld.stabilization_k > k) {
        ld.stabilized = true;
        ld.stabilization_k = k;
      }
      // Extend the (constant zero) sequence to k_max for clarity.
      while (ld.values.size() < k_max) ld.values.push_back(Rat(0));
      break;
    }
  }
  return ld;
}

// ---------------------------------------------------------------- Gauss sums

GaussSumValue gauss_sum(const System& sys, u64 q, const std::vector<u64>& a,
                        u64 budget) {
  if (a.size() != sys.R()) throw InputError("a-vector length must equal R");
  std::vector<Int> dist = value_distribution(sys, q, budget);
  std::vector<CQuad> roots = root_table(q);
  GaussSumValue gs;
  gs.q = q;
  gs.a = a;
  CQuad acc{};
  std::vector<u64> v(sys.R(), 0);
  for (u64 vi = 0; vi < dist.size(); ++vi) {
    if (dist[vi] != 0) {
      u64 phase = 0;
      for (u32 i = 0; i < sys.R(); ++i) phase = (phase + mul_mod(a[i] % q, v[i], q)) % q;
      Quad w(dist[vi].str());
      acc += roots[phase] * w;
    }
    for (u32 i = 0; i < sys.R(); ++i) {
      if (++v[i] < q) break;
      v[i] = 0;
    }
  }
  gs.value = acc;
  return gs;
}

std::vector<CQuad> gauss_sum_table(const System& sys, u64 q, u64 budget) {
  std::vector<Int> dist = value_distribution(sys, q, budget);
  const u64 sz = dist.size();
  if (sz > budget / std::max<u64>(sz, 1)) {
    throw BudgetError("Gauss-sum table q^{2R} exceeds budget at q = " + std::to_string(q));
  }
  std::vector<CQuad> roots = root_table(q);
  // Quad copies of the distribution (value magnitudes are exact in 113 bits
  // far beyond any feasible phi(q)^n here).
  std::vector<Quad> dq(sz);
  for (u64 i = 0; i < sz; ++i) dq[i] = Quad(dist[i].str());
  std::vector<CQuad> table(sz);
  std::vector<u64> a(sys.R(), 0);
  for (u64 ai = 0; ai < sz; ++ai) {
    CQuad acc{};
    std::vector<u64> v(sys.R(), 0);
    for (u64 vi = 0; vi < sz; ++vi) {
      if (dist[vi] != 0) {
        u64 phase = 0;
        for (u32 i = 0; i < sys.R(); ++i) phase = (phase + mul_mod(a[i], v[i], q)) % q;
        acc += roots[phase] * dq[vi];
      }
      for (u32 i = 0; i < sys.R(); ++i) {
        if (++v[i] < q) break;
        v[i] = 0;
      }
    }
    table[ai] = acc;
    for (u32 i = 0; i < sys.R(); ++i) {
      if (++a[i] < q) break;
      a[i] = 0;
    }
  }
  return table;
}

// --------------------------------------------------------------------- B(q)

Int ramanujan_sum(u64 q, u64 g, u32 R) {
  // sum over d | gcd(g, q) of mu(q/d) d^R.
  Int s = 0;
  u64 gg = std::gcd(g, q);
  for (u64 d : divisors(gg)) {
    int mu = mobius(q / d);
    if (mu) s += Int(mu) * ipow(Int(d), R);
  }
  return s;
}

namespace {

// The dagger sum over a regroups into Ramanujan sums of the value
// v = F(h) mod q; the weight depends only on gcd(v, q), so one pass over the
// value distribution gives B(q) exactly.
Int exact_dagger_sum(const System& sys, const std::vector<Int>& dist, u64 q) {
  std::map<u64, Int> weight;
  for (u64 g : divisors(q)) weight[g] = ramanujan_sum(q, g, sys.R());
  Int exact = 0;
  std::vector<u64> v(sys.R(), 0);
  for (u64 vi = 0; vi < dist.size(); ++vi) {
    if (dist[vi] != 0) {
      u64 g = q;
      for (u32 i = 0; i < sys.R(); ++i) g = std::gcd(g, v[i]);
      exact += dist[vi] * weight[g];
    }
    for (u32 i = 0; i < sys.R(); ++i) {
      if (++v[i] < q) break;
      v[i] = 0;
    }
  }
  return exact;
}

}  // namespace

BValue B_of_q(const System& sys, u64 q, u64 budget) {
  BValue bv;
  bv.q = q;
  std::vector<Int> dist = value_distribution(sys, q, budget);
  bv.exact = exact_dagger_sum(sys, dist, q);
  bv.value = to_double(bv.exact);

  // Phase-accumulated route over dagger a, when q^{2R} fits the budget.
  unsigned __int128 cost = 1;
  for (u32 i = 0; i < 2 * sys.R(); ++i) cost *= q;
  if (cost <= budget) {
    std::vector<CQuad> roots = root_table(q);
    std::vector<Quad> dq(dist.size());
    for (u64 i = 0; i < dist.size(); ++i) dq[i] = Quad(dist[i].str());
    CQuad acc{};
    std::vector<u64> a(sys.R(), 0);
    for (u64 ai = 0; ai < dist.size(); ++ai) {
      u64 g = q;
      for (u32 i = 0; i < sys.R(); ++i) g = std::gcd(g, a[i]);
      if (g == 1) {
        std::vector<u64> v(sys.R(), 0);
        for (u64 vi = 0; vi < dist.size(); ++vi) {
          if (dist[vi] != 0) {
            u64 phase = 0;
            for (u32 i = 0; i < sys.R(); ++i) phase = (phase + mul_mod(a[i], v[i], q)) % q;
            acc += roots[phase] * dq[vi];
          }
          for (u32 i = 0; i < sys.R(); ++i) {
            if (++v[i] < q) break;
            v[i] = 0;
          }
        }
      }
      for (u32 i = 0; i < sys.R(); ++i) {
        if (++a[i] < q) break;
        a[i] = 0;
      }
    }
    bv.phase_path = true;
    bv.value = to_double(acc.re);
    bv.im = to_double(acc.im);
  }
  return bv;
}

// ---------------------------------------------------------- singular series

SeriesTruncation singular_series(const System& sys, u64 H, u64 budget,
                                 int threads) {
  if (H < 1) throw InputError("series cutoff must be at least 1");
  SeriesTruncation st;
  st.H = H;
  st.tail_note = "expected remainder decay ~ H^(-1/2+eps)";
  std::vector<Rat> terms(H);
  terms[0] = Rat(1);
  // Terms are independent; compute them in parallel, then sum in q order.
  struct Unit {};
  parallel_reduce<Unit>(
      H - 1, 4, threads, Unit{},
      [&](u64 lo, u64 hi) {
        for (u64 i = lo; i < hi; ++i) {
          u64 q = i + 2;
          std::vector<Int> dist = value_distribution(sys, q, budget);
          terms[q - 1] = Rat(exact_dagger_sum(sys, dist, q),
                             ipow(Int(euler_phi(q)), sys.n));
        }
        return Unit{};
      },
      [](const Unit&, const Unit&) { return Unit{}; });
  st.partial_exact = 0;
  st.terms.resize(H);
  for (u64 q = 1; q <= H; ++q) {
    st.partial_exact += terms[q - 1];
    st.terms[q - 1] = to_double(terms[q - 1]);
  }
  st.partial = to_double(st.partial_exact);

  // Empirical decay of the remainder |partial(H) - partial(H')|.
  std::vector<double> xs, ys;
  double prefix = 0;
  std::vector<double> prefixes(H);
  for (u64 q = 1; q <= H; ++q) {
    prefix += st.terms[q - 1];
    prefixes[q - 1] = prefix;
  }
  for (u64 hp = std::max<u64>(2, H / 4); hp < H; ++hp) {
    double tail = std::abs(st.partial - prefixes[hp - 1]);
    if (tail > 0) {
      xs.push_back(std::log(static_cast<double>(hp)));
      ys.push_back(std::log(tail));
    }
  }
  if (xs.size() >= 5) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < xs.size(); ++i) { mx += xs[i]; my += ys[i]; }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    st.fitted_decay_exponent = sxx > 0 ? sxy / sxx : std::nan("");
  } else {
    st.fitted_decay_exponent = std::nan("");
  }
  return st;
}

// ------------------------------------------------------------ Euler product

EulerProduct euler_product(const System& sys, u64 p_max, u32 k_max, u64 budget) {
  if (p_max < 2) throw InputError("p_max must be at least 2");
  EulerProduct ep;
  ep.value = 1.0;
  for (u64 p = 2; p <= p_max; ++p) {
    if (!is_prime_u64(p)) continue;
    LocalDensity ld = local_density(sys, p, k_max, budget);
    EulerFactor f;
    f.p = p;
    f.stabilized = ld.stabilized;
    f.stabilization_k = ld.stabilization_k;
    if (ld.values.empty()) {
      throw BudgetError("local density at p = " + std::to_string(p) +
                        " could not be computed within budget");
    }
    f.value = ld.stabilized && ld.stabilization_k
                  ? ld.values[std::min<size_t>(*ld.stabilization_k, ld.values.size()) - 1]
                  : ld.values.back();
    if (!ld.stabilized) ep.provisional = true;
    if (f.value == 0 && !ep.obstruction_prime) ep.obstruction_prime = p;
    ep.value *= to_double(f.value);
    ep.factors.push_back(std::move(f));
  }
  return ep;
}

// ------------------------------------------------------------- Hensel check

HenselWitness hensel_check(const System& sys, u64 p, u32 k_budget, u64 budget,
                           u64 seed) {
  if (!is_prime_u64(p)) throw InputError(std::to_string(p) + " is not prime");
  HenselWitness hw;
  hw.p = p;
  const u32 R = sys.R();
  auto l1 = enumerate_level1(sys, p, budget);
  if (l1) {
    hw.exhaustive = true;
    if (l1->witness) {
      hw.outcome = HenselWitness::Outcome::Witness;
      hw.k = 1;
      hw.h = *l1->witness;
      hw.note = "nonsingular unit solution mod p; lifts to a p-adic unit zero";
      return hw;
    }
    if (l1->survivors.empty()) {
      hw.outcome = HenselWitness::Outcome::Obstruction;
      hw.k = 1;
      hw.note = "no unit solutions mod p (exhaustive)";
      return hw;
    }
    // Solutions exist but every one is singular mod p; push the exhaustive
    // emptiness test deeper by lifting.
    auto grads = all_gradients(sys);
    std::vector<std::vector<u64>> survivors = std::move(l1->survivors);
    for (u32 k = 2; k <= k_budget; ++k) {
      std::optional<std::vector<std::vector<u64>>> lifted;
      try {
        lifted = lift_survivors(sys, grads, p, k, survivors, budget);
      } catch (const InputError&) {
        lifted = std::nullopt;
      }
      if (!lifted) {
        hw.outcome = HenselWitness::Outcome::Inconclusive;
        hw.k = k - 1;
        hw.note = "singular solution set outgrew the budget before level " +
                  std::to_string(k);
        return hw;
      }
      survivors = std::move(*lifted);
      if (survivors.empty()) {
        hw.outcome = HenselWitness::Outcome::Obstruction;
        hw.k = k;
        hw.note = "unit solutions exist mod p^" + std::to_string(k - 1) +
                  " but none mod p^" + std::to_string(k) + " (exhaustive)";
        return hw;
      }
    }
    hw.outcome = HenselWitness::Outcome::Inconclusive;
    hw.k = k_budget;
    hw.note = "singular solutions persist through level " + std::to_string(k_budget) +
              "; no nonsingular unit point mod p";
    return hw;
  }

  // Randomized witness hunt; can never certify an obstruction.
  hw.exhaustive = false;
  std::vector<u64> units = units_mod(p);
  auto grads = all_gradients(sys);
  u64 samples = std::min<u64>(budget, 200000);
  std::vector<u64> x(sys.n);
  for (u64 i = 0; i < samples; ++i) {
    for (u32 j = 0; j < sys.n; ++j) {
      x[j] = units[rng_below(seed, i, j, units.size())];
    }
    bool zero = true;
    for (u32 fi = 0; fi < R && zero; ++fi) {
      zero = (evaluate_mod(sys.forms[fi], x, p) == 0);
    }
    if (zero && point_jacobian_rank(grads, x, p) == R) {
      hw.outcome = HenselWitness::Outcome::Witness;
      hw.k = 1;
      hw.h = x;
      hw.note = "nonsingular unit solution found by random search";
      return hw;
    }
  }
  hw.outcome = HenselWitness::Outcome::Inconclusive;
  hw.k = 1;
  hw.note = "randomized search found no witness in " + std::to_string(samples) +
            " samples";
  return hw;
}

}  // namespace primeforms
