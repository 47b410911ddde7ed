// Sieve, exact prime-solution counts, exponential sums, arc classification,
// and the empirical decay probes.

#include "primeforms/count.hpp"
#include "primeforms/errors.hpp"
#include "primeforms/local.hpp"
#include "primeforms/parallel.hpp"
#include "primeforms/profile.hpp"
#include "primeforms/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>

namespace primeforms {

// -------------------------------------------------------------------- sieve

double LambdaTable::sum() const {
  double s = 0;
  for (u64 m = 2; m <= P && m < lambda.size(); ++m) s += lambda[m];
  return s;
}

LambdaTable sieve_lambda(u64 P) {
  if (P < 2) throw InputError("sieve bound must be at least 2");
  if (P > 200'000'000) {
    throw BudgetError("sieve bound " + std::to_string(P) +
                      " exceeds the memory budget (2e8)");
  }
  LambdaTable t;
  t.P = P;
  t.lambda.assign(P + 1, 0.0);
  t.tag.assign(P + 1, 0);
  // Base primes up to sqrt(P).
  u64 root = static_cast<u64>(std::sqrt(static_cast<double>(P))) + 1;
  while (root * root > P) --root;
  std::vector<bool> base(root + 1, true);
  std::vector<u64> base_primes;
  for (u64 m = 2; m <= root; ++m) {
    if (!base[m]) continue;
    base_primes.push_back(m);
    for (u64 k = m * m; k <= root; k += m) base[k] = false;
  }
  // Segmented sweep over (root, P].
  const u64 seg = 1u << 20;
  std::vector<bool> mark;
  t.primes = base_primes;
  for (u64 lo = root + 1; lo <= P; lo += seg) {
    u64 hi = std::min(P, lo + seg - 1);
    mark.assign(hi - lo + 1, true);
    for (u64 p : base_primes) {
      u64 start = std::max(p * p, (lo + p - 1) / p * p);
      for (u64 k = start; k <= hi; k += p) mark[k - lo] = false;
    }
    for (u64 m = lo; m <= hi; ++m) {
      if (mark[m - lo]) t.primes.push_back(m);
    }
  }
  for (u64 p : t.primes) {
    double lp = std::log(static_cast<double>(p));
    t.lambda[p] = lp;
    t.tag[p] = 1;
    for (u64 m = p; m <= P / p;) {
      m *= p;
      t.lambda[m] = lp;
      t.tag[m] = 2;
    }
  }
  return t;
}

// ----------------------------------------------------------- count internals

namespace {

struct Support {
  std::vector<u64> values;     // prime powers in (lo*P, hi*P], ascending
  std::vector<double> lam;
  std::vector<u8> prime;       // 1 iff a genuine prime
};

std::vector<Support> box_support(const Box& box, u64 P, const LambdaTable& t) {
  std::vector<Support> sup(box.lo.size());
  for (size_t j = 0; j < box.lo.size(); ++j) {
    u64 lo = static_cast<u64>(std::floor(box.lo[j] * P)) + 1;
    u64 hi = static_cast<u64>(std::floor(box.hi[j] * P));
    for (u64 m = std::max<u64>(lo, 2); m <= hi; ++m) {
      if (t.lambda[m] > 0) {
        sup[j].values.push_back(m);
        sup[j].lam.push_back(t.lambda[m]);
        sup[j].prime.push_back(t.tag[m] == 1 ? 1 : 0);
      }
    }
  }
  return sup;
}

// Integer evaluation strategy: plain i64 when the worst-case magnitude fits,
// exact big integers otherwise.  Owns its polynomial copy: the narrow path
// keeps raw pointers into `polys`, so the source must not be a temporary
// that dies under us.
struct IntEval {
  std::vector<SparsePoly> polys;
  bool narrow;
  std::vector<std::vector<std::pair<i64, const std::vector<u32>*>>> narrow_forms;
  const System* sys;

  IntEval(const System& s, std::vector<SparsePoly> ps, u64 xmax)
      : polys(std::move(ps)), sys(&s) {
    Int worst = 0;
    for (const auto& p : polys) {
      Int b = 0;
      for (const auto& m : p.mono) b += abs(m.c) * ipow(Int(xmax), m.total_degree());
      worst = std::max(worst, b);
    }
    narrow = worst < (Int(1) << 62);
    if (narrow) {
      for (const auto& p : polys) {
        std::vector<std::pair<i64, const std::vector<u32>*>> f;
        for (const auto& m : p.mono) f.emplace_back(m.c.convert_to<i64>(), &m.e);
        narrow_forms.push_back(std::move(f));
      }
    }
  }

  i64 eval_narrow(size_t i, const std::vector<u64>& x) const {
    i64 s = 0;
    for (const auto& [c, e] : narrow_forms[i]) {
      i64 term = c;
      for (size_t j = 0; j < e->size(); ++j) {
        for (u32 k = 0; k < (*e)[j]; ++k) term *= static_cast<i64>(x[j]);
      }
      s += term;
    }
    return s;
  }
  Int eval_wide(size_t i, const std::vector<u64>& x) const {
    std::vector<Int> xi(x.begin(), x.end());
    return evaluate(polys[i], xi);
  }
};

std::vector<SparsePoly> forms_as_polys(const System& sys) {
  std::vector<SparsePoly> out;
  for (const auto& f : sys.forms) {
    SparsePoly p;
    p.mono = f.mono;
    out.push_back(std::move(p));
  }
  return out;
}

struct Sol {
  std::vector<u64> x;
  double w;
  bool all_prime;
};

void finish_count(CountResult& res, std::vector<Sol>& sols, u64 solution_cap) {
  std::sort(sols.begin(), sols.end(),
            [](const Sol& a, const Sol& b) { return a.x < b.x; });
  double weighted = 0;
  u64 unweighted = 0;
  for (const auto& s : sols) {
    weighted += s.w;
    if (s.all_prime) ++unweighted;
  }
  res.weighted = weighted;
  res.unweighted = unweighted;
  res.total_solutions = sols.size();
  res.solutions_truncated = sols.size() > solution_cap;
  u64 keep = std::min<u64>(solution_cap, sols.size());
  res.solutions.reserve(keep);
  for (u64 i = 0; i < keep; ++i) res.solutions.push_back(sols[i].x);
}

constexpr u64 kSolutionMemoryCap = 4'000'000;

u64 support_max(const std::vector<Support>& sup) {
  u64 m = 2;
  for (const auto& s : sup) {
    if (!s.values.empty()) m = std::max(m, s.values.back());
  }
  return m;
}

}  // namespace

std::optional<std::vector<int>> hash_join_split(const System& sys) {
  const u32 n = sys.n;
  // Union variables that share a monomial.
  std::vector<u32> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<u32(u32)> find = [&](u32 a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto& f : sys.forms) {
    for (const auto& m : f.mono) {
      i64 first = -1;
      for (u32 j = 0; j < n; ++j) {
        if (m.e[j]) {
          if (first < 0) first = j;
          else parent[find(static_cast<u32>(first))] = find(j);
        }
      }
    }
  }
  std::map<u32, std::vector<u32>> comps;
  for (u32 j = 0; j < n; ++j) comps[find(j)].push_back(j);
  if (comps.size() < 2) return std::nullopt;
  // Greedy balance by component size (log-cost proxy: variable count).
  std::vector<std::vector<u32>> cs;
  for (auto& [root, vars] : comps) cs.push_back(vars);
  std::sort(cs.begin(), cs.end(),
            [](const auto& a, const auto& b) { return a.size() > b.size(); });
  std::vector<int> label(n, 0);
  size_t load0 = 0, load1 = 0;
  for (size_t ci = 0; ci < cs.size(); ++ci) {
    int side = (load0 <= load1) ? 0 : 1;
    if (ci == cs.size() - 1 && (side == 0 ? load1 : load0) == 0) {
      side = side == 0 ? 1 : 0;   // keep both sides nonempty
    }
    for (u32 j : cs[ci]) label[j] = side;
    (side == 0 ? load0 : load1) += cs[ci].size();
  }
  return label;
}

namespace {

CountResult count_full(const System& sys, const Box& box, u64 P,
                       const std::vector<Support>& sup, u64 max_cost,
                       u64 solution_cap, int threads) {
  const u32 n = sys.n;
  const u32 R = sys.R();
  unsigned __int128 cost = 1;
  for (const auto& s : sup) {
    cost *= std::max<u64>(s.values.size(), 1);
    if (cost > max_cost) {
      throw BudgetError("full enumeration needs about " +
                        std::to_string(static_cast<double>(cost)) +
                        " evaluations; raise --max-cost (" +
                        std::to_string(max_cost) + ")");
    }
  }
  CountResult res;
  res.P = P;
  res.box = box;
  res.strategy = "full";
  for (const auto& s : sup) {
    if (s.values.empty()) {
      res.solutions.clear();
      return res;   // empty support on some axis
    }
  }
  IntEval ev(sys, forms_as_polys(sys), support_max(sup));
  u64 total = 1;
  for (const auto& s : sup) total *= s.values.size();
  // Per-grain hit buckets, filled in parallel and concatenated in grain
  // order: the final list is lexicographic regardless of thread count.
  const u64 grain = 16384;
  const u64 ngrains = (total + grain - 1) / grain;
  std::vector<std::vector<Sol>> buckets(ngrains);
  std::atomic<bool> overflow{false};
  parallel_reduce<char>(
      ngrains, 1, threads, 0,
      [&](u64 glo, u64 ghi) {
        std::vector<u32> digit(n);
        std::vector<u64> x(n);
        for (u64 g = glo; g < ghi && !overflow.load(); ++g) {
          u64 lo = g * grain, hi = std::min(total, (g + 1) * grain);
          u64 rem = lo;
          for (u32 j = 0; j < n; ++j) {
            digit[j] = static_cast<u32>(rem % sup[j].values.size());
            rem /= sup[j].values.size();
          }
          for (u64 it = lo; it < hi; ++it) {
            for (u32 j = 0; j < n; ++j) x[j] = sup[j].values[digit[j]];
            bool zero = true;
            for (u32 i = 0; i < R && zero; ++i) {
              zero = ev.narrow ? ev.eval_narrow(i, x) == 0
                               : ev.eval_wide(i, x) == 0;
            }
            if (zero) {
              Sol s;
              s.x = x;
              s.w = 1;
              s.all_prime = true;
              for (u32 j = 0; j < n; ++j) {
                s.w *= sup[j].lam[digit[j]];
                s.all_prime = s.all_prime && sup[j].prime[digit[j]];
              }
              buckets[g].push_back(std::move(s));
              if (buckets[g].size() > kSolutionMemoryCap) overflow = true;
            }
            for (u32 j = 0; j < n; ++j) {
              if (++digit[j] < sup[j].values.size()) break;
              digit[j] = 0;
            }
          }
        }
        return 0;
      },
      [](const char&, const char&) { return char(0); });
  std::vector<Sol> sols;
  for (auto& b : buckets) {
    if (overflow.load() || sols.size() + b.size() > kSolutionMemoryCap) {
      throw BudgetError("solution set exceeds the in-memory cap");
    }
    sols.insert(sols.end(), std::make_move_iterator(b.begin()),
                std::make_move_iterator(b.end()));
    b.clear();
    b.shrink_to_fit();
  }
  finish_count(res, sols, solution_cap);
  return res;
}

CountResult count_hash_join(const System& sys, const Box& box, u64 P,
                            const std::vector<Support>& sup,
                            const std::vector<int>& label, u64 max_cost,
                            u64 solution_cap) {
  const u32 n = sys.n;
  const u32 R = sys.R();
  // Side-restricted polynomials: F_i = u_i(x_A) + w_i(x_B).
  std::vector<SparsePoly> uA(R), wB(R);
  for (u32 i = 0; i < R; ++i) {
    for (const auto& m : sys.forms[i].mono) {
      int side = -1;
      for (u32 j = 0; j < n; ++j) {
        if (m.e[j]) { side = label[j]; break; }
      }
      (side == 1 ? wB[i] : uA[i]).mono.push_back(m);
    }
  }
  std::vector<u32> varsA, varsB;
  for (u32 j = 0; j < n; ++j) (label[j] ? varsB : varsA).push_back(j);

  unsigned __int128 costA = 1, costB = 1;
  for (u32 j : varsA) costA *= std::max<u64>(sup[j].values.size(), 1);
  for (u32 j : varsB) costB *= std::max<u64>(sup[j].values.size(), 1);
  if (costA + costB > max_cost) {
    throw BudgetError("hash-join needs about " +
                      std::to_string(static_cast<double>(costA + costB)) +
                      " evaluations; raise --max-cost (" +
                      std::to_string(max_cost) + ")");
  }

  CountResult res;
  res.P = P;
  res.box = box;
  res.strategy = "hash-join";
  for (u32 j = 0; j < n; ++j) {
    if (sup[j].values.empty()) return res;
  }
  u64 xmax = support_max(sup);
  std::vector<SparsePoly> all = uA;
  all.insert(all.end(), wB.begin(), wB.end());
  IntEval ev(sys, std::move(all), xmax);
  if (!ev.narrow) {
    throw BudgetError("hash-join keys exceed 63-bit range; use --strategy full");
  }

  struct Entry {
    std::vector<u64> xa;
    double w;
    bool all_prime;
  };
  // Build the A-side key table (keys are the u_i values).
  std::map<std::vector<i64>, std::vector<Entry>> table;
  {
    std::vector<u32> digit(varsA.size(), 0);
    std::vector<u64> x(n, 0);
    u64 totalA = 1;
    for (u32 j : varsA) totalA *= sup[j].values.size();
    for (u64 it = 0; it < totalA; ++it) {
      Entry e;
      e.w = 1;
      e.all_prime = true;
      e.xa.resize(varsA.size());
      for (size_t k = 0; k < varsA.size(); ++k) {
        u32 j = varsA[k];
        x[j] = sup[j].values[digit[k]];
        e.xa[k] = x[j];
        e.w *= sup[j].lam[digit[k]];
        e.all_prime = e.all_prime && sup[j].prime[digit[k]];
      }
      std::vector<i64> key(R);
      for (u32 i = 0; i < R; ++i) key[i] = ev.eval_narrow(i, x);
      table[key].push_back(std::move(e));
      for (size_t k = 0; k < varsA.size(); ++k) {
        if (++digit[k] < sup[varsA[k]].values.size()) break;
        digit[k] = 0;
      }
    }
  }
  // Stream the B side and join on u_i(x_A) = -w_i(x_B).
  std::vector<Sol> sols;
  {
    std::vector<u32> digit(varsB.size(), 0);
    std::vector<u64> x(n, 0);
    u64 totalB = 1;
    for (u32 j : varsB) totalB *= sup[j].values.size();
    for (u64 it = 0; it < totalB; ++it) {
      double wb = 1;
      bool pb = true;
      for (size_t k = 0; k < varsB.size(); ++k) {
        u32 j = varsB[k];
        x[j] = sup[j].values[digit[k]];
        wb *= sup[j].lam[digit[k]];
        pb = pb && sup[j].prime[digit[k]];
      }
      std::vector<i64> key(R);
      for (u32 i = 0; i < R; ++i) key[i] = -ev.eval_narrow(R + i, x);
      auto itb = table.find(key);
      if (itb != table.end()) {
        for (const Entry& e : itb->second) {
          Sol s;
          s.x.resize(n);
          for (size_t k = 0; k < varsA.size(); ++k) s.x[varsA[k]] = e.xa[k];
          for (size_t k = 0; k < varsB.size(); ++k) s.x[varsB[k]] = x[varsB[k]];
          s.w = e.w * wb;
          s.all_prime = e.all_prime && pb;
          sols.push_back(std::move(s));
          if (sols.size() > kSolutionMemoryCap) {
            throw BudgetError("solution set exceeds the in-memory cap");
          }
        }
      }
      for (size_t k = 0; k < varsB.size(); ++k) {
        if (++digit[k] < sup[varsB[k]].values.size()) break;
        digit[k] = 0;
      }
    }
  }
  finish_count(res, sols, solution_cap);
  return res;
}

}  // namespace

CountResult count_prime_solutions(const System& sys, const Box& box, u64 P,
                                  const std::string& strategy, u64 max_cost,
                                  u64 solution_cap, int threads) {
  validate_box(box, sys.n);
  if (P < 2) throw InputError("P must be at least 2");
  LambdaTable t = sieve_lambda(P);
  std::vector<Support> sup = box_support(box, P, t);
  auto split = hash_join_split(sys);

  if (strategy == "full") {
    return count_full(sys, box, P, sup, max_cost, solution_cap, threads);
  }
  if (strategy == "hash-join") {
    if (!split) {
      throw InputError("system admits no syntactic variable bipartition; "
                       "hash-join is inapplicable");
    }
    return count_hash_join(sys, box, P, sup, *split, max_cost, solution_cap);
  }
  if (strategy != "auto") {
    throw InputError("unknown strategy '" + strategy +
                     "' (expected full, hash-join, or auto)");
  }
  unsigned __int128 cost_full = 1;
  for (const auto& s : sup) cost_full *= std::max<u64>(s.values.size(), 1);
  if (split) {
    unsigned __int128 ca = 1, cb = 1;
    for (u32 j = 0; j < sys.n; ++j) {
      ((*split)[j] ? cb : ca) *= std::max<u64>(sup[j].values.size(), 1);
    }
    if (ca + cb < cost_full || cost_full > max_cost) {
      try {
        return count_hash_join(sys, box, P, sup, *split, max_cost, solution_cap);
      } catch (const BudgetError&) {
        // fall back to full below
      }
    }
  }
  return count_full(sys, box, P, sup, max_cost, solution_cap, threads);
}

// --------------------------------------------------------- exponential sums

ExpSumSample exp_sum(const System& sys, const Box& box, u64 P,
                     const std::vector<double>& alpha, int threads) {
  validate_box(box, sys.n);
  if (alpha.size() != sys.R()) {
    throw InputError("alpha length must equal the number of forms");
  }
  const u32 n = sys.n;
  const u32 R = sys.R();
  LambdaTable t = sieve_lambda(P);
  std::vector<Support> sup = box_support(box, P, t);
  ExpSumSample es;
  es.alpha = alpha;
  u64 total = 1;
  for (const auto& s : sup) {
    if (s.values.empty()) {
      es.norm = 0;
      return es;
    }
    total *= s.values.size();
  }
  IntEval ev(sys, forms_as_polys(sys), support_max(sup));
  std::vector<Quad> aq(R);
  for (u32 i = 0; i < R; ++i) aq[i] = Quad(alpha[i]);
  CQuad acc = parallel_reduce<CQuad>(
      total, 8192, threads, CQuad{},
      [&](u64 lo, u64 hi) {
        CQuad a{};
        std::vector<u32> digit(n);
        u64 rem = lo;
        for (u32 j = 0; j < n; ++j) {
          digit[j] = static_cast<u32>(rem % sup[j].values.size());
          rem /= sup[j].values.size();
        }
        std::vector<u64> x(n);
        for (u64 it = lo; it < hi; ++it) {
          double w = 1;
          for (u32 j = 0; j < n; ++j) {
            x[j] = sup[j].values[digit[j]];
            w *= sup[j].lam[digit[j]];
          }
          // Exact integer F, then the phase in quad precision.
          Quad phase = 0;
          for (u32 i = 0; i < R; ++i) {
            if (ev.narrow) {
              phase += aq[i] * Quad(ev.eval_narrow(i, x));
            } else {
              phase += aq[i] * Quad(ev.eval_wide(i, x).str());
            }
          }
          a += unit_exponential(phase) * Quad(w);
          for (u32 j = 0; j < n; ++j) {
            if (++digit[j] < sup[j].values.size()) break;
            digit[j] = 0;
          }
        }
        return a;
      },
      [](const CQuad& a, const CQuad& b) {
        CQuad out = a;
        out += b;
        return out;
      });
  es.value = acc;
  es.norm = to_double(acc.abs()) / std::pow(static_cast<double>(P), n);
  return es;
}

// ------------------------------------------------------- arc classification

ArcLabel classify_arc(const System& sys, const std::vector<double>& alpha,
                      double P, double Q) {
  const u32 R = sys.R();
  if (alpha.size() != R) throw InputError("alpha length must equal R");
  for (double a : alpha) {
    if (!(a > 0.0 && a <= 1.0)) {
      throw InputError("alpha components must lie in (0, 1]");
    }
  }
  if (!(Q > 0) || !(P >= 2)) throw InputError("need P >= 2 and Q > 0");
  if (!(Q < std::pow(P, 0.25))) {
    throw InputError("arc classification requires Q < P^(1/4) for disjointness");
  }
  std::vector<u32> degs(R);
  for (u32 i = 0; i < R; ++i) degs[i] = sys.forms[i].degree;

  ArcLabel lab;
  for (u64 q = 1; q <= static_cast<u64>(Q); ++q) {
    std::vector<i64> a(R);
    std::vector<double> dist(R), bound(R);
    bool ok = true;
    u64 g = q;
    for (u32 i = 0; i < R; ++i) {
      a[i] = llround(q * alpha[i]);
      dist[i] = std::abs(alpha[i] - static_cast<double>(a[i]) / q);
      bound[i] = Q / (q * std::pow(P, degs[i]));
      if (dist[i] > bound[i]) ok = false;
      g = std::gcd(g, static_cast<u64>(std::llabs(a[i])));
    }
    if (ok && g == 1) {
      lab.major = true;
      lab.q = q;
      lab.a = a;
      lab.distances = dist;
      lab.bounds = bound;
      break;
    }
  }
  // Total major-arc measure and the coarse bound, for reporting.
  DegreeProfile prof = degree_profile(sys);
  double shape = 1;
  for (auto [d, rd] : prof.r) shape *= std::pow(2 * Q / std::pow(P, d), rd);
  double total = 0;
  for (u64 q = 1; q <= static_cast<u64>(Q); ++q) {
    total += to_double(jordan_totient(q, R)) * shape / std::pow(q, R);
  }
  lab.measure_total = total;
  lab.measure_bound = std::pow(Q, R + 1) * shape;
  return lab;
}

// --------------------------------------------------------------- probes

MinorArcProbe minor_arc_probe(const System& sys, const Box& box,
                              const std::vector<u64>& Ps, u64 n_samples,
                              u64 seed, u64 max_cost, int threads) {
  validate_box(box, sys.n);
  if (Ps.empty()) throw InputError("at least one P value required");
  if (n_samples < 1) throw InputError("need at least one sample");
  const u32 R = sys.R();
  if (top_block_rank(sys, VarPartition::all_w(sys.n)) != R) {
    throw InputError("coefficient top block is rank-deficient; the minor-arc "
                     "bound's hypotheses fail");
  }
  // Cost estimate: samples x support-grid size per P.
  unsigned __int128 cost = 0;
  for (u64 P : Ps) {
    LambdaTable t = sieve_lambda(P);
    std::vector<Support> sup = box_support(box, P, t);
    unsigned __int128 grid = 1;
    for (const auto& s : sup) grid *= std::max<u64>(s.values.size(), 1);
    cost += grid * n_samples;
  }
  if (cost > max_cost) {
    throw BudgetError("probe needs about " +
                      std::to_string(static_cast<double>(cost)) +
                      " evaluations; raise --max-cost");
  }

  MinorArcProbe probe;
  probe.samples = n_samples;
  double varpi = to_double(varpi_of(R));
  for (size_t pi = 0; pi < Ps.size(); ++pi) {
    u64 P = Ps[pi];
    double Q = std::pow(static_cast<double>(P), varpi);
    std::vector<double> norms;
    norms.reserve(n_samples);
    for (u64 i = 0; i < n_samples; ++i) {
      std::vector<double> alpha(R);
      bool minor = false;
      for (u64 tdx = 0; tdx < 65536 && !minor; ++tdx) {
        u64 idx = ((pi * n_samples + i) << 16) | tdx;
        for (u32 r = 0; r < R; ++r) {
          double u = rng_unit(seed, idx, r);
          alpha[r] = u == 0.0 ? 1.0 : u;   // (0, 1]
        }
        minor = !classify_arc(sys, alpha, static_cast<double>(P), Q).major;
      }
      if (!minor) {
        throw InternalError("rejection sampling failed to leave the major arcs");
      }
      norms.push_back(exp_sum(sys, box, P, alpha, threads).norm);
    }
    std::sort(norms.begin(), norms.end());
    MinorArcRow row;
    row.P = P;
    row.Q = Q;
    row.max_norm = norms.back();
    row.q90_norm = norms[std::min<size_t>(
        norms.size() - 1, static_cast<size_t>(std::ceil(0.9 * norms.size())) - 1)];
    probe.rows.push_back(row);
  }
  probe.predicted_exponent =
      -varpi / (std::pow(2.0, sys.max_degree()) * R);
  if (probe.rows.size() >= 2) {
    double mx = 0, my = 0;
    for (const auto& r : probe.rows) {
      mx += std::log(static_cast<double>(r.P));
      my += std::log(r.max_norm);
    }
    mx /= probe.rows.size();
    my /= probe.rows.size();
    double sxx = 0, sxy = 0;
    for (const auto& r : probe.rows) {
      double dx = std::log(static_cast<double>(r.P)) - mx;
      sxx += dx * dx;
      sxy += dx * (std::log(r.max_norm) - my);
    }
    probe.fitted_exponent = sxx > 0 ? sxy / sxx : std::nan("");
  } else {
    probe.fitted_exponent = std::nan("");
  }
  return probe;
}

std::vector<GaussAverageRow> gauss_average_probe(const System& sys, u64 q_max,
                                                 u64 budget) {
  if (q_max < 1) throw InputError("q_max must be at least 1");
  std::vector<GaussAverageRow> rows;
  const u32 R = sys.R();
  for (u64 q = 1; q <= q_max; ++q) {
    std::vector<CQuad> table = gauss_sum_table(sys, q, budget);
    Quad lhs = 0;
    std::vector<u64> a(R, 0);
    for (u64 ai = 0; ai < table.size(); ++ai) {
      u64 g = q;
      for (u32 i = 0; i < R; ++i) g = std::gcd(g, a[i]);
      if (g == 1) lhs += table[ai].abs();
      for (u32 i = 0; i < R; ++i) {
        if (++a[i] < q) break;
        a[i] = 0;
      }
    }
    GaussAverageRow row;
    row.q = q;
    row.dagger_sum_abs = to_double(lhs);
    row.ratio = row.dagger_sum_abs /
                std::pow(static_cast<double>(q), sys.n - 1.5);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace primeforms
