// Oscillatory box integrals, the truncated theta-cube integral, the slab
// density oracle, and real nonsingular-point search.

#include "primeforms/arch.hpp"
#include "primeforms/errors.hpp"
#include "primeforms/parallel.hpp"
#include "primeforms/rng.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace primeforms {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::complex<double> e_of(double t) {
  double f = t - std::floor(t);
  return {std::cos(kTwoPi * f), std::sin(kTwoPi * f)};
}

}  // namespace

Box Box::uniform(u32 n, double a, double b) {
  Box box;
  box.lo.assign(n, a);
  box.hi.assign(n, b);
  return box;
}

double Box::volume() const {
  double v = 1;
  for (size_t j = 0; j < lo.size(); ++j) v *= hi[j] - lo[j];
  return v;
}

void validate_box(const Box& box, u32 n) {
  if (box.lo.size() != n || box.hi.size() != n) {
    throw InputError("box dimension " + std::to_string(box.lo.size()) +
                     " does not match the system's " + std::to_string(n) +
                     " variables");
  }
  for (u32 j = 0; j < n; ++j) {
    if (!(0.0 < box.lo[j] && box.lo[j] < box.hi[j] && box.hi[j] < 1.0)) {
      throw InputError("box bounds must satisfy 0 < lo < hi < 1 strictly");
    }
  }
}

// ------------------------------------------------------------ quadrature rule

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(u32 m) {
  static std::map<u32, std::pair<std::vector<double>, std::vector<double>>> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
  }
  std::vector<double> x(m), w(m);
  for (u32 i = 0; i < m; ++i) {
    // Newton iteration on P_m from the Chebyshev-like initial guess.
    double xi = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1, p1 = xi;
      if (m == 1) { p1 = xi; }
      for (u32 k = 2; k <= m; ++k) {
        double p2 = ((2.0 * k - 1.0) * xi * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pm = (m == 1) ? xi : p1;
      double pm1 = (m == 1) ? 1.0 : p0;
      dp = m * (xi * pm - pm1) / (xi * xi - 1.0);
      double step = pm / dp;
      xi -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = xi;
    w[i] = 2.0 / ((1.0 - xi * xi) * dp * dp);
  }
  std::lock_guard<std::mutex> lock(mu);
  auto [it, ok] = cache.emplace(m, std::make_pair(std::move(x), std::move(w)));
  (void)ok;
  return it->second;
}

// --------------------------------------------------------------- upsilon

namespace {

// Diagonal coefficient c_ij (as double) of x_j^{d_i} in form i; 0 if absent.
std::vector<std::vector<double>> diag_coeff_d(const System& sys) {
  std::vector<std::vector<double>> c(sys.R(), std::vector<double>(sys.n, 0.0));
  for (size_t i = 0; i < sys.forms.size(); ++i) {
    for (const auto& m : sys.forms[i].mono) {
      for (size_t j = 0; j < m.e.size(); ++j) {
        if (m.e[j]) c[i][j] = to_double(m.c);
      }
    }
  }
  return c;
}

u32 axis_nodes(const System& sys, const Box& box,
               const std::vector<double>& theta, const QuadSpec& spec,
               bool* clipped) {
  if (spec.nodes) return std::min(spec.nodes, spec.max_axis_nodes);
  double tmax = 0;
  for (double t : theta) tmax = std::max(tmax, std::abs(t));
  double rule = 4.0 * sys.max_degree() * std::sqrt(tmax);
  // Oscillation floor: along axis j the phase derivative is at most
  // 2*pi*sum_i |theta_i| * sum_mono |c|*e_j on [0,1]^n, so after the affine
  // map to [-1,1] the integrand has bandwidth omega = deriv * halfwidth.
  // Gauss-Legendre needs > omega/2 nodes before its error decays at all;
  // below that the value is pure aliasing noise.
  double omega = 0;
  for (u32 j = 0; j < sys.n; ++j) {
    double deriv = 0;
    for (u32 i = 0; i < sys.R(); ++i) {
      double s = 0;
      for (const auto& mo : sys.forms[i].mono) {
        s += std::abs(to_double(mo.c)) * mo.e[j];
      }
      deriv += std::abs(theta[i]) * s;
    }
    omega = std::max(omega, kTwoPi * deriv * 0.5 * (box.hi[j] - box.lo[j]));
  }
  rule = std::max(rule, 0.56 * omega + 16.0);
  u32 m = std::max<u32>(16, static_cast<u32>(std::ceil(rule)));
  if (m > spec.max_axis_nodes) {
    *clipped = true;
    m = spec.max_axis_nodes;
  }
  return m;
}

// Single evaluation at a fixed per-axis node count.
std::complex<double> upsilon_at(const System& sys, const Box& box,
                                const std::vector<double>& theta, u32 m,
                                const QuadSpec& spec, bool* clipped) {
  const u32 n = sys.n;
  const u32 R = sys.R();
  auto [gx, gw] = gauss_legendre(m);
  if (sys.diagonal()) {
    // e(theta . F(x)) = prod_j e(phi_j(x_j)): n one-axis integrals.
    auto c = diag_coeff_d(sys);
    std::complex<double> prod = 1;
    for (u32 j = 0; j < n; ++j) {
      double mid = 0.5 * (box.lo[j] + box.hi[j]);
      double hw = 0.5 * (box.hi[j] - box.lo[j]);
      std::complex<double> acc = 0;
      for (u32 k = 0; k < m; ++k) {
        double t = mid + hw * gx[k];
        double phase = 0;
        for (u32 i = 0; i < R; ++i) {
          if (c[i][j] != 0) {
            phase += theta[i] * c[i][j] * std::pow(t, static_cast<int>(sys.forms[i].degree));
          }
        }
        acc += gw[k] * e_of(phase);
      }
      prod *= hw * acc;
    }
    return prod;
  }
  // Full tensor grid, clipped so total node count respects the budget.
  u32 mm = m;
  bool fits = false;
  for (;;) {
    u64 total = 1;
    fits = true;
    for (u32 j = 0; j < n; ++j) {
      if (total > spec.max_total_nodes / mm) { fits = false; break; }
      total *= mm;
    }
    if (fits || mm <= 4) break;
    mm = std::max<u32>(4, mm * 3 / 4);
    *clipped = true;
  }
  if (!fits) {
    throw BudgetError("tensor quadrature grid is infeasible for n = " +
                      std::to_string(n) + " variables");
  }
  auto [hx, hw2] = gauss_legendre(mm);
  std::vector<double> mid(n), hw(n);
  for (u32 j = 0; j < n; ++j) {
    mid[j] = 0.5 * (box.lo[j] + box.hi[j]);
    hw[j] = 0.5 * (box.hi[j] - box.lo[j]);
  }
  u64 count = 1;
  for (u32 j = 0; j < n; ++j) count *= mm;
  using Pair = std::pair<double, double>;
  Pair sum = parallel_reduce<Pair>(
      count, 8192, 0, {0.0, 0.0},
      [&](u64 lo_i, u64 hi_i) {
        std::vector<u32> digit(n);
        u64 rem = lo_i;
        for (u32 j = 0; j < n; ++j) {
          digit[j] = static_cast<u32>(rem % mm);
          rem /= mm;
        }
        std::vector<double> x(n);
        Pair acc{0.0, 0.0};
        for (u64 it = lo_i; it < hi_i; ++it) {
          double wt = 1;
          for (u32 j = 0; j < n; ++j) {
            x[j] = mid[j] + hw[j] * hx[digit[j]];
            wt *= hw[j] * hw2[digit[j]];
          }
          double phase = 0;
          for (u32 i = 0; i < R; ++i) {
            phase += theta[i] * evaluate_double(sys.forms[i], x);
          }
          std::complex<double> v = wt * e_of(phase);
          acc.first += v.real();
          acc.second += v.imag();
          for (u32 j = 0; j < n; ++j) {
            if (++digit[j] < mm) break;
            digit[j] = 0;
          }
        }
        return acc;
      },
      [](const Pair& a, const Pair& b) {
        return Pair{a.first + b.first, a.second + b.second};
      });
  return {sum.first, sum.second};
}

}  // namespace

UpsilonValue upsilon(const System& sys, const Box& box,
                     const std::vector<double>& theta, const QuadSpec& spec) {
  validate_box(box, sys.n);
  if (theta.size() != sys.R()) {
    throw InputError("theta length must equal the number of forms");
  }
  UpsilonValue uv;
  bool clipped = false;
  u32 m = axis_nodes(sys, box, theta, spec, &clipped);
  uv.value = upsilon_at(sys, box, theta, m, spec, &clipped);
  u32 m2 = std::min<u32>(spec.max_axis_nodes, m + (m + 1) / 2);
  std::complex<double> refined =
      m2 > m ? upsilon_at(sys, box, theta, m2, spec, &clipped) : uv.value;
  uv.error = std::abs(refined - uv.value);
  uv.nodes = m;
  uv.budget_flag = clipped;
  if (clipped) uv.error = std::max(uv.error * 10, 1e-12);
  uv.value = refined;
  return uv;
}

// ----------------------------------------------------- truncated integral

namespace {

struct SimpsonResult {
  std::complex<double> value;
  double err = 0;
};

// Adaptive Simpson on a complex integrand, accumulating the Richardson
// error; depth-capped for termination.
template <typename F>
SimpsonResult adapt_step(const F& f, double a, double b,
                         std::complex<double> fa, std::complex<double> fm,
                         std::complex<double> fb, std::complex<double> whole,
                         double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  std::complex<double> flm = f(lm), frm = f(rm);
  std::complex<double> left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  std::complex<double> right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  std::complex<double> delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return {left + right + delta / 15.0, std::abs(delta) / 15.0};
  }
  SimpsonResult l = adapt_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1);
  SimpsonResult r = adapt_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
  return {l.value + r.value, l.err + r.err};
}

template <typename F>
SimpsonResult adaptive_simpson(const F& f, double a, double b, double tol,
                               int depth = 14) {
  if (a >= b) return {0.0, 0.0};
  std::complex<double> fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  std::complex<double> whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adapt_step(f, a, b, fa, fm, fb, whole, tol, depth);
}

// Iterated integral of upsilon over axes [r, R) of the cube [-H, H]^R with
// axis R-1 restricted to [0, H] (the conjugate symmetry upsilon(-theta) =
// conj(upsilon(theta)) folds the other half onto this one).
struct IteratedIntegrator {
  const System& sys;
  const Box& box;
  const QuadSpec& spec;
  double H;
  mutable std::vector<double> theta;
  mutable double err = 0;

  std::complex<double> eval_axes(u32 r, double tol) const {
    if (r == 0) {
      bool clipped = false;
      u32 m = axis_nodes(sys, box, theta, spec, &clipped);
      return upsilon_at(sys, box, theta, m, spec, &clipped);
    }
    double a = (r == sys.R()) ? 0.0 : -H;
    SimpsonResult sr = adaptive_simpson(
        [&](double t) {
          theta[r - 1] = t;
          return eval_axes(r - 1, tol / 4);
        },
        a, H, tol, 12);
    err += sr.err;
    return sr.value;
  }
};

}  // namespace

IntegralEstimate singular_integral(const System& sys, const Box& box, double H,
                                   const QuadSpec& spec, u64 mc_samples,
                                   u64 seed, int threads) {
  validate_box(box, sys.n);
  if (H < 0) throw InputError("cutoff H must be nonnegative");
  const u32 R = sys.R();
  IntegralEstimate est;
  est.H = H;
  est.tail_note = "expected truncation error decay ~ 1/H";
  if (H == 0) {
    est.method = R <= 3 ? "tensor-quadrature" : "monte-carlo";
    return est;
  }

  if (R <= 3) {
    est.method = "tensor-quadrature";
    auto run = [&](double cutoff) {
      IteratedIntegrator it{sys, box, spec, cutoff, std::vector<double>(R, 0.0), 0};
      // Outermost axis over [0, cutoff]; doubling the real part restores the
      // full cube by conjugate symmetry.
      std::complex<double> half_cube = it.eval_axes(R, spec.tol);
      return std::make_pair(2.0 * half_cube.real(), 2.0 * it.err);
    };
    auto [v_full, e_full] = run(H);
    auto [v_half, e_half] = run(H / 2);
    est.value = v_full;
    est.value_half = v_half;
    est.error = e_full + e_half;
    return est;
  }

  est.method = "monte-carlo";
  struct Acc {
    double s = 0, s2 = 0;
  };
  auto accumulate = [&](double cutoff, u64 base) {
    Acc acc = parallel_reduce<Acc>(
        mc_samples, 4096, threads, Acc{},
        [&](u64 lo, u64 hi) {
          Acc a;
          std::vector<double> theta(R);
          for (u64 i = lo; i < hi; ++i) {
            for (u32 r = 0; r < R; ++r) {
              theta[r] = cutoff * (2.0 * rng_unit(seed, base + i, r) - 1.0);
            }
            bool clipped = false;
            u32 m = axis_nodes(sys, box, theta, spec, &clipped);
            double v = upsilon_at(sys, box, theta, m, spec, &clipped).real();
            a.s += v;
            a.s2 += v * v;
          }
          return a;
        },
        [](const Acc& a, const Acc& b) {
          return Acc{a.s + b.s, a.s2 + b.s2};
        });
    double vol = std::pow(2.0 * cutoff, R);
    double mean = acc.s / mc_samples;
    double var = std::max(0.0, acc.s2 / mc_samples - mean * mean);
    double se = vol * std::sqrt(var / mc_samples);
    return std::make_pair(vol * mean, se);
  };
  auto [v_full, se_full] = accumulate(H, 0);
  auto [v_half, se_half] = accumulate(H / 2, mc_samples);
  est.value = v_full;
  est.value_half = v_half;
  est.error = se_full + se_half;
  return est;
}

// ------------------------------------------------------------- slab oracle

DensityEstimate real_density(const System& sys, const Box& box, double epsilon,
                             u64 samples, u64 seed, int threads) {
  validate_box(box, sys.n);
  if (!(epsilon > 0)) throw InputError("epsilon must be positive");
  if (samples < 10000) throw InputError("at least 10000 samples required");
  const u32 n = sys.n;
  const u32 R = sys.R();
  u64 hits = parallel_reduce<u64>(
      samples, 8192, threads, u64{0},
      [&](u64 lo, u64 hi) {
        u64 h = 0;
        std::vector<double> x(n);
        for (u64 i = lo; i < hi; ++i) {
          for (u32 j = 0; j < n; ++j) {
            x[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * rng_unit(seed, i, j);
          }
          bool in = true;
          for (u32 fi = 0; fi < R && in; ++fi) {
            in = std::abs(evaluate_double(sys.forms[fi], x)) <= epsilon / 2;
          }
          if (in) ++h;
        }
        return h;
      },
      [](const u64& a, const u64& b) { return a + b; });
  DensityEstimate de;
  de.hits = hits;
  de.samples = samples;
  de.epsilon = epsilon;
  double p = static_cast<double>(hits) / samples;
  double scale = box.volume() / std::pow(epsilon, R);
  de.value = scale * p;
  de.std_error = scale * std::sqrt(std::max(0.0, p * (1 - p)) / samples);
  if (hits == 0) {
    de.zero_hits = true;
    de.note = "no sample hit the slab; raise samples or epsilon";
  }
  return de;
}

// ------------------------------------------------------- real witness search

namespace {

Rat rat_of_double(double x) {
  // Doubles are dyadic rationals; cpp_rational converts exactly.
  return Rat(x);
}

// Exact rational evaluation of a form at a dyadic point.
Rat evaluate_rat(const Form& f, const std::vector<Rat>& x) {
  Rat s = 0;
  for (const auto& m : f.mono) {
    Rat t(m.c);
    for (size_t j = 0; j < m.e.size(); ++j) {
      for (u32 e = 0; e < m.e[j]; ++e) t *= x[j];
    }
    s += t;
  }
  return s;
}

}  // namespace

std::optional<RealWitness> find_real_point(const System& sys, const Box& box,
                                           u32 restarts, u64 seed) {
  validate_box(box, sys.n);
  const u32 n = sys.n;
  const u32 R = sys.R();
  double scale = 0;
  for (const auto& f : sys.forms) scale = std::max(scale, coefficient_scale(f));
  const double accept_tol = 1e-10 * scale;
  std::vector<std::vector<SparsePoly>> grads;
  for (const auto& f : sys.forms) grads.push_back(gradient(f));

  auto resid2 = [&](const std::vector<double>& x) {
    double s = 0;
    for (u32 i = 0; i < R; ++i) {
      double v = evaluate_double(sys.forms[i], x);
      s += v * v;
    }
    return s;
  };

  for (u32 r = 0; r < restarts; ++r) {
    std::vector<double> x(n);
    for (u32 j = 0; j < n; ++j) {
      x[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * rng_unit(seed, r, j);
    }
    double f2 = resid2(x);
    for (int iter = 0; iter < 80; ++iter) {
      Eigen::MatrixXd J(R, n);
      Eigen::VectorXd Fv(R);
      for (u32 i = 0; i < R; ++i) {
        Fv(i) = evaluate_double(sys.forms[i], x);
        for (u32 j = 0; j < n; ++j) {
          J(i, j) = evaluate_double(grads[i][j], x);
        }
      }
      Eigen::VectorXd d = J.completeOrthogonalDecomposition().solve(-Fv);
      if (!d.allFinite()) break;
      // Backtracking step, clamped to the closed box.
      double lambda = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        std::vector<double> xn(n);
        for (u32 j = 0; j < n; ++j) {
          xn[j] = std::clamp(x[j] + lambda * d(j), box.lo[j], box.hi[j]);
        }
        double f2n = resid2(xn);
        if (f2n < f2) {
          x = std::move(xn);
          f2 = f2n;
          moved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!moved || f2 == 0) break;
    }

    // Accept only on exact re-evaluation plus a quantitative rank check.
    std::vector<Rat> xr(n);
    for (u32 j = 0; j < n; ++j) xr[j] = rat_of_double(x[j]);
    double residual = 0;
    for (u32 i = 0; i < R; ++i) {
      Rat v = evaluate_rat(sys.forms[i], xr);
      residual = std::max(residual, std::abs(to_double(v)));
    }
    if (residual > accept_tol) continue;
    bool interior = true;
    for (u32 j = 0; j < n; ++j) {
      if (!(box.lo[j] < x[j] && x[j] < box.hi[j])) interior = false;
    }
    if (!interior) continue;
    Eigen::MatrixXd J(R, n);
    for (u32 i = 0; i < R; ++i) {
      for (u32 j = 0; j < n; ++j) J(i, j) = evaluate_double(grads[i][j], x);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    double smin = svd.singularValues().size()
                      ? svd.singularValues().minCoeff()
                      : 0.0;
    if (smin <= 1e-8) continue;
    RealWitness w;
    w.x = x;
    w.residual = residual;
    w.sigma_min = smin;
    return w;
  }
  return std::nullopt;
}

}  // namespace primeforms
