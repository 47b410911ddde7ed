// Archimedean (real-place) analysis: the oscillatory box integral
// upsilon(theta), its truncated integral over the theta-cube, an independent
// slab-volume density oracle, and a search for nonsingular real zeros in the
// open unit cube.
#pragma once

#include "primeforms/poly.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace primeforms {

// Axis-aligned box with 0 < lo_j < hi_j < 1 (strict).
struct Box {
  std::vector<double> lo, hi;
  static Box uniform(u32 n, double a = 0.1, double b = 0.9);
  u32 dims() const { return static_cast<u32>(lo.size()); }
  double volume() const;
};

// Throws InputError unless the box has dimension n and strict bounds
// 0 < lo < hi < 1 on every axis.
void validate_box(const Box& box, u32 n);

struct QuadSpec {
  u32 nodes = 0;                 // per-axis node count; 0 = theta-scaled rule
  u32 max_axis_nodes = 20000;    // hard per-axis cap (cheap on separable paths)
  u64 max_total_nodes = 4'000'000;  // cap on the full tensor grid
  double tol = 1e-6;             // adaptive-Simpson tolerance (theta axes)
};

struct UpsilonValue {
  std::complex<double> value;
  double error = 0.0;            // |value - refined value| at 1.5x nodes
  u32 nodes = 0;                 // per-axis nodes actually used
  bool budget_flag = false;      // node rule was clipped by the spec caps
};

// upsilon(theta) = integral over the box of e(theta . F(x)) dx, by tensor
// Gauss-Legendre.  Per-axis nodes default to max(16, ceil(4 D sqrt(|theta|)))
// clipped to the caps; one refinement pass at 1.5x nodes is the error proxy.
// Separable systems (every monomial univariate) factor into n one-axis
// integrals, so the grid never materializes.
UpsilonValue upsilon(const System& sys, const Box& box,
                     const std::vector<double>& theta,
                     const QuadSpec& spec = {});

struct IntegralEstimate {
  double H = 0;
  double value = 0;
  double value_half = 0;         // same estimator at cutoff H/2
  std::string method;            // "tensor-quadrature" | "monte-carlo"
  double error = 0;              // refinement delta (quadrature) or MC stderr
  std::string tail_note;
};

// Truncated singular integral: integral of upsilon over the cube
// |theta_i| <= H.  Iterated adaptive Simpson per theta coordinate for
// R <= 3; plain Monte Carlo over the cube (flagged in `method`) beyond that.
// The value at H/2 is reported alongside so the ~1/H tail is visible.
IntegralEstimate singular_integral(const System& sys, const Box& box, double H,
                                   const QuadSpec& spec = {},
                                   u64 mc_samples = 200'000, u64 seed = 1,
                                   int threads = 0);

struct DensityEstimate {
  double value = 0;
  double std_error = 0;
  u64 hits = 0;
  u64 samples = 0;
  double epsilon = 0;
  bool zero_hits = false;
  std::string note;
};

// Independent oracle for the same constant: Monte Carlo estimate of
// vol{x in box : |F_i(x)| <= eps/2 for all i} / eps^R.  The eps/2 half-width
// makes the eps -> 0 limit the Leray density that the truncated integral
// approaches.  Deterministic given the seed, at any thread count.
DensityEstimate real_density(const System& sys, const Box& box, double epsilon,
                             u64 samples, u64 seed = 1, int threads = 0);

struct RealWitness {
  std::vector<double> x;         // strictly inside the box
  double residual = 0;           // max_i |F_i(x)|, re-evaluated exactly
  double sigma_min = 0;          // smallest singular value of J_F(x)
};

// Damped Gauss-Newton from `restarts` random starts.  A witness is accepted
// only when exact rational re-evaluation of F at the (exactly representable)
// double point gives max_i |F_i(x)| <= 1e-10 * coefficient scale and the
// Jacobian's smallest singular value exceeds 1e-8.  Absence of a witness is
// not a proof of nonexistence.
std::optional<RealWitness> find_real_point(const System& sys, const Box& box,
                                           u32 restarts = 64, u64 seed = 1);

// Gauss-Legendre nodes and weights on [-1, 1] (exposed for tests).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(u32 m);

}  // namespace primeforms
