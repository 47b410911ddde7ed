// Quad-precision complex exponential helpers.

#include "primeforms/numbers.hpp"

#include <cmath>

namespace primeforms {

CQuad unit_exponential(const Quad& x) {
  // Reduce to [0,1) in quad precision: this is the step where accuracy is
  // actually at stake, since x can carry ~40 integer bits and a double
  // reduction would wipe out the fractional part.  The trig on the small
  // reduced argument is hardware double — its ~1 ulp error is orders of
  // magnitude below every downstream tolerance, while software quad trig
  // would dominate the cost of every exponential-sum loop.
  Quad f = x - floor(x);
  double t = 6.2831853071795864769 * f.convert_to<double>();
  return CQuad{Quad(std::cos(t)), Quad(std::sin(t))};
}

std::vector<CQuad> root_table(u64 q) {
  std::vector<CQuad> tab(q);
  for (u64 j = 0; j < q; ++j) {
    tab[j] = unit_exponential(Quad(j) / Quad(q));
  }
  return tab;
}

}  // namespace primeforms
