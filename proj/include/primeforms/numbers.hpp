// Exact and extended-precision number types used across the project, plus
// small modular-arithmetic and multiplicative-function helpers.
//
// Int  : arbitrary-precision signed integer (all polynomial evaluation).
// Rat  : arbitrary-precision rational (all density / power-saving arithmetic).
// Quad : binary128-style float, 113-bit significand (phase reduction and
//        Gauss-sum accumulation, where >= 80 significand bits are required).
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace primeforms {

using Int  = boost::multiprecision::cpp_int;
using Rat  = boost::multiprecision::cpp_rational;
using Quad = boost::multiprecision::cpp_bin_float_quad;

using u8  = std::uint8_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;

// ---------------------------------------------------------------- modular ops

inline u64 add_mod(u64 a, u64 b, u64 q) {
  a %= q; b %= q;
  u64 s = a + b;                       // q < 2^63 is enforced by callers
  return s >= q ? s - q : s;
}

inline u64 mul_mod(u64 a, u64 b, u64 q) {
  return static_cast<u64>((static_cast<unsigned __int128>(a % q) * (b % q)) % q);
}

inline u64 pow_mod(u64 a, u64 e, u64 q) {
  if (q == 1) return 0;
  u64 r = 1 % q;
  a %= q;
  while (e) {
    if (e & 1) r = mul_mod(r, a, q);
    a = mul_mod(a, a, q);
    e >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin, valid for all 64-bit inputs.
inline bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) { d >>= 1; ++s; }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) { composite = false; break; }
    }
    if (composite) return false;
  }
  return true;
}

// Trial-division factorization; moduli in this project stay far below 2^40.
inline std::vector<std::pair<u64, int>> factorize(u64 n) {
  std::vector<std::pair<u64, int>> f;
  for (u64 p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      int k = 0;
      while (n % p == 0) { n /= p; ++k; }
      f.emplace_back(p, k);
    }
  }
  if (n > 1) f.emplace_back(n, 1);
  return f;
}

inline u64 euler_phi(u64 n) {
  u64 r = n;
  for (auto [p, k] : factorize(n)) r -= r / p;
  return r;
}

// Jordan totient J_R(q) = q^R prod_{p|q} (1 - p^{-R}): the number of a in
// [1,q]^R with gcd(a_1,...,a_R,q) = 1.
inline Int jordan_totient(u64 q, int R) {
  Int r = 1;
  for (auto [p, k] : factorize(q)) {
    Int pR = 1;
    for (int i = 0; i < R; ++i) pR *= p;
    Int head = 1;
    for (int i = 0; i < k - 1; ++i) head *= pR;
    r *= head * (pR - 1);
  }
  return r;
}

inline int mobius(u64 n) {
  int m = 1;
  for (auto [p, k] : factorize(n)) {
    if (k > 1) return 0;
    m = -m;
  }
  return m;
}

inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> ds{1};
  for (auto [p, k] : factorize(n)) {
    size_t old = ds.size();
    u64 pe = 1;
    for (int i = 1; i <= k; ++i) {
      pe *= p;
      for (size_t j = 0; j < old; ++j) ds.push_back(ds[j] * pe);
    }
  }
  std::sort(ds.begin(), ds.end());
  return ds;
}

// ------------------------------------------------------------- conversions

inline double to_double(const Rat& r) { return r.convert_to<double>(); }
inline double to_double(const Int& v) { return v.convert_to<double>(); }
inline double to_double(const Quad& v) { return v.convert_to<double>(); }

inline Int ipow(Int base, unsigned e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

inline std::string rat_string(const Rat& r) {
  return r.str();                       // "num/den" or plain integer
}

// ------------------------------------------------------- quad-precision complex

// Minimal complex type over Quad; std::complex is not specified for
// user-defined floating types, so the few operations needed live here.
struct CQuad {
  Quad re{0}, im{0};
  CQuad& operator+=(const CQuad& o) { re += o.re; im += o.im; return *this; }
  CQuad operator*(const CQuad& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  CQuad operator*(const Quad& s) const { return {re * s, im * s}; }
  CQuad conj() const { return {re, -im}; }
  Quad abs() const { return sqrt(re * re + im * im); }
};

// e(x) = exp(2*pi*i*x): the fractional reduction happens in quad precision
// (the step that actually needs the extra bits when x is large); the trig on
// the reduced argument is hardware double.
CQuad unit_exponential(const Quad& x);

// Table of e(j/q) for j = 0..q-1 (quad precision).
std::vector<CQuad> root_table(u64 q);

}  // namespace primeforms
