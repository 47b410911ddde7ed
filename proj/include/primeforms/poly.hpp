// Sparse integer polynomial systems: parsing, canonical form, evaluation,
// gradients, and the three-way monomial decomposition used by the analytic
// machinery (split of each form relative to a variable partition, plus the
// rank of the resulting top blocks).
#pragma once

#include "primeforms/numbers.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace primeforms {

// One monomial c * prod_j x_j^{e_j}.  e has one entry per variable.
struct Monomial {
  Int c;
  std::vector<u32> e;
  u32 total_degree() const {
    u32 s = 0;
    for (u32 v : e) s += v;
    return s;
  }
};

// Sparse polynomial, not necessarily homogeneous (gradients, scratch).
// Monomials are kept in canonical order: lexicographically descending
// exponent vectors within each total degree, higher degree first.
struct SparsePoly {
  std::vector<Monomial> mono;
  bool zero() const { return mono.empty(); }
};

// Homogeneous form of degree >= 2 with nonzero canonical representation.
struct Form {
  u32 degree = 0;
  std::vector<Monomial> mono;   // canonical order, like terms merged
};

// A system of forms over a common variable set x_1..x_n, sorted by degree
// ascending (stable for equal degrees, preserving input order).
struct System {
  u32 n = 0;
  std::vector<Form> forms;
  u32 R() const { return static_cast<u32>(forms.size()); }
  u32 max_degree() const;
  u32 min_degree() const;
  std::vector<u32> degrees() const;      // one entry per form, ascending
  bool diagonal() const;                 // every monomial touches one variable
};

// ------------------------------------------------------------------ building

// Merge like terms, drop zeros, sort canonically.  Throws InputError if the
// result is the zero polynomial, is not homogeneous, or has degree < 2.
Form make_form(u32 n, std::vector<Monomial> monomials);

// Sort forms by degree ascending (stable) and validate variable counts.
System make_system(u32 n, std::vector<Form> forms);

// ------------------------------------------------------------------- parsing

// Text grammar:
//   line 1:  vars <n>
//   each further nonempty line: one polynomial expression
//   '#' starts a comment anywhere; blank lines ignored
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := INT | VAR ('^' INT)? | '(' expr ')'
//   VAR    := x<k>, 1-based
// Parse errors carry line/column.  Homogeneity is checked after like-term
// cancellation, so e.g. "x1^2 + x1 - x1" is a valid degree-2 form.
System parse_system_text(const std::string& text);

// JSON alternative:
//   {"n": 4, "forms": [{"degree": 2,
//                       "monomials": [{"c": "-1", "e": [0,0,2,0]}, ...]}]}
// Coefficients are strings so arbitrary-precision values survive transport.
System parse_system_json(const std::string& text);

// Reads a file and dispatches on extension: ".json" -> JSON, else text.
System load_system(const std::string& path);

// Canonical text rendering of a form / system (round-trips through the
// text parser).
std::string to_string(const Form& f);
std::string to_string(const System& sys);

// ---------------------------------------------------------------- evaluation

Int evaluate(const Form& f, const std::vector<Int>& x);
std::vector<Int> evaluate(const System& sys, const std::vector<Int>& x);

// Exact evaluation modulo q (q >= 1, q < 2^32).  Result in [0,q).
u64 evaluate_mod(const Form& f, const std::vector<u64>& x, u64 q);

double evaluate_double(const Form& f, const std::vector<double>& x);

// Gradient as n sparse polynomials (each homogeneous of degree d-1, possibly
// zero when the variable does not occur).
std::vector<SparsePoly> gradient(const Form& f);

Int evaluate(const SparsePoly& p, const std::vector<Int>& x);
u64 evaluate_mod(const SparsePoly& p, const std::vector<u64>& x, u64 q);
double evaluate_double(const SparsePoly& p, const std::vector<double>& x);

// Scale of a form's coefficients: sum of absolute values, as a double.
double coefficient_scale(const Form& f);

// --------------------------------------------------------------- decomposition

// Variable partition into three disjoint groups.  Every variable index
// 0..n-1 carries exactly one label.
enum class VarClass : u8 { Y, Z, W };

struct VarPartition {
  std::vector<VarClass> label;   // size n
  static VarPartition all_w(u32 n) {
    return VarPartition{std::vector<VarClass>(n, VarClass::W)};
  }
};

// Split of one form F = f + g + h induced by the partition:
//   f : monomials in the y variables only
//   g : monomials in (y,z) only, each containing at least one z
//   h : monomials containing at least one w
// and of h = G + H:
//   H : monomials of h purely in w (necessarily of full degree d in w)
//   G : the rest (each has a w factor and a non-w factor, so deg_w(G) < d)
// Each piece may be the zero polynomial.
struct FormSplit {
  SparsePoly f, g, h, G, H;
};

FormSplit decompose(const Form& form, const VarPartition& part);

// Rank over the rationals of the matrix whose rows are the coefficient
// vectors of the H parts of all forms (columns indexed by the union of the
// monomials that occur).  Rows of different degrees have disjoint support,
// so this equals the sum of per-degree ranks.
u32 top_block_rank(const System& sys, const VarPartition& part);

// Rank over Q of an explicit rational matrix (exposed for testing).
u32 rational_rank(std::vector<std::vector<Rat>> m);

}  // namespace primeforms
