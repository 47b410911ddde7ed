// Implementation of the sparse polynomial layer: recursive-descent parser
// for the text grammar, JSON reader, canonicalization, evaluation, and the
// variable-partition decomposition.

#include "primeforms/poly.hpp"
#include "primeforms/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace primeforms {

// Exponent-vector ordering: lexicographically descending (all comparisons
// happen within one total degree, where vectors have equal length).
static bool exp_lex_greater(const std::vector<u32>& a, const std::vector<u32>& b) {
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

static void sort_canonical(std::vector<Monomial>& mono) {
  std::sort(mono.begin(), mono.end(), [](const Monomial& a, const Monomial& b) {
    u32 da = a.total_degree(), db = b.total_degree();
    if (da != db) return da > db;
    return exp_lex_greater(a.e, b.e);
  });
}

// Merge like terms and drop zero coefficients; input order irrelevant.
static std::vector<Monomial> merge_terms(u32 n, std::vector<Monomial> in) {
  std::map<std::vector<u32>, Int> acc;
  for (auto& m : in) {
    if (m.e.size() != n) {
      throw InputError("monomial exponent vector has size " +
                       std::to_string(m.e.size()) + ", expected " + std::to_string(n));
    }
    acc[m.e] += m.c;
  }
  std::vector<Monomial> out;
  for (auto& [e, c] : acc) {
    if (c != 0) out.push_back(Monomial{c, e});
  }
  sort_canonical(out);
  return out;
}

Form make_form(u32 n, std::vector<Monomial> monomials) {
  std::vector<Monomial> m = merge_terms(n, std::move(monomials));
  if (m.empty()) {
    throw InputError("form vanishes identically after combining like terms");
  }
  u32 d = m.front().total_degree();
  for (const auto& mm : m) {
    if (mm.total_degree() != d) {
      throw InputError("form is not homogeneous: monomials of degree " +
                       std::to_string(d) + " and " + std::to_string(mm.total_degree()));
    }
  }
  if (d < 2) {
    throw InputError("form degree must be at least 2, got " + std::to_string(d));
  }
  Form f;
  f.degree = d;
  f.mono = std::move(m);
  return f;
}

System make_system(u32 n, std::vector<Form> forms) {
  if (n == 0) throw InputError("system must have at least one variable");
  if (forms.empty()) throw InputError("system must contain at least one form");
  for (const auto& f : forms) {
    for (const auto& m : f.mono) {
      if (m.e.size() != n) throw InputError("form does not match variable count");
    }
  }
  std::stable_sort(forms.begin(), forms.end(),
                   [](const Form& a, const Form& b) { return a.degree < b.degree; });
  System s;
  s.n = n;
  s.forms = std::move(forms);
  return s;
}

u32 System::max_degree() const {
  u32 d = 0;
  for (const auto& f : forms) d = std::max(d, f.degree);
  return d;
}

u32 System::min_degree() const {
  u32 d = ~0u;
  for (const auto& f : forms) d = std::min(d, f.degree);
  return d;
}

std::vector<u32> System::degrees() const {
  std::vector<u32> ds;
  ds.reserve(forms.size());
  for (const auto& f : forms) ds.push_back(f.degree);
  return ds;
}

bool System::diagonal() const {
  for (const auto& f : forms) {
    for (const auto& m : f.mono) {
      int active = 0;
      for (u32 v : m.e) active += (v > 0);
      if (active != 1) return false;
    }
  }
  return true;
}

// ------------------------------------------------------------------- parsing

namespace {

struct Token {
  enum Kind { Num, Var, Plus, Minus, Star, Caret, LParen, RParen, End } kind;
  std::string text;   // digits for Num, index digits for Var
  u32 col = 0;        // 1-based column of first character
};

[[noreturn]] void parse_fail(u32 line, u32 col, const std::string& what) {
  throw ParseError("parse error at line " + std::to_string(line) + ", column " +
                   std::to_string(col) + ": " + what);
}

std::vector<Token> lex_line(const std::string& src, u32 line) {
  std::vector<Token> toks;
  size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    u32 col = static_cast<u32>(i + 1);
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      toks.push_back({Token::Num, src.substr(i, j - i), col});
      i = j;
      continue;
    }
    if (c == 'x') {
      size_t j = i + 1;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j == i + 1) parse_fail(line, col, "variable name 'x' must be followed by an index");
      toks.push_back({Token::Var, src.substr(i + 1, j - i - 1), col});
      i = j;
      continue;
    }
    switch (c) {
      case '+': toks.push_back({Token::Plus, "+", col}); break;
      case '-': toks.push_back({Token::Minus, "-", col}); break;
      case '*': toks.push_back({Token::Star, "*", col}); break;
      case '^': toks.push_back({Token::Caret, "^", col}); break;
      case '(': toks.push_back({Token::LParen, "(", col}); break;
      case ')': toks.push_back({Token::RParen, ")", col}); break;
      default:
        parse_fail(line, col, std::string("unexpected character '") + c + "'");
    }
    ++i;
  }
  toks.push_back({Token::End, "", static_cast<u32>(src.size() + 1)});
  return toks;
}

// Dense-exponent sparse polynomial used during parsing.
using PolyMap = std::map<std::vector<u32>, Int>;

PolyMap poly_add(PolyMap a, const PolyMap& b, bool negate_b) {
  for (const auto& [e, c] : b) {
    a[e] += negate_b ? -c : c;
  }
  return a;
}

PolyMap poly_mul(const PolyMap& a, const PolyMap& b) {
  PolyMap r;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      std::vector<u32> e(ea.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r[e] += ca * cb;
    }
  }
  return r;
}

PolyMap poly_pow(PolyMap base, u64 k, u32 n) {
  PolyMap r;
  r[std::vector<u32>(n, 0)] = 1;
  while (k) {
    if (k & 1) r = poly_mul(r, base);
    base = poly_mul(base, base);
    k >>= 1;
  }
  return r;
}

class ExprParser {
 public:
  ExprParser(std::vector<Token> toks, u32 line, u32 n)
      : toks_(std::move(toks)), line_(line), n_(n) {}

  PolyMap parse() {
    PolyMap p = expr();
    if (peek().kind != Token::End) {
      parse_fail(line_, peek().col, "unexpected token '" + peek().text + "'");
    }
    return p;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  PolyMap expr() {
    bool neg = false;
    if (peek().kind == Token::Plus) take();
    else if (peek().kind == Token::Minus) { take(); neg = true; }
    PolyMap p = term();
    if (neg) p = poly_add(PolyMap{}, p, true);
    while (peek().kind == Token::Plus || peek().kind == Token::Minus) {
      bool sub = take().kind == Token::Minus;
      p = poly_add(std::move(p), term(), sub);
    }
    return p;
  }

  PolyMap term() {
    PolyMap p = factor();
    while (peek().kind == Token::Star) {
      take();
      p = poly_mul(p, factor());
    }
    return p;
  }

  u64 exponent_after_caret() {
    take();  // '^'
    if (peek().kind != Token::Num) parse_fail(line_, peek().col, "expected integer exponent after '^'");
    const Token& t = take();
    if (t.text.size() > 4) parse_fail(line_, t.col, "exponent too large");
    return std::stoull(t.text);
  }

  PolyMap factor() {
    const Token& t = peek();
    if (t.kind == Token::Num) {
      take();
      PolyMap p;
      p[std::vector<u32>(n_, 0)] = Int(t.text);
      return p;
    }
    if (t.kind == Token::Var) {
      take();
      u64 idx = t.text.empty() ? 0 : std::stoull(t.text);
      if (idx < 1 || idx > n_) {
        parse_fail(line_, t.col, "variable x" + t.text + " out of range 1.." + std::to_string(n_));
      }
      u64 e = 1;
      if (peek().kind == Token::Caret) e = exponent_after_caret();
      std::vector<u32> ev(n_, 0);
      ev[idx - 1] = static_cast<u32>(e);
      PolyMap p;
      if (e == 0) {
        p[std::vector<u32>(n_, 0)] = 1;
      } else {
        p[ev] = 1;
      }
      return p;
    }
    if (t.kind == Token::LParen) {
      take();
      PolyMap p = expr();
      if (peek().kind != Token::RParen) parse_fail(line_, peek().col, "expected ')'");
      take();
      if (peek().kind == Token::Caret) {
        u64 e = exponent_after_caret();
        if (e > 64) parse_fail(line_, t.col, "exponent on parenthesized expression too large");
        p = poly_pow(std::move(p), e, n_);
      }
      return p;
    }
    parse_fail(line_, t.col, "expected a number, variable, or '('");
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
  u32 line_ = 0;
  u32 n_ = 0;
};

std::string strip_comment(const std::string& line) {
  size_t h = line.find('#');
  return h == std::string::npos ? line : line.substr(0, h);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

System parse_system_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  u32 lineno = 0;
  u32 n = 0;
  bool have_header = false;
  std::vector<Form> forms;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = strip_comment(line);
    if (blank(body)) continue;
    if (!have_header) {
      std::istringstream hs(body);
      std::string kw;
      long long nn = -1;
      hs >> kw >> nn;
      std::string rest;
      hs >> rest;
      if (kw != "vars" || nn < 1 || !rest.empty()) {
        parse_fail(lineno, 1, "expected header 'vars <n>' with n >= 1");
      }
      if (nn > 4096) parse_fail(lineno, 1, "variable count too large");
      n = static_cast<u32>(nn);
      have_header = true;
      continue;
    }
    ExprParser p(lex_line(body, lineno), lineno, n);
    PolyMap pm = p.parse();
    std::vector<Monomial> mono;
    for (auto& [e, c] : pm) {
      if (c != 0) mono.push_back(Monomial{c, e});
    }
    try {
      forms.push_back(make_form(n, std::move(mono)));
    } catch (const InputError& err) {
      throw InputError("line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  if (!have_header) throw ParseError("empty input: missing 'vars <n>' header");
  return make_system(n, std::move(forms));
}

System parse_system_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("n") || !j.contains("forms")) {
    throw ParseError("system JSON must be an object with fields \"n\" and \"forms\"");
  }
  if (!j["n"].is_number_unsigned() || j["n"].get<u64>() < 1 || j["n"].get<u64>() > 4096) {
    throw ParseError("\"n\" must be a positive integer");
  }
  u32 n = j["n"].get<u32>();
  if (!j["forms"].is_array() || j["forms"].empty()) {
    throw ParseError("\"forms\" must be a nonempty array");
  }
  std::vector<Form> forms;
  size_t fi = 0;
  for (const auto& jf : j["forms"]) {
    ++fi;
    auto where = [&] { return "forms[" + std::to_string(fi - 1) + "]"; };
    if (!jf.is_object() || !jf.contains("degree") || !jf.contains("monomials")) {
      throw ParseError(where() + " must have fields \"degree\" and \"monomials\"");
    }
    if (!jf["monomials"].is_array() || jf["monomials"].empty()) {
      throw ParseError(where() + ".monomials must be a nonempty array");
    }
    std::vector<Monomial> mono;
    for (const auto& jm : jf["monomials"]) {
      if (!jm.is_object() || !jm.contains("c") || !jm.contains("e")) {
        throw ParseError(where() + " monomials need fields \"c\" and \"e\"");
      }
      Int c;
      if (jm["c"].is_string()) {
        try {
          c = Int(jm["c"].get<std::string>());
        } catch (...) {
          throw ParseError(where() + ": coefficient \"" + jm["c"].get<std::string>() +
                           "\" is not an integer");
        }
      } else if (jm["c"].is_number_integer()) {
        c = Int(jm["c"].get<i64>());
      } else {
        throw ParseError(where() + ": coefficient must be an integer or decimal string");
      }
      if (!jm["e"].is_array() || jm["e"].size() != n) {
        throw ParseError(where() + ": exponent vector must have length n = " + std::to_string(n));
      }
      std::vector<u32> e;
      for (const auto& je : jm["e"]) {
        if (!je.is_number_unsigned() || je.get<u64>() > 100000) {
          throw ParseError(where() + ": exponents must be small nonnegative integers");
        }
        e.push_back(je.get<u32>());
      }
      mono.push_back(Monomial{c, std::move(e)});
    }
    Form f = make_form(n, std::move(mono));
    u64 declared = jf["degree"].is_number_unsigned() ? jf["degree"].get<u64>() : 0;
    if (declared != f.degree) {
      throw InputError(where() + ": declared degree " + jf["degree"].dump() +
                       " does not match actual degree " + std::to_string(f.degree));
    }
    forms.push_back(std::move(f));
  }
  return make_system(n, std::move(forms));
}

System load_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open system file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    return parse_system_json(buf.str());
  }
  return parse_system_text(buf.str());
}

// ------------------------------------------------------------------ printing

static void print_monomial(std::ostream& os, const Monomial& m, bool first) {
  Int a = m.c;
  if (first) {
    if (a < 0) { os << "-"; a = -a; }
  } else {
    if (a < 0) { os << " - "; a = -a; }
    else os << " + ";
  }
  bool any_var = false;
  for (u32 v : m.e) any_var |= (v > 0);
  bool printed = false;
  if (a != 1 || !any_var) {
    os << a;
    printed = true;
  }
  for (size_t j = 0; j < m.e.size(); ++j) {
    if (m.e[j] == 0) continue;
    if (printed) os << "*";
    os << "x" << (j + 1);
    if (m.e[j] > 1) os << "^" << m.e[j];
    printed = true;
  }
}

std::string to_string(const Form& f) {
  std::ostringstream os;
  for (size_t i = 0; i < f.mono.size(); ++i) print_monomial(os, f.mono[i], i == 0);
  return os.str();
}

std::string to_string(const System& sys) {
  std::ostringstream os;
  os << "vars " << sys.n << "\n";
  for (const auto& f : sys.forms) os << to_string(f) << "\n";
  return os.str();
}

// ---------------------------------------------------------------- evaluation

Int evaluate(const Form& f, const std::vector<Int>& x) {
  Int s = 0;
  for (const auto& m : f.mono) {
    Int t = m.c;
    for (size_t j = 0; j < m.e.size(); ++j) {
      if (m.e[j]) t *= ipow(x[j], m.e[j]);
    }
    s += t;
  }
  return s;
}

std::vector<Int> evaluate(const System& sys, const std::vector<Int>& x) {
  std::vector<Int> v;
  v.reserve(sys.forms.size());
  for (const auto& f : sys.forms) v.push_back(evaluate(f, x));
  return v;
}

static u64 coeff_mod(const Int& c, u64 q) {
  Int m = c % Int(q);
  if (m < 0) m += q;
  return m.convert_to<u64>();
}

u64 evaluate_mod(const Form& f, const std::vector<u64>& x, u64 q) {
  if (q == 1) return 0;
  u64 s = 0;
  for (const auto& m : f.mono) {
    u64 t = coeff_mod(m.c, q);
    for (size_t j = 0; j < m.e.size() && t; ++j) {
      if (m.e[j]) t = mul_mod(t, pow_mod(x[j], m.e[j], q), q);
    }
    s = add_mod(s, t, q);
  }
  return s;
}

double evaluate_double(const Form& f, const std::vector<double>& x) {
  double s = 0;
  for (const auto& m : f.mono) {
    double t = to_double(m.c);
    for (size_t j = 0; j < m.e.size(); ++j) {
      for (u32 k = 0; k < m.e[j]; ++k) t *= x[j];
    }
    s += t;
  }
  return s;
}

Int evaluate(const SparsePoly& p, const std::vector<Int>& x) {
  Int s = 0;
  for (const auto& m : p.mono) {
    Int t = m.c;
    for (size_t j = 0; j < m.e.size(); ++j) {
      if (m.e[j]) t *= ipow(x[j], m.e[j]);
    }
    s += t;
  }
  return s;
}

u64 evaluate_mod(const SparsePoly& p, const std::vector<u64>& x, u64 q) {
  if (q == 1) return 0;
  u64 s = 0;
  for (const auto& m : p.mono) {
    u64 t = coeff_mod(m.c, q);
    for (size_t j = 0; j < m.e.size() && t; ++j) {
      if (m.e[j]) t = mul_mod(t, pow_mod(x[j], m.e[j], q), q);
    }
    s = add_mod(s, t, q);
  }
  return s;
}

double evaluate_double(const SparsePoly& p, const std::vector<double>& x) {
  double s = 0;
  for (const auto& m : p.mono) {
    double t = to_double(m.c);
    for (size_t j = 0; j < m.e.size(); ++j) {
      for (u32 k = 0; k < m.e[j]; ++k) t *= x[j];
    }
    s += t;
  }
  return s;
}

double coefficient_scale(const Form& f) {
  double s = 0;
  for (const auto& m : f.mono) s += std::abs(to_double(m.c));
  return s;
}

std::vector<SparsePoly> gradient(const Form& f) {
  std::vector<SparsePoly> g(f.mono.empty() ? 0 : f.mono.front().e.size());
  if (!f.mono.empty()) g.assign(f.mono.front().e.size(), SparsePoly{});
  for (const auto& m : f.mono) {
    for (size_t j = 0; j < m.e.size(); ++j) {
      if (m.e[j] == 0) continue;
      Monomial d;
      d.c = m.c * m.e[j];
      d.e = m.e;
      d.e[j] -= 1;
      g[j].mono.push_back(std::move(d));
    }
  }
  for (auto& p : g) sort_canonical(p.mono);
  return g;
}

// --------------------------------------------------------------- decomposition

FormSplit decompose(const Form& form, const VarPartition& part) {
  FormSplit out;
  for (const auto& m : form.mono) {
    if (m.e.size() != part.label.size()) {
      throw InputError("variable partition size does not match system");
    }
    bool has_w = false, has_z = false, has_non_w = false;
    for (size_t j = 0; j < m.e.size(); ++j) {
      if (m.e[j] == 0) continue;
      switch (part.label[j]) {
        case VarClass::W: has_w = true; break;
        case VarClass::Z: has_z = true; has_non_w = true; break;
        case VarClass::Y: has_non_w = true; break;
      }
    }
    if (has_w) {
      out.h.mono.push_back(m);
      if (has_non_w) out.G.mono.push_back(m);
      else out.H.mono.push_back(m);
    } else if (has_z) {
      out.g.mono.push_back(m);
    } else {
      out.f.mono.push_back(m);
    }
  }
  return out;
}

u32 rational_rank(std::vector<std::vector<Rat>> m) {
  if (m.empty()) return 0;
  const size_t rows = m.size(), cols = m[0].size();
  u32 rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows; ++col) {
    size_t pivot = row;
    while (pivot < rows && m[pivot][col] == 0) ++pivot;
    if (pivot == rows) continue;
    std::swap(m[pivot], m[row]);
    for (size_t r = row + 1; r < rows; ++r) {
      if (m[r][col] == 0) continue;
      Rat factor = m[r][col] / m[row][col];
      for (size_t c = col; c < cols; ++c) m[r][c] -= factor * m[row][c];
    }
    ++row;
    ++rank;
  }
  return rank;
}

u32 top_block_rank(const System& sys, const VarPartition& part) {
  if (part.label.size() != sys.n) {
    throw InputError("variable partition size does not match system");
  }
  // Column index per exponent vector appearing in any H part.
  std::map<std::vector<u32>, size_t> col;
  std::vector<std::vector<std::pair<size_t, Int>>> rows;
  for (const auto& f : sys.forms) {
    FormSplit split = decompose(f, part);
    std::vector<std::pair<size_t, Int>> row;
    for (const auto& m : split.H.mono) {
      auto it = col.find(m.e);
      if (it == col.end()) it = col.emplace(m.e, col.size()).first;
      row.emplace_back(it->second, m.c);
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::vector<Rat>> mat(rows.size(), std::vector<Rat>(std::max<size_t>(col.size(), 1), 0));
  for (size_t r = 0; r < rows.size(); ++r) {
    for (const auto& [c, v] : rows[r]) mat[r][c] = Rat(v);
  }
  return rational_rank(std::move(mat));
}

}  // namespace primeforms
