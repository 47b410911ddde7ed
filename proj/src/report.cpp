// Converters from result structs to provenance-tagged JSON, plus the small
// amount of deterministic serialization glue (sorted keys come for free from
// nlohmann's std::map backing; doubles dump in shortest round-trip form).
#include "primeforms/report.hpp"

#include "primeforms/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

namespace primeforms {

// ------------------------------------------------------------- scalar wrappers

Json prov(double value, const char* tag) {
  Json j;
  j["prov"] = tag;
  j["value"] = std::isfinite(value) ? Json(value) : Json(nullptr);
  return j;
}

Json prov_exact(const Int& value) {
  Json j;
  j["prov"] = "exact";
  j["exact"] = value.str();
  j["value"] = to_double(value);
  return j;
}

Json prov_exact(const Rat& value) {
  Json j;
  j["prov"] = "exact";
  j["exact"] = rat_string(value);
  j["value"] = to_double(value);
  return j;
}

Json prov_exact_u64(u64 value) {
  Json j;
  j["prov"] = "exact";
  j["value"] = value;
  return j;
}

namespace {

// Truncated quantity whose computed digits are exact: keeps the rational
// form but tags the number as a truncation of an infinite object.
Json prov_truncated(const Rat& exact, double value) {
  Json j;
  j["prov"] = "truncation";
  j["exact"] = rat_string(exact);
  j["value"] = std::isfinite(value) ? Json(value) : Json(nullptr);
  return j;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json box_json(const Box& box) {
  Json j;
  j["lo"] = box.lo;
  j["hi"] = box.hi;
  return j;
}

}  // namespace

// ------------------------------------------------------------------ converters

Json system_json(const System& sys) {
  Json j;
  j["n"] = sys.n;
  j["R"] = sys.R();
  j["degrees"] = sys.degrees();
  j["diagonal"] = sys.diagonal();
  Json forms = Json::array();
  for (const auto& f : sys.forms) forms.push_back(to_string(f));
  j["forms"] = forms;
  return j;
}

Json profile_json(const DegreeProfile& p) {
  Json j;
  j["delta"] = p.delta;
  Json r;
  for (auto& [d, rd] : p.r) r[std::to_string(d)] = rd;
  j["r"] = r;
  j["R"] = p.R;
  j["min_degree"] = p.C;
  j["max_degree"] = p.D;
  j["weight"] = p.weight;
  return j;
}

Json birch_json(const BirchEstimate& b) {
  Json j;
  j["degree"] = b.d;
  j["estimate"] = b.estimate;
  j["method"] = b.method;
  Json counts = Json::array();
  for (auto& [p, pts] : b.counts) {
    Json row;
    row["p"] = p;
    row["points"] = pts;
    counts.push_back(row);
  }
  j["counts"] = counts;
  j["warnings"] = b.warnings;
  return j;
}

Json power_saving_json(const PowerSavingProfile& psp) {
  Json j;
  j["n"] = psp.n;
  Json B;
  for (auto& [d, bd] : psp.B) B[std::to_string(d)] = bd;
  j["B"] = B;
  j["dim_vstar"] = psp.dim_vstar;
  Json s;
  for (u32 d = 1; d < psp.s.size(); ++d) s[std::to_string(d)] = prov_exact(psp.s[d]);
  j["s"] = s;
  j["t0"] = prov_exact(psp.t0);
  Json t;
  for (auto& [d, td] : psp.t) t[std::to_string(d)] = prov_exact(td);
  j["t"] = t;
  Json u;
  for (u32 d = 1; d < psp.u.size(); ++d) u[std::to_string(d)] = prov_exact(psp.u[d]);
  j["u"] = u;
  j["A1"] = prov_exact(psp.A1);
  j["A2"] = prov_exact(psp.A2);
  j["t0_lower"] = prov_exact(psp.t0_lower);
  Json adm;
  adm["admissible"] = psp.adm.admissible;
  adm["failing"] = psp.adm.failing;
  Json lhs;
  for (auto& [d, v] : psp.adm.lhs) lhs[std::to_string(d)] = prov_exact(v);
  adm["lhs"] = lhs;
  j["admissibility"] = adm;
  return j;
}

Json thresholds_json(const ThresholdReport& t) {
  Json j;
  j["n_min_theorem"] = prov_exact(t.n_min_theorem);
  j["iota1"] = prov_exact(t.iota1);
  j["iota2"] = prov_exact(t.iota2);
  j["iota3"] = prov_exact(t.iota3);
  j["varpi"] = prov_exact(t.varpi);
  j["remark_bound"] = prov_exact(t.remark_bound);
  j["remark_holds"] = t.remark_holds;
  Json kappa = Json::array();
  for (const auto& k : t.kappa) {
    Json row;
    row["name"] = k.name;
    row["rhs"] = prov_exact(k.rhs);
    row["lhs"] = k.lhs ? prov_exact(*k.lhs) : Json(nullptr);
    row["pass"] = k.pass ? Json(*k.pass) : Json(nullptr);
    kappa.push_back(row);
  }
  j["kappa"] = kappa;
  return j;
}

Json level_counts_json(const LevelCounts& c) {
  Json j;
  j["p"] = c.p;
  j["computed_to"] = c.computed_to;
  Json counts = Json::array();
  for (const auto& v : c.counts) counts.push_back(prov_exact(v));
  j["counts"] = counts;
  j["all_nonsingular_from"] =
      c.all_nonsingular_from ? Json(*c.all_nonsingular_from) : Json(nullptr);
  j["budget_exhausted"] = c.budget_exhausted;
  j["route"] = c.route;
  return j;
}

Json local_density_json(const LocalDensity& d) {
  Json j;
  j["p"] = d.p;
  Json vals = Json::array();
  for (const auto& v : d.values) vals.push_back(prov_exact(v));
  j["values"] = vals;
  j["stabilized"] = d.stabilized;
  j["stabilization_k"] = d.stabilization_k ? Json(*d.stabilization_k) : Json(nullptr);
  j["budget_exhausted"] = d.budget_exhausted;
  j["route"] = d.route;
  return j;
}

Json b_value_json(const BValue& b) {
  Json j;
  j["q"] = b.q;
  j["value"] = prov_exact(b.exact);
  if (b.phase_path) {
    Json ph;
    ph["re"] = finite_or_null(b.value);
    ph["im"] = finite_or_null(b.im);
    ph["prov"] = "quadrature";
    j["phase_accumulated"] = ph;
  } else {
    j["phase_accumulated"] = Json(nullptr);
  }
  return j;
}

Json series_json(const SeriesTruncation& s) {
  Json j;
  j["H"] = s.H;
  j["partial"] = prov_truncated(s.partial_exact, s.partial);
  j["terms"] = s.terms;
  j["fitted_decay_exponent"] = finite_or_null(s.fitted_decay_exponent);
  j["tail_note"] = s.tail_note;
  return j;
}

Json euler_json(const EulerProduct& e) {
  Json j;
  j["value"] = prov(e.value, "truncation");
  j["provisional"] = e.provisional;
  j["obstruction_prime"] =
      e.obstruction_prime ? Json(*e.obstruction_prime) : Json(nullptr);
  Json factors = Json::array();
  for (const auto& f : e.factors) {
    Json row;
    row["p"] = f.p;
    row["value"] = prov_exact(f.value);
    row["stabilized"] = f.stabilized;
    row["stabilization_k"] =
        f.stabilization_k ? Json(*f.stabilization_k) : Json(nullptr);
    factors.push_back(row);
  }
  j["factors"] = factors;
  return j;
}

Json hensel_json(const HenselWitness& h) {
  Json j;
  j["p"] = h.p;
  j["k"] = h.k;
  switch (h.outcome) {
    case HenselWitness::Outcome::Witness: j["outcome"] = "witness"; break;
    case HenselWitness::Outcome::Obstruction: j["outcome"] = "obstruction"; break;
    case HenselWitness::Outcome::Inconclusive: j["outcome"] = "inconclusive"; break;
  }
  j["witness"] = h.h;
  j["exhaustive"] = h.exhaustive;
  j["note"] = h.note;
  return j;
}

Json upsilon_json(const UpsilonValue& u) {
  Json j;
  Json v;
  v["re"] = finite_or_null(u.value.real());
  v["im"] = finite_or_null(u.value.imag());
  v["prov"] = "quadrature";
  j["value"] = v;
  j["error"] = finite_or_null(u.error);
  j["nodes"] = u.nodes;
  j["budget_flag"] = u.budget_flag;
  return j;
}

Json integral_json(const IntegralEstimate& e) {
  const char* tag = e.method == "monte-carlo" ? "monte-carlo" : "quadrature";
  Json j;
  j["H"] = e.H;
  j["value"] = prov(e.value, tag);
  j["value_half"] = prov(e.value_half, tag);
  j["method"] = e.method;
  j["error"] = finite_or_null(e.error);
  j["tail_note"] = e.tail_note;
  return j;
}

Json density_json(const DensityEstimate& d) {
  Json j;
  j["value"] = prov(d.value, "monte-carlo");
  j["std_error"] = finite_or_null(d.std_error);
  j["hits"] = d.hits;
  j["samples"] = d.samples;
  j["epsilon"] = d.epsilon;
  j["zero_hits"] = d.zero_hits;
  j["note"] = d.note;
  return j;
}

Json witness_json(const RealWitness& w) {
  Json j;
  j["x"] = w.x;
  j["residual"] = w.residual;
  j["sigma_min"] = w.sigma_min;
  return j;
}

Json count_json(const CountResult& c) {
  Json j;
  j["P"] = c.P;
  j["box"] = box_json(c.box);
  j["weighted"] = prov(c.weighted, "exact");
  j["unweighted"] = prov_exact_u64(c.unweighted);
  j["total_solutions"] = prov_exact_u64(c.total_solutions);
  j["solutions"] = c.solutions;
  j["solutions_truncated"] = c.solutions_truncated;
  j["strategy"] = c.strategy;
  return j;
}

Json arc_json(const ArcLabel& a) {
  Json j;
  j["major"] = a.major;
  j["q"] = a.q;
  j["a"] = a.a;
  j["distances"] = a.distances;
  j["bounds"] = a.bounds;
  j["measure_total"] = prov(a.measure_total, "exact");
  j["measure_bound"] = prov(a.measure_bound, "exact");
  return j;
}

Json minor_probe_json(const MinorArcProbe& p) {
  Json j;
  Json rows = Json::array();
  for (const auto& r : p.rows) {
    Json row;
    row["P"] = r.P;
    row["Q"] = r.Q;
    row["max_norm"] = r.max_norm;
    row["q90_norm"] = r.q90_norm;
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["fitted_exponent"] = finite_or_null(p.fitted_exponent);
  j["predicted_exponent"] = finite_or_null(p.predicted_exponent);
  j["samples"] = p.samples;
  return j;
}

Json gauss_rows_json(const std::vector<GaussAverageRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json row;
    row["q"] = r.q;
    row["dagger_sum_abs"] = r.dagger_sum_abs;
    row["ratio"] = r.ratio;
    arr.push_back(row);
  }
  return arr;
}

// --------------------------------------------------------------- serialization

std::string csv_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw InternalError("csv_double: to_chars failed");
  return std::string(buf, end);
}

std::string render_report(const Json& j) { return j.dump(2) + "\n"; }

void emit_report(const Json& j, const std::string& out_path) {
  emit_text(render_report(j), out_path);
}

void emit_text(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open output file: " + path);
  f << text;
  if (!f) throw InputError("failed writing output file: " + path);
}

}  // namespace primeforms
