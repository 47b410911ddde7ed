// Command-line driver: eight subcommands over one configuration surface.
// A JSON config file supplies defaults, explicit flags win, and every report
// carries schema/provenance fields with sorted keys and no timestamps, so a
// fixed (config, seed) pair reproduces byte-identical output at any thread
// count.
//
// Exit codes: 0 success, 2 parse/config error, 3 budget refusal, 4 internal.
#include "primeforms/arch.hpp"
#include "primeforms/count.hpp"
#include "primeforms/errors.hpp"
#include "primeforms/local.hpp"
#include "primeforms/poly.hpp"
#include "primeforms/profile.hpp"
#include "primeforms/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pf = primeforms;
using pf::Json;
using pf::i64;
using pf::u32;
using pf::u64;

namespace {

// ------------------------------------------------------------- configuration

struct RunConfig {
  std::string system_path;
  std::vector<double> box_values;   // 2 entries (uniform) or 2n (lo..., hi...)
  std::vector<u64> P;               // sizes, ascending
  u64 H = 200;                      // series cutoff (number of q terms)
  double H_arch = 16.0;             // theta-cube cutoff for the integral
  u64 p_max = 100;                  // primes p <= p_max in products/scans
  u32 k_max = 6;                    // density levels p^k
  u32 k_budget = 8;                 // lift depth for solubility checks
  u64 budget = pf::kDefaultLocalBudget;
  u64 max_cost = pf::kDefaultCountCost;
  u64 seed = 1;
  int threads = 0;                  // 0 = hardware default
  double epsilon = 1e-3;            // slab half-width... see real_density
  u64 mc_samples = 200'000;
  u32 quad_nodes = 0;               // 0 = theta-scaled rule
  std::string strategy = "auto";    // counting strategy
  u64 solution_cap = 10'000;
  u64 q_max = 50;                   // Gauss-average probe range
  u64 arc_samples = 32;             // minor-arc probe samples per P
  u32 restarts = 64;                // real-witness starts
  u64 nonsing_samples = 1000;       // singularity sampling per prime
  std::vector<u64> birch_primes{31, 37, 41};
  u64 birch_exhaustive = 50'000'000;
  std::optional<i64> dim_vstar;     // whole-system singular dim override
  std::string partition;            // per-variable labels from {y,z,w}
  std::vector<double> alpha;        // one-off arc classification point
  double Q = 0;                     // arc parameter override (0 = P^varpi)
  std::string out;                  // report path; empty = stdout
  std::string csv_dir;              // directory for CSV side outputs
};

i64 env_threads() {
  const char* e = std::getenv("PRIMEFORMS_THREADS");
  if (!e || !*e) return 0;
  char* end = nullptr;
  long v = std::strtol(e, &end, 10);
  if (end == e || *end || v < 0) return 0;
  return static_cast<i64>(v);
}

// Strict typed getters so config mistakes surface as ParseError, not as a
// nlohmann type_error with no context.
template <typename T>
T get_as(const Json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const Json::exception& e) {
    throw pf::ParseError("config key '" + key + "': " + e.what());
  }
}

void apply_config(const Json& j, RunConfig& cfg) {
  if (!j.is_object()) throw pf::ParseError("config root must be a JSON object");
  for (const auto& [key, val] : j.items()) {
    if (key == "system") cfg.system_path = get_as<std::string>(val, key);
    else if (key == "box") {
      if (val.is_array()) cfg.box_values = get_as<std::vector<double>>(val, key);
      else if (val.is_object()) {
        auto lo = get_as<std::vector<double>>(val.value("lo", Json::array()), key);
        auto hi = get_as<std::vector<double>>(val.value("hi", Json::array()), key);
        cfg.box_values = lo;
        cfg.box_values.insert(cfg.box_values.end(), hi.begin(), hi.end());
      } else throw pf::ParseError("config key 'box': expected array or {lo,hi}");
    }
    else if (key == "P") cfg.P = get_as<std::vector<u64>>(val, key);
    else if (key == "H") cfg.H = get_as<u64>(val, key);
    else if (key == "H_arch") cfg.H_arch = get_as<double>(val, key);
    else if (key == "p_max") cfg.p_max = get_as<u64>(val, key);
    else if (key == "k_max") cfg.k_max = get_as<u32>(val, key);
    else if (key == "k_budget") cfg.k_budget = get_as<u32>(val, key);
    else if (key == "budget") cfg.budget = get_as<u64>(val, key);
    else if (key == "max_cost") cfg.max_cost = get_as<u64>(val, key);
    else if (key == "seed") cfg.seed = get_as<u64>(val, key);
    else if (key == "threads") cfg.threads = get_as<int>(val, key);
    else if (key == "epsilon") cfg.epsilon = get_as<double>(val, key);
    else if (key == "mc_samples") cfg.mc_samples = get_as<u64>(val, key);
    else if (key == "quad_nodes") cfg.quad_nodes = get_as<u32>(val, key);
    else if (key == "strategy") cfg.strategy = get_as<std::string>(val, key);
    else if (key == "solution_cap") cfg.solution_cap = get_as<u64>(val, key);
    else if (key == "q_max") cfg.q_max = get_as<u64>(val, key);
    else if (key == "arc_samples") cfg.arc_samples = get_as<u64>(val, key);
    else if (key == "restarts") cfg.restarts = get_as<u32>(val, key);
    else if (key == "nonsing_samples") cfg.nonsing_samples = get_as<u64>(val, key);
    else if (key == "birch_primes") cfg.birch_primes = get_as<std::vector<u64>>(val, key);
    else if (key == "birch_exhaustive") cfg.birch_exhaustive = get_as<u64>(val, key);
    else if (key == "dim_vstar") cfg.dim_vstar = get_as<i64>(val, key);
    else if (key == "partition") cfg.partition = get_as<std::string>(val, key);
    else if (key == "alpha") cfg.alpha = get_as<std::vector<double>>(val, key);
    else if (key == "Q") cfg.Q = get_as<double>(val, key);
    else if (key == "out") cfg.out = get_as<std::string>(val, key);
    else if (key == "csv") cfg.csv_dir = get_as<std::string>(val, key);
    else throw pf::ParseError("unknown config key '" + key + "'");
  }
}

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream f(path);
  if (!f) throw pf::ParseError("cannot open config file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::exception& e) {
    throw pf::ParseError("config file " + path + ": " + e.what());
  }
  apply_config(j, cfg);
}

// Pre-scan for --config so file values load before flag overrides.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return "";
}

// ------------------------------------------------------------ shared helpers

pf::Box resolve_box(const RunConfig& cfg, u32 n) {
  pf::Box box;
  if (cfg.box_values.empty()) {
    box = pf::Box::uniform(n);
  } else if (cfg.box_values.size() == 2) {
    box = pf::Box::uniform(n, cfg.box_values[0], cfg.box_values[1]);
  } else if (cfg.box_values.size() == 2 * n) {
    box.lo.assign(cfg.box_values.begin(), cfg.box_values.begin() + n);
    box.hi.assign(cfg.box_values.begin() + n, cfg.box_values.end());
  } else {
    throw pf::InputError("box needs 2 values (uniform) or 2n values (lo..., hi...)");
  }
  pf::validate_box(box, n);
  return box;
}

pf::VarPartition resolve_partition(const RunConfig& cfg, u32 n) {
  if (cfg.partition.empty()) return pf::VarPartition::all_w(n);
  if (cfg.partition.size() != n)
    throw pf::InputError("partition must assign one of y/z/w to each of the " +
                         std::to_string(n) + " variables");
  pf::VarPartition part;
  for (char c : cfg.partition) {
    switch (c) {
      case 'y': part.label.push_back(pf::VarClass::Y); break;
      case 'z': part.label.push_back(pf::VarClass::Z); break;
      case 'w': part.label.push_back(pf::VarClass::W); break;
      default: throw pf::InputError("partition labels must be y, z, or w");
    }
  }
  return part;
}

std::vector<u64> primes_up_to(u64 p_max) {
  std::vector<u64> ps;
  for (u64 p = 2; p <= p_max; ++p)
    if (pf::is_prime_u64(p)) ps.push_back(p);
  return ps;
}

void require_sorted_P(const RunConfig& cfg) {
  for (size_t i = 1; i < cfg.P.size(); ++i)
    if (cfg.P[i - 1] >= cfg.P[i])
      throw pf::InputError("P list must be strictly ascending");
  for (u64 P : cfg.P)
    if (P < 4) throw pf::InputError("P must be at least 4");
}

Json base_report(const char* sub, const RunConfig& cfg, const pf::System& sys) {
  Json j;
  j["schema"] = 1;
  j["subcommand"] = sub;
  j["system_file"] = cfg.system_path;
  j["system"] = pf::system_json(sys);
  j["seed"] = cfg.seed;
  return j;
}

void write_csv(const RunConfig& cfg, const std::string& name,
               const std::string& content) {
  if (cfg.csv_dir.empty()) return;
  std::filesystem::create_directories(cfg.csv_dir);
  std::filesystem::path p = std::filesystem::path(cfg.csv_dir) / name;
  pf::emit_text(content, p.string());
}

// -------------------------------------------------------------- predict core

// Singular series x singular integral x P^{n-D}, with the factors computed
// once and the local obstruction scan run up front.
struct Prediction {
  pf::SeriesTruncation series;
  pf::EulerProduct euler;
  pf::IntegralEstimate integral;
  i64 exponent = 0;              // n - weighted degree sum
  std::optional<u64> obstruction;

  double at(u64 P) const {
    if (obstruction) return 0.0;
    return series.partial * integral.value *
           std::pow(static_cast<double>(P), static_cast<double>(exponent));
  }
};

Prediction run_prediction(const pf::System& sys, const pf::Box& box,
                          const RunConfig& cfg) {
  Prediction pr;
  pr.series = pf::singular_series(sys, cfg.H, cfg.budget, cfg.threads);
  pr.euler = pf::euler_product(sys, cfg.p_max, cfg.k_max, cfg.budget);
  pr.obstruction = pr.euler.obstruction_prime;
  pf::QuadSpec spec;
  spec.nodes = cfg.quad_nodes;
  pr.integral = pf::singular_integral(sys, box, cfg.H_arch, spec,
                                      cfg.mc_samples, cfg.seed, cfg.threads);
  auto prof = pf::degree_profile(sys);
  pr.exponent = static_cast<i64>(sys.n) - static_cast<i64>(prof.weight);
  return pr;
}

Json prediction_json(const Prediction& pr, const std::vector<u64>& Ps) {
  Json j;
  j["series"] = pf::series_json(pr.series);
  j["euler"] = pf::euler_json(pr.euler);
  j["integral"] = pf::integral_json(pr.integral);
  j["exponent"] = pr.exponent;
  if (pr.obstruction) {
    Json ob;
    ob["p"] = *pr.obstruction;
    ob["reason"] = "p=" + std::to_string(*pr.obstruction) + " obstruction";
    j["obstruction"] = ob;
  } else {
    j["obstruction"] = Json(nullptr);
  }
  Json rows = Json::array();
  for (u64 P : Ps) {
    Json row;
    row["P"] = P;
    row["value"] = pf::prov(pr.at(P), "truncation");
    rows.push_back(row);
  }
  j["predictions"] = rows;
  return j;
}

// ---------------------------------------------------------------- checklist

Json check_entry(const std::string& name, const std::string& status,
                 const std::string& detail) {
  Json e;
  e["name"] = name;
  e["status"] = status;
  e["detail"] = detail;
  return e;
}

// Hypothesis checklist: each entry is pass/fail/not-verified, and "verified
// up to a bound" is never promoted to "true".
Json checklist_json(const pf::System& sys, const pf::Box& box,
                    const RunConfig& cfg) {
  Json list = Json::array();
  auto prof = pf::degree_profile(sys);

  // 1. Sampled nonsingularity: every degree slice where the block Jacobian
  //    drops rank should look like codimension >= 2.
  std::map<u32, i64> B;
  try {
    i64 worst = -1;
    u32 worst_d = 0;
    for (u32 d : prof.delta) {
      auto be = pf::estimate_birch_dim(sys, d, cfg.birch_primes,
                                       cfg.birch_exhaustive, cfg.nonsing_samples,
                                       cfg.seed, cfg.threads);
      B[d] = be.estimate;
      if (be.estimate > worst) { worst = be.estimate; worst_d = d; }
    }
    if (worst <= static_cast<i64>(sys.n) - 2) {
      list.push_back(check_entry(
          "nonsingularity (sampled)", "pass",
          "largest singular-slice dimension estimate " + std::to_string(worst) +
              " <= n-2 = " + std::to_string(sys.n - 2)));
    } else {
      list.push_back(check_entry(
          "nonsingularity (sampled)", "fail",
          "degree-" + std::to_string(worst_d) + " singular slice estimate " +
              std::to_string(worst) + " exceeds n-2 = " +
              std::to_string(sys.n - 2)));
    }
  } catch (const std::exception& e) {
    list.push_back(check_entry("nonsingularity (sampled)", "not-verified", e.what()));
  }

  // 2. Admissibility of the variable count for the power-saving inequalities.
  try {
    auto psp = pf::power_saving_profile(sys.n, prof, B, cfg.dim_vstar);
    if (psp.adm.admissible) {
      list.push_back(check_entry("admissible variable count", "pass",
                                 "all power-saving quantities positive"));
    } else {
      std::string which;
      for (u32 d : psp.adm.failing) which += (which.empty() ? "" : ",") + std::to_string(d);
      list.push_back(check_entry("admissible variable count", "fail",
                                 "inequality fails at d in {" + which + "}"));
    }
  } catch (const std::exception& e) {
    list.push_back(check_entry("admissible variable count", "not-verified", e.what()));
  }

  // 3. The theorem-scale variable threshold, printed honestly.
  {
    auto tr = pf::threshold_report(prof);
    bool ok = pf::Int(sys.n) >= tr.n_min_theorem;
    list.push_back(check_entry(
        "n >= D^2 4^(D+6) R^5", ok ? "pass" : "fail",
        "n = " + std::to_string(sys.n) + ", threshold = " + tr.n_min_theorem.str()));
  }

  // 4. Local witnesses at every prime up to the scan bound.
  try {
    std::optional<u64> bad_p;
    u32 bad_k = 0;
    std::optional<u64> open_p;
    for (u64 p : primes_up_to(cfg.p_max)) {
      auto h = pf::hensel_check(sys, p, cfg.k_budget, cfg.budget, cfg.seed);
      if (h.outcome == pf::HenselWitness::Outcome::Obstruction) {
        bad_p = p;
        bad_k = h.k;
        break;
      }
      if (h.outcome == pf::HenselWitness::Outcome::Inconclusive && !open_p) open_p = p;
    }
    if (bad_p) {
      list.push_back(check_entry(
          "local witnesses p <= " + std::to_string(cfg.p_max), "fail",
          "p=" + std::to_string(*bad_p) + " obstruction at level " +
              std::to_string(bad_k)));
    } else if (open_p) {
      list.push_back(check_entry(
          "local witnesses p <= " + std::to_string(cfg.p_max), "not-verified",
          "p=" + std::to_string(*open_p) + " inconclusive within budget"));
    } else {
      list.push_back(check_entry(
          "local witnesses p <= " + std::to_string(cfg.p_max), "pass",
          "nonsingular unit witness at every prime scanned"));
    }
  } catch (const std::exception& e) {
    list.push_back(check_entry("local witnesses p <= " + std::to_string(cfg.p_max),
                               "not-verified", e.what()));
  }

  // 5. Nonsingular real point inside the box.
  try {
    auto w = pf::find_real_point(sys, box, cfg.restarts, cfg.seed);
    if (w) {
      std::ostringstream os;
      os << "residual " << w->residual << ", sigma_min " << w->sigma_min;
      list.push_back(check_entry("real witness in box", "pass", os.str()));
    } else {
      list.push_back(check_entry(
          "real witness in box", "not-verified",
          "no witness found in " + std::to_string(cfg.restarts) +
              " restarts (not a proof of absence)"));
    }
  } catch (const std::exception& e) {
    list.push_back(check_entry("real witness in box", "not-verified", e.what()));
  }

  return list;
}

// ---------------------------------------------------------------- subcommands

int cmd_analyze(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  auto prof = pf::degree_profile(sys);
  Json j = base_report("analyze", cfg, sys);
  j["profile"] = pf::profile_json(prof);

  std::map<u32, i64> B;
  Json birch = Json::array();
  Json notes = Json::array();
  for (u32 d : prof.delta) {
    auto be = pf::estimate_birch_dim(sys, d, cfg.birch_primes, cfg.birch_exhaustive,
                                     cfg.nonsing_samples, cfg.seed, cfg.threads);
    B[d] = be.estimate;
    birch.push_back(pf::birch_json(be));
    if (be.method == "sampled") {
      bool clean = true;
      for (auto& [p, pts] : be.counts) clean = clean && pts == 0;
      if (clean)
        notes.push_back("degree " + std::to_string(d) +
                        ": no singularity found (sampled)");
    }
  }
  j["birch"] = birch;
  j["singularity_notes"] = notes;

  try {
    auto psp = pf::power_saving_profile(sys.n, prof, B, cfg.dim_vstar);
    j["power_saving"] = pf::power_saving_json(psp);
  } catch (const pf::InputError& e) {
    Json err;
    err["error"] = e.what();
    j["power_saving"] = err;
  }
  j["thresholds"] = pf::thresholds_json(pf::threshold_report(prof));

  auto part = resolve_partition(cfg, sys.n);
  j["partition"] = cfg.partition.empty() ? std::string(sys.n, 'w') : cfg.partition;
  j["top_block_rank"] = pf::top_block_rank(sys, part);
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_local(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  Json j = base_report("local", cfg, sys);
  j["series"] = pf::series_json(pf::singular_series(sys, cfg.H, cfg.budget, cfg.threads));
  j["euler"] = pf::euler_json(pf::euler_product(sys, cfg.p_max, cfg.k_max, cfg.budget));
  Json dens = Json::array();
  Json hens = Json::array();
  for (u64 p : primes_up_to(cfg.p_max)) {
    dens.push_back(pf::local_density_json(pf::local_density(sys, p, cfg.k_max, cfg.budget)));
    hens.push_back(pf::hensel_json(pf::hensel_check(sys, p, cfg.k_budget, cfg.budget, cfg.seed)));
  }
  j["densities"] = dens;
  j["hensel"] = hens;
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_arch(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  pf::Box box = resolve_box(cfg, sys.n);
  pf::QuadSpec spec;
  spec.nodes = cfg.quad_nodes;
  Json j = base_report("arch", cfg, sys);
  Json b;
  b["lo"] = box.lo;
  b["hi"] = box.hi;
  j["box"] = b;
  // upsilon at the origin must equal the box volume; cheap self-check row.
  j["upsilon_origin"] =
      pf::upsilon_json(pf::upsilon(sys, box, std::vector<double>(sys.R(), 0.0), spec));
  j["integral"] = pf::integral_json(pf::singular_integral(
      sys, box, cfg.H_arch, spec, cfg.mc_samples, cfg.seed, cfg.threads));
  j["density"] = pf::density_json(pf::real_density(
      sys, box, cfg.epsilon, cfg.mc_samples, cfg.seed, cfg.threads));
  auto w = pf::find_real_point(sys, box, cfg.restarts, cfg.seed);
  j["witness"] = w ? pf::witness_json(*w) : Json(nullptr);
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_count(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  pf::Box box = resolve_box(cfg, sys.n);
  require_sorted_P(cfg);
  Json j = base_report("count", cfg, sys);
  Json rows = Json::array();
  std::ostringstream csv;
  csv << "P,weighted,unweighted,total_solutions,strategy\n";
  for (u64 P : cfg.P) {
    auto cr = pf::count_prime_solutions(sys, box, P, cfg.strategy, cfg.max_cost,
                                        cfg.solution_cap, cfg.threads);
    rows.push_back(pf::count_json(cr));
    csv << P << ',' << pf::csv_double(cr.weighted) << ',' << cr.unweighted << ','
        << cr.total_solutions << ',' << cr.strategy << '\n';
  }
  j["counts"] = rows;
  write_csv(cfg, "count.csv", csv.str());
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_predict(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  pf::Box box = resolve_box(cfg, sys.n);
  require_sorted_P(cfg);
  Json j = base_report("predict", cfg, sys);
  Prediction pr = run_prediction(sys, box, cfg);
  j["predict"] = prediction_json(pr, cfg.P);
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_compare(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  pf::Box box = resolve_box(cfg, sys.n);
  require_sorted_P(cfg);
  Json j = base_report("compare", cfg, sys);

  std::optional<Prediction> pr;
  try {
    pr = run_prediction(sys, box, cfg);
    j["predict"] = prediction_json(*pr, cfg.P);
  } catch (const std::exception& e) {
    j["predict_error"] = e.what();
  }

  Json rows = Json::array();
  Json plot = Json::array();
  std::ostringstream csv, plot_csv;
  csv << "P,weighted,predicted,ratio\n";
  plot_csv << "P,ratio\n";
  for (u64 P : cfg.P) {
    Json row;
    row["P"] = P;
    std::optional<double> measured, predicted;
    try {
      auto cr = pf::count_prime_solutions(sys, box, P, cfg.strategy, cfg.max_cost,
                                          cfg.solution_cap, cfg.threads);
      row["count"] = pf::count_json(cr);
      measured = cr.weighted;
    } catch (const std::exception& e) {
      row["count_error"] = e.what();   // row stays; the run continues
    }
    if (pr) {
      predicted = pr->at(P);
      row["predicted"] = pf::prov(*predicted, "truncation");
    }
    // Ratio only when both sides are positive.
    if (measured && predicted && *measured > 0 && *predicted > 0) {
      double ratio = *measured / *predicted;
      row["ratio"] = ratio;
      Json pt;
      pt["P"] = P;
      pt["ratio"] = ratio;
      plot.push_back(pt);
      csv << P << ',' << pf::csv_double(*measured) << ','
          << pf::csv_double(*predicted) << ',' << pf::csv_double(ratio) << '\n';
      plot_csv << P << ',' << pf::csv_double(ratio) << '\n';
    } else {
      row["ratio"] = Json(nullptr);
      csv << P << ',' << (measured ? pf::csv_double(*measured) : "") << ','
          << (predicted ? pf::csv_double(*predicted) : "") << ",\n";
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  j["plot_data"] = plot;
  j["checklist"] = checklist_json(sys, box, cfg);
  write_csv(cfg, "compare.csv", csv.str());
  write_csv(cfg, "plot.csv", plot_csv.str());
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_probe_arcs(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  pf::Box box = resolve_box(cfg, sys.n);
  Json j = base_report("probe-arcs", cfg, sys);
  if (!cfg.alpha.empty()) {
    // One-off classification of a single frequency point.
    if (cfg.P.empty()) throw pf::InputError("arc classification needs --P");
    double P = static_cast<double>(cfg.P.front());
    double Q = cfg.Q > 0 ? cfg.Q
                         : std::pow(P, pf::to_double(pf::varpi_of(sys.R())));
    j["P"] = cfg.P.front();
    j["Q"] = Q;
    j["arc"] = pf::arc_json(pf::classify_arc(sys, cfg.alpha, P, Q));
  } else {
    require_sorted_P(cfg);
    if (cfg.P.empty()) throw pf::InputError("minor-arc probe needs --P values");
    auto probe = pf::minor_arc_probe(sys, box, cfg.P, cfg.arc_samples, cfg.seed,
                                     cfg.max_cost, cfg.threads);
    j["probe"] = pf::minor_probe_json(probe);
    std::ostringstream csv;
    csv << "P,Q,max_norm,q90_norm,fitted_exponent\n";
    for (const auto& r : probe.rows)
      csv << r.P << ',' << pf::csv_double(r.Q) << ',' << pf::csv_double(r.max_norm)
          << ',' << pf::csv_double(r.q90_norm) << ','
          << pf::csv_double(probe.fitted_exponent) << '\n';
    write_csv(cfg, "probe_arcs.csv", csv.str());
  }
  pf::emit_report(j, cfg.out);
  return 0;
}

int cmd_probe_gauss(const RunConfig& cfg) {
  pf::System sys = pf::load_system(cfg.system_path);
  Json j = base_report("probe-gauss", cfg, sys);
  auto rows = pf::gauss_average_probe(sys, cfg.q_max, cfg.budget);
  j["rows"] = pf::gauss_rows_json(rows);
  std::ostringstream csv;
  csv << "q,dagger_sum_abs,ratio\n";
  for (const auto& r : rows)
    csv << r.q << ',' << pf::csv_double(r.dagger_sum_abs) << ','
        << pf::csv_double(r.ratio) << '\n';
  write_csv(cfg, "probe_gauss.csv", csv.str());
  pf::emit_report(j, cfg.out);
  return 0;
}

// ---------------------------------------------------------------------- main

int run(int argc, char** argv) {
  RunConfig cfg;
  cfg.threads = static_cast<int>(env_threads());
  std::string config_path = find_config_arg(argc, argv);
  if (!config_path.empty()) load_config_file(config_path, cfg);

  CLI::App app{"circle-method analysis of prime solutions to systems of forms"};
  app.require_subcommand(1);

  std::string config_echo;  // registered so CLI11 accepts the flag; handled above
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_echo, "JSON config file (defaults; flags win)");
    sub->add_option("--system", cfg.system_path, "system file (text or JSON)");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--out", cfg.out, "report path (default stdout)");
    sub->add_option("--csv", cfg.csv_dir, "directory for CSV side outputs");
    sub->add_option("--box", cfg.box_values,
                    "box: 2 values (uniform) or 2n values (lo..., hi...)")
        ->delimiter(',');
    sub->add_option("--budget", cfg.budget, "modular-arithmetic budget");
    sub->add_option("--max-cost", cfg.max_cost, "counting cost ceiling");
    return sub;
  };

  auto* analyze = add_common(app.add_subcommand(
      "analyze", "degree profile, singular-locus estimates, power savings, thresholds"));
  analyze->add_option("--partition", cfg.partition, "per-variable labels from {y,z,w}");
  analyze->add_option("--dim-vstar", [&cfg](const std::vector<std::string>& v) {
    cfg.dim_vstar = std::stoll(v.back());
    return true;
  }, "singular-locus dimension override")->expected(1);
  analyze->add_option("--birch-primes", cfg.birch_primes, "primes for slice counts")
      ->delimiter(',');
  analyze->add_option("--nonsing-samples", cfg.nonsing_samples,
                      "sampled points per prime");

  auto* local = add_common(app.add_subcommand(
      "local", "singular series, Euler product, per-prime densities and witnesses"));
  local->add_option("--H", cfg.H, "series cutoff");
  local->add_option("--p-max", cfg.p_max, "largest prime scanned");
  local->add_option("--k-max", cfg.k_max, "density levels p^k");
  local->add_option("--k-budget", cfg.k_budget, "lift depth for witnesses");

  auto* arch = add_common(app.add_subcommand(
      "arch", "oscillatory integral, slab density, real witness"));
  arch->add_option("--H-arch", cfg.H_arch, "theta-cube cutoff");
  arch->add_option("--epsilon", cfg.epsilon, "slab width for the density oracle");
  arch->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples");
  arch->add_option("--quad-nodes", cfg.quad_nodes, "fixed per-axis nodes (0 = auto)");
  arch->add_option("--restarts", cfg.restarts, "witness search restarts");

  auto* count = add_common(app.add_subcommand(
      "count", "exact weighted prime-solution counts"));
  count->add_option("--P", cfg.P, "box sizes, ascending")->delimiter(',');
  count->add_option("--strategy", cfg.strategy, "full | hash-join | auto");
  count->add_option("--solution-cap", cfg.solution_cap, "stored solution cap");

  auto* predict = add_common(app.add_subcommand(
      "predict", "main-term prediction: series x integral x P^(n-degree sum)"));
  predict->add_option("--P", cfg.P, "box sizes, ascending")->delimiter(',');
  predict->add_option("--H", cfg.H, "series cutoff");
  predict->add_option("--H-arch", cfg.H_arch, "theta-cube cutoff");
  predict->add_option("--p-max", cfg.p_max, "obstruction scan bound");
  predict->add_option("--k-max", cfg.k_max, "density levels p^k");
  predict->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples");
  predict->add_option("--quad-nodes", cfg.quad_nodes, "fixed per-axis nodes (0 = auto)");

  auto* compare = add_common(app.add_subcommand(
      "compare", "count vs prediction per P, with the hypothesis checklist"));
  compare->add_option("--P", cfg.P, "box sizes, ascending")->delimiter(',');
  compare->add_option("--H", cfg.H, "series cutoff");
  compare->add_option("--H-arch", cfg.H_arch, "theta-cube cutoff");
  compare->add_option("--p-max", cfg.p_max, "obstruction scan bound");
  compare->add_option("--k-max", cfg.k_max, "density levels p^k");
  compare->add_option("--k-budget", cfg.k_budget, "lift depth for witnesses");
  compare->add_option("--mc-samples", cfg.mc_samples, "Monte Carlo samples");
  compare->add_option("--quad-nodes", cfg.quad_nodes, "fixed per-axis nodes (0 = auto)");
  compare->add_option("--strategy", cfg.strategy, "full | hash-join | auto");
  compare->add_option("--solution-cap", cfg.solution_cap, "stored solution cap");
  compare->add_option("--restarts", cfg.restarts, "witness search restarts");

  auto* parcs = add_common(app.add_subcommand(
      "probe-arcs", "minor-arc norm decay probe, or one-off arc classification"));
  parcs->add_option("--P", cfg.P, "box sizes, ascending")->delimiter(',');
  parcs->add_option("--alpha", cfg.alpha, "frequency point to classify")->delimiter(',');
  parcs->add_option("--Q", cfg.Q, "arc parameter (default P^varpi)");
  parcs->add_option("--arc-samples", cfg.arc_samples, "samples per P");

  auto* pgauss = add_common(app.add_subcommand(
      "probe-gauss", "averaged Gauss-sum decay table"));
  pgauss->add_option("--q-max", cfg.q_max, "largest modulus");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (cfg.system_path.empty())
    throw pf::ParseError("no system file given (--system flag or config \"system\")");

  if (app.got_subcommand(analyze)) return cmd_analyze(cfg);
  if (app.got_subcommand(local)) return cmd_local(cfg);
  if (app.got_subcommand(arch)) return cmd_arch(cfg);
  if (app.got_subcommand(count)) return cmd_count(cfg);
  if (app.got_subcommand(predict)) return cmd_predict(cfg);
  if (app.got_subcommand(compare)) return cmd_compare(cfg);
  if (app.got_subcommand(parcs)) return cmd_probe_arcs(cfg);
  if (app.got_subcommand(pgauss)) return cmd_probe_gauss(cfg);
  throw pf::InternalError("subcommand dispatch fell through");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const pf::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pf::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const pf::BudgetError& e) {
    std::cerr << "budget: " << e.what() << '\n';
    return 3;
  } catch (const pf::InternalError& e) {
    std::cerr << "internal: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal: " << e.what() << '\n';
    return 4;
  }
}
