// End-to-end exercises of the primeforms binary: every subcommand is run as a
// real subprocess and its JSON report re-parsed, so flag names, report keys,
// CSV side tables, config-file precedence, determinism guarantees, and the
// documented exit codes are all pinned here exactly as a user sees them.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "primeforms/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;
using Json = primeforms::Json;

namespace {

// ------------------------------------------------------------ subprocess glue

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("pf_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  fs::path out = scratch_dir() / ("out_" + std::to_string(counter) + ".txt");
  fs::path err = scratch_dir() / ("err_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd = std::string("\"") + PF_CLI_PATH + "\" " + args + " >" +
                    out.string() + " 2>" + err.string();
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  CliResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string sys_path(const std::string& name) {
  return std::string(PF_SOURCE_DIR) + "/systems/" + name + ".sys";
}

Json parse_report(const CliResult& r) {
  REQUIRE(r.code == 0);
  INFO("stderr: " << r.err);
  REQUIRE_FALSE(r.out.empty());
  return Json::parse(r.out);
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

fs::path write_file(const std::string& name, const std::string& body) {
  fs::path p = scratch_dir() / name;
  std::ofstream of(p, std::ios::binary);
  of << body;
  REQUIRE(of.good());
  return p;
}

}  // namespace

// ----------------------------------------------------------------- subcommands

TEST_CASE("analyze: profile, thresholds, and admissibility of the mixed system") {
  auto r = run_cli("analyze --system " + sys_path("quadric_cubic") +
                   " --birch-primes 31,37");
  Json j = parse_report(r);

  CHECK(j["schema"] == 1);
  CHECK(j["subcommand"] == "analyze");
  CHECK(j["system"]["n"] == 4);
  CHECK(j["system"]["R"] == 2);
  CHECK(j["system"]["degrees"] == Json::array({2, 3}));
  CHECK(j["system"]["diagonal"] == true);
  CHECK(j["system"]["forms"].size() == 2);
  CHECK(j["seed"] == 1);

  CHECK(j["profile"]["weight"] == 5);
  CHECK(j["profile"]["min_degree"] == 2);
  CHECK(j["profile"]["max_degree"] == 3);
  CHECK(j["profile"]["R"] == 2);
  CHECK(j["profile"]["r"]["2"] == 1);
  CHECK(j["profile"]["r"]["3"] == 1);

  // Both degree slices are smooth away from the origin, so the estimated
  // singular dimension is zero and enumeration is exhaustive at these primes.
  REQUIRE(j["birch"].size() == 2);
  for (const auto& b : j["birch"]) {
    CHECK(b["estimate"] == 0);
    CHECK(b["method"] == "exact-pointcount");
  }

  const Json& ps = j["power_saving"];
  REQUIRE_FALSE(ps.contains("error"));
  CHECK(ps["n"] == 4);
  CHECK(ps["dim_vstar"] == 0);
  CHECK(ps["s"]["2"]["exact"] == "5/2");
  CHECK(ps["s"]["3"]["exact"] == "2");
  CHECK(ps["t"]["2"]["exact"] == "-16/5");
  CHECK(ps["t"]["3"]["exact"] == "-4");
  CHECK(ps["t0"]["exact"] == "-6");
  CHECK(ps["A1"]["exact"] == "4");
  CHECK(ps["admissibility"]["admissible"] == false);
  CHECK(ps["admissibility"]["failing"] == Json::array({0, 2, 3}));

  const Json& th = j["thresholds"];
  CHECK(th["varpi"]["exact"] == "1/12");
  CHECK(th["n_min_theorem"]["exact"] == "75497472");
  CHECK(th["remark_bound"]["exact"] == "294912");
  CHECK(th["remark_holds"] == true);
  CHECK(th["iota1"]["exact"] == "18554");
  CHECK(th["iota2"]["exact"] == "18914");
  CHECK(th["iota3"]["exact"] == "56416");
  REQUIRE(th["kappa"].size() == 4);
  CHECK(th["kappa"][0]["rhs"]["exact"] == "46");
  for (const auto& k : th["kappa"]) {
    // No codimension input was supplied, so both sides stay open.
    CHECK(k["lhs"].is_null());
    CHECK(k["pass"].is_null());
  }

  CHECK(j["partition"] == "wwww");
  CHECK(j["top_block_rank"] == 2);
}

TEST_CASE("reports are byte-identical across runs, thread counts, and --out") {
  std::string analyze_args =
      "analyze --system " + sys_path("quadric_cubic") + " --birch-primes 31";
  auto a1 = run_cli(analyze_args);
  auto a2 = run_cli(analyze_args);
  REQUIRE(a1.code == 0);
  REQUIRE(a2.code == 0);
  CHECK(a1.out == a2.out);

  // --out writes exactly the bytes that would have gone to stdout.
  fs::path f = scratch_dir() / "analyze_out.json";
  auto a3 = run_cli(analyze_args + " --out " + f.string());
  REQUIRE(a3.code == 0);
  CHECK(a3.out.empty());
  CHECK(slurp(f) == a1.out);

  std::string count_args =
      "count --system " + sys_path("quadric4") + " --P 50,80 --threads ";
  auto c1 = run_cli(count_args + "1");
  auto c4 = run_cli(count_args + "4");
  REQUIRE(c1.code == 0);
  REQUIRE(c4.code == 0);
  CHECK(c1.out == c4.out);
}

TEST_CASE("local: series terms, euler obstruction, densities, hensel rows") {
  auto r = run_cli("local --system " + sys_path("sum2sq") +
                   " --H 7 --p-max 7 --k-max 4 --k-budget 4");
  Json j = parse_report(r);
  CHECK(j["subcommand"] == "local");

  const Json& s = j["series"];
  CHECK(s["H"] == 7);
  REQUIRE(s["terms"].size() == 7);
  CHECK(s["terms"][0].get<double>() == doctest::Approx(1.0));
  CHECK(s["terms"][6].get<double>() == doctest::Approx(-1.0));
  CHECK(s["partial"]["prov"] == "truncation");
  CHECK(s["partial"]["exact"] == "-3/2");
  CHECK(s["partial"]["value"].get<double>() == doctest::Approx(-1.5));

  const Json& e = j["euler"];
  CHECK(e["obstruction_prime"] == 2);
  CHECK(e["value"]["value"].get<double>() == 0.0);
  REQUIRE(e["factors"].size() == 4);   // p = 2, 3, 5, 7
  CHECK(e["factors"][0]["p"] == 2);

  REQUIRE(j["densities"].size() == 4);
  const Json& d2 = j["densities"][0];
  CHECK(d2["p"] == 2);
  CHECK(d2["stabilized"] == true);
  CHECK(d2["stabilization_k"] == 2);
  CHECK(d2["values"][0]["value"].get<double>() == doctest::Approx(2.0));
  CHECK(d2["values"][1]["value"].get<double>() == 0.0);
  const Json& d5 = j["densities"][2];
  CHECK(d5["p"] == 5);
  CHECK(d5["stabilized"] == true);
  CHECK(d5["stabilization_k"] == 1);
  CHECK(d5["values"][0]["exact"] == "5/2");

  REQUIRE(j["hensel"].size() == 4);
  CHECK(j["hensel"][0]["p"] == 2);
  CHECK(j["hensel"][0]["outcome"] == "obstruction");
  CHECK(j["hensel"][0]["k"] == 2);
  CHECK(j["hensel"][2]["p"] == 5);
  CHECK(j["hensel"][2]["outcome"] == "witness");
}

TEST_CASE("predict: an obstructed system predicts zero and names the prime") {
  auto r = run_cli("predict --system " + sys_path("sum3sq") +
                   " --P 50,100 --H 10 --p-max 7 --H-arch 2 --mc-samples 4000");
  Json j = parse_report(r);
  const Json& p = j["predict"];
  REQUIRE_FALSE(p["obstruction"].is_null());
  CHECK(p["obstruction"]["p"] == 2);
  CHECK(p["obstruction"]["reason"] == "p=2 obstruction");
  CHECK(p["euler"]["obstruction_prime"] == 2);
  CHECK(p["exponent"] == 1);   // n - weight = 3 - 2
  CHECK(p["series"]["H"] == 10);
  CHECK(p["integral"]["method"] == "tensor-quadrature");
  REQUIRE(p["predictions"].size() == 2);
  for (const auto& row : p["predictions"]) {
    CHECK(row["value"]["prov"] == "truncation");
    CHECK(row["value"]["value"].get<double>() == 0.0);
  }
  CHECK(p["predictions"][0]["P"] == 50);
}

TEST_CASE("count: CSV side table mirrors the JSON rows") {
  fs::path dir = scratch_dir() / "csv_count";
  auto r = run_cli("count --system " + sys_path("quadric4") +
                   " --P 50,80 --csv " + dir.string());
  Json j = parse_report(r);
  REQUIRE(j["counts"].size() == 2);
  const Json& c0 = j["counts"][0];
  CHECK(c0["P"] == 50);
  CHECK(c0["weighted"]["prov"] == "exact");
  CHECK(c0["weighted"]["value"].get<double>() > 0.0);
  CHECK(c0["unweighted"]["value"].get<long long>() > 0);
  CHECK(c0["box"]["lo"][0].get<double>() == doctest::Approx(0.1));
  CHECK(c0["box"]["hi"][0].get<double>() == doctest::Approx(0.9));

  auto lines = split_lines(slurp(dir / "count.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "P,weighted,unweighted,total_solutions,strategy");
  auto row = split_csv_row(lines[1]);
  REQUIRE(row.size() == 5);
  CHECK(row[0] == "50");
  CHECK(std::stod(row[1]) == doctest::Approx(c0["weighted"]["value"].get<double>())
                                 .epsilon(1e-15));
  CHECK(std::stoll(row[2]) == c0["unweighted"]["value"].get<long long>());
  CHECK(row[4] == c0["strategy"].get<std::string>());
}

TEST_CASE("compare: rows, checklist verdicts, and both CSV side tables") {
  fs::path dir = scratch_dir() / "csv_compare";
  auto r = run_cli("compare --system " + sys_path("quadric_cubic") +
                   " --P 30 --H 8 --p-max 5 --k-max 3 --k-budget 3" +
                   " --H-arch 2 --mc-samples 4000 --csv " + dir.string());
  Json j = parse_report(r);
  REQUIRE(j.contains("predict"));
  REQUIRE_FALSE(j.contains("predict_error"));

  REQUIRE(j["rows"].size() == 1);
  const Json& row = j["rows"][0];
  CHECK(row["P"] == 30);
  REQUIRE(row.contains("count"));
  CHECK(row["count"]["weighted"]["value"].get<double>() > 0.0);
  REQUIRE(row.contains("predicted"));
  CHECK(row.contains("ratio"));   // number or null, but always reported

  const Json& cl = j["checklist"];
  REQUIRE(cl.size() == 5);
  CHECK(cl[0]["name"] == "nonsingularity (sampled)");
  CHECK(cl[0]["status"] == "pass");
  CHECK(cl[1]["name"] == "admissible variable count");
  CHECK(cl[1]["status"] == "fail");
  CHECK(contains(cl[1]["detail"].get<std::string>(), "{0,2,3}"));
  CHECK(cl[2]["name"] == "n >= D^2 4^(D+6) R^5");
  CHECK(cl[2]["status"] == "fail");
  CHECK(cl[2]["detail"] == "n = 4, threshold = 75497472");
  CHECK(cl[3]["name"] == "local witnesses p <= 5");
  // Every mod-2 (and mod-3) solution is singular, so the scan stays open
  // rather than claiming a pass; that is the honest verdict here.
  CHECK(cl[3]["status"] == "not-verified");
  CHECK(contains(cl[3]["detail"].get<std::string>(), "p=2"));
  CHECK(cl[4]["name"] == "real witness in box");
  CHECK(cl[4]["status"] == "pass");

  auto cmp_lines = split_lines(slurp(dir / "compare.csv"));
  REQUIRE(cmp_lines.size() == 2);
  CHECK(cmp_lines[0] == "P,weighted,predicted,ratio");
  CHECK(split_csv_row(cmp_lines[1])[0] == "30");
  auto plot_lines = split_lines(slurp(dir / "plot.csv"));
  CHECK(plot_lines[0] == "P,ratio");
}

TEST_CASE("compare without P still emits prediction and checklist") {
  auto r = run_cli("compare --system " + sys_path("sum2sq") +
                   " --H 5 --p-max 5 --k-max 3 --k-budget 3 --H-arch 2" +
                   " --mc-samples 2000");
  Json j = parse_report(r);
  CHECK(j["rows"].empty());
  CHECK(j["plot_data"].empty());
  CHECK(j["predict"]["obstruction"]["p"] == 2);

  const Json& cl = j["checklist"];
  REQUIRE(cl.size() == 5);
  CHECK(cl[0]["status"] == "pass");
  CHECK(cl[1]["status"] == "fail");
  CHECK(cl[2]["status"] == "fail");
  CHECK(cl[2]["detail"] == "n = 2, threshold = 262144");
  CHECK(cl[3]["status"] == "fail");
  CHECK(contains(cl[3]["detail"].get<std::string>(), "p=2 obstruction at level 2"));
  // No real zero exists inside the positive box; the search reports honestly
  // that absence of a witness is not a proof.
  CHECK(cl[4]["status"] == "not-verified");
  CHECK(contains(cl[4]["detail"].get<std::string>(), "not a proof of absence"));
}

TEST_CASE("probe-arcs: one-off classification and the decay table") {
  auto r1 = run_cli("probe-arcs --system " + sys_path("sum2sq") +
                    " --alpha 0.9999 --P 100");
  Json j1 = parse_report(r1);
  CHECK(j1["P"] == 100);
  CHECK(j1["Q"].get<double>() == doctest::Approx(std::pow(100.0, 0.125)));
  CHECK(j1["arc"]["major"] == true);
  CHECK(j1["arc"]["q"] == 1);
  CHECK(j1["arc"]["a"] == Json::array({1}));
  CHECK(j1["arc"]["distances"][0].get<double>() == doctest::Approx(1e-4));
  CHECK(j1["arc"]["measure_total"]["prov"] == "exact");

  auto r2 = run_cli("probe-arcs --system " + sys_path("sum2sq") +
                    " --alpha 0.9999 --P 100 --Q 1.5");
  Json j2 = parse_report(r2);
  CHECK(j2["Q"].get<double>() == 1.5);

  fs::path dir = scratch_dir() / "csv_arcs";
  auto r3 = run_cli("probe-arcs --system " + sys_path("sum2sq") +
                    " --P 50,100 --arc-samples 6 --csv " + dir.string());
  Json j3 = parse_report(r3);
  REQUIRE(j3["probe"]["rows"].size() == 2);
  CHECK(j3["probe"]["rows"][0]["P"] == 50);
  CHECK(j3["probe"]["rows"][0]["max_norm"].get<double>() > 0.0);
  CHECK(j3["probe"]["samples"] == 6);
  CHECK(j3["probe"]["predicted_exponent"].get<double>() ==
        doctest::Approx(-0.03125));
  auto lines = split_lines(slurp(dir / "probe_arcs.csv"));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "P,Q,max_norm,q90_norm,fitted_exponent");
}

TEST_CASE("probe-gauss: normalized dagger table with CSV") {
  fs::path dir = scratch_dir() / "csv_gauss";
  auto r = run_cli("probe-gauss --system " + sys_path("sum2sq") +
                   " --q-max 5 --csv " + dir.string());
  Json j = parse_report(r);
  REQUIRE(j["rows"].size() == 5);
  CHECK(j["rows"][0]["q"] == 1);
  CHECK(j["rows"][0]["ratio"].get<double>() == doctest::Approx(1.0));
  CHECK(j["rows"][4]["q"] == 5);
  CHECK(j["rows"][4]["dagger_sum_abs"].get<double>() ==
        doctest::Approx(24.0).epsilon(1e-9));
  CHECK(j["rows"][4]["ratio"].get<double>() ==
        doctest::Approx(24.0 / std::sqrt(5.0)).epsilon(1e-9));
  auto lines = split_lines(slurp(dir / "probe_gauss.csv"));
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "q,dagger_sum_abs,ratio");
}

// ------------------------------------------------------------------ config file

TEST_CASE("config file feeds defaults; command-line flags win") {
  fs::path cfg = write_file("cfg_local.json",
                            "{\"system\": \"" + sys_path("sum2sq") +
                                "\", \"H\": 7, \"p_max\": 5, \"k_max\": 3, "
                                "\"k_budget\": 3}");
  auto r1 = run_cli("local --config " + cfg.string());
  Json j1 = parse_report(r1);
  CHECK(j1["series"]["H"] == 7);
  CHECK(j1["series"]["terms"].size() == 7);
  CHECK(j1["euler"]["factors"].size() == 3);   // p = 2, 3, 5
  CHECK(j1["hensel"].size() == 3);

  auto r2 = run_cli("local --config " + cfg.string() + " --H 9");
  Json j2 = parse_report(r2);
  CHECK(j2["series"]["H"] == 9);
  CHECK(j2["series"]["terms"].size() == 9);

  // Box may come from the config as an explicit lo/hi object.
  fs::path cfg_arch = write_file(
      "cfg_arch.json",
      "{\"system\": \"" + sys_path("sum2sq") +
          "\", \"box\": {\"lo\": [0.2, 0.25], \"hi\": [0.8, 0.75]}, "
          "\"mc_samples\": 20000, \"epsilon\": 0.01, \"H_arch\": 1.0, "
          "\"restarts\": 8}");
  auto r3 = run_cli("arch --config " + cfg_arch.string());
  Json j3 = parse_report(r3);
  CHECK(j3["box"]["lo"] == Json::array({0.2, 0.25}));
  CHECK(j3["box"]["hi"] == Json::array({0.8, 0.75}));
  CHECK(j3["upsilon_origin"]["value"]["re"].get<double>() ==
        doctest::Approx(0.6 * 0.5).epsilon(1e-9));
  CHECK(j3["density"]["value"]["prov"] == "monte-carlo");
  CHECK(j3["witness"].is_null());   // a sum of squares has no zero in the box

  // Two-value config box means a uniform box, and --box overrides it.
  fs::path cfg_count = write_file(
      "cfg_count.json", "{\"system\": \"" + sys_path("quadric4") +
                            "\", \"box\": [0.2, 0.8], \"P\": [50]}");
  auto r4 = run_cli("count --config " + cfg_count.string());
  Json j4 = parse_report(r4);
  CHECK(j4["counts"][0]["box"]["lo"] == Json::array({0.2, 0.2, 0.2, 0.2}));
  auto r5 = run_cli("count --config " + cfg_count.string() + " --box 0.1,0.9");
  Json j5 = parse_report(r5);
  CHECK(j5["counts"][0]["box"]["lo"] == Json::array({0.1, 0.1, 0.1, 0.1}));
}

// ------------------------------------------------------------------ exit codes

TEST_CASE("failure modes exit with the documented codes and prefixes") {
  auto no_system = run_cli("analyze");
  CHECK(no_system.code == 2);
  CHECK(contains(no_system.err, "error:"));
  CHECK(contains(no_system.err, "no system file"));

  auto missing = run_cli("analyze --system /nonexistent_pf_system.sys");
  CHECK(missing.code == 2);
  CHECK(contains(missing.err, "error:"));

  fs::path bad = write_file("inhomogeneous.sys", "vars 2\nx1^2 + x2\n");
  auto inhomog = run_cli("analyze --system " + bad.string());
  CHECK(inhomog.code == 2);
  CHECK(contains(inhomog.err, "error:"));

  auto budget = run_cli("count --system " + sys_path("quadric4") +
                        " --P 200 --strategy full --max-cost 10");
  CHECK(budget.code == 3);
  CHECK(contains(budget.err, "budget:"));
  CHECK(contains(budget.err, "--max-cost"));

  auto unsorted = run_cli("count --system " + sys_path("quadric4") +
                          " --P 100,50");
  CHECK(unsorted.code == 2);
  CHECK(contains(unsorted.err, "error:"));

  auto no_P = run_cli("probe-arcs --system " + sys_path("sum2sq") +
                      " --alpha 0.5");
  CHECK(no_P.code == 2);
  CHECK(contains(no_P.err, "needs --P"));

  fs::path bad_cfg = write_file("cfg_bad.json", "{\"frobnicate\": 1}");
  auto unknown_key = run_cli("analyze --config " + bad_cfg.string());
  CHECK(unknown_key.code == 2);
  CHECK(contains(unknown_key.err, "unknown config key 'frobnicate'"));

  auto bad_sub = run_cli("bogus");
  CHECK(bad_sub.code == 2);

  auto bad_flag = run_cli("analyze --system " + sys_path("sum2sq") +
                          " --bogus-flag 1");
  CHECK(bad_flag.code == 2);
}
