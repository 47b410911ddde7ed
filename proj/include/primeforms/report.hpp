// JSON report assembly: every numeric quantity is wrapped with a provenance
// tag (exact | quadrature | monte-carlo | truncation), exact values carry
// their rational form, and key order is always sorted so reports are
// byte-identical across runs and thread counts.
#pragma once

#include "primeforms/arch.hpp"
#include "primeforms/count.hpp"
#include "primeforms/local.hpp"
#include "primeforms/profile.hpp"

#include <json.hpp>

#include <string>

namespace primeforms {

using Json = nlohmann::json;   // std::map-backed: keys serialize sorted

// Provenance-wrapped scalars.
Json prov(double value, const char* tag);
Json prov_exact(const Int& value);
Json prov_exact(const Rat& value);
Json prov_exact_u64(u64 value);

Json system_json(const System& sys);
Json profile_json(const DegreeProfile& p);
Json birch_json(const BirchEstimate& b);
Json power_saving_json(const PowerSavingProfile& psp);
Json thresholds_json(const ThresholdReport& t);
Json level_counts_json(const LevelCounts& c);
Json local_density_json(const LocalDensity& d);
Json b_value_json(const BValue& b);
Json series_json(const SeriesTruncation& s);
Json euler_json(const EulerProduct& e);
Json hensel_json(const HenselWitness& h);
Json upsilon_json(const UpsilonValue& u);
Json integral_json(const IntegralEstimate& e);
Json density_json(const DensityEstimate& d);
Json witness_json(const RealWitness& w);
Json count_json(const CountResult& c);
Json arc_json(const ArcLabel& a);
Json minor_probe_json(const MinorArcProbe& p);
Json gauss_rows_json(const std::vector<GaussAverageRow>& rows);

// Deterministic shortest-round-trip double for CSV cells.
std::string csv_double(double v);

// Serialize with a fixed layout (2-space indent, sorted keys, newline).
std::string render_report(const Json& j);

// Write to the path, or stdout when the path is empty.
void emit_report(const Json& j, const std::string& out_path);
void emit_text(const std::string& text, const std::string& path);

}  // namespace primeforms
