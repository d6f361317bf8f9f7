#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "wrsn/engine.hpp"

namespace wrsn {

// Uniform i.i.d. placement over the square, drawn from std::mt19937_64
// seeded with `seed`: per node, x then y, each as the top 53 bits of one
// draw scaled to [0, 1) times the side. Fixed algorithm, identical output
// on every platform.
Scenario generate_scenario(int n, double area_side, std::uint64_t seed);

// Scenario file schema "wrsn-scenario-v1" (JSON). Unknown keys rejected.
nlohmann::ordered_json scenario_to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& j);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

// Write-to-temp-then-rename; no partially written artifact is ever visible.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double v);

std::string series_csv(const std::string& run_id, const std::vector<SeriesSample>& series);
std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory);
std::string heads_csv(const std::vector<HeadProfile>& profiles);

// Effective scheme parameters, embedded in summaries so a run can be
// reproduced bit-exactly from its artifacts alone.
nlohmann::ordered_json spec_to_json(const SchemeSpec& spec);
SchemeSpec spec_from_json(const nlohmann::json& j);

nlohmann::ordered_json summary_to_json(const std::string& run_id, const Scenario& scenario,
                                       const SchemeSpec& spec, const RunResult& result);
RunRecord record_from_summary(const nlohmann::json& summary);

std::string summary_rows_csv(const std::vector<SummaryRow>& rows);
nlohmann::ordered_json summary_rows_json(const std::vector<SummaryRow>& rows);

// Per-run artifact bundle under `dir` (created if needed): series.csv,
// trajectory.csv, heads.csv, summary.json.
void write_run_artifacts(const std::filesystem::path& dir, const std::string& run_id,
                         const Scenario& scenario, const SchemeSpec& spec,
                         const RunResult& result, bool with_csv = true);

} // namespace wrsn
