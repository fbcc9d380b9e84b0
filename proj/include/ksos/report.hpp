#pragma once

#include "ksos/harness.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ksos {

/// "median [p25, p75] x 10^k" with two decimals and a shared exponent, or a
/// dash for a missing median.
std::string format_summary_cell(const SummaryStats& stats);

/// Writes every table, figure-data CSV, chart and the raw record file into
/// out_dir (created if needed) and returns the paths written, in order:
///
///   rho_summary.csv, train_metrics.csv, test_metrics.csv, summary.txt,
///   raw_runs.csv, raw_metrics.csv, loss_curve_seed<s>.{csv,svg},
///   distance_seed<s>.{csv,svg}, trajectories_seed<s>.{csv,svg}, records.json
///
/// where s is the first configured seed. An empty report yields header-only
/// tables. Throws std::runtime_error on I/O failure.
std::vector<std::filesystem::path> emit_report(const ExperimentReport& report, const std::filesystem::path& out_dir);

/// Full-precision JSON form of the report's configuration and raw records.
std::string report_to_json(const ExperimentReport& report);

/// Inverse of report_to_json. Throws ConfigError on malformed input.
ExperimentReport report_from_json(const std::string& text);

ExperimentReport load_report(const std::filesystem::path& records_json);

}  // namespace ksos
