#pragma once

#include "ksos/config.hpp"
#include "ksos/metrics.hpp"
#include "ksos/optim_gd.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ksos {

enum class Method { kGd, kKsos };

std::string_view method_name(Method m);
/// Accepts "gd" and "ksos"; throws DomainError otherwise.
Method parse_method(std::string_view name);

inline constexpr Method kMethods[] = {Method::kKsos, Method::kGd};

/// One optimizer run on one output dimension of one seed.
struct OptRecord {
  Method method = Method::kKsos;
  std::uint64_t seed = 0;
  int dim = 0;
  std::vector<std::size_t> half_indices;
  OptTrace trace;
  /// rho at the returned candidate; missing if the run failed.
  std::optional<double> rho;
  /// Certified lower bound c (KSOS only).
  std::optional<double> lower_bound;
  std::string error;

  bool ok() const { return rho.has_value(); }
};

enum class Split { kTrain, kTest };
std::string_view split_name(Split s);

/// Closed-loop evaluation of one (method, seed) candidate on one trajectory.
struct EvalRecord {
  Method method = Method::kKsos;
  std::uint64_t seed = 0;
  Split split = Split::kTrain;
  TrajectoryMetrics metrics;
  Trajectory prediction;
  std::string error;
};

struct ExperimentReport {
  ExperimentConfig config;
  Trajectory train_truth;
  Trajectory test_truth;
  /// Sorted by (method, seed, dim).
  std::vector<OptRecord> runs;
  /// Sorted by (method, seed, split).
  std::vector<EvalRecord> evals;

  const OptRecord* find_run(Method m, std::uint64_t seed, int dim) const;
  const EvalRecord* find_eval(Method m, std::uint64_t seed, Split split) const;
};

/// For each seed: one rho split per output dimension shared by both methods,
/// gradient descent and KSOS under the same budget, per-dimension interpolants
/// at each candidate stacked into one predictor, and train/test metrics. Work
/// units run on `jobs` threads; results are keyed, so the report does not
/// depend on scheduling. Failures are recorded in the affected cells.
ExperimentReport run_experiment(const ExperimentConfig& cfg, int jobs = 1);

/// One summary row: median [p25, p75] over seeds.
struct SummaryRow {
  Method method = Method::kKsos;
  /// Output dimension ("1".."d") or "mean" for the per-seed average over dimensions.
  std::string label;
  SummaryStats stats;
  std::vector<std::optional<double>> values;
};

/// Relative rho at the candidate: one row per (method, dimension) and, for
/// multi-dimensional systems, one for the per-seed mean over dimensions.
std::vector<SummaryRow> rho_summary(const ExperimentReport& report);

/// Mean Error, Hausdorff distance and Deviation(gamma) per method on one split.
/// Deviation values that never exceeded gamma enter the statistics as missing
/// (ranked above every step count); failed evaluations count as missing for
/// the error metrics and as step 0 for Deviation.
std::vector<SummaryRow> metric_summary(const ExperimentReport& report, Split split);

/// Metric labels in table order: mean_error, hausdorff, deviation_<gamma>...
std::vector<std::string> metric_labels(const ExperimentConfig& cfg);

}  // namespace ksos
