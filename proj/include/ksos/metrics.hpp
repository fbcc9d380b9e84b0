#pragma once

#include "ksos/dynamics.hpp"
#include "ksos/types.hpp"

#include <map>
#include <optional>
#include <vector>

namespace ksos {

/// (1/N) sum_t |f(x_{t-1}) - x_t| along the true trajectory (one-step error).
double mean_error(const OneStepMap& model, const Trajectory& truth);
double mean_error(const std::vector<FittedInterpolant>& models, const Trajectory& truth);

/// max_i min_j |b_i - a_j|.
double hausdorff_one_sided(const PointSet& a, const PointSet& b);
/// Symmetric Hausdorff distance between the two trajectories' point sets.
double hausdorff(const Trajectory& pred, const Trajectory& truth);

/// Relative errors are divided by max(|x_true_t|, this floor).
inline constexpr double kDeviationFloor = 1e-12;

/// First t >= 1 with |pred_t - true_t| / |true_t| >= gamma, or nullopt if never.
/// A diverged (truncated) prediction counts as exceeding at its first missing step.
std::optional<int> deviation(const Trajectory& pred, const Trajectory& truth, double gamma);

/// |pred_t - true_t| for every step both trajectories share.
std::vector<double> stepwise_distance(const Trajectory& pred, const Trajectory& truth);

struct TrajectoryMetrics {
  std::optional<double> mean_error;
  std::optional<double> hausdorff;
  std::map<double, std::optional<int>> deviation;
};

struct SummaryStats {
  std::optional<double> median;
  std::optional<double> p25;
  std::optional<double> p75;
};

/// Median and quartiles by linear interpolation between closest ranks
/// (position p (n - 1) in the sorted list). Missing values sort above every
/// number; a quantile that touches one is itself missing.
SummaryStats summary_stats(const std::vector<std::optional<double>>& values);

/// Percentile p in [0, 1] under the same convention.
std::optional<double> percentile(const std::vector<std::optional<double>>& values, double p);

}  // namespace ksos
