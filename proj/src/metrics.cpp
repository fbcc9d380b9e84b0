#include "ksos/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ksos {

double mean_error(const OneStepMap& model, const Trajectory& truth) {
  const Eigen::Index n = truth.length() - 1;
  if (n < 1) {
    throw DomainError("mean_error: trajectory needs at least two states");
  }
  double total = 0.0;
  for (Eigen::Index t = 1; t <= n; ++t) {
    const Vector prev = truth.states.row(t - 1).transpose();
    const Vector pred = model(prev);
    if (pred.size() != truth.dim()) {
      throw DomainError("mean_error: model output dimension mismatch");
    }
    total += (pred - truth.states.row(t).transpose()).norm();
  }
  return total / static_cast<double>(n);
}

double mean_error(const std::vector<FittedInterpolant>& models, const Trajectory& truth) {
  return mean_error(stacked_predictor(models), truth);
}

double hausdorff_one_sided(const PointSet& a, const PointSet& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw DomainError("hausdorff: empty point set");
  }
  if (a.cols() != b.cols()) {
    throw DomainError("hausdorff: dimension mismatch");
  }
  double worst = 0.0;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
      const double d2 = (b.row(i) - a.row(j)).squaredNorm();
      if (d2 < nearest) {
        nearest = d2;
        // Cannot raise the running maximum any more.
        if (nearest <= worst) break;
      }
    }
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

double hausdorff(const Trajectory& pred, const Trajectory& truth) {
  return std::max(hausdorff_one_sided(pred.states, truth.states), hausdorff_one_sided(truth.states, pred.states));
}

std::optional<int> deviation(const Trajectory& pred, const Trajectory& truth, double gamma) {
  if (!(gamma > 0.0)) {
    throw DomainError("deviation: gamma must be positive");
  }
  if (pred.dim() != truth.dim()) {
    throw DomainError("deviation: dimension mismatch");
  }
  const bool truncated = pred.diverged && pred.length() < truth.length();
  if (pred.length() != truth.length() && !truncated) {
    throw DomainError("deviation: trajectories have different lengths");
  }
  for (Eigen::Index t = 1; t < truth.length(); ++t) {
    if (t >= pred.length()) {
      return static_cast<int>(t);
    }
    const double err = (pred.states.row(t) - truth.states.row(t)).norm();
    const double scale = std::max(truth.states.row(t).norm(), kDeviationFloor);
    if (err / scale >= gamma) {
      return static_cast<int>(t);
    }
  }
  return std::nullopt;
}

std::vector<double> stepwise_distance(const Trajectory& pred, const Trajectory& truth) {
  const Eigen::Index n = std::min(pred.length(), truth.length());
  std::vector<double> out(static_cast<std::size_t>(n));
  for (Eigen::Index t = 0; t < n; ++t) {
    out[static_cast<std::size_t>(t)] = (pred.states.row(t) - truth.states.row(t)).norm();
  }
  return out;
}

std::optional<double> percentile(const std::vector<std::optional<double>>& values, double p) {
  if (values.empty()) {
    throw DomainError("percentile: empty sample");
  }
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (const auto& v : values) {
    sorted.push_back(v ? *v : std::numeric_limits<double>::infinity());
  }
  std::sort(sorted.begin(), sorted.end());
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  double result = sorted[lo];
  if (frac > 0.0) {
    if (std::isinf(sorted[hi])) return std::nullopt;
    result = sorted[lo] + frac * (sorted[hi] - sorted[lo]);
  }
  if (std::isinf(result)) return std::nullopt;
  return result;
}

SummaryStats summary_stats(const std::vector<std::optional<double>>& values) {
  return SummaryStats{percentile(values, 0.5), percentile(values, 0.25), percentile(values, 0.75)};
}

}  // namespace ksos
