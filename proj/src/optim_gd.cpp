#include "ksos/optim_gd.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace ksos {

void GdConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DomainError("gd: learning rate must be positive and finite");
  }
  if (steps < 1) {
    throw DomainError("gd: steps must be at least 1");
  }
  domain.validate();
}

OptTrace gd_minimize(const ParamObjective& objective, const GdConfig& cfg) {
  cfg.validate();
  OptTrace trace;
  trace.iterates.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  trace.values.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  const std::int64_t charged_before = objective.evaluations();
  const std::int64_t probes_before = objective.diagnostic_evaluations();
  auto sync_counts = [&] {
    trace.evals_used = objective.evaluations() - charged_before;
    trace.diagnostic_evals = objective.diagnostic_evaluations() - probes_before;
  };

  KernelParams theta = cfg.init;
  try {
    for (int t = 0; t < cfg.steps; ++t) {
      const ValueAndGradient vg = objective.value_and_grad(theta);
      if (!std::isfinite(vg.value) || !vg.gradient.allFinite()) {
        throw NumericalError("gd: objective returned a non-finite value or gradient");
      }
      trace.iterates.push_back(theta);
      trace.values.push_back(vg.value);
      ParamVector next = theta.values() - cfg.learning_rate * vg.gradient;
      if (cfg.clamp) {
        next = cfg.domain.clamp(next);
      }
      theta = KernelParams(next);
    }
    const double final_value = objective.probe(theta);
    trace.iterates.push_back(theta);
    trace.values.push_back(final_value);
    trace.candidate = theta;
    trace.candidate_value = final_value;
  } catch (const std::exception& e) {
    sync_counts();
    throw OptimizationError(std::string("gradient descent failed: ") + e.what(), std::move(trace));
  }
  sync_counts();
  return trace;
}

LrSweepResult lr_sweep(const ParamObjective& objective, std::vector<double> grid, const GdConfig& base) {
  if (grid.empty()) {
    throw DomainError("lr_sweep: empty learning-rate grid");
  }
  std::sort(grid.begin(), grid.end());
  std::optional<LrSweepResult> best;
  std::string last_error;
  for (double lr : grid) {
    GdConfig cfg = base;
    cfg.learning_rate = lr;
    try {
      OptTrace trace = gd_minimize(objective, cfg);
      if (!std::isfinite(trace.candidate_value)) {
        continue;
      }
      if (!best || trace.candidate_value < best->trace.candidate_value) {
        best = LrSweepResult{lr, std::move(trace)};
      }
    } catch (const OptimizationError& e) {
      last_error = e.what();
    }
  }
  if (!best) {
    throw NumericalError("lr_sweep: every run failed" + (last_error.empty() ? "" : " (" + last_error + ")"));
  }
  return std::move(*best);
}

}  // namespace ksos
