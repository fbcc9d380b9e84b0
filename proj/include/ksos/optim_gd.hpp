#pragma once

#include "ksos/objective.hpp"
#include "ksos/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ksos {

/// Per-iteration record of an optimizer run. iterates[t] and values[t] pair up;
/// the last entry is the returned candidate.
struct OptTrace {
  std::vector<KernelParams> iterates;
  std::vector<double> values;
  KernelParams candidate;
  double candidate_value = 0.0;
  /// Evaluations charged to the budget.
  std::int64_t evals_used = 0;
  /// Evaluations used only to log the loss curve.
  std::int64_t diagnostic_evals = 0;
};

/// Thrown when an objective evaluation fails mid-run; carries what was traced so far.
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, OptTrace partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const OptTrace& partial_trace() const { return partial_; }

 private:
  OptTrace partial_;
};

struct GdConfig {
  double learning_rate = 1e-3;
  int steps = 200;
  KernelParams init = KernelParams::ones();
  ParamDomain domain;
  /// Project each iterate back onto the domain box.
  bool clamp = true;

  void validate() const;
};

/// The learning-rate grid searched for the baseline.
inline const std::vector<double> kDefaultLrGrid = {1e-4, 1e-3, 1e-2, 1e-1, 0.5, 1.0};

/// theta_{t+1} = clamp(theta_t - eta grad rho(theta_t)) for cfg.steps charged
/// gradient evaluations; the value at the final iterate is a diagnostic probe.
OptTrace gd_minimize(const ParamObjective& objective, const GdConfig& cfg);

struct LrSweepResult {
  double learning_rate = 0.0;
  OptTrace trace;
};

/// Runs gd_minimize for each rate and keeps the lowest final value; ties go to
/// the smaller rate. Failed runs are skipped unless every run fails.
LrSweepResult lr_sweep(const ParamObjective& objective, std::vector<double> grid, const GdConfig& base);

}  // namespace ksos
