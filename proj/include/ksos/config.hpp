#pragma once

#include "ksos/dynamics.hpp"
#include "ksos/optim_gd.hpp"
#include "ksos/optim_ksos.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ksos {

/// Malformed, unreadable or unrecognized configuration input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  SystemSpec system;
  std::vector<std::uint64_t> seeds;
  /// Charged evaluations per (method, seed, output dimension). Sets both
  /// gd.steps and sos.n_samples.
  int budget = 200;
  GdConfig gd;
  SosConfig sos;
  std::vector<double> gammas;

  /// Parameter box shared by both optimizers.
  const ParamDomain& domain() const { return gd.domain; }

  void validate() const;
};

/// Benchmark protocol for one system: seeds 0..9, budget 200, gammas
/// {0.1, 0.25}, learning rate 1e-3 / 1e-1 / 0.5 for logistic / Henon / Lorenz.
ExperimentConfig default_experiment(SystemKind kind);

/// Reads a JSON document whose keys mirror ExperimentConfig:
///
///   system.{name, n_steps, dt, train_x0, test_x0}, seeds, budget, gammas,
///   gd.{learning_rate, init, clamp}, sos.{trace_reg, sos_kernel_sigma,
///   barrier_eps, newton_steps}, domain.{lower, upper}
///
/// Missing keys take the defaults of system.name (logistic if absent); unknown
/// keys are rejected. Each override "a.b=value" is applied to the document
/// first; value is read as JSON when it parses, as a string otherwise.
ExperimentConfig parse_config(std::string_view json_text, const std::vector<std::string>& overrides = {});

ExperimentConfig load_config(const std::filesystem::path& path, const std::vector<std::string>& overrides = {});

/// Canonical JSON form; parse_config(config_to_json(c)) == c.
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace ksos
