#pragma once

#include "ksos/interpolant.hpp"
#include "ksos/types.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ksos {

enum class SystemKind { kLogistic, kHenon, kLorenz };

std::string_view system_name(SystemKind kind);
/// Accepts "logistic", "henon", "lorenz"; throws DomainError otherwise.
SystemKind parse_system_kind(std::string_view name);

struct SystemSpec {
  SystemKind kind = SystemKind::kLogistic;
  int dim = 1;
  /// Forward-Euler step, used by the Lorenz system only.
  double dt = 1e-2;
  Vector train_x0;
  Vector test_x0;
  int n_steps = 200;

  void validate() const;
};

/// Benchmark defaults: logistic (200 steps, x0 0.1 / 0.3), Henon (1000 steps,
/// (-0.75, -0.3) / (0.5, 0)), Lorenz (1000 steps, dt 0.01, (0.5, 1.5, 2.5) / (0.7, 1.1, 2)).
SystemSpec default_system(SystemKind kind);

/// logistic: 4x(1-x); Henon: (1 - 1.4x^2 + y, 0.3x);
/// Lorenz: x + dt (10(y-x), 28x - y - xz, xy - 10z/3).
Vector step_system(const SystemSpec& spec, const Vector& x);

enum class TrajectoryOrigin { kTrueSystem, kInterpolant };

struct Trajectory {
  PointSet states;
  TrajectoryOrigin origin = TrajectoryOrigin::kTrueSystem;
  /// Rollout was cut short after leaving the finite range.
  bool diverged = false;

  Eigen::Index length() const { return states.rows(); }
  Eigen::Index dim() const { return states.cols(); }
};

/// Rollouts stop once any coordinate exceeds this magnitude or is non-finite.
inline constexpr double kDivergenceBound = 1e12;

Trajectory generate_trajectory(const SystemSpec& spec, const Vector& x0, int n);

/// X = states[0..n-1], Y = states[1..n].
Dataset to_dataset(const Trajectory& traj);

using OneStepMap = std::function<Vector(const Vector&)>;

/// Stacks the outputs of per-dimension models into one vector-valued map.
OneStepMap stacked_predictor(const std::vector<FittedInterpolant>& models);

/// Closed-loop rollout x_{t+1} = step(x_t) starting from x0.
Trajectory predict_trajectory(const OneStepMap& step, const Vector& x0, int n);
Trajectory predict_trajectory(const std::vector<FittedInterpolant>& models, const Vector& x0, int n);

std::vector<std::string> state_column_names(int dim);
/// Header row of state names, then one row per step.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

}  // namespace ksos
