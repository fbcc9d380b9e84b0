#include "ksos/dynamics.hpp"

#include "ksos/csv.hpp"

#include <cmath>
#include <ostream>

namespace ksos {

std::string_view system_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::kLogistic:
      return "logistic";
    case SystemKind::kHenon:
      return "henon";
    case SystemKind::kLorenz:
      return "lorenz";
  }
  return "unknown";
}

SystemKind parse_system_kind(std::string_view name) {
  if (name == "logistic") return SystemKind::kLogistic;
  if (name == "henon") return SystemKind::kHenon;
  if (name == "lorenz") return SystemKind::kLorenz;
  throw DomainError("unknown system '" + std::string(name) + "' (expected logistic, henon or lorenz)");
}

void SystemSpec::validate() const {
  const int expected = kind == SystemKind::kLogistic ? 1 : kind == SystemKind::kHenon ? 2 : 3;
  if (dim != expected) {
    throw DomainError("system dimension does not match its kind");
  }
  if (train_x0.size() != dim || test_x0.size() != dim) {
    throw DomainError("initial conditions must match the system dimension");
  }
  if (n_steps < 1) {
    throw DomainError("trajectory length must be at least 1 step");
  }
  if (kind == SystemKind::kLorenz && !(dt > 0.0)) {
    throw DomainError("Lorenz time step must be positive");
  }
}

SystemSpec default_system(SystemKind kind) {
  SystemSpec s;
  s.kind = kind;
  switch (kind) {
    case SystemKind::kLogistic:
      s.dim = 1;
      s.n_steps = 200;
      s.train_x0 = Vector::Constant(1, 0.1);
      s.test_x0 = Vector::Constant(1, 0.3);
      break;
    case SystemKind::kHenon:
      s.dim = 2;
      s.n_steps = 1000;
      s.train_x0 = (Vector(2) << -0.75, -0.3).finished();
      s.test_x0 = (Vector(2) << 0.5, 0.0).finished();
      break;
    case SystemKind::kLorenz:
      s.dim = 3;
      s.n_steps = 1000;
      s.dt = 1e-2;
      s.train_x0 = (Vector(3) << 0.5, 1.5, 2.5).finished();
      s.test_x0 = (Vector(3) << 0.7, 1.1, 2.0).finished();
      break;
  }
  return s;
}

Vector step_system(const SystemSpec& spec, const Vector& x) {
  if (x.size() != spec.dim) {
    throw DomainError("step_system: state dimension mismatch");
  }
  Vector next(spec.dim);
  switch (spec.kind) {
    case SystemKind::kLogistic:
      next[0] = 4.0 * x[0] * (1.0 - x[0]);
      break;
    case SystemKind::kHenon:
      next[0] = 1.0 - 1.4 * x[0] * x[0] + x[1];
      next[1] = 0.3 * x[0];
      break;
    case SystemKind::kLorenz:
      next[0] = x[0] + spec.dt * (10.0 * (x[1] - x[0]));
      next[1] = x[1] + spec.dt * (28.0 * x[0] - x[1] - x[0] * x[2]);
      next[2] = x[2] + spec.dt * (x[0] * x[1] - (10.0 / 3.0) * x[2]);
      break;
  }
  return next;
}

Trajectory generate_trajectory(const SystemSpec& spec, const Vector& x0, int n) {
  if (n < 0) {
    throw DomainError("generate_trajectory: negative step count");
  }
  if (x0.size() != spec.dim) {
    throw DomainError("generate_trajectory: initial state dimension mismatch");
  }
  Trajectory traj;
  traj.states.resize(n + 1, spec.dim);
  traj.states.row(0) = x0.transpose();
  Vector x = x0;
  for (int t = 1; t <= n; ++t) {
    x = step_system(spec, x);
    traj.states.row(t) = x.transpose();
  }
  return traj;
}

Dataset to_dataset(const Trajectory& traj) {
  const Eigen::Index n = traj.length() - 1;
  if (n < 1) {
    throw DomainError("to_dataset: trajectory needs at least two states");
  }
  Dataset data;
  data.X = traj.states.topRows(n);
  data.Y = traj.states.bottomRows(n);
  return data;
}

OneStepMap stacked_predictor(const std::vector<FittedInterpolant>& models) {
  if (models.empty()) {
    throw DomainError("stacked_predictor: no models");
  }
  const Eigen::Index input_dim = models.front().inputs().cols();
  Eigen::Index out_dim = 0;
  for (const auto& m : models) {
    if (m.inputs().cols() != input_dim) {
      throw DomainError("stacked_predictor: models disagree on input dimension");
    }
    out_dim += m.output_dim();
  }
  return [models, out_dim](const Vector& x) {
    Vector out(out_dim);
    Eigen::Index offset = 0;
    for (const auto& m : models) {
      const Vector part = predict(m, x);
      out.segment(offset, part.size()) = part;
      offset += part.size();
    }
    return out;
  };
}

Trajectory predict_trajectory(const OneStepMap& step, const Vector& x0, int n) {
  if (n < 0) {
    throw DomainError("predict_trajectory: negative step count");
  }
  Trajectory traj;
  traj.origin = TrajectoryOrigin::kInterpolant;
  traj.states.resize(n + 1, x0.size());
  traj.states.row(0) = x0.transpose();
  Vector x = x0;
  for (int t = 1; t <= n; ++t) {
    x = step(x);
    if (x.size() != x0.size()) {
      throw DomainError("predict_trajectory: predictor changed the state dimension");
    }
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > kDivergenceBound) {
      traj.states.conservativeResize(t, Eigen::NoChange);
      traj.diverged = true;
      return traj;
    }
    traj.states.row(t) = x.transpose();
  }
  return traj;
}

Trajectory predict_trajectory(const std::vector<FittedInterpolant>& models, const Vector& x0, int n) {
  const OneStepMap step = stacked_predictor(models);
  return predict_trajectory(step, x0, n);
}

std::vector<std::string> state_column_names(int dim) {
  static const char* const kNames[] = {"x", "y", "z"};
  std::vector<std::string> names;
  for (int i = 0; i < dim; ++i) {
    names.push_back(i < 3 ? kNames[i] : "x" + std::to_string(i));
  }
  return names;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  CsvWriter csv(out);
  csv.row(state_column_names(static_cast<int>(traj.dim())));
  for (Eigen::Index t = 0; t < traj.length(); ++t) {
    std::vector<std::string> cells;
    for (Eigen::Index k = 0; k < traj.dim(); ++k) {
      cells.push_back(format_double(traj.states(t, k)));
    }
    csv.row(cells);
  }
}

}  // namespace ksos
