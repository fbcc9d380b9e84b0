#include "doctest.h"

#include "ksos/csv.hpp"
#include "ksos/dynamics.hpp"
#include "ksos/interpolant.hpp"

#include <cmath>
#include <sstream>

using namespace ksos;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::vector<FittedInterpolant> fit_per_dimension(const KernelParams& theta, const Dataset& data) {
  std::vector<FittedInterpolant> models;
  for (Eigen::Index d = 0; d < data.output_dim(); ++d) {
    models.push_back(fit(theta, Dataset{data.X, data.Y.col(d)}));
  }
  return models;
}

}  // namespace

TEST_CASE("logistic spot values") {
  const SystemSpec spec = default_system(SystemKind::kLogistic);
  const Trajectory train = generate_trajectory(spec, vec({0.1}), 3);
  const double expected_train[] = {0.1, 0.36, 0.9216, 0.28901376};
  const Trajectory test = generate_trajectory(spec, vec({0.3}), 3);
  const double expected_test[] = {0.3, 0.84, 0.5376, 0.99434496};
  REQUIRE(train.length() == 4);
  for (int t = 0; t < 4; ++t) {
    CHECK(std::abs(train.states(t, 0) - expected_train[t]) <= 1e-12);
    CHECK(std::abs(test.states(t, 0) - expected_test[t]) <= 1e-12);
  }
}

TEST_CASE("Henon and Euler-Lorenz single steps") {
  const Vector h = step_system(default_system(SystemKind::kHenon), vec({0.5, 0.0}));
  CHECK(h[0] == doctest::Approx(0.65).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(0.15).epsilon(1e-15));

  const Vector l = step_system(default_system(SystemKind::kLorenz), vec({0.5, 1.5, 2.5}));
  CHECK(l[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(l[1] == doctest::Approx(1.6125).epsilon(1e-14));
  CHECK(l[2] == doctest::Approx(2.5 + 0.01 * (0.75 - 25.0 / 3.0)).epsilon(1e-14));
  CHECK(std::abs(l[2] - 2.42416667) <= 1e-8);

  CHECK_THROWS_AS(step_system(default_system(SystemKind::kHenon), vec({1.0})), DomainError);
}

TEST_CASE("default systems") {
  const SystemSpec logistic = default_system(SystemKind::kLogistic);
  CHECK(logistic.n_steps == 200);
  CHECK(logistic.train_x0 == vec({0.1}));
  CHECK(logistic.test_x0 == vec({0.3}));
  const SystemSpec henon = default_system(SystemKind::kHenon);
  CHECK(henon.n_steps == 1000);
  CHECK(henon.train_x0 == vec({-0.75, -0.3}));
  CHECK(henon.test_x0 == vec({0.5, 0.0}));
  const SystemSpec lorenz = default_system(SystemKind::kLorenz);
  CHECK(lorenz.n_steps == 1000);
  CHECK(lorenz.dt == 0.01);
  CHECK(lorenz.train_x0 == vec({0.5, 1.5, 2.5}));
  CHECK(lorenz.test_x0 == vec({0.7, 1.1, 2.0}));

  for (auto kind : {SystemKind::kLogistic, SystemKind::kHenon, SystemKind::kLorenz}) {
    CHECK(parse_system_kind(system_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_system_kind("rossler"), DomainError);
}

TEST_CASE("trajectory generation") {
  const SystemSpec spec = default_system(SystemKind::kLogistic);
  const Trajectory single = generate_trajectory(spec, vec({0.2}), 0);
  CHECK(single.length() == 1);
  CHECK(single.states(0, 0) == 0.2);

  const Trajectory long_run = generate_trajectory(spec, vec({0.1}), 200);
  CHECK(long_run.length() == 201);
  CHECK(long_run.states.minCoeff() >= 0.0);
  CHECK(long_run.states.maxCoeff() <= 1.0);
  CHECK(generate_trajectory(spec, vec({0.1}), 200).states == long_run.states);

  CHECK_THROWS_AS(generate_trajectory(spec, vec({0.1, 0.2}), 3), DomainError);
  CHECK_THROWS_AS(generate_trajectory(spec, vec({0.1}), -1), DomainError);
}

TEST_CASE("datasets pair consecutive states exactly") {
  const SystemSpec logistic = default_system(SystemKind::kLogistic);
  const Dataset ld = to_dataset(generate_trajectory(logistic, logistic.train_x0, 200));
  CHECK(ld.size() == 200);
  for (Eigen::Index k = 0; k < ld.size(); ++k) {
    CHECK(ld.Y(k, 0) == 4.0 * ld.X(k, 0) * (1.0 - ld.X(k, 0)));
  }

  for (auto kind : {SystemKind::kHenon, SystemKind::kLorenz}) {
    const SystemSpec spec = default_system(kind);
    const Dataset d = to_dataset(generate_trajectory(spec, spec.train_x0, 50));
    for (Eigen::Index k = 0; k < d.size(); ++k) {
      CHECK(step_system(spec, d.X.row(k).transpose()) == d.Y.row(k).transpose());
    }
    if (kind == SystemKind::kHenon) {
      for (Eigen::Index k = 0; k < d.size(); ++k) CHECK(d.Y(k, 1) == 0.3 * d.X(k, 0));
    }
  }

  CHECK(to_dataset(generate_trajectory(logistic, vec({0.1}), 1)).size() == 1);
  CHECK_THROWS_AS(to_dataset(generate_trajectory(logistic, vec({0.1}), 0)), DomainError);
}

TEST_CASE("rollout with the true map reproduces the simulator") {
  for (auto kind : {SystemKind::kLogistic, SystemKind::kHenon, SystemKind::kLorenz}) {
    const SystemSpec spec = default_system(kind);
    const OneStepMap exact = [&](const Vector& x) { return step_system(spec, x); };
    const Trajectory rolled = predict_trajectory(exact, spec.test_x0, 300);
    CHECK(rolled.origin == TrajectoryOrigin::kInterpolant);
    CHECK_FALSE(rolled.diverged);
    CHECK(rolled.states == generate_trajectory(spec, spec.test_x0, 300).states);
  }
  const OneStepMap identity = [](const Vector& x) { return x; };
  CHECK(predict_trajectory(identity, vec({0.4}), 0).length() == 1);
}

TEST_CASE("divergent rollouts are truncated and flagged") {
  const OneStepMap blowup = [](const Vector& x) { return Vector(x * 1e5); };
  const Trajectory t = predict_trajectory(blowup, vec({1.0}), 10);
  CHECK(t.diverged);
  CHECK(t.length() == 3);  // 1, 1e5, 1e10; 1e15 exceeds the bound
  CHECK(t.states.allFinite());

  const OneStepMap nan_map = [](const Vector& x) { return Vector::Constant(x.size(), NAN).eval(); };
  const Trajectory n = predict_trajectory(nan_map, vec({0.5, 0.5}), 4);
  CHECK(n.diverged);
  CHECK(n.length() == 1);
}

TEST_CASE("interpolant rollout tracks the training trajectory early on") {
  const SystemSpec spec = default_system(SystemKind::kLogistic);
  const Trajectory truth = generate_trajectory(spec, spec.train_x0, 200);
  const auto models = fit_per_dimension(KernelParams(), to_dataset(truth));
  const Trajectory rolled = predict_trajectory(models, spec.train_x0, 200);
  REQUIRE(rolled.length() == 201);
  for (int t = 0; t <= 10; ++t) {
    CHECK(std::abs(rolled.states(t, 0) - truth.states(t, 0)) <= 1e-6);
  }
}

TEST_CASE("stacked predictor checks its models") {
  CHECK_THROWS_AS(stacked_predictor({}), DomainError);
  const SystemSpec henon = default_system(SystemKind::kHenon);
  const Dataset d = to_dataset(generate_trajectory(henon, henon.train_x0, 30));
  const auto models = fit_per_dimension(KernelParams(), d);
  const Vector out = stacked_predictor(models)(d.X.row(4).transpose());
  CHECK(out.size() == 2);
  CHECK((out - d.Y.row(4).transpose()).norm() <= 1e-8);
}

TEST_CASE("trajectory CSV") {
  const SystemSpec spec = default_system(SystemKind::kLogistic);
  std::ostringstream out;
  write_trajectory_csv(out, generate_trajectory(spec, vec({0.1}), 3));
  std::istringstream in(out.str());
  const CsvTable table = read_csv(in);
  REQUIRE(table.size() == 5);
  CHECK(table[0] == std::vector<std::string>{"x"});
  const double expected[] = {0.1, 0.36, 0.9216, 0.28901376};
  for (int t = 0; t < 4; ++t) {
    CHECK(std::abs(parse_double(table[t + 1][0]) - expected[t]) <= 1e-12);
  }

  std::ostringstream lorenz;
  const SystemSpec l = default_system(SystemKind::kLorenz);
  write_trajectory_csv(lorenz, generate_trajectory(l, l.train_x0, 0));
  CHECK(lorenz.str() == "x,y,z\n0.5,1.5,2.5\n");
}
