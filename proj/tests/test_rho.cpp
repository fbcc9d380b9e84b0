#include "doctest.h"

#include "ksos/rho.hpp"
#include "oracles.hpp"

#include <cmath>
#include <numeric>

using namespace ksos;
using ksos::testing::central_difference;
using ksos::testing::logistic_dataset;
using ksos::testing::random_params;
using ksos::testing::relative_error;

namespace {

/// Gram = identity regardless of theta.
class IdentityFamily final : public KernelFamily {
 public:
  Matrix gram(const KernelParams&, const PointSet& x) const override {
    return Matrix::Identity(x.rows(), x.rows());
  }
  std::pair<Matrix, GradientContraction> gram_with_gradient(const KernelParams& theta,
                                                            const PointSet& x) const override {
    return {gram(theta, x), [](const Matrix&) { return ParamVector(ParamVector::Zero()); }};
  }
};

bool near_kink(const Dataset& data, double sigma1) {
  const double support = sigma1 * sigma1;
  for (Eigen::Index i = 0; i < data.size(); ++i)
    for (Eigen::Index j = 0; j < data.size(); ++j)
      for (Eigen::Index k = 0; k < data.input_dim(); ++k)
        if (std::abs(std::abs(data.X(i, k) - data.X(j, k)) - support) < 1e-3) return true;
  return false;
}

}  // namespace

TEST_CASE("make_split is deterministic and takes half the data") {
  const Dataset data = logistic_dataset(200);
  CHECK(make_split(data, 0, 4).half_indices() == make_split(data, 0, 4).half_indices());

  std::vector<std::vector<std::size_t>> splits;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    splits.push_back(make_split(data, 0, seed).half_indices());
    CHECK(splits.back().size() == 100);
    CHECK(std::is_sorted(splits.back().begin(), splits.back().end()));
  }
  bool any_differ = false;
  for (std::size_t s = 1; s < splits.size(); ++s) any_differ |= splits[s] != splits[0];
  CHECK(any_differ);

  CHECK(make_split(logistic_dataset(2), 0, 0).half_indices().size() == 1);
  CHECK_THROWS_AS(make_split(logistic_dataset(1), 0, 0), DomainError);
}

TEST_CASE("rho of the full subset is zero") {
  const Dataset data = logistic_dataset(30);
  std::vector<std::size_t> all(30);
  std::iota(all.begin(), all.end(), std::size_t{0});
  const RhoObjective obj(data, all, 0);
  CHECK(obj.rho_value(KernelParams::ones()) == 0.0);
}

TEST_CASE("rho closed form under an identity gram") {
  Dataset data;
  data.X = PointSet::Zero(2, 1);
  data.Y.resize(2, 1);
  data.Y << 0.6, -1.7;
  const RhoObjective obj(data, {0}, 0, std::make_shared<IdentityFamily>());
  const double y1 = 0.6, y2 = -1.7;
  CHECK(obj.rho_value(KernelParams::ones()) == doctest::Approx(1.0 - y1 * y1 / (y1 * y1 + y2 * y2)).epsilon(1e-15));
}

TEST_CASE("rho lies in [0, 1] for random parameters and splits") {
  const Dataset data = logistic_dataset(40);
  SeededRng rng(31, RandomStream::kTest);
  const ParamDomain domain;
  for (std::uint64_t pair = 0; pair < 200; ++pair) {
    const RhoObjective obj = make_split(data, 0, pair);
    const KernelParams theta(random_params(rng, domain.lower[0], domain.upper[0]));
    const double rho = obj.rho_value(theta);
    CHECK(rho >= 0.0);
    CHECK(rho <= 1.0);
  }
}

TEST_CASE("rho gradient matches central differences") {
  const Dataset data = logistic_dataset(20);
  SeededRng rng(37, RandomStream::kTest);
  int probes = 0;
  std::uint64_t seed = 0;
  while (probes < 50) {
    const ParamVector theta = random_params(rng, 0.5, 2.0);
    if (near_kink(data, theta[4])) continue;
    const RhoObjective obj = make_split(data, 0, seed++);
    const Vector analytic = obj.rho_grad(KernelParams(theta));
    const Vector numeric = central_difference(
        [&](const Vector& t) { return obj.rho_value(KernelParams(ParamVector(t))); }, theta, 1e-5);
    CHECK(analytic.allFinite());
    CHECK(relative_error(analytic, numeric) <= 1e-4);
    ++probes;
  }
}

TEST_CASE("rho evaluation accounting and purity") {
  const RhoObjective obj = make_split(logistic_dataset(30), 0, 1);
  const KernelParams theta(ParamVector::Constant(1.3));
  const ParamVector g1 = obj.rho_grad(theta);
  const ParamVector g2 = obj.rho_grad(theta);
  CHECK(g1 == g2);
  const double v = obj.rho_value(theta);
  CHECK(v == obj.rho_value(theta));
  CHECK(obj.evaluations() == 4);
  CHECK(obj.probe(theta) == v);
  CHECK(obj.evaluations() == 4);
  CHECK(obj.diagnostic_evaluations() == 1);
}

TEST_CASE("rho rejects degenerate inputs") {
  Dataset zero = logistic_dataset(10);
  zero.Y.setZero();
  CHECK_THROWS_AS(make_split(zero, 0, 0).rho_value(KernelParams::ones()), NumericalError);
  const Dataset data = logistic_dataset(10);
  CHECK_THROWS_AS(RhoObjective(data, {3, 1}, 0), DomainError);
  CHECK_THROWS_AS(RhoObjective(data, {1, 1}, 0), DomainError);
  CHECK_THROWS_AS(RhoObjective(data, {10}, 0), DomainError);
  CHECK_THROWS_AS(RhoObjective(data, {1}, 1), DomainError);
}

TEST_CASE("shared evaluation over output columns matches per-column rho") {
  const SystemSpec spec = default_system(SystemKind::kLorenz);
  const Dataset data = to_dataset(generate_trajectory(spec, spec.train_x0, 80));
  std::vector<RhoObjective> objectives;
  for (Eigen::Index d = 0; d < 3; ++d) objectives.push_back(make_split(data, d, 3));
  const std::vector<const RhoObjective*> ptrs{&objectives[0], &objectives[1], &objectives[2]};

  SeededRng rng(17, RandomStream::kTest);
  for (int trial = 0; trial < 5; ++trial) {
    const KernelParams theta(random_params(rng, 0.2, 5.0));
    const Vector shared = rho_all_outputs(ptrs, theta);
    for (Eigen::Index d = 0; d < 3; ++d) CHECK(shared[d] == objectives[d].rho_value(theta));
  }
  for (const auto& o : objectives) CHECK(o.evaluations() == 10);

  const RhoObjective other_split = make_split(data, 1, 4);
  CHECK_THROWS_AS(rho_all_outputs({&objectives[0], &other_split}, KernelParams()), DomainError);
  CHECK_THROWS_AS(rho_all_outputs({}, KernelParams()), DomainError);
}
