#include "doctest.h"

#include "ksos/interpolant.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace ksos;
using ksos::testing::logistic_dataset;
using ksos::testing::random_params;
using ksos::testing::random_points;

namespace {

double k_at(const KernelParams& theta, const Vector& a, const Vector& b) {
  return kernel_eval(theta, std::span<const double>(a.data(), a.size()), std::span<const double>(b.data(), b.size()));
}

Dataset henon_like(SeededRng& rng, Eigen::Index n) {
  Dataset d;
  d.X = random_points(rng, n, 2, -1.0, 1.0);
  d.Y.resize(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    d.Y(i, 0) = 1.0 - 1.4 * d.X(i, 0) * d.X(i, 0) + d.X(i, 1);
    d.Y(i, 1) = 0.3 * d.X(i, 0);
  }
  return d;
}

}  // namespace

TEST_CASE("ridge-free fit interpolates the training data") {
  const Dataset data = logistic_dataset(60);
  const FittedInterpolant model = fit(KernelParams::ones(), data, 0.0);
  const double scale = 1.0 + data.Y.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    const Vector x = data.X.row(i).transpose();
    CHECK(std::abs(predict(model, x)[0] - data.Y(i, 0)) <= 1e-8 * scale);
  }
  const Matrix gram = gram_matrix(KernelParams::ones(), data.X);
  const Matrix residual = (gram + model.jitter() * Matrix::Identity(data.size(), data.size())) * model.coefficients() - data.Y;
  CHECK(residual.norm() <= 1e-6 * data.Y.norm());
  CHECK(model.rkhs_energy()[0] >= 0.0);
}

TEST_CASE("single training pair has a closed-form predictor") {
  SeededRng rng(2, RandomStream::kTest);
  const KernelParams theta(random_params(rng, 0.5, 2.0));
  Dataset data;
  data.X = PointSet::Constant(1, 1, 0.4);
  data.Y = Matrix::Constant(1, 1, 0.96);
  const FittedInterpolant model = fit(theta, data);
  const Vector x1 = Vector::Constant(1, 0.4);
  for (double q : {-0.3, 0.1, 0.4, 0.77, 2.5}) {
    const Vector x = Vector::Constant(1, q);
    const double expected = 0.96 * k_at(theta, x, x1) / k_at(theta, x1, x1);
    CHECK(predict(model, x)[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("a huge ridge shrinks predictions to zero") {
  const Dataset data = logistic_dataset(20);
  const FittedInterpolant model = fit(KernelParams::ones(), data, 1e14);
  for (double q : {0.0, 0.3, 0.9}) {
    CHECK(std::abs(predict(model, Vector::Constant(1, q))[0]) < 1e-10);
  }
}

TEST_CASE("triangular-dominated kernel vanishes outside the data's support") {
  ParamVector v = ParamVector::Ones();
  v[1] = v[2] = v[3] = 0.001;
  v[5] = v[6] = v[9] = 0.1;  // short Gaussian/Laplace/periodic scales
  const Dataset data = logistic_dataset(15);
  const FittedInterpolant model = fit(KernelParams(v), data);
  CHECK(std::abs(predict(model, Vector::Constant(1, 5.0))[0]) < 1e-12);
}

TEST_CASE("three-point fit reproduces each target row") {
  SeededRng rng(4, RandomStream::kTest);
  const Dataset data = henon_like(rng, 3);
  const FittedInterpolant model = fit(KernelParams(random_params(rng, 0.5, 2.0)), data);
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Vector p = predict(model, data.X.row(i).transpose());
    CHECK((p - data.Y.row(i).transpose()).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK_THROWS_AS(predict(model, Vector::Zero(3)), DomainError);
}

TEST_CASE("fit validates its inputs") {
  Dataset empty;
  CHECK_THROWS_AS(fit(KernelParams::ones(), empty), DomainError);
  Dataset mismatched;
  mismatched.X = PointSet::Zero(3, 1);
  mismatched.Y = Matrix::Zero(2, 1);
  CHECK_THROWS_AS(fit(KernelParams::ones(), mismatched), DomainError);
  CHECK_THROWS_AS(fit(KernelParams::ones(), logistic_dataset(5), -1.0), DomainError);
}

TEST_CASE("duplicate inputs trigger the one-shot jitter") {
  Dataset data;
  data.X = PointSet::Constant(2, 1, 0.5);
  data.Y = Matrix::Constant(2, 1, 1.0);
  const FittedInterpolant model = fit(KernelParams::ones(), data);
  CHECK(model.jitter() > 0.0);
  CHECK(model.jitter() == doctest::Approx(kJitterScale * 4.0));
}

TEST_CASE("pointwise error bound") {
  SeededRng rng(6, RandomStream::kTest);
  const KernelParams theta(random_params(rng, 0.5, 2.0));
  SUBCASE("zero at training points, bounded by K(x,x) elsewhere") {
    const Dataset data = henon_like(rng, 25);
    const FittedInterpolant model = fit(theta, data);
    for (Eigen::Index i = 0; i < data.size(); ++i) {
      CHECK(pointwise_error_bound(model, data.X.row(i).transpose()) <= 1e-8);
    }
    for (int q = 0; q < 20; ++q) {
      const Vector x = random_points(rng, 1, 2, -2.0, 2.0).row(0).transpose();
      const double s2 = pointwise_error_bound(model, x);
      CHECK(s2 >= 0.0);
      CHECK(s2 <= k_at(theta, x, x));
    }
  }
  SUBCASE("single training point closed form") {
    Dataset data;
    data.X = PointSet::Constant(1, 1, 0.25);
    data.Y = Matrix::Constant(1, 1, 0.75);
    const FittedInterpolant model = fit(theta, data);
    const Vector x1 = Vector::Constant(1, 0.25);
    const Vector x = Vector::Constant(1, 0.6);
    const double expected = k_at(theta, x, x) - std::pow(k_at(theta, x, x1), 2) / k_at(theta, x1, x1);
    CHECK(pointwise_error_bound(model, x) == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("requires a ridge-free model") {
    const FittedInterpolant model = fit(theta, logistic_dataset(5), 0.1);
    CHECK_THROWS_AS(pointwise_error_bound(model, Vector::Zero(1)), DomainError);
  }
}

TEST_CASE("RKHS energy is monotone under nested subsets") {
  SeededRng rng(8, RandomStream::kTest);
  for (int trial = 0; trial < 20; ++trial) {
    const KernelParams theta(random_params(rng, 0.3, 3.0));
    const Dataset full = henon_like(rng, 30);
    const auto keep = sample_without_replacement(30, 15, rng);
    Dataset sub;
    sub.X.resize(15, 2);
    sub.Y.resize(15, 2);
    for (Eigen::Index i = 0; i < 15; ++i) {
      sub.X.row(i) = full.X.row(static_cast<Eigen::Index>(keep[i]));
      sub.Y.row(i) = full.Y.row(static_cast<Eigen::Index>(keep[i]));
    }
    const Vector e_full = fit(theta, full).rkhs_energy();
    const Vector e_sub = fit(theta, sub).rkhs_energy();
    for (int k = 0; k < 2; ++k) {
      CHECK(e_sub[k] <= e_full[k] * (1.0 + 1e-10));
    }
  }
}
