#include "doctest.h"

#include "ksos/kernels.hpp"
#include "oracles.hpp"

#include <cmath>
#include <vector>

using namespace ksos;
using ksos::testing::central_difference;
using ksos::testing::min_eigenvalue;
using ksos::testing::random_params;
using ksos::testing::random_points;
using ksos::testing::relative_error;

namespace {

std::vector<double> vec(std::initializer_list<double> v) { return v; }

}  // namespace

TEST_CASE("all-ones kernel at zero distance sums four unit terms") {
  const auto x = vec({0.37});
  CHECK(kernel_eval(KernelParams::ones(), x, x) == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("triangular summand is clamped beyond its support") {
  const auto x = vec({0.0});
  const auto y = vec({2.0});
  ParamVector no_tri = ParamVector::Ones();
  no_tri[0] = 0.25;
  // With |x - y| = 2 > sigma_1^2 the triangular weight has no effect.
  CHECK(kernel_eval(KernelParams::ones(), x, y) == kernel_eval(KernelParams(no_tri), x, y));
  const double expected = std::exp(-4.0) + std::exp(-2.0) + std::exp(-std::pow(std::sin(2.0 * M_PI), 2)) * std::exp(-4.0);
  CHECK(kernel_eval(KernelParams::ones(), x, y) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("kernel is symmetric and positive on the diagonal") {
  SeededRng rng(7, RandomStream::kTest);
  const ParamDomain domain;
  for (int trial = 0; trial < 200; ++trial) {
    const KernelParams theta(random_params(rng, domain.lower[0], domain.upper[0]));
    const PointSet p = random_points(rng, 2, 3, -2.0, 2.0);
    std::vector<double> x(p.row(0).data(), p.row(0).data() + 3);
    std::vector<double> y(p.row(1).data(), p.row(1).data() + 3);
    CHECK(kernel_eval(theta, x, y) == kernel_eval(theta, y, x));
    CHECK(kernel_eval(theta, x, x) > 0.0);
  }
}

TEST_CASE("kernel rejects mismatched or non-finite inputs") {
  CHECK_THROWS_AS(kernel_eval(KernelParams::ones(), vec({1.0}), vec({1.0, 2.0})), DomainError);
  CHECK_THROWS_AS(kernel_eval(KernelParams::ones(), vec({NAN}), vec({1.0})), DomainError);
  ParamVector bad = ParamVector::Ones();
  bad[3] = 0.0;
  CHECK_THROWS_AS(KernelParams{bad}, DomainError);
}

TEST_CASE("gram matrix shapes and symmetry") {
  SeededRng rng(11, RandomStream::kTest);
  const KernelParams theta(random_params(rng, 0.5, 2.0));
  SUBCASE("single point") {
    PointSet x(1, 2);
    x << 0.3, -0.4;
    const Matrix k = gram_matrix(theta, x);
    REQUIRE(k.rows() == 1);
    CHECK(k(0, 0) == kernel_eval(theta, std::vector<double>{0.3, -0.4}, std::vector<double>{0.3, -0.4}));
  }
  SUBCASE("symmetric and agrees with the rectangular form") {
    const PointSet x = random_points(rng, 12, 2, -1.0, 1.0);
    const Matrix k = gram_matrix(theta, x);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((k - gram_matrix(theta, x, x)).cwiseAbs().maxCoeff() <= 1e-15 * k.cwiseAbs().maxCoeff());
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(gram_matrix(theta, PointSet::Zero(2, 2), PointSet::Zero(2, 3)), DomainError);
  }
}

TEST_CASE("gram matrix is numerically PSD") {
  SUBCASE("five distinct points, all-ones parameters") {
    PointSet x(5, 1);
    x << 0.0, 0.1, 0.35, 0.7, 0.95;
    const Matrix k = gram_matrix(KernelParams::ones(), x);
    CHECK(min_eigenvalue(k) >= -1e-8 * k.trace());
  }
  SUBCASE("random parameters in the domain, up to 20 points") {
    SeededRng rng(3, RandomStream::kTest);
    const ParamDomain domain;
    for (int trial = 0; trial < 100; ++trial) {
      const KernelParams theta(random_params(rng, domain.lower[0], domain.upper[0]));
      const auto n = static_cast<Eigen::Index>(2 + rng.below(19));
      const auto d = static_cast<Eigen::Index>(1 + rng.below(3));
      const Matrix k = gram_matrix(theta, random_points(rng, n, d, -3.0, 3.0));
      CHECK(min_eigenvalue(k) >= -1e-8 * k.trace());
    }
  }
}

TEST_CASE("parameter gradient closed forms") {
  SeededRng rng(5, RandomStream::kTest);
  const KernelParams theta(random_params(rng, 0.5, 2.0));
  SUBCASE("zero distance") {
    const auto x = vec({0.2, -0.7, 1.1});
    const ParamVector g = kernel_param_grad(theta, x, x);
    CHECK(g[0] == doctest::Approx(2.0 * theta.gamma(0) * 3.0));
    CHECK(g[5] == 0.0);
    CHECK(g[6] == 0.0);
    CHECK(g[9] == 0.0);
  }
  SUBCASE("gaussian weight") {
    const auto x = vec({0.2, -0.7});
    const auto y = vec({0.9, 0.4});
    const double r2 = 0.7 * 0.7 + 1.1 * 1.1;
    const ParamVector g = kernel_param_grad(theta, x, y);
    CHECK(g[1] == doctest::Approx(2.0 * theta.gamma(1) * std::exp(-r2 / std::pow(theta.sigma(1), 2))));
  }
}

TEST_CASE("parameter gradient matches central differences away from the kink") {
  SeededRng rng(17, RandomStream::kTest);
  int checked = 0;
  while (checked < 100) {
    const ParamVector theta = random_params(rng, 0.5, 2.0);
    const auto d = static_cast<Eigen::Index>(1 + rng.below(3));
    const PointSet p = random_points(rng, 2, d, -1.5, 1.5);
    std::vector<double> x(p.row(0).data(), p.row(0).data() + d);
    std::vector<double> y(p.row(1).data(), p.row(1).data() + d);
    bool near_kink = false;
    for (Eigen::Index i = 0; i < d; ++i) {
      near_kink |= std::abs(std::abs(x[i] - y[i]) - theta[4] * theta[4]) < 1e-3;
    }
    if (near_kink) continue;
    const Vector analytic = kernel_param_grad(KernelParams(theta), x, y);
    const Vector numeric = central_difference(
        [&](const Vector& t) { return kernel_eval(KernelParams(ParamVector(t)), x, y); }, theta, 1e-6);
    CHECK(relative_error(analytic, numeric) <= 1e-5);
    ++checked;
  }
}

TEST_CASE("contracted gram gradient equals the explicit double sum") {
  SeededRng rng(23, RandomStream::kTest);
  const KernelParams theta(random_params(rng, 0.5, 2.0));
  const PointSet x = random_points(rng, 6, 2, -1.0, 1.0);
  Matrix w = Matrix::Random(6, 6);
  w = w + w.transpose();
  ParamVector expected = ParamVector::Zero();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      std::vector<double> a(x.row(i).data(), x.row(i).data() + 2);
      std::vector<double> b(x.row(j).data(), x.row(j).data() + 2);
      expected += w(i, j) * kernel_param_grad(theta, a, b);
    }
  }
  CHECK(relative_error(contract_gram_gradient(theta, x, w), expected) <= 1e-13);
}
