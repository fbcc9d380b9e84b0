#include "ksos/interpolant.hpp"

#include <cmath>

namespace ksos {

namespace {

constexpr double kResidualTolerance = 1e-6;

bool try_factorize(SpdFactorization& out, const Matrix& gram, double shift) {
  Matrix shifted = gram;
  shifted.diagonal().array() += shift;
  out.llt.compute(shifted);
  return out.llt.info() == Eigen::Success;
}

}  // namespace

void Dataset::validate() const {
  if (X.rows() < 1) {
    throw DomainError("dataset must contain at least one sample");
  }
  if (X.rows() != Y.rows()) {
    throw DomainError("dataset X and Y have different sample counts");
  }
  if (X.cols() < 1 || Y.cols() < 1) {
    throw DomainError("dataset dimensions must be positive");
  }
}

SpdFactorization factorize_spd(Matrix gram, double ridge) {
  if (!gram.allFinite()) {
    throw NumericalError("gram matrix has non-finite entries");
  }
  SpdFactorization f;
  f.ridge = ridge;
  if (try_factorize(f, gram, ridge)) {
    return f;
  }
  if (ridge == 0.0) {
    f.jitter = kJitterScale * gram.trace() / static_cast<double>(gram.rows());
    if (try_factorize(f, gram, f.jitter)) {
      return f;
    }
  }
  throw NumericalError("gram matrix is not positive definite");
}

FittedInterpolant fit(const KernelParams& theta, const Dataset& data, double ridge) {
  data.validate();
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw DomainError("ridge must be finite and nonnegative");
  }
  const Matrix gram = gram_matrix(theta, data.X);
  const double y_norm = data.Y.norm();

  auto solve_with = [&](SpdFactorization& f, Matrix& alpha) {
    const double shift = f.ridge + f.jitter;
    alpha = f.llt.solve(data.Y);
    // One pass of iterative refinement.
    Matrix residual = data.Y - gram * alpha - shift * alpha;
    alpha += f.llt.solve(residual);
    residual = data.Y - gram * alpha - shift * alpha;
    return alpha.allFinite() && residual.norm() <= kResidualTolerance * y_norm;
  };

  SpdFactorization f = factorize_spd(gram, ridge);
  Matrix alpha;
  if (!solve_with(f, alpha)) {
    if (ridge != 0.0 || f.jitter != 0.0) {
      throw NumericalError("interpolation system residual exceeds tolerance");
    }
    f.jitter = kJitterScale * gram.trace() / static_cast<double>(gram.rows());
    if (!try_factorize(f, gram, f.jitter) || !solve_with(f, alpha)) {
      throw NumericalError("interpolation system is singular after jitter");
    }
  }

  FittedInterpolant model;
  model.theta_ = theta;
  model.x_ = data.X;
  model.alpha_ = std::move(alpha);
  model.ridge_ = ridge;
  model.jitter_ = f.jitter;
  model.energy_ = (data.Y.array() * model.alpha_.array()).colwise().sum().transpose().cwiseMax(0.0);
  model.factor_ = std::make_shared<const Eigen::LLT<Matrix>>(std::move(f.llt));
  model.padded_ = std::make_shared<const PaddedPoints>(data.X);
  return model;
}

Vector kernel_row(const FittedInterpolant& model, const Vector& x) {
  if (x.size() != model.inputs().cols()) {
    throw DomainError("query dimension does not match training inputs");
  }
  const Eigen::Index n = model.inputs().rows();
  Vector row(PaddedPoints::padded(n));
  MixedKernel(model.params()).column(*model.padded_, x.data(), n, row.data());
  row.conservativeResize(n);
  return row;
}

Vector predict(const FittedInterpolant& model, const Vector& x) {
  return model.coefficients().transpose() * kernel_row(model, x);
}

double pointwise_error_bound(const FittedInterpolant& model, const Vector& x) {
  if (model.ridge() != 0.0) {
    throw DomainError("pointwise_error_bound requires a ridge-free interpolant");
  }
  const Vector row = kernel_row(model, x);
  const double kxx = kernel_eval(model.params(), std::span<const double>(x.data(), x.size()),
                                 std::span<const double>(x.data(), x.size()));
  const double reduction = row.dot(model.factor_->solve(row));
  return std::max(0.0, kxx - reduction);
}

}  // namespace ksos
