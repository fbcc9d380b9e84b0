#pragma once

#include "ksos/kernels.hpp"
#include "ksos/types.hpp"

#include <Eigen/Cholesky>

#include <memory>

namespace ksos {

/// Paired samples Y_k = f(X_k). X is N x d (one input per row), Y is N x d_out.
struct Dataset {
  PointSet X;
  Matrix Y;

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index input_dim() const { return X.cols(); }
  Eigen::Index output_dim() const { return Y.cols(); }

  /// Throws DomainError unless N >= 1 and rows(X) == rows(Y).
  void validate() const;
};

/// Cholesky factor of A + (ridge + jitter) I.
struct SpdFactorization {
  Eigen::LLT<Matrix> llt;
  double ridge = 0.0;
  double jitter = 0.0;
};

/// Factorizes gram + ridge I. When ridge == 0 and the factorization breaks down,
/// retries once with a diagonal jitter of 1e-10 trace / N before giving up.
SpdFactorization factorize_spd(Matrix gram, double ridge);

/// Relative jitter used by the one-shot fallback.
inline constexpr double kJitterScale = 1e-10;

/// f(x) = K(x, X) (K(X, X) + ridge I)^-1 Y. Immutable once built.
class FittedInterpolant {
 public:
  const KernelParams& params() const { return theta_; }
  const PointSet& inputs() const { return x_; }
  const Matrix& coefficients() const { return alpha_; }
  double ridge() const { return ridge_; }
  /// Diagonal shift actually added by the singular-system fallback (0 if unused).
  double jitter() const { return jitter_; }
  /// Y_j^T K^-1 Y_j per output column.
  const Vector& rkhs_energy() const { return energy_; }
  Eigen::Index output_dim() const { return alpha_.cols(); }

 private:
  friend FittedInterpolant fit(const KernelParams&, const Dataset&, double);
  friend double pointwise_error_bound(const FittedInterpolant&, const Vector&);
  friend Vector kernel_row(const FittedInterpolant&, const Vector&);

  KernelParams theta_;
  PointSet x_;
  Matrix alpha_;
  double ridge_ = 0.0;
  double jitter_ = 0.0;
  Vector energy_;
  std::shared_ptr<const Eigen::LLT<Matrix>> factor_;
  std::shared_ptr<const PaddedPoints> padded_;
};

FittedInterpolant fit(const KernelParams& theta, const Dataset& data, double ridge = 0.0);

/// K(X_i, x) for every training input X_i.
Vector kernel_row(const FittedInterpolant& model, const Vector& x);

Vector predict(const FittedInterpolant& model, const Vector& x);

/// K(x,x) - K(x,X) K(X,X)^-1 K(X,x), clamped at zero. Requires ridge == 0.
double pointwise_error_bound(const FittedInterpolant& model, const Vector& x);

}  // namespace ksos
