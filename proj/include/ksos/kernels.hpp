#pragma once

#include "ksos/types.hpp"

#include <functional>
#include <span>
#include <utility>

namespace ksos {

/// Point set copied column-major with its row count padded to a multiple of
/// kPadding (extra rows are zero). Every kernel column is evaluated over whole
/// padded blocks so each entry goes through the same vectorized code path,
/// which keeps K(x, y) bitwise identical wherever it is computed.
class PaddedPoints {
 public:
  static constexpr Eigen::Index kPadding = 8;

  explicit PaddedPoints(const PointSet& points);

  Eigen::Index size() const { return n_; }
  Eigen::Index dim() const { return cols_.cols(); }
  const Matrix& columns() const { return cols_; }

  static Eigen::Index padded(Eigen::Index count) { return (count + kPadding - 1) / kPadding * kPadding; }

 private:
  Matrix cols_;
  Eigen::Index n_;
};

/// Per-pair intermediate terms of the mixture, packed over the upper triangle
/// of K(X, X) column by column (column j holds rows 0..j).
struct PairTerms {
  Eigen::ArrayXd tri, tri_dist, r2, l1, sin2, dsin2, e_gauss, e_lap, e_per;
  void resize(Eigen::Index n);
};

/// The triangular + Gaussian + Laplace + locally periodic mixture
///
///   K(x, y) = g1^2 sum_i max(0, 1 - |x_i - y_i| / s1^2)
///           + g2^2 exp(-|x - y|^2 / s2^2)
///           + g3^2 exp(-sum_i |x_i - y_i| / s3^2)
///           + g4^2 exp(-s4^2 sum_i sin^2(pi s5^2 |x_i - y_i|)) exp(-|x - y|^2 / s6^2)
///
/// with the squared parameters precomputed once per theta.
class MixedKernel {
 public:
  explicit MixedKernel(const KernelParams& theta);

  const KernelParams& params() const { return theta_; }

  /// out[i] = K(points_i, query) for i < count. `out` must hold padded(count)
  /// entries. When `terms` is given, the pair terms are written at `offset`.
  void column(const PaddedPoints& points, const double* query, Eigen::Index count, double* out,
              PairTerms* terms = nullptr, Eigen::Index offset = 0) const;

  /// dK/dtheta_k for all 10 parameters, scalar reference form. On the clamped
  /// branch of the triangular term the summand contributes 0.
  ParamVector param_gradient(const double* x, const double* y, Eigen::Index dim) const;

  /// sum over packed pairs of w_p * dK/dtheta, from cached terms.
  ParamVector contract(const PairTerms& terms, const Eigen::ArrayXd& packed_weights) const;

 private:
  KernelParams theta_;
  double w_tri_, w_gauss_, w_lap_, w_per_;
  double inv_tri_, inv_gauss_, inv_lap_, per_amp_, per_freq_, inv_per_env_;
};

double kernel_eval(const KernelParams& theta, std::span<const double> x, std::span<const double> y);

ParamVector kernel_param_grad(const KernelParams& theta, std::span<const double> x,
                              std::span<const double> y);

/// K(X, X2) with entry (i, j) = K(X_i, X2_j).
Matrix gram_matrix(const KernelParams& theta, const PointSet& x, const PointSet& x2);

/// Symmetric K(X, X); only the upper triangle is evaluated.
Matrix gram_matrix(const KernelParams& theta, const PointSet& x);

/// Maps a symmetric weight matrix W to sum_ij W_ij dK(X_i, X_j)/dtheta.
using GradientContraction = std::function<ParamVector(const Matrix& weights)>;

/// K(X, X) together with the contraction for the same theta and points.
std::pair<Matrix, GradientContraction> gram_with_gradient(const KernelParams& theta, const PointSet& x);

/// sum_ij W_ij dK(X_i, X_j)/dtheta for a weight matrix W.
ParamVector contract_gram_gradient(const KernelParams& theta, const PointSet& x, const Matrix& weights);

/// A kernel family parameterized by KernelParams, seen through the two
/// matrix-level operations the relative-rho objective needs. The mixed kernel
/// is the production family; tests substitute stubs.
class KernelFamily {
 public:
  virtual ~KernelFamily() = default;
  virtual Matrix gram(const KernelParams& theta, const PointSet& x) const = 0;
  virtual std::pair<Matrix, GradientContraction> gram_with_gradient(const KernelParams& theta,
                                                                    const PointSet& x) const = 0;
};

class MixedKernelFamily final : public KernelFamily {
 public:
  Matrix gram(const KernelParams& theta, const PointSet& x) const override { return gram_matrix(theta, x); }
  std::pair<Matrix, GradientContraction> gram_with_gradient(const KernelParams& theta,
                                                            const PointSet& x) const override {
    return ksos::gram_with_gradient(theta, x);
  }
};

}  // namespace ksos
