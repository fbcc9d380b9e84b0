#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ksos {

inline constexpr int kNumParams = 10;
inline constexpr int kNumGammas = 4;
inline constexpr int kNumSigmas = 6;

using ParamVector = Eigen::Matrix<double, kNumParams, 1>;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
/// Point sets are stored one point per row, rows contiguous.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Input did not satisfy a shape or domain precondition.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A factorization or evaluation broke down numerically.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The 10 parameters of the mixed kernel: mixture weights gamma_1..4 followed
/// by the scales sigma_1..6. Every entry is finite and strictly positive.
class KernelParams {
 public:
  KernelParams() : values_(ParamVector::Ones()) {}
  explicit KernelParams(const ParamVector& values);

  static KernelParams ones() { return KernelParams(); }

  /// gamma(0) is gamma_1.
  double gamma(int i) const { return values_[i]; }
  /// sigma(0) is sigma_1.
  double sigma(int i) const { return values_[kNumGammas + i]; }

  const ParamVector& values() const { return values_; }
  double operator[](int i) const { return values_[i]; }

  bool operator==(const KernelParams& other) const { return values_ == other.values_; }

 private:
  ParamVector values_;
};

/// Axis-aligned parameter box. Defaults to [0.001, 10]^10.
struct ParamDomain {
  ParamVector lower = ParamVector::Constant(0.001);
  ParamVector upper = ParamVector::Constant(10.0);

  /// Throws DomainError unless lower <= upper componentwise and all finite.
  void validate() const;
  bool contains(const ParamVector& v) const;
  ParamVector clamp(const ParamVector& v) const;
};

}  // namespace ksos
