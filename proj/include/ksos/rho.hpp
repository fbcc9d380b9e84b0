#pragma once

#include "ksos/interpolant.hpp"
#include "ksos/kernels.hpp"
#include "ksos/objective.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace ksos {

/// Relative-rho Kernel Flows loss on one output column,
///
///   rho(theta) = 1 - (Yc^T K(Xc,Xc)^-1 Yc) / (Yb^T K(Xb,Xb)^-1 Yb),
///
/// where (Xb, Yb) is the full dataset and (Xc, Yc) a frozen subset of it.
/// The subset is fixed at construction so every optimizer sees the same rho.
class RhoObjective final : public ParamObjective {
 public:
  RhoObjective(Dataset full, std::vector<std::size_t> half_indices, Eigen::Index output_dim,
               std::shared_ptr<const KernelFamily> family = std::make_shared<MixedKernelFamily>());

  const Dataset& data() const { return full_; }
  const std::vector<std::size_t>& half_indices() const { return half_; }
  Eigen::Index output_dim() const { return output_dim_; }

  double rho_value(const KernelParams& theta) const { return value(theta); }
  /// Gradient of rho; charged as one evaluation.
  ParamVector rho_grad(const KernelParams& theta) const { return value_and_grad(theta).gradient; }

 protected:
  ValueAndGradient compute(const KernelParams& theta, bool with_gradient) const override;

 private:
  friend Vector rho_all_outputs(const std::vector<const RhoObjective*>&, const KernelParams&);

  Dataset full_;
  std::vector<std::size_t> half_;
  Eigen::Index output_dim_;
  std::shared_ptr<const KernelFamily> family_;
};

/// Floor on the full-data RKHS energy below which rho is undefined.
inline constexpr double kMinRkhsEnergy = 1e-30;

/// rho of several objectives over the same inputs and subset (typically the
/// output columns of one dataset), sharing one Gram matrix and factorization.
/// Each objective is charged one evaluation; values equal rho_value bitwise.
Vector rho_all_outputs(const std::vector<const RhoObjective*>& objectives, const KernelParams& theta);

/// Draws floor(N/2) distinct indices with the seed's split stream. The subset
/// depends only on (N, seed), so every output column of one seed shares it.
RhoObjective make_split(const Dataset& data, Eigen::Index output_dim, std::uint64_t seed);

}  // namespace ksos
