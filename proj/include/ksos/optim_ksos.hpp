#pragma once

#include "ksos/objective.hpp"
#include "ksos/optim_gd.hpp"
#include "ksos/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace ksos {

struct SosConfig {
  /// Number of sampled parameters; equals the evaluation budget.
  int n_samples = 200;
  /// Weight of the trace penalty on the quadratic form.
  double trace_reg = 1e-5;
  /// Bandwidth of the Gaussian kernel on parameter space.
  double sos_kernel_sigma = 0.1;
  /// Log-barrier precision.
  double barrier_eps = 1e-6;
  int newton_steps = 100;
  std::uint64_t seed = 0;

  void validate() const;
};

/// State of the dual interior-point solve.
///
/// The sampled values f_i are fitted by c + Phi_i^T B Phi_i with B PSD, where
/// Phi_i is column i of the upper-triangular R with R^T R = K_sos. The dual
/// over alpha (sum alpha = 1) is
///
///   H(alpha) = sum_i alpha_i f_i - (eps/n) logdet M(alpha),
///   M(alpha) = sum_i alpha_i Phi_i Phi_i^T + trace_reg I.
struct SosDualState {
  std::vector<KernelParams> samples;
  Vector values;
  Matrix phi;
  Vector alpha;
  std::vector<double> newton_decrements;
  std::vector<KernelParams> candidates;
  std::vector<double> candidate_values;
};

struct DualDerivatives {
  Vector gradient;
  Matrix hessian;
};

/// n i.i.d. uniform draws from the box, deterministic per seed.
std::vector<KernelParams> sample_domain(const ParamDomain& domain, int n, std::uint64_t seed);

/// Upper-triangular R with R^T R = exp(-|theta_i - theta_j|^2 / (2 sigma^2)).
Matrix featurize(const std::vector<KernelParams>& samples, double sigma);

/// M(alpha) as defined on SosDualState.
Matrix dual_moment_matrix(const SosDualState& state, const SosConfig& cfg);

/// H(alpha) without the additive constant; throws NumericalError if M(alpha) is not PD.
double dual_objective(const SosDualState& state, const SosConfig& cfg);

/// Constant separating H(alpha) from the barrier problem's optimal value:
/// eps log(eps / n) - eps.
double dual_constant(const SosConfig& cfg, int n);

///   H'_i   = f_i - (eps/n) Phi_i^T M^-1 Phi_i
///   H''_ij = (eps/n) (Phi_i^T M^-1 Phi_j)^2
DualDerivatives dual_derivatives(const SosDualState& state, const SosConfig& cfg);

/// Lower bound c recovered from the barrier optimality condition
/// B = (eps/n) M^-1: c = sum_i alpha_i H'_i. At the dual optimum every H'_i
/// equals c.
double certified_lower_bound(const SosDualState& state, const SosConfig& cfg);

/// sum_i alpha_i theta_i, clamped to the domain.
KernelParams dual_candidate(const SosDualState& state, const ParamDomain& domain);

/// One damped Newton step on the affine set sum(alpha) = 1:
///
///   Delta  = H''^-1 H' - (1^T H''^-1 H' / 1^T H''^-1 1) H''^-1 1
///   lambda = sqrt(Delta^T H'' Delta)
///   alpha <- alpha - Delta / (1 + sqrt(n / eps) lambda)
///
/// Appends lambda and the resulting candidate to the state's history.
SosDualState newton_step(SosDualState state, const SosConfig& cfg, const ParamDomain& domain = {});

struct KsosRun {
  OptTrace trace;
  SosDualState state;
  double lower_bound = 0.0;
  /// H(alpha) plus dual_constant, the barrier problem's value.
  double dual_value = 0.0;
};

/// Samples the domain, spends the whole budget evaluating the objective there,
/// then runs cfg.newton_steps damped Newton iterations from uniform alpha. The
/// trace logs the candidate's value before the first and after every step
/// (diagnostic probes, not charged).
KsosRun ksos_minimize(const ParamObjective& objective, const ParamDomain& domain, const SosConfig& cfg);

/// Values of several objectives at one parameter, one entry per objective.
using BatchEvaluator = std::function<Vector(const KernelParams&)>;

/// ksos_minimize for several objectives sharing one sample set, with the
/// sampled values supplied together by `evaluate_all` (which is responsible for
/// charging each objective). The Newton solve and probes run per objective.
std::vector<KsosRun> ksos_minimize_shared(const std::vector<const ParamObjective*>& objectives,
                                          const BatchEvaluator& evaluate_all, const ParamDomain& domain,
                                          const SosConfig& cfg);

/// Same Newton solve on precomputed samples and values (no objective calls).
SosDualState ksos_solve(std::vector<KernelParams> samples, Vector values, const SosConfig& cfg,
                        const ParamDomain& domain = {});

}  // namespace ksos
