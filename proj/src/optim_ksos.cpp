#include "ksos/optim_ksos.hpp"

#include "ksos/random.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace ksos {

namespace {

SosDualState initial_state(std::vector<KernelParams> samples, Vector values, const SosConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (values.size() != n) {
    throw DomainError("ksos: one value per sample required");
  }
  if (!values.allFinite()) {
    throw NumericalError("ksos: sampled objective values must be finite");
  }
  SosDualState state;
  state.phi = featurize(samples, cfg.sos_kernel_sigma);
  state.samples = std::move(samples);
  state.values = std::move(values);
  state.alpha = Vector::Constant(n, 1.0 / static_cast<double>(n));
  return state;
}

Eigen::LLT<Matrix> factor_moment(const SosDualState& state, const SosConfig& cfg) {
  Eigen::LLT<Matrix> llt(dual_moment_matrix(state, cfg));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("ksos: M(alpha) is not positive definite");
  }
  return llt;
}

/// Q_ij = Phi_i^T M^-1 Phi_j.
Matrix feature_inner_products(const SosDualState& state, const SosConfig& cfg) {
  const Eigen::LLT<Matrix> llt = factor_moment(state, cfg);
  Matrix q = state.phi.transpose() * llt.solve(state.phi);
  return 0.5 * (q + q.transpose());
}

}  // namespace

void SosConfig::validate() const {
  if (n_samples < 2) {
    throw DomainError("ksos: need at least two samples");
  }
  if (!(trace_reg >= 0.0) || !std::isfinite(trace_reg)) {
    throw DomainError("ksos: trace regularizer must be finite and nonnegative");
  }
  if (!(sos_kernel_sigma > 0.0) || !std::isfinite(sos_kernel_sigma)) {
    throw DomainError("ksos: feature kernel bandwidth must be positive");
  }
  if (!(barrier_eps > 0.0) || !std::isfinite(barrier_eps)) {
    throw DomainError("ksos: barrier precision must be positive");
  }
  if (newton_steps < 0) {
    throw DomainError("ksos: newton_steps must be nonnegative");
  }
}

std::vector<KernelParams> sample_domain(const ParamDomain& domain, int n, std::uint64_t seed) {
  domain.validate();
  if (n < 1) {
    throw DomainError("sample_domain: n must be positive");
  }
  SeededRng rng(seed, RandomStream::kSosSamples);
  const ParamVector width = domain.upper - domain.lower;
  std::vector<KernelParams> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    ParamVector v;
    for (int k = 0; k < kNumParams; ++k) {
      v[k] = domain.lower[k] + rng.uniform01() * width[k];
    }
    out.emplace_back(v);
  }
  return out;
}

Matrix featurize(const std::vector<KernelParams>& samples, double sigma) {
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n < 1) {
    throw DomainError("featurize: no samples");
  }
  const double scale = 1.0 / (2.0 * sigma * sigma);
  Matrix gram(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double d2 = (samples[i].values() - samples[j].values()).squaredNorm();
      gram(i, j) = gram(j, i) = std::exp(-d2 * scale);
    }
  }
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    gram.diagonal().array() += 1e-12 * static_cast<double>(n);
    llt.compute(gram);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("featurize: feature gram matrix is not positive definite");
    }
  }
  // gram = L L^T, so R = L^T is upper-triangular with R^T R = gram.
  return llt.matrixU();
}

Matrix dual_moment_matrix(const SosDualState& state, const SosConfig& cfg) {
  Matrix m = state.phi * state.alpha.asDiagonal() * state.phi.transpose();
  m = 0.5 * (m + m.transpose());
  m.diagonal().array() += cfg.trace_reg;
  return m;
}

double dual_objective(const SosDualState& state, const SosConfig& cfg) {
  const Eigen::LLT<Matrix> llt = factor_moment(state, cfg);
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double n = static_cast<double>(state.alpha.size());
  return state.alpha.dot(state.values) - (cfg.barrier_eps / n) * logdet;
}

double dual_constant(const SosConfig& cfg, int n) {
  return cfg.barrier_eps * std::log(cfg.barrier_eps / n) - cfg.barrier_eps;
}

DualDerivatives dual_derivatives(const SosDualState& state, const SosConfig& cfg) {
  const double weight = cfg.barrier_eps / static_cast<double>(state.alpha.size());
  const Matrix q = feature_inner_products(state, cfg);
  DualDerivatives d;
  d.gradient = state.values - weight * q.diagonal();
  d.hessian = weight * q.cwiseProduct(q);
  return d;
}

double certified_lower_bound(const SosDualState& state, const SosConfig& cfg) {
  return state.alpha.dot(dual_derivatives(state, cfg).gradient);
}

KernelParams dual_candidate(const SosDualState& state, const ParamDomain& domain) {
  ParamVector sum = ParamVector::Zero();
  for (std::size_t i = 0; i < state.samples.size(); ++i) {
    sum += state.alpha[static_cast<Eigen::Index>(i)] * state.samples[i].values();
  }
  return KernelParams(domain.clamp(sum));
}

SosDualState newton_step(SosDualState state, const SosConfig& cfg, const ParamDomain& domain) {
  const auto n = state.alpha.size();
  const DualDerivatives d = dual_derivatives(state, cfg);

  Eigen::LLT<Matrix> llt(d.hessian);
  if (llt.info() != Eigen::Success) {
    Matrix ridged = d.hessian;
    ridged.diagonal().array() += 1e-12 * d.hessian.trace() / static_cast<double>(n);
    llt.compute(ridged);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("ksos: dual Hessian is singular");
    }
  }
  const Vector newton = llt.solve(d.gradient);
  const Vector toward_ones = llt.solve(Vector::Ones(n));
  const double ones_mass = toward_ones.sum();
  Vector delta = newton - (newton.sum() / ones_mass) * toward_ones;
  // Second pass removes the rounding left in 1^T Delta.
  delta -= (delta.sum() / ones_mass) * toward_ones;

  const double decrement = std::sqrt(std::max(0.0, delta.dot(d.hessian * delta)));
  if (!delta.allFinite() || !std::isfinite(decrement)) {
    throw NumericalError("ksos: Newton direction is not finite");
  }
  const double damping = 1.0 / (1.0 + std::sqrt(static_cast<double>(n) / cfg.barrier_eps) * decrement);
  state.alpha -= damping * delta;

  state.newton_decrements.push_back(decrement);
  state.candidates.push_back(dual_candidate(state, domain));
  return state;
}

SosDualState ksos_solve(std::vector<KernelParams> samples, Vector values, const SosConfig& cfg,
                        const ParamDomain& domain) {
  cfg.validate();
  SosDualState state = initial_state(std::move(samples), std::move(values), cfg);
  for (int t = 0; t < cfg.newton_steps; ++t) {
    state = newton_step(std::move(state), cfg, domain);
  }
  return state;
}

std::vector<KsosRun> ksos_minimize_shared(const std::vector<const ParamObjective*>& objectives,
                                          const BatchEvaluator& evaluate_all, const ParamDomain& domain,
                                          const SosConfig& cfg) {
  cfg.validate();
  domain.validate();
  const std::size_t m = objectives.size();
  if (m == 0) {
    throw DomainError("ksos: no objectives");
  }
  std::vector<std::int64_t> charged_before, probes_before;
  for (const ParamObjective* o : objectives) {
    charged_before.push_back(o->evaluations());
    probes_before.push_back(o->diagnostic_evaluations());
  }

  const std::vector<KernelParams> samples = sample_domain(domain, cfg.n_samples, cfg.seed);
  Matrix values(cfg.n_samples, static_cast<Eigen::Index>(m));
  for (int i = 0; i < cfg.n_samples; ++i) {
    const Vector row = evaluate_all(samples[static_cast<std::size_t>(i)]);
    if (row.size() != values.cols()) {
      throw DomainError("ksos: batch evaluator returned the wrong number of values");
    }
    values.row(i) = row.transpose();
  }
  const Matrix phi = featurize(samples, cfg.sos_kernel_sigma);

  std::vector<KsosRun> runs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const ParamObjective& objective = *objectives[k];
    KsosRun& run = runs[k];
    run.state.samples = samples;
    run.state.values = values.col(static_cast<Eigen::Index>(k));
    if (!run.state.values.allFinite()) {
      throw NumericalError("ksos: sampled objective values must be finite");
    }
    run.state.phi = phi;
    run.state.alpha = Vector::Constant(cfg.n_samples, 1.0 / cfg.n_samples);

    auto log_candidate = [&](const KernelParams& candidate) {
      const double v = objective.probe(candidate);
      run.state.candidate_values.push_back(v);
      run.trace.iterates.push_back(candidate);
      run.trace.values.push_back(v);
    };
    log_candidate(dual_candidate(run.state, domain));
    for (int t = 0; t < cfg.newton_steps; ++t) {
      run.state = newton_step(std::move(run.state), cfg, domain);
      log_candidate(run.state.candidates.back());
    }

    run.trace.candidate = run.trace.iterates.back();
    run.trace.candidate_value = run.trace.values.back();
    run.trace.evals_used = objective.evaluations() - charged_before[k];
    run.trace.diagnostic_evals = objective.diagnostic_evaluations() - probes_before[k];
    run.lower_bound = certified_lower_bound(run.state, cfg);
    run.dual_value = dual_objective(run.state, cfg) + dual_constant(cfg, cfg.n_samples);
  }
  return runs;
}

KsosRun ksos_minimize(const ParamObjective& objective, const ParamDomain& domain, const SosConfig& cfg) {
  const BatchEvaluator single = [&](const KernelParams& theta) {
    return Vector::Constant(1, objective.value(theta)).eval();
  };
  return std::move(ksos_minimize_shared({&objective}, single, domain, cfg).front());
}

}  // namespace ksos
