#include "ksos/rho.hpp"

#include "ksos/random.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <typeinfo>

namespace ksos {

namespace {

struct NestedFactors {
  Eigen::LLT<Matrix> full;
  Eigen::LLT<Matrix> half;
};

bool factor_both(NestedFactors& f, const Matrix& gram, const Matrix& half_gram, double shift) {
  Matrix a = gram;
  a.diagonal().array() += shift;
  f.full.compute(a);
  if (f.full.info() != Eigen::Success) {
    return false;
  }
  Matrix b = half_gram;
  b.diagonal().array() += shift;
  f.half.compute(b);
  return f.half.info() == Eigen::Success;
}

}  // namespace

RhoObjective::RhoObjective(Dataset full, std::vector<std::size_t> half_indices, Eigen::Index output_dim,
                           std::shared_ptr<const KernelFamily> family)
    : full_(std::move(full)), half_(std::move(half_indices)), output_dim_(output_dim), family_(std::move(family)) {
  full_.validate();
  if (output_dim_ < 0 || output_dim_ >= full_.output_dim()) {
    throw DomainError("rho: output dimension out of range");
  }
  if (half_.empty()) {
    throw DomainError("rho: subset must be nonempty");
  }
  if (!std::is_sorted(half_.begin(), half_.end()) ||
      std::adjacent_find(half_.begin(), half_.end()) != half_.end() ||
      half_.back() >= static_cast<std::size_t>(full_.size())) {
    throw DomainError("rho: subset indices must be sorted, distinct and in range");
  }
  if (!family_) {
    throw DomainError("rho: kernel family is null");
  }
}

namespace {

/// Factorizations of the full and subset systems for one theta.
struct NestedSystem {
  NestedFactors factors;
  std::vector<Eigen::Index> half;
};

NestedSystem factor_nested(const Matrix& gram, const std::vector<std::size_t>& half_indices) {
  if (!gram.allFinite()) {
    throw NumericalError("rho: gram matrix has non-finite entries");
  }
  NestedSystem sys;
  sys.half.assign(half_indices.begin(), half_indices.end());
  const auto n_half = static_cast<Eigen::Index>(sys.half.size());
  Matrix half_gram(n_half, n_half);
  for (Eigen::Index j = 0; j < n_half; ++j) {
    for (Eigen::Index i = 0; i < n_half; ++i) {
      half_gram(i, j) = gram(sys.half[i], sys.half[j]);
    }
  }
  // The same diagonal shift on both systems keeps the nested energies ordered.
  if (!factor_both(sys.factors, gram, half_gram, 0.0)) {
    const double jitter = kJitterScale * gram.trace() / static_cast<double>(gram.rows());
    if (!factor_both(sys.factors, gram, half_gram, jitter)) {
      throw NumericalError("rho: gram matrix is singular after jitter");
    }
  }
  return sys;
}

struct ColumnSolve {
  Vector beta_full;
  Vector beta_half;
  double energy_full = 0.0;
  double energy_half = 0.0;
  double rho() const { return 1.0 - energy_half / energy_full; }
};

ColumnSolve solve_column(const NestedSystem& sys, const Vector& y_full) {
  Vector y_half(static_cast<Eigen::Index>(sys.half.size()));
  for (Eigen::Index i = 0; i < y_half.size(); ++i) {
    y_half[i] = y_full[sys.half[i]];
  }
  ColumnSolve c;
  c.beta_full = sys.factors.full.solve(y_full);
  c.beta_half = sys.factors.half.solve(y_half);
  c.energy_full = y_full.dot(c.beta_full);
  c.energy_half = y_half.dot(c.beta_half);
  if (!std::isfinite(c.energy_full) || !std::isfinite(c.energy_half)) {
    throw NumericalError("rho: RKHS energy is not finite");
  }
  if (c.energy_full < kMinRkhsEnergy) {
    throw NumericalError("rho: full-data RKHS energy is zero");
  }
  return c;
}

}  // namespace

ValueAndGradient RhoObjective::compute(const KernelParams& theta, bool with_gradient) const {
  Matrix gram;
  GradientContraction contract;
  if (with_gradient) {
    std::tie(gram, contract) = family_->gram_with_gradient(theta, full_.X);
  } else {
    gram = family_->gram(theta, full_.X);
  }
  const NestedSystem sys = factor_nested(gram, half_);
  const ColumnSolve c = solve_column(sys, full_.Y.col(output_dim_));

  ValueAndGradient out;
  out.value = c.rho();
  if (!with_gradient) {
    return out;
  }

  // d(y^T K^-1 y) = -beta^T dK beta, combined by the quotient rule.
  Vector beta_half_embedded = Vector::Zero(full_.size());
  for (Eigen::Index i = 0; i < c.beta_half.size(); ++i) {
    beta_half_embedded[sys.half[i]] = c.beta_half[i];
  }
  const Matrix weights = beta_half_embedded * beta_half_embedded.transpose() / c.energy_full -
                         (c.energy_half / (c.energy_full * c.energy_full)) * (c.beta_full * c.beta_full.transpose());
  out.gradient = contract(weights);
  if (!out.gradient.allFinite()) {
    throw NumericalError("rho: gradient is not finite");
  }
  return out;
}

Vector rho_all_outputs(const std::vector<const RhoObjective*>& objectives, const KernelParams& theta) {
  if (objectives.empty()) {
    throw DomainError("rho_all_outputs: no objectives");
  }
  const RhoObjective& first = *objectives.front();
  for (const RhoObjective* o : objectives) {
    if (o->half_indices() != first.half_indices() || typeid(*o->family_) != typeid(*first.family_) ||
        o->full_.X.rows() != first.full_.X.rows() ||
        o->full_.X.cols() != first.full_.X.cols() || o->full_.X != first.full_.X) {
      throw DomainError("rho_all_outputs: objectives must share inputs, subset and kernel family");
    }
  }
  const NestedSystem sys = factor_nested(first.family_->gram(theta, first.full_.X), first.half_);
  Vector out(static_cast<Eigen::Index>(objectives.size()));
  for (std::size_t k = 0; k < objectives.size(); ++k) {
    const RhoObjective& o = *objectives[k];
    o.charge();
    out[static_cast<Eigen::Index>(k)] = solve_column(sys, o.full_.Y.col(o.output_dim_)).rho();
  }
  return out;
}

RhoObjective make_split(const Dataset& data, Eigen::Index output_dim, std::uint64_t seed) {
  data.validate();
  const auto n = static_cast<std::size_t>(data.size());
  if (n < 2) {
    throw DomainError("make_split: need at least two samples");
  }
  SeededRng rng(seed, RandomStream::kHalfSplit);
  return RhoObjective(data, sample_without_replacement(n, n / 2, rng), output_dim);
}

}  // namespace ksos
