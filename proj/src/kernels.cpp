#include "ksos/kernels.hpp"

#include <cmath>
#include <memory>
#include <numbers>

namespace ksos {

namespace {

void check_dims(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) {
    throw DomainError("kernel inputs must share a nonzero dimension");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw DomainError("kernel inputs must be finite");
    }
  }
}

}  // namespace

MixedKernel::MixedKernel(const KernelParams& theta) : theta_(theta) {
  auto sq = [](double v) { return v * v; };
  w_tri_ = sq(theta.gamma(0));
  w_gauss_ = sq(theta.gamma(1));
  w_lap_ = sq(theta.gamma(2));
  w_per_ = sq(theta.gamma(3));
  inv_tri_ = 1.0 / sq(theta.sigma(0));
  inv_gauss_ = 1.0 / sq(theta.sigma(1));
  inv_lap_ = 1.0 / sq(theta.sigma(2));
  per_amp_ = sq(theta.sigma(3));
  per_freq_ = std::numbers::pi * sq(theta.sigma(4));
  inv_per_env_ = 1.0 / sq(theta.sigma(5));
}

void MixedKernel::column(const PaddedPoints& points, const double* query, Eigen::Index count, double* out,
                         PairTerms* terms, Eigen::Index offset) const {
  using Arr = Eigen::ArrayXd;
  const Eigen::Index m = PaddedPoints::padded(count);
  const Matrix& cols = points.columns();
  Arr tri = Arr::Zero(m), r2 = Arr::Zero(m), l1 = Arr::Zero(m), sin2 = Arr::Zero(m);
  Arr tri_dist, dsin2;
  if (terms != nullptr) {
    tri_dist = Arr::Zero(m);
    dsin2 = Arr::Zero(m);
  }
  Arr a(m);
  for (Eigen::Index k = 0; k < points.dim(); ++k) {
    a = (cols.col(k).head(m).array() - query[k]).abs();
    const Arr t = 1.0 - a * inv_tri_;
    tri += t.max(0.0);
    r2 += a.square();
    l1 += a;
    if (terms == nullptr) {
      for (Eigen::Index i = 0; i < m; ++i) {
        const double s = std::sin(per_freq_ * a[i]);
        sin2[i] += s * s;
      }
    } else {
      tri_dist += (t > 0.0).select(a, 0.0);
      for (Eigen::Index i = 0; i < m; ++i) {
        const double u = per_freq_ * a[i];
        const double s = std::sin(u);
        const double c = std::cos(u);
        sin2[i] += s * s;
        dsin2[i] += a[i] * (2.0 * s * c);
      }
    }
  }
  const Arr e_gauss = (-r2 * inv_gauss_).exp();
  const Arr e_lap = (-l1 * inv_lap_).exp();
  const Arr e_per = (-per_amp_ * sin2 - r2 * inv_per_env_).exp();
  Eigen::Map<Arr>(out, m) = w_tri_ * tri + w_gauss_ * e_gauss + w_lap_ * e_lap + w_per_ * e_per;
  if (terms != nullptr) {
    terms->tri.segment(offset, count) = tri.head(count);
    terms->tri_dist.segment(offset, count) = tri_dist.head(count);
    terms->r2.segment(offset, count) = r2.head(count);
    terms->l1.segment(offset, count) = l1.head(count);
    terms->sin2.segment(offset, count) = sin2.head(count);
    terms->dsin2.segment(offset, count) = dsin2.head(count);
    terms->e_gauss.segment(offset, count) = e_gauss.head(count);
    terms->e_lap.segment(offset, count) = e_lap.head(count);
    terms->e_per.segment(offset, count) = e_per.head(count);
  }
}

ParamVector MixedKernel::contract(const PairTerms& terms, const Eigen::ArrayXd& w) const {
  const double g1 = theta_.gamma(0), g2 = theta_.gamma(1), g3 = theta_.gamma(2), g4 = theta_.gamma(3);
  const double s1 = theta_.sigma(0), s2 = theta_.sigma(1), s3 = theta_.sigma(2);
  const double s4 = theta_.sigma(3), s5 = theta_.sigma(4), s6 = theta_.sigma(5);
  const Eigen::ArrayXd w_per = w * terms.e_per;
  ParamVector g;
  g[0] = 2.0 * g1 * (w * terms.tri).sum();
  g[1] = 2.0 * g2 * (w * terms.e_gauss).sum();
  g[2] = 2.0 * g3 * (w * terms.e_lap).sum();
  g[3] = 2.0 * g4 * w_per.sum();
  g[4] = w_tri_ * 2.0 / (s1 * s1 * s1) * (w * terms.tri_dist).sum();
  g[5] = w_gauss_ * 2.0 / (s2 * s2 * s2) * (w * terms.e_gauss * terms.r2).sum();
  g[6] = w_lap_ * 2.0 / (s3 * s3 * s3) * (w * terms.e_lap * terms.l1).sum();
  g[7] = -w_per_ * 2.0 * s4 * (w_per * terms.sin2).sum();
  g[8] = -w_per_ * per_amp_ * 2.0 * std::numbers::pi * s5 * (w_per * terms.dsin2).sum();
  g[9] = w_per_ * 2.0 / (s6 * s6 * s6) * (w_per * terms.r2).sum();
  return g;
}

ParamVector MixedKernel::param_gradient(const double* x, const double* y, Eigen::Index dim) const {
  double tri = 0.0;
  double tri_active_dist = 0.0;
  double r2 = 0.0;
  double l1 = 0.0;
  double sin2 = 0.0;
  double dsin2_dfreq = 0.0;  // sum_i a_i sin(2u_i), u_i = per_freq * a_i
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double diff = x[i] - y[i];
    const double a = std::abs(diff);
    const double t = 1.0 - a * inv_tri_;
    if (t > 0.0) {
      tri += t;
      tri_active_dist += a;
    }
    r2 += diff * diff;
    l1 += a;
    const double u = per_freq_ * a;
    const double s = std::sin(u);
    sin2 += s * s;
    dsin2_dfreq += a * std::sin(2.0 * u);
  }

  const double g1 = theta_.gamma(0), g2 = theta_.gamma(1), g3 = theta_.gamma(2), g4 = theta_.gamma(3);
  const double s1 = theta_.sigma(0), s2 = theta_.sigma(1), s3 = theta_.sigma(2);
  const double s4 = theta_.sigma(3), s5 = theta_.sigma(4), s6 = theta_.sigma(5);

  const double e_gauss = std::exp(-r2 * inv_gauss_);
  const double e_lap = std::exp(-l1 * inv_lap_);
  const double e_per = std::exp(-per_amp_ * sin2 - r2 * inv_per_env_);
  const double per_term = w_per_ * e_per;

  ParamVector g;
  g[0] = 2.0 * g1 * tri;
  g[1] = 2.0 * g2 * e_gauss;
  g[2] = 2.0 * g3 * e_lap;
  g[3] = 2.0 * g4 * e_per;
  g[4] = w_tri_ * 2.0 * tri_active_dist / (s1 * s1 * s1);
  g[5] = w_gauss_ * e_gauss * 2.0 * r2 / (s2 * s2 * s2);
  g[6] = w_lap_ * e_lap * 2.0 * l1 / (s3 * s3 * s3);
  g[7] = -per_term * 2.0 * s4 * sin2;
  g[8] = -per_term * per_amp_ * dsin2_dfreq * 2.0 * std::numbers::pi * s5;
  g[9] = per_term * 2.0 * r2 / (s6 * s6 * s6);
  return g;
}

double kernel_eval(const KernelParams& theta, std::span<const double> x, std::span<const double> y) {
  check_dims(x, y);
  const auto dim = static_cast<Eigen::Index>(x.size());
  const PaddedPoints point(Eigen::Map<const PointSet>(x.data(), 1, dim));
  double out[PaddedPoints::kPadding];
  MixedKernel(theta).column(point, y.data(), 1, out);
  if (!std::isfinite(out[0])) {
    throw NumericalError("kernel evaluation is not finite");
  }
  return out[0];
}

ParamVector kernel_param_grad(const KernelParams& theta, std::span<const double> x,
                              std::span<const double> y) {
  check_dims(x, y);
  return MixedKernel(theta).param_gradient(x.data(), y.data(), static_cast<Eigen::Index>(x.size()));
}

Matrix gram_matrix(const KernelParams& theta, const PointSet& x, const PointSet& x2) {
  if (x.cols() != x2.cols()) {
    throw DomainError("gram_matrix: point sets have different dimensions");
  }
  const MixedKernel k(theta);
  const PaddedPoints points(x);
  const Eigen::Index n = x.rows();
  Matrix buffer(PaddedPoints::padded(n), x2.rows());
  for (Eigen::Index j = 0; j < x2.rows(); ++j) {
    k.column(points, x2.row(j).data(), n, buffer.col(j).data());
  }
  return buffer.topRows(n);
}

namespace {

Matrix symmetric_gram(const MixedKernel& k, const PointSet& x, PairTerms* terms) {
  const PaddedPoints points(x);
  const Eigen::Index n = x.rows();
  // Leading dimension padded so every column write has room for a full block.
  Matrix buffer(PaddedPoints::padded(n), n);
  Eigen::Index offset = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    k.column(points, x.row(j).data(), j + 1, buffer.col(j).data(), terms, offset);
    offset += j + 1;
  }
  Matrix out = buffer.topRows(n);
  out.triangularView<Eigen::StrictlyLower>() = out.transpose();
  return out;
}

/// Folds W onto the packed upper triangle: w_ij + w_ji off the diagonal.
Eigen::ArrayXd pack_weights(const Matrix& weights) {
  const Eigen::Index n = weights.rows();
  Eigen::ArrayXd packed(n * (n + 1) / 2);
  Eigen::Index offset = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    packed.segment(offset, j) = (weights.col(j).head(j) + weights.row(j).head(j).transpose()).array();
    packed[offset + j] = weights(j, j);
    offset += j + 1;
  }
  return packed;
}

}  // namespace

Matrix gram_matrix(const KernelParams& theta, const PointSet& x) {
  return symmetric_gram(MixedKernel(theta), x, nullptr);
}

void PairTerms::resize(Eigen::Index n) {
  for (Eigen::ArrayXd* a : {&tri, &tri_dist, &r2, &l1, &sin2, &dsin2, &e_gauss, &e_lap, &e_per}) {
    a->resize(n);
  }
}

PaddedPoints::PaddedPoints(const PointSet& points) : n_(points.rows()) {
  cols_ = Matrix::Zero(padded(n_), points.cols());
  cols_.topRows(n_) = points;
}

std::pair<Matrix, GradientContraction> gram_with_gradient(const KernelParams& theta, const PointSet& x) {
  auto kernel = std::make_shared<const MixedKernel>(theta);
  auto terms = std::make_shared<PairTerms>();
  const Eigen::Index n = x.rows();
  terms->resize(n * (n + 1) / 2);
  Matrix gram = symmetric_gram(*kernel, x, terms.get());
  GradientContraction contract = [kernel, terms = std::shared_ptr<const PairTerms>(terms),
                                  n](const Matrix& weights) {
    if (weights.rows() != n || weights.cols() != n) {
      throw DomainError("gradient contraction: weight matrix shape mismatch");
    }
    return kernel->contract(*terms, pack_weights(weights));
  };
  return {std::move(gram), std::move(contract)};
}

ParamVector contract_gram_gradient(const KernelParams& theta, const PointSet& x, const Matrix& weights) {
  if (weights.rows() != x.rows() || weights.cols() != x.rows()) {
    throw DomainError("contract_gram_gradient: weight matrix shape mismatch");
  }
  return gram_with_gradient(theta, x).second(weights);
}

}  // namespace ksos
