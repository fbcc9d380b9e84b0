#pragma once

#include "ksos/types.hpp"

#include <atomic>
#include <cstdint>

namespace ksos {

struct ValueAndGradient {
  double value = 0.0;
  ParamVector gradient = ParamVector::Zero();
};

/// A scalar objective over kernel parameters with evaluation accounting.
/// value() and value_and_grad() are charged to the evaluation budget;
/// probe() is a diagnostic evaluation tracked on a separate counter.
class ParamObjective {
 public:
  ParamObjective() = default;
  ParamObjective(const ParamObjective& other)
      : evaluations_(other.evaluations()), diagnostics_(other.diagnostic_evaluations()) {}
  ParamObjective& operator=(const ParamObjective& other) {
    evaluations_ = other.evaluations();
    diagnostics_ = other.diagnostic_evaluations();
    return *this;
  }
  virtual ~ParamObjective() = default;

  double value(const KernelParams& theta) const {
    ++evaluations_;
    return compute(theta, false).value;
  }
  ValueAndGradient value_and_grad(const KernelParams& theta) const {
    ++evaluations_;
    return compute(theta, true);
  }
  double probe(const KernelParams& theta) const {
    ++diagnostics_;
    return compute(theta, false).value;
  }

  /// Charges evaluations performed on this objective's behalf elsewhere.
  void charge(std::int64_t n = 1) const { evaluations_ += n; }

  std::int64_t evaluations() const { return evaluations_.load(); }
  std::int64_t diagnostic_evaluations() const { return diagnostics_.load(); }
  void reset_counters() {
    evaluations_ = 0;
    diagnostics_ = 0;
  }

 protected:
  virtual ValueAndGradient compute(const KernelParams& theta, bool with_gradient) const = 0;

 private:
  mutable std::atomic<std::int64_t> evaluations_{0};
  mutable std::atomic<std::int64_t> diagnostics_{0};
};

}  // namespace ksos
