#include "ksos/types.hpp"

#include <cmath>

namespace ksos {

KernelParams::KernelParams(const ParamVector& values) : values_(values) {
  for (int i = 0; i < kNumParams; ++i) {
    if (!std::isfinite(values[i]) || values[i] <= 0.0) {
      throw DomainError("kernel parameters must be finite and strictly positive (entry " +
                        std::to_string(i) + " = " + std::to_string(values[i]) + ")");
    }
  }
}

void ParamDomain::validate() const {
  if (!lower.allFinite() || !upper.allFinite()) {
    throw DomainError("parameter domain bounds must be finite");
  }
  if ((lower.array() > upper.array()).any()) {
    throw DomainError("parameter domain requires lower <= upper");
  }
}

bool ParamDomain::contains(const ParamVector& v) const {
  return (v.array() >= lower.array()).all() && (v.array() <= upper.array()).all();
}

ParamVector ParamDomain::clamp(const ParamVector& v) const {
  return v.cwiseMax(lower).cwiseMin(upper);
}

}  // namespace ksos
