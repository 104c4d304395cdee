#include "riesz/error.hpp"

namespace riesz {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::UnsupportedKind: return "unsupported_kind";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::CoincidentPoints: return "coincident_points";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::NonDifferentiable: return "non_differentiable";
    case ErrorKind::OptimizationFailed: return "optimization_failed";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

}  // namespace riesz
