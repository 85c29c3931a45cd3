#include "wfared/errors.hpp"

namespace wfared {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_input: return "InvalidInput";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_convergent: return "NonConvergent";
    case ErrorCode::singular_system: return "SingularSystem";
    case ErrorCode::eigenvalue_on_circle: return "EigenvalueOnCircle";
    case ErrorCode::spectral_radius_too_large: return "SpectralRadiusTooLarge";
    case ErrorCode::not_minimal: return "NotMinimal";
    case ErrorCode::group_not_at_boundary: return "GroupNotAtBoundary";
    case ErrorCode::singular_core: return "SingularCore";
    case ErrorCode::inertia_mismatch: return "InertiaMismatch";
    case ErrorCode::near_pole: return "NearPole";
    case ErrorCode::near_zero_denominator: return "NearZeroDenominator";
    case ErrorCode::divergent_division: return "DivergentDivision";
    case ErrorCode::singular_transition: return "SingularTransition";
    case ErrorCode::verification_failed: return "VerificationFailed";
  }
  return "UnknownError";
}

int Error::exit_code() const {
  switch (code_) {
    case ErrorCode::invalid_input:
      return 1;
    case ErrorCode::verification_failed:
      return 3;
    default:
      return 2;
  }
}

}  // namespace wfared
