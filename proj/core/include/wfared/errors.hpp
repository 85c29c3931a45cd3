#ifndef WFARED_ERRORS_HPP
#define WFARED_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace wfared {

/// Failure kinds surfaced by the library.  The CLI maps them to process exit
/// codes: malformed input -> 1, numerical failures -> 2, certificate
/// mismatches -> 3.
enum class ErrorCode {
  invalid_input,
  dimension_mismatch,
  non_convergent,
  singular_system,
  eigenvalue_on_circle,
  spectral_radius_too_large,
  not_minimal,
  group_not_at_boundary,
  singular_core,
  inertia_mismatch,
  near_pole,
  near_zero_denominator,
  divergent_division,
  singular_transition,
  verification_failed,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  /// 1 = input error, 2 = numerical failure, 3 = verification failure.
  int exit_code() const;

private:
  ErrorCode code_;
};

}  // namespace wfared

#endif
