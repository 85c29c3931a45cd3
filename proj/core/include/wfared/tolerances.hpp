#ifndef WFARED_TOLERANCES_HPP
#define WFARED_TOLERANCES_HPP

namespace wfared {

/// Numerical tolerances shared across the library.  All are relative unless
/// noted otherwise; every knob can be overridden per call and from the CLI.
struct Tolerances {
  double solve = 1e-10;         ///< linear-equation residual, relative
  double circle = 1e-8;         ///< exclusion band around the unit circle
  double rho = 1e-8;            ///< required margin of rho(A) below 1
  double branch = 1e-8;         ///< ||alpha_2|| <= branch * ||alpha|| selects the zero branch
  double multiplicity = 1e-9;   ///< singular numbers within multiplicity * sigma_0 are grouped
  double pole = 1e-10;          ///< resolvent evaluation refuses z this close to a pole
  double equivalence = 1e-9;    ///< coefficient comparison, relative
  double rank = 1e-10;          ///< SVD / pivoted-Cholesky rank cutoff, relative
};

}  // namespace wfared

#endif
