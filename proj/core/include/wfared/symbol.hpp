#ifndef WFARED_SYMBOL_HPP
#define WFARED_SYMBOL_HPP

#include <complex>
#include <vector>

#include "wfared/wfa.hpp"

namespace wfared {

using Complex = std::complex<double>;

/// Poles of the symbol phi(z) = alpha^T (z 1 - A)^{-1} beta are the
/// eigenvalues of A.  For a minimal automaton the inside-disc count equals
/// the Hankel rank (Kronecker).
struct PoleInfo {
  Complex value;
  double modulus = 0.0;
  bool inside_unit_disc = false;
};
std::vector<PoleInfo> pole_report(const Wfa& w);

/// alpha^T (z 1 - A)^{-1} beta via one linear solve; never forms an inverse.
Complex symbol_eval(const Wfa& w, Complex z, const Tolerances& tol = {});

/// phi_hat(m) = f(-m-1) for m <= -1; the Hankel entries are the negative
/// Fourier coefficients of the symbol.
double fourier_coefficient(const Wfa& w, long m);

/// Resolvent evaluators for the sigma_k Schmidt functions of an SVA:
///   xi^+(z)  = sigma_k^{-1/2} alpha^T (1 - z A)^{-1} e_k
///   eta^-(z) = sigma_k^{-1/2} beta^T  (z 1 - A)^{-1} e_k
class SchmidtFunctions {
public:
  SchmidtFunctions(const SvaWfa& s, Index k, const Tolerances& tol = {});

  Complex xi_plus(Complex z) const;
  Complex eta_minus(Complex z) const;

  /// Power-series coefficient sigma_k^{-1/2} alpha^T A^j e_k of xi^+.
  double xi_coefficient(Index j) const;

private:
  Matrix A_;
  Vector alpha_, beta_;
  Vector unit_;
  double sigma_scale_;
  std::vector<Complex> poles_;
  double pole_tol_;
};

/// sigma_k * [beta^T (z 1 - A)^{-1} u] / [alpha^T (1 - z A)^{-1} u] with
/// u = e_{k+column}, a column of the multiplicity block.  Unimodular (with
/// modulus sigma_k) on |z| = 1 for a valid SVA; independent of the column.
Complex error_ratio(const SvaWfa& s, Index k, Complex z, Index column = 0,
                    const Tolerances& tol = {});

struct UnimodularityResult {
  double max_deviation = 0.0;  ///< max | |ratio|/sigma_k - 1 |
  Index skipped = 0;           ///< samples hitting a pole or zero denominator
  Index samples = 0;
};

/// Samples the error ratio on an equispaced circle grid.
UnimodularityResult unimodularity_check(const SvaWfa& s, Index k,
                                        Index samples = 1000,
                                        const Tolerances& tol = {});

}  // namespace wfared

#endif
