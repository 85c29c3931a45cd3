#ifndef WFARED_HANKEL_HPP
#define WFARED_HANKEL_HPP

#include <utility>

#include "wfared/wfa.hpp"

namespace wfared {

/// Finite section of the infinite Hankel matrix: H(i,j) = f(i+j), exactly
/// Hankel-symmetric (each anti-diagonal is computed once).  tail_bound
/// estimates the effect of truncation on the singular values: the Frobenius
/// mass of the anti-diagonals beyond the data window, sum_{m >= 2N-1}
/// (m+1) c^2 rho^(2m), with c, rho fitted from |f| samples.
struct TruncatedHankel {
  Matrix H;
  double tail_bound = 0.0;
};

TruncatedHankel truncated_hankel(const Wfa& w, Index N,
                                 const Tolerances& tol = {});

/// In SVA form Q P = D^2, so the Hankel singular numbers are exactly the
/// diagonal Gramian; no truncation involved.
Vector hankel_singular_numbers(const SvaWfa& s);

struct SpectralError {
  double value = 0.0;       ///< largest singular value of the truncated difference
  double tail_bound = 0.0;
  Index size = 0;           ///< truncation size used
};

/// Spectral norm of H_N(f_a - f_b), the desk-scale measurement of
/// ||H_a - H_b||.
SpectralError spectral_error(const Wfa& a, const Wfa& b, Index N,
                             const Tolerances& tol = {});

/// Smallest power of two N with tail_bound(N) < abs_tol, capped (with a flag)
/// at `cap`.
Index auto_hankel_size(const Wfa& w, double abs_tol, Index cap = 1024,
                       bool* capped = nullptr, const Tolerances& tol = {});

/// Rank-k truncated SVD of the finite section and its error sigma_k(H_N).
/// The returned matrix is generally NOT Hankel.
std::pair<Matrix, double> svd_truncation_baseline(const TruncatedHankel& t,
                                                  Index k);

/// Keeps the leading k x k block of an SVA; the standard (non-optimal)
/// truncation baseline.
Wfa sva_truncation_baseline(const SvaWfa& s, Index k);

enum class DivisionPolicy {
  long_division,                ///< fail with DivergentDivision on growth
  long_division_with_fallback,  ///< recover coefficients by circle quadrature
};

struct PolynomialMethodResult {
  Matrix G;                    ///< N x N Hankel best-approximation section
  bool division_stable = true; ///< long division stayed below the sigma_k envelope
  double rank_gap = 0.0;       ///< sigma_k(G)/sigma_0(G); ~0 when G has rank k
};

/// Appendix-style cross-check: build the Hankel section of the optimum as
/// G_N = H_N - M_N, where M has symbol sigma_k eta^-(z) / xi^+(z).  The
/// power-series coefficients of M are obtained by long division of the
/// Schmidt series; division stability is monitored against the |m_l| <=
/// sigma_k envelope.
PolynomialMethodResult polynomial_method(
    const SvaWfa& s, Index k, Index N,
    DivisionPolicy policy = DivisionPolicy::long_division_with_fallback,
    const Tolerances& tol = {});

}  // namespace wfared

#endif
