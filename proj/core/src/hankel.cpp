#include "wfared/hankel.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "wfared/errors.hpp"
#include "wfared/symbol.hpp"

namespace wfared {

namespace {

void require_stable(const Wfa& w, const Tolerances& tol, const char* who) {
  const double rho = spectral_radius(w.A);
  if (rho >= 1.0 - tol.rho) {
    std::ostringstream msg;
    msg << who << ": spectral radius " << rho << " is not below 1";
    throw Error(ErrorCode::spectral_radius_too_large, msg.str());
  }
}

// Geometric envelope |f(m)| <= c rho^m fitted on the window N..N+10; falls
// back to the spectral radius when the window has too many zeros (functions
// with zero patterns, e.g. odd-index zeros).
struct TailFit {
  double c = 0.0;
  double rho = 0.0;
};

TailFit fit_tail(const Vector& f, Index N, double rho_spectral) {
  const Index lo = N;
  const Index hi = std::min<Index>(N + 10, f.size() - 1);
  std::vector<std::pair<double, double>> pts;  // (m, log |f(m)|)
  const double floor = 1e-300;
  for (Index m = lo; m <= hi; ++m) {
    if (std::abs(f(m)) > floor)
      pts.push_back({static_cast<double>(m), std::log(std::abs(f(m)))});
  }

  TailFit fit;
  bool degenerate = pts.size() < 3;
  if (!degenerate) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = pts.size();
    const double denom = m * sxx - sx * sx;
    const double slope = (m * sxy - sx * sy) / denom;
    const double inter = (sy - slope * sx) / m;
    fit.rho = std::exp(slope);
    fit.c = std::exp(inter);
    if (!(fit.rho > 0.0) || fit.rho >= 1.0 - 1e-12 || !std::isfinite(fit.c))
      degenerate = true;
  }
  if (degenerate) {
    fit.rho = std::min(rho_spectral, 1.0 - 1e-12);
    fit.c = 0.0;
    for (Index m = lo; m <= hi; ++m) {
      if (std::abs(f(m)) > floor)
        fit.c = std::max(fit.c, std::abs(f(m)) * std::pow(fit.rho, -double(m)));
    }
  }
  return fit;
}

// sqrt( sum_{m >= m0} (m+1) c^2 x^m ) with x = rho^2, in closed form.
double tail_from_fit(const TailFit& fit, Index N) {
  const double x = fit.rho * fit.rho;
  if (fit.c == 0.0 || x <= 0.0) return 0.0;
  const double m0 = 2.0 * static_cast<double>(N) - 1.0;
  const double geom =
      std::pow(x, m0) * ((m0 + 1.0) * (1.0 - x) + x) / ((1.0 - x) * (1.0 - x));
  return fit.c * std::sqrt(std::max(geom, 0.0));
}

Vector abs_eigenvalues_desc(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  Vector sv = es.eigenvalues().cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
  return sv;
}

Matrix hankel_from_anti_diagonals(const Vector& m, Index N) {
  Matrix M(N, N);
  for (Index i = 0; i < N; ++i)
    for (Index j = 0; j < N; ++j) M(i, j) = m(i + j);
  return M;
}

}  // namespace

TruncatedHankel truncated_hankel(const Wfa& w, Index N, const Tolerances& tol) {
  validate(w);
  if (N <= 0)
    throw Error(ErrorCode::invalid_input, "truncated_hankel: N must be positive");
  require_stable(w, tol, "truncated_hankel");

  const Index need = std::max<Index>(2 * N - 1, N + 11);
  const Vector f = coefficients(w, need);
  TruncatedHankel out;
  out.H = hankel_from_anti_diagonals(f, N);
  out.tail_bound = tail_from_fit(fit_tail(f, N, spectral_radius(w.A)), N);
  return out;
}

Vector hankel_singular_numbers(const SvaWfa& s) { return s.singular_numbers; }

SpectralError spectral_error(const Wfa& a, const Wfa& b, Index N,
                             const Tolerances& tol) {
  const Wfa diff = direct_sum(a, negated(b));
  const TruncatedHankel th = truncated_hankel(diff, N, tol);
  SpectralError out;
  out.size = N;
  out.tail_bound = th.tail_bound;
  out.value = abs_eigenvalues_desc(th.H)(0);
  return out;
}

Index auto_hankel_size(const Wfa& w, double abs_tol, Index cap, bool* capped,
                       const Tolerances& tol) {
  require_stable(w, tol, "auto_hankel_size");
  if (capped) *capped = false;
  const double rho = spectral_radius(w.A);
  Index N = 8;
  while (N < cap) {
    const Vector f = coefficients(w, N + 11);
    if (tail_from_fit(fit_tail(f, N, rho), N) < abs_tol) return N;
    N *= 2;
  }
  const Vector f = coefficients(w, cap + 11);
  if (tail_from_fit(fit_tail(f, cap, rho), cap) >= abs_tol && capped)
    *capped = true;
  return cap;
}

std::pair<Matrix, double> svd_truncation_baseline(const TruncatedHankel& t,
                                                  Index k) {
  const Index N = t.H.rows();
  if (k > N)
    throw Error(ErrorCode::invalid_input,
                "svd_truncation_baseline: rank exceeds the section size");
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.H);
  const Vector ev = es.eigenvalues();
  std::vector<Index> order(N);
  for (Index i = 0; i < N; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Index x, Index y) {
    return std::abs(ev(x)) > std::abs(ev(y));
  });

  Matrix R = Matrix::Zero(N, N);
  for (Index t2 = 0; t2 < k; ++t2) {
    const Index i = order[t2];
    R += ev(i) * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
  }
  const double err = (k < N) ? std::abs(ev(order[k])) : 0.0;
  return {R, err};
}

Wfa sva_truncation_baseline(const SvaWfa& s, Index k) {
  const Index n = s.wfa.states();
  if (k > n)
    throw Error(ErrorCode::invalid_input,
                "sva_truncation_baseline: rank exceeds the state count");
  if (k == n) return s.wfa;
  Wfa out;
  out.alpha = s.wfa.alpha.head(k);
  out.beta = s.wfa.beta.head(k);
  out.A = s.wfa.A.topLeftCorner(k, k);
  return out;
}

PolynomialMethodResult polynomial_method(const SvaWfa& s, Index k, Index N,
                                         DivisionPolicy policy,
                                         const Tolerances& tol) {
  const Index n = s.wfa.states();
  if (k < 0 || k >= n || s.singular_numbers.size() != n)
    throw Error(ErrorCode::invalid_input,
                "polynomial_method: k must index a singular number");
  require_stable(s.wfa, tol, "polynomial_method");
  const double sigma = s.singular_numbers(k);

  // Schmidt power-series coefficients: c_j of xi^+ (powers of z) and d_j of
  // sigma_k eta^- (powers of 1/z), in the transpose-explicit orientation
  // c_j = e_k^T A^j beta, d_j = alpha^T A^j e_k (equal to the alpha/beta
  // symmetric-SVA form up to the shared Schmidt sign).
  const Index L = 2 * N - 1;
  Vector c(L), d(L);
  {
    Vector u = Vector::Unit(n, k);
    Vector w = s.wfa.beta;
    const double si = 1.0 / std::sqrt(sigma);
    for (Index j = 0; j < L; ++j) {
      c(j) = si * w(k);
      d(j) = sigma * si * s.wfa.alpha.dot(u);
      if (j + 1 < L) {
        u = s.wfa.A * u;
        w = s.wfa.A * w;
      }
    }
  }

  const double c_peak = c.cwiseAbs().maxCoeff();
  if (c_peak <= 0.0)
    throw Error(ErrorCode::divergent_division,
                "polynomial_method: xi^+ vanishes identically");
  Index shift = 0;
  while (std::abs(c(shift)) <= 1e-12 * c_peak) ++shift;

  // Backward long division of sigma_k eta^- / xi^+ after removing the z^shift
  // factor.  The true coefficients are Hankel entries of a matrix of norm
  // sigma_k, so growth past that envelope flags an unstable division.
  Vector m = Vector::Zero(L);
  const double lead = c(shift);
  bool stable = true;
  for (Index j = L - 1; j >= 0; --j) {
    double acc = (j >= shift) ? d(j - shift) : 0.0;
    for (Index i = 1; i < L - j && shift + i < L; ++i)
      acc -= c(shift + i) * m(j + i);
    m(j) = acc / lead;
    if (std::abs(m(j)) > 10.0 * sigma) stable = false;
  }

  if (!stable) {
    if (policy == DivisionPolicy::long_division)
      throw Error(ErrorCode::divergent_division,
                  "polynomial_method: series division diverged (xi^+ has a "
                  "zero inside the sampled disc region)");
    // Fallback: Fourier coefficients of the error ratio on the circle.  The
    // ratio is analytic in an annulus around |z| = 1, so the trapezoid rule
    // converges geometrically.
    const Index P = std::max<Index>(4096, 4 * N);
    Eigen::VectorXcd samples(P);
    for (Index p = 0; p < P; ++p) {
      const double theta = 2.0 * M_PI * (static_cast<double>(p) + 0.5) / P;
      const Complex z = std::polar(1.0, theta);
      samples(p) = error_ratio(s, k, z, 0, tol);
    }
    for (Index l = 0; l < L; ++l) {
      Complex acc(0.0, 0.0);
      for (Index p = 0; p < P; ++p) {
        const double theta = 2.0 * M_PI * (static_cast<double>(p) + 0.5) / P;
        acc += samples(p) * std::polar(1.0, theta * (l + 1));
      }
      m(l) = (acc / static_cast<double>(P)).real();
    }
  }

  const Vector f = coefficients(s.wfa, L);
  PolynomialMethodResult out;
  out.division_stable = stable;
  out.G = hankel_from_anti_diagonals(f - m, N);
  const Vector sv = abs_eigenvalues_desc(out.G);
  out.rank_gap = (sv(0) > 0.0 && k < N) ? sv(k) / sv(0) : 0.0;
  return out;
}

}  // namespace wfared
