#include "wfared/symbol.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "wfared/errors.hpp"

namespace wfared {

namespace {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

std::vector<Complex> eigenvalues_of(const Matrix& A) {
  if (A.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  std::vector<Complex> out(A.rows());
  for (Index i = 0; i < A.rows(); ++i) out[i] = es.eigenvalues()(i);
  return out;
}

void check_not_near_pole(const std::vector<Complex>& poles, Complex z,
                         double eps) {
  for (const Complex& p : poles) {
    if (std::abs(z - p) <= eps) {
      std::ostringstream msg;
      msg << "resolvent evaluation at z = (" << z.real() << ", " << z.imag()
          << ") is within " << eps << " of a pole";
      throw Error(ErrorCode::near_pole, msg.str());
    }
  }
}

// (z 1 - A)^{-1} v by LU solve.
ComplexVector resolvent_solve(const Matrix& A, Complex z, const Vector& v) {
  ComplexMatrix M = -A.cast<Complex>();
  M.diagonal().array() += z;
  return M.partialPivLu().solve(v.cast<Complex>());
}

// (1 - z A)^{-1} v by LU solve.
ComplexVector costar_resolvent_solve(const Matrix& A, Complex z,
                                     const Vector& v) {
  ComplexMatrix M = (-z) * A.cast<Complex>();
  M.diagonal().array() += 1.0;
  return M.partialPivLu().solve(v.cast<Complex>());
}

}  // namespace

std::vector<PoleInfo> pole_report(const Wfa& w) {
  validate(w);
  std::vector<PoleInfo> out;
  for (const Complex& ev : eigenvalues_of(w.A)) {
    PoleInfo p;
    p.value = ev;
    p.modulus = std::abs(ev);
    p.inside_unit_disc = p.modulus < 1.0;
    out.push_back(p);
  }
  return out;
}

Complex symbol_eval(const Wfa& w, Complex z, const Tolerances& tol) {
  validate(w);
  check_not_near_pole(eigenvalues_of(w.A), z, tol.pole);
  const ComplexVector x = resolvent_solve(w.A, z, w.beta);
  return (w.alpha.cast<Complex>().transpose() * x)(0);
}

double fourier_coefficient(const Wfa& w, long m) {
  if (m > -1)
    throw Error(ErrorCode::invalid_input,
                "fourier_coefficient: only negative indices carry Hankel data");
  return evaluate(w, static_cast<Index>(-m - 1));
}

SchmidtFunctions::SchmidtFunctions(const SvaWfa& s, Index k,
                                   const Tolerances& tol)
    : A_(s.wfa.A),
      alpha_(s.wfa.alpha),
      beta_(s.wfa.beta),
      pole_tol_(tol.pole) {
  const Index n = s.wfa.states();
  if (k < 0 || k >= s.singular_numbers.size())
    throw Error(ErrorCode::invalid_input,
                "schmidt_functions: k must index a singular number");
  unit_ = Vector::Unit(n, k);
  sigma_scale_ = 1.0 / std::sqrt(s.singular_numbers(k));
  poles_ = eigenvalues_of(A_);
}

Complex SchmidtFunctions::xi_plus(Complex z) const {
  // Poles of (1 - z A)^{-1} sit at reciprocal eigenvalues.
  for (const Complex& p : poles_) {
    if (std::abs(p) > 0.0 && std::abs(z - 1.0 / p) <= pole_tol_)
      throw Error(ErrorCode::near_pole, "xi_plus: z is near a reciprocal pole");
  }
  const ComplexVector x = costar_resolvent_solve(A_, z, unit_);
  return sigma_scale_ * (alpha_.cast<Complex>().transpose() * x)(0);
}

Complex SchmidtFunctions::eta_minus(Complex z) const {
  check_not_near_pole(poles_, z, pole_tol_);
  const ComplexVector x = resolvent_solve(A_, z, unit_);
  return sigma_scale_ * (beta_.cast<Complex>().transpose() * x)(0);
}

double SchmidtFunctions::xi_coefficient(Index j) const {
  Vector u = unit_;
  for (Index t = 0; t < j; ++t) u = A_ * u;
  return sigma_scale_ * alpha_.dot(u);
}

Complex error_ratio(const SvaWfa& s, Index k, Complex z, Index column,
                    const Tolerances& tol) {
  const Index n = s.wfa.states();
  if (k < 0 || k + column >= n)
    throw Error(ErrorCode::invalid_input,
                "error_ratio: column outside the state range");
  // eta^-/xi^+ written through the transpose resolvent: the numerator pairs
  // with alpha, the denominator with beta via e_k^T (1 - z A)^{-1} beta.
  // Coincides with the alpha/beta form on a symmetric SVA and stays exactly
  // unimodular for sign-conjugate transition matrices.
  const Vector u = Vector::Unit(n, k + column);
  const ComplexVector num_vec = resolvent_solve(s.wfa.A, z, u);
  const ComplexVector den_vec = costar_resolvent_solve(s.wfa.A, z, s.wfa.beta);
  const Complex num = (s.wfa.alpha.cast<Complex>().transpose() * num_vec)(0);
  const Complex den = den_vec(k + column);
  const double den_scale = den_vec.norm() + 1e-300;
  if (std::abs(den) <= 1e-12 * den_scale)
    throw Error(ErrorCode::near_zero_denominator,
                "error_ratio: denominator vanishes at this sample");
  return s.singular_numbers(k) * num / den;
}

UnimodularityResult unimodularity_check(const SvaWfa& s, Index k,
                                        Index samples,
                                        const Tolerances& tol) {
  UnimodularityResult out;
  out.samples = samples;
  const double sigma = s.singular_numbers(k);
  for (Index j = 0; j < samples; ++j) {
    const double theta =
        2.0 * M_PI * (static_cast<double>(j) + 0.5) / static_cast<double>(samples);
    try {
      const Complex e = error_ratio(s, k, std::polar(1.0, theta), 0, tol);
      out.max_deviation =
          std::max(out.max_deviation, std::abs(std::abs(e) / sigma - 1.0));
    } catch (const Error& err) {
      if (err.code() == ErrorCode::near_zero_denominator ||
          err.code() == ErrorCode::near_pole) {
        ++out.skipped;
        continue;
      }
      throw;
    }
  }
  return out;
}

}  // namespace wfared
