#include "wfared/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "wfared/errors.hpp"

namespace wfared {

double Rng::uniform() {
  // 53 random bits; avoids the unspecified behaviour of the standard
  // distributions.
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Index Rng::uniform_index(Index lo, Index hi) {
  return lo + static_cast<Index>(uniform() * static_cast<double>(hi - lo + 1));
}

namespace {

// Symmetric square root of a positive definite matrix with a random sign
// pattern on the eigenvalue branch, B^2 = C.
Matrix signed_sqrt(const Matrix& C, Rng& rng, bool mixed_signs) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(C);
  Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  if (mixed_signs) {
    for (Index i = 0; i < roots.size(); ++i)
      if (rng.coin()) roots(i) = -roots(i);
  }
  return es.eigenvectors() * roots.asDiagonal() *
         es.eigenvectors().transpose();
}

// Solves D - A D A = beta beta^T for a symmetric A, given the diagonal
// Gramian D and beta: A = D^{-1/2} (D^{1/2} (D - beta beta^T) D^{1/2})^{1/2}
// D^{-1/2}.  By construction P = Q = D exactly and alpha = beta, so the
// result is a singular value automaton with the prescribed spectrum.
SvaWfa sva_from_spectrum(const Vector& D, const Vector& beta, Rng& rng,
                         bool mixed_signs) {
  const Index n = D.size();
  const Vector dhalf = D.cwiseSqrt();
  const Matrix C = dhalf.asDiagonal() *
                   (Matrix(D.asDiagonal()) - beta * beta.transpose()) *
                   dhalf.asDiagonal();
  const Matrix B = signed_sqrt(C, rng, mixed_signs);
  const Vector dinv = dhalf.cwiseInverse();

  SvaWfa s;
  s.wfa.A = dinv.asDiagonal() * B * dinv.asDiagonal();
  s.wfa.A = 0.5 * (s.wfa.A + s.wfa.A.transpose());
  s.wfa.alpha = beta;
  s.wfa.beta = beta;
  s.singular_numbers = D;
  s.sign_vector = Eigen::VectorXi::Ones(n);
  return s;
}

}  // namespace

SvaWfa random_sva_with_spectrum(Rng& rng, const Vector& D, double rho_min,
                                double rho_max) {
  const Index n = D.size();
  if (n == 0 || D.minCoeff() <= 0.0)
    throw Error(ErrorCode::invalid_input,
                "random_sva_with_spectrum: spectrum must be positive");

  for (int attempt = 0; attempt < 400; ++attempt) {
    Vector dir(n);
    for (Index i = 0; i < n; ++i) dir(i) = rng.normal();
    dir.normalize();
    // beta beta^T must stay inside D; t_max keeps D - beta beta^T psd.
    const double t_max = 1.0 / std::sqrt((dir.array().square() /
                                          D.array()).sum());
    const double t = t_max * rng.uniform(0.35, 0.97);
    const Vector beta = t * dir;
    const bool mixed = attempt < 300;  // fall back to the psd branch late
    SvaWfa s = sva_from_spectrum(D, beta, rng, mixed);
    const double rho = spectral_radius(s.wfa.A);
    if (rho >= rho_min && rho <= rho_max) return s;
  }
  throw Error(ErrorCode::non_convergent,
              "random_sva_with_spectrum: no sample met the spectral-radius "
              "window");
}

SvaWfa random_sva(Rng& rng, const SvaGenOptions& opt) {
  const Index n = opt.n;
  // Log-spaced singular numbers with a guaranteed relative gap.
  Vector t(n);
  const double min_dt = 0.4 / std::max<Index>(n - 1, 1);
  for (int attempt = 0;; ++attempt) {
    t(0) = 0.0;
    if (n > 1) {
      t(n - 1) = 1.0;
      for (Index i = 1; i + 1 < n; ++i) t(i) = rng.uniform();
      std::sort(t.data(), t.data() + n);
    }
    bool ok = true;
    for (Index i = 0; i + 1 < n; ++i)
      if (t(i + 1) - t(i) < min_dt) ok = false;
    if (ok || attempt > 200) break;
  }
  Vector D(n);
  const double logr = std::log(opt.sigma_min_ratio);
  for (Index i = 0; i < n; ++i) D(i) = opt.scale * std::exp(logr * t(i));

  for (Index i = 0; i + 1 < n; ++i) {
    if ((D(i) - D(i + 1)) / D(i) < opt.gap_min_rel)
      throw Error(ErrorCode::non_convergent,
                  "random_sva: generated spectrum violates the gap bound");
  }
  return random_sva_with_spectrum(rng, D, opt.rho_min, opt.rho_max);
}

Wfa random_wfa(Rng& rng, Index n, double rho) {
  Wfa w;
  w.A = Matrix(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) w.A(i, j) = rng.normal();
  const double r = spectral_radius(w.A);
  if (r > 0.0) w.A *= rho / r;
  w.alpha = Vector(n);
  w.beta = Vector(n);
  for (Index i = 0; i < n; ++i) {
    w.alpha(i) = rng.normal();
    w.beta(i) = rng.normal();
  }
  return w;
}

Wfa random_similarity(Rng& rng, const Wfa& w, double spread) {
  const Index n = w.states();
  Matrix T(n, n);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) T(i, j) = rng.normal() * spread;
    T += 2.0 * spread * Matrix::Identity(n, n);
    Eigen::FullPivLU<Matrix> lu(T);
    if (lu.isInvertible()) {
      Wfa out;
      out.A = lu.solve(w.A * T);
      out.alpha = T.transpose() * w.alpha;
      out.beta = lu.solve(w.beta);
      return out;
    }
  }
  throw Error(ErrorCode::non_convergent,
              "random_similarity: could not draw an invertible transform");
}

Wfa random_mixed_wfa(Rng& rng, Index n_stable, Index n_unstable) {
  const Wfa stable = random_wfa(rng, n_stable, rng.uniform(0.4, 0.85));
  Wfa unstable;
  unstable.A = Matrix::Zero(n_unstable, n_unstable);
  unstable.alpha = Vector(n_unstable);
  unstable.beta = Vector(n_unstable);
  for (Index i = 0; i < n_unstable; ++i) {
    const double sign = rng.coin() ? 1.0 : -1.0;
    unstable.A(i, i) = sign * rng.uniform(1.15, 2.0);
    unstable.alpha(i) = rng.normal();
    unstable.beta(i) = rng.normal();
  }
  return random_similarity(rng, direct_sum(stable, unstable), 0.5);
}

}  // namespace wfared
