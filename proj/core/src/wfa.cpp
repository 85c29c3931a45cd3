#include "wfared/wfa.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "wfared/errors.hpp"

namespace wfared {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

// Columns b, A b, ..., A^{n-1} b.
Matrix krylov(const Matrix& A, const Vector& b) {
  const Index n = A.rows();
  Matrix K(n, n);
  Vector v = b;
  for (Index j = 0; j < n; ++j) {
    K.col(j) = v;
    if (j + 1 < n) v = A * v;
  }
  return K;
}

// Orthonormal basis of the numerical column space, SVD rank with relative
// threshold.
Matrix range_basis(const Matrix& K, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(K, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return Matrix(K.rows(), 0);
  Index rank = 0;
  while (rank < sv.size() && sv(rank) > rel_tol * sv(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

bool is_zero_function(const Wfa& w, double tol_abs) {
  const Vector f = coefficients(w, 2 * w.states() + 1);
  return f.cwiseAbs().maxCoeff() <= tol_abs;
}

// Within an exactly tied singular-number group the balancing basis is free
// up to an orthogonal rotation; rotate so that alpha and beta become
// sign-paired coordinatewise.
void pair_group_signs(Vector& alpha, Matrix& A, Vector& beta, Index start,
                      Index size) {
  const Vector u = alpha.segment(start, size);
  const Vector v = beta.segment(start, size);
  const Vector a = 0.5 * (u + v);
  const Vector b = 0.5 * (u - v);
  const double scale = std::max(u.norm(), v.norm());
  if (scale == 0.0) return;

  // Orthonormal frame whose first columns align with a and b.
  Matrix cand(size, size + 2);
  cand.col(0) = a;
  cand.col(1) = b;
  cand.rightCols(size) = Matrix::Identity(size, size);
  Matrix O(size, size);
  Index got = 0;
  for (Index j = 0; j < cand.cols() && got < size; ++j) {
    Vector w = cand.col(j);
    for (Index t = 0; t < got; ++t) w -= O.col(t).dot(w) * O.col(t);
    const double nw = w.norm();
    if (nw > 1e-12 * std::max(1.0, scale)) O.col(got++) = w / nw;
  }
  if (got < size) return;

  alpha.segment(start, size) = O.transpose() * u;
  beta.segment(start, size) = O.transpose() * v;
  A.middleRows(start, size) = O.transpose() * A.middleRows(start, size);
  A.middleCols(start, size) = A.middleCols(start, size) * O;
}

}  // namespace

Wfa zero_wfa() {
  Wfa w;
  w.alpha = Vector::Zero(1);
  w.A = Matrix::Zero(1, 1);
  w.beta = Vector::Zero(1);
  return w;
}

void validate(const Wfa& w) {
  if (w.A.rows() != w.A.cols() || w.alpha.size() != w.A.rows() ||
      w.beta.size() != w.A.rows()) {
    std::ostringstream msg;
    msg << "wfa: inconsistent dimensions (alpha " << w.alpha.size() << ", A "
        << w.A.rows() << "x" << w.A.cols() << ", beta " << w.beta.size()
        << ")";
    throw Error(ErrorCode::invalid_input, msg.str());
  }
  if (!all_finite(w.alpha) || !all_finite(w.A) || !all_finite(w.beta)) {
    throw Error(ErrorCode::invalid_input, "wfa: non-finite entry");
  }
}

double evaluate(const Wfa& w, Index k) {
  Eigen::RowVectorXd v = w.alpha.transpose();
  for (Index i = 0; i < k; ++i) v = v * w.A;
  return v.dot(w.beta);
}

Vector coefficients(const Wfa& w, Index count) {
  Vector f(count);
  Eigen::RowVectorXd v = w.alpha.transpose();
  for (Index k = 0; k < count; ++k) {
    f(k) = v.dot(w.beta);
    if (k + 1 < count) v = v * w.A;
  }
  return f;
}

Wfa direct_sum(const Wfa& a, const Wfa& b) {
  const Index na = a.states();
  const Index nb = b.states();
  Wfa out;
  out.alpha = Vector::Zero(na + nb);
  out.alpha.head(na) = a.alpha;
  out.alpha.tail(nb) = b.alpha;
  out.beta = Vector::Zero(na + nb);
  out.beta.head(na) = a.beta;
  out.beta.tail(nb) = b.beta;
  out.A = Matrix::Zero(na + nb, na + nb);
  out.A.topLeftCorner(na, na) = a.A;
  out.A.bottomRightCorner(nb, nb) = b.A;
  return out;
}

Wfa negated(const Wfa& w) {
  Wfa out = w;
  out.alpha = -out.alpha;
  return out;
}

bool equivalent(const Wfa& a, const Wfa& b, Index horizon,
                const Tolerances& tol) {
  if (horizon < 0) horizon = 2 * (a.states() + b.states());
  const Vector fa = coefficients(a, horizon + 1);
  const Vector fb = coefficients(b, horizon + 1);
  for (Index k = 0; k <= horizon; ++k) {
    const double scale =
        std::max({1.0, std::abs(fa(k)), std::abs(fb(k))});
    if (std::abs(fa(k) - fb(k)) > tol.equivalence * scale) return false;
  }
  return true;
}

Wfa minimize(const Wfa& w, const Tolerances& tol) {
  validate(w);

  // Reachable compression: restrict to span{beta, A beta, ...}.
  const Matrix Ur = range_basis(krylov(w.A, w.beta), tol.rank);
  if (Ur.cols() == 0) return zero_wfa();
  Wfa r;
  r.A = Ur.transpose() * w.A * Ur;
  r.alpha = Ur.transpose() * w.alpha;
  r.beta = Ur.transpose() * w.beta;

  // Observable compression: restrict to span{alpha, A^T alpha, ...}.
  const Matrix Uo = range_basis(krylov(r.A.transpose(), r.alpha), tol.rank);
  if (Uo.cols() == 0) return zero_wfa();
  Wfa m;
  m.A = Uo.transpose() * r.A * Uo;
  m.alpha = Uo.transpose() * r.alpha;
  m.beta = Uo.transpose() * r.beta;
  return m;
}

Gramians gramians(const Wfa& w, const Tolerances& tol) {
  validate(w);
  const double rho = spectral_radius(w.A);
  if (rho >= 1.0 - tol.rho) {
    std::ostringstream msg;
    msg << "gramians: spectral radius " << rho << " is not below 1";
    throw Error(ErrorCode::spectral_radius_too_large, msg.str());
  }
  Gramians g;
  g.P = solve_discrete_lyapunov(w.A, w.beta * w.beta.transpose(), tol);
  g.Q = solve_discrete_lyapunov(w.A.transpose(), w.alpha * w.alpha.transpose(),
                                tol);
  return g;
}

SvaWfa to_sva(const Wfa& w, const Tolerances& tol) {
  validate(w);
  const Index n = w.states();

  if (is_zero_function(w, 0.0)) {
    SvaWfa s;
    s.wfa = zero_wfa();
    s.singular_numbers = Vector(0);
    s.sign_vector = Eigen::VectorXi(0);
    return s;
  }

  const double rho = spectral_radius(w.A);
  if (rho >= 1.0 - tol.rho) {
    std::ostringstream msg;
    msg << "to_sva: spectral radius " << rho << " is not below 1";
    throw Error(ErrorCode::spectral_radius_too_large, msg.str());
  }

  const Gramians g = gramians(w, tol);
  const PivotedCholesky lp = pivoted_cholesky(g.P, tol.rank);
  if (lp.rank < n)
    throw Error(ErrorCode::not_minimal, "to_sva: automaton is not reachable");
  const PivotedCholesky lq = pivoted_cholesky(g.Q, tol.rank);
  if (lq.rank < n)
    throw Error(ErrorCode::not_minimal, "to_sva: automaton is not observable");

  // Balancing: SVD of Lq^T Lp gives the change of basis T = Lp V D^{-1/2},
  // after which both Gramians equal D.
  Eigen::JacobiSVD<Matrix> svd(lq.L.transpose() * lp.L,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector D = svd.singularValues();
  const Vector dinv_sqrt = D.cwiseSqrt().cwiseInverse();
  const Matrix T = lp.L * svd.matrixV() * dinv_sqrt.asDiagonal();
  const Matrix Tinv =
      dinv_sqrt.asDiagonal() * svd.matrixU().transpose() * lq.L.transpose();

  SvaWfa s;
  s.wfa.A = Tinv * w.A * T;
  s.wfa.alpha = T.transpose() * w.alpha;
  s.wfa.beta = Tinv * w.beta;
  s.singular_numbers = D;

  // Tied groups leave a rotation freedom; use it to restore the
  // coordinatewise sign pairing of alpha and beta.
  Index i = 0;
  while (i < n) {
    Index j = i + 1;
    while (j < n && D(i) - D(j) <= tol.multiplicity * D(0)) ++j;
    if (j - i > 1) pair_group_signs(s.wfa.alpha, s.wfa.A, s.wfa.beta, i, j - i);
    i = j;
  }

  s.sign_vector = Eigen::VectorXi(n);
  const double eps = 1e-12 * std::max(s.wfa.alpha.norm(), s.wfa.beta.norm());
  for (Index t = 0; t < n; ++t) {
    const double prod = s.wfa.alpha(t) * s.wfa.beta(t);
    s.sign_vector(t) =
        (std::abs(s.wfa.alpha(t)) > eps && std::abs(s.wfa.beta(t)) > eps)
            ? (prod >= 0.0 ? 1 : -1)
            : 1;
  }
  return s;
}

double sva_residual(const SvaWfa& s) {
  if (s.singular_numbers.size() == 0) return 0.0;
  const Matrix D = s.singular_numbers.asDiagonal();
  const auto& w = s.wfa;
  const double denom_p =
      D.norm() * (1.0 + w.A.squaredNorm()) + w.beta.squaredNorm() + 1e-300;
  const double denom_q =
      D.norm() * (1.0 + w.A.squaredNorm()) + w.alpha.squaredNorm() + 1e-300;
  const double rp =
      (D - w.A * D * w.A.transpose() - w.beta * w.beta.transpose()).norm() /
      denom_p;
  const double rq = (D - w.A.transpose() * D * w.A -
                     w.alpha * w.alpha.transpose())
                        .norm() /
                    denom_q;
  return std::max(rp, rq);
}

void validate(const SvaWfa& s, double tol) {
  validate(s.wfa);
  const Index n = s.wfa.states();
  const Index m = s.singular_numbers.size();
  if (m != n && !(m == 0 && n == 1)) {
    throw Error(ErrorCode::invalid_input,
                "sva: singular number count does not match states");
  }
  for (Index i = 0; i + 1 < m; ++i) {
    if (s.singular_numbers(i) < s.singular_numbers(i + 1) - 1e-300)
      throw Error(ErrorCode::invalid_input,
                  "sva: singular numbers not decreasing");
  }
  if (m > 0 && s.singular_numbers.minCoeff() <= 0.0)
    throw Error(ErrorCode::invalid_input,
                "sva: singular numbers must be positive");
  if (sva_residual(s) > tol)
    throw Error(ErrorCode::invalid_input,
                "sva: Gramians are not diag(singular_numbers)");
  const double scale = std::max(s.wfa.alpha.norm(), s.wfa.beta.norm());
  for (Index i = 0; i < m; ++i) {
    if (std::abs(std::abs(s.wfa.alpha(i)) - std::abs(s.wfa.beta(i))) >
        tol * std::max(1.0, scale))
      throw Error(ErrorCode::invalid_input,
                  "sva: weights are not sign-paired");
  }
}

}  // namespace wfared
