#include "wfared/aak.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <chrono>
#include <functional>
#include <sstream>

#include "spectral_split.hpp"
#include "wfared/errors.hpp"
#include "wfared/hankel.hpp"
#include "wfared/symbol.hpp"

namespace wfared {

namespace {

// Builds the dense matrix of a linear map on (rows x cols) matrices by
// probing the canonical basis; the unknown is vec(C), column-major.
Matrix linearize(Index rows, Index cols, Index out_rows, Index out_cols,
                 const std::function<Matrix(const Matrix&)>& op) {
  Matrix L(out_rows * out_cols, rows * cols);
  Matrix E = Matrix::Zero(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      E(i, j) = 1.0;
      const Matrix Y = op(E);
      L.col(i + rows * j) = Eigen::Map<const Vector>(Y.data(), Y.size());
      E(i, j) = 0.0;
    }
  }
  return L;
}

void check_one_not_eigenvalue(const Matrix& A_hat, double circle_tol) {
  if (A_hat.rows() == 0) return;
  Eigen::EigenSolver<Matrix> es(A_hat, false);
  for (Index i = 0; i < A_hat.rows(); ++i) {
    if (std::abs(es.eigenvalues()(i) - std::complex<double>(1.0, 0.0)) <=
        circle_tol) {
      throw Error(ErrorCode::eigenvalue_on_circle,
                  "solve_auxiliary: 1 is an eigenvalue of the auxiliary "
                  "transition matrix");
    }
  }
}

}  // namespace

const char* to_string(Branch b) {
  return b == Branch::alpha2_nonzero ? "alpha2_nonzero" : "alpha2_zero";
}

MultiplicityGroup group_multiplicity(const Vector& D, Index k, double tol_rel) {
  const Index n = D.size();
  if (k < 0 || k >= n)
    throw Error(ErrorCode::invalid_input,
                "group_multiplicity: index outside the spectrum");
  const double window = tol_rel * D(0);
  Index first = k;
  while (first > 0 && std::abs(D(first - 1) - D(k)) <= window) --first;
  Index last = k;
  while (last + 1 < n && std::abs(D(last + 1) - D(k)) <= window) ++last;

  if (k != first || (first == 0 && last == n - 1)) {
    std::ostringstream msg;
    msg << "group_multiplicity: rank " << k
        << " splits a tied singular group [" << first << ", " << last
        << "]; the rank-k optimum is ill-posed";
    throw Error(ErrorCode::group_not_at_boundary, msg.str());
  }

  MultiplicityGroup g;
  g.r = last - first + 1;
  g.first = first;
  g.last = last;
  g.permutation.reserve(n);
  for (Index i = 0; i < n; ++i)
    if (i < first || i > last) g.permutation.push_back(i);
  for (Index i = first; i <= last; ++i) g.permutation.push_back(i);
  return g;
}

Matrix PartitionBlocks::assemble_A() const {
  Matrix A(n, n);
  const Index m = n - r;
  A.topLeftCorner(m, m) = A11;
  A.topRightCorner(m, r) = A12;
  A.bottomLeftCorner(r, m) = A21;
  A.bottomRightCorner(r, r) = A22;
  return A;
}

Vector PartitionBlocks::assemble_alpha() const {
  Vector a(n);
  a.head(n - r) = alpha1;
  a.tail(r) = alpha2;
  return a;
}

Vector PartitionBlocks::assemble_beta() const {
  Vector b(n);
  b.head(n - r) = beta1;
  b.tail(r) = beta2;
  return b;
}

PartitionBlocks partition(const SvaWfa& s, Index k, const Tolerances& tol) {
  const Index n = s.wfa.states();
  if (s.singular_numbers.size() != n)
    throw Error(ErrorCode::invalid_input,
                "partition: input is not a populated SVA");
  const MultiplicityGroup g =
      group_multiplicity(s.singular_numbers, k, tol.multiplicity);

  // The permutation acts as an orthogonal similarity, so the result is
  // still an SVA; it merely moves the sigma_k group to the last block.
  const auto& p = g.permutation;
  Matrix A(n, n);
  Vector alpha(n), beta(n), D(n);
  for (Index i = 0; i < n; ++i) {
    alpha(i) = s.wfa.alpha(p[i]);
    beta(i) = s.wfa.beta(p[i]);
    D(i) = s.singular_numbers(p[i]);
    for (Index j = 0; j < n; ++j) A(i, j) = s.wfa.A(p[i], p[j]);
  }

  PartitionBlocks pb;
  pb.n = n;
  pb.k = k;
  pb.r = g.r;
  pb.sigma_k = s.singular_numbers(k);
  pb.permutation = p;
  const Index m = n - g.r;
  pb.retained = D.head(m);
  pb.A11 = A.topLeftCorner(m, m);
  pb.A12 = A.topRightCorner(m, g.r);
  pb.A21 = A.bottomLeftCorner(g.r, m);
  pb.A22 = A.bottomRightCorner(g.r, g.r);
  pb.alpha1 = alpha.head(m);
  pb.alpha2 = alpha.tail(g.r);
  pb.beta1 = beta.head(m);
  pb.beta2 = beta.tail(g.r);
  pb.R = Vector(m);
  for (Index i = 0; i < m; ++i)
    pb.R(i) = pb.sigma_k * pb.sigma_k - pb.retained(i) * pb.retained(i);
  if (m > 0 && pb.R.cwiseAbs().minCoeff() <= 0.0)
    throw Error(ErrorCode::group_not_at_boundary,
                "partition: retained singular number collides with sigma_k");
  return pb;
}

AuxiliaryWfa solve_auxiliary(const PartitionBlocks& pb, const Tolerances& tol) {
  const Index m = pb.n - pb.r;
  if (m == 0)
    throw Error(ErrorCode::group_not_at_boundary,
                "solve_auxiliary: empty retained block (rank-0 target)");

  AuxiliaryWfa aux;
  const double alpha_norm = std::sqrt(pb.alpha1.squaredNorm() +
                                      pb.alpha2.squaredNorm());
  const double a2 = pb.alpha2.norm();
  const Matrix Rd = pb.R.asDiagonal();

  if (a2 > tol.branch * alpha_norm) {
    aux.branch = Branch::alpha2_nonzero;
    if (a2 <= 1e3 * tol.branch * alpha_norm) {
      aux.warnings.push_back(
          "near-branch-threshold: ||alpha_2|| is close to the zero-branch "
          "cutoff; the block pseudo-inverse is ill-conditioned");
    }
    // beta_hat = -A_hat A21^T (beta_2^T)^+,   A_hat (A11^T - A21^T
    // (beta_2^T)^+ beta_1^T) = 1.  Written with explicit transposes these
    // reduce to the symmetric-SVA formulas and stay exact for
    // sign-conjugate transition matrices.
    const Vector bp = pb.beta2 / pb.beta2.squaredNorm();
    const Vector ap = pb.alpha2 / pb.alpha2.squaredNorm();
    const Matrix core =
        pb.A11.transpose() - pb.A21.transpose() * bp * pb.beta1.transpose();
    Eigen::FullPivLU<Matrix> lu(core);
    lu.setThreshold(1e-13);
    if (!lu.isInvertible())
      throw Error(ErrorCode::singular_core,
                  "solve_auxiliary: the core matrix A11 - A12 (beta_2^T)^+ "
                  "beta_1^T is numerically singular");
    aux.A_hat = lu.inverse();
    aux.beta_hat = -aux.A_hat * (pb.A21.transpose() * bp);
    aux.alpha_hat = aux.A_hat.transpose() * (Rd * (pb.A12 * ap));
  } else {
    aux.branch = Branch::alpha2_zero;
    if (pb.beta1.norm() == 0.0 || pb.alpha1.norm() == 0.0)
      throw Error(ErrorCode::singular_core,
                  "solve_auxiliary: retained weight block vanishes");

    // Rows of A_hat must lie in ker(A21); basis via SVD.
    Eigen::JacobiSVD<Matrix> svd(pb.A21, Eigen::ComputeFullV);
    Index rank = 0;
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    while (rank < sv.size() && sv(rank) > tol.rank * std::max(smax, 1e-300))
      ++rank;
    const Index free = m - rank;

    if (free == 0) {
      // The multiplicity covers at least half the spectrum: the constraint
      // A_hat A12 = 0 admits only the zero solution.
      aux.A_hat = Matrix::Zero(m, m);
      aux.warnings.push_back(
          "DegenerateCase: multiplicity forces a zero auxiliary transition "
          "matrix; consider rank k-1 or k+1");
    } else {
      const Matrix N = svd.matrixV().rightCols(free);
      const Matrix proj_beta =
          Matrix::Identity(m, m) -
          pb.beta1 * pb.beta1.transpose() / pb.beta1.squaredNorm();
      const Matrix proj_alpha =
          Matrix::Identity(m, m) -
          pb.alpha1 * pb.alpha1.transpose() / pb.alpha1.squaredNorm();

      // Alignment constraints, linear in C with A_hat = C N^T:
      //   (1 - A_hat A11^T) proj_beta = 0
      //   (R - A_hat^T R A11) proj_alpha = 0
      //   A12^T R A_hat = 0
      const Matrix G1 = N.transpose() * pb.A11.transpose() * proj_beta;
      const Matrix G2 = Rd * pb.A11 * proj_alpha;
      const Matrix G3 = pb.A12.transpose() * Rd;
      const Matrix L1 = linearize(m, free, m, m, [&](const Matrix& C) {
        return Matrix(C * G1);
      });
      const Matrix L2 = linearize(m, free, m, m, [&](const Matrix& C) {
        return Matrix(N * C.transpose() * G2);
      });
      const Matrix L3 = linearize(m, free, pb.r, free, [&](const Matrix& C) {
        return Matrix(G3 * C);
      });

      const Index rows1 = m * m, rows2 = m * m, rows3 = pb.r * free;
      Matrix L(rows1 + rows2 + rows3, m * free);
      L.topRows(rows1) = L1;
      L.middleRows(rows1, rows2) = L2;
      L.bottomRows(rows3) = L3;
      Vector rhs = Vector::Zero(L.rows());
      rhs.head(rows1) = Eigen::Map<const Vector>(proj_beta.data(), rows1);
      const Matrix rproj = Rd * proj_alpha;
      rhs.segment(rows1, rows2) = Eigen::Map<const Vector>(rproj.data(), rows2);

      // Minimum-norm least squares; the certificates decide acceptance.
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(L);
      const Vector c = cod.solve(rhs);
      aux.A_hat = Eigen::Map<const Matrix>(c.data(), m, free) * N.transpose();

      const double resid = (L * c - rhs).norm();
      if (resid > 1e-8 * (1.0 + rhs.norm())) {
        std::ostringstream msg;
        msg << "alpha2-zero system is inconsistent (residual " << resid
            << "); no auxiliary automaton of this size satisfies the "
               "fixed-point equations";
        aux.warnings.push_back(msg.str());
      }
    }
    aux.beta_hat = (Matrix::Identity(m, m) - aux.A_hat * pb.A11.transpose()) *
                   pb.beta1 / pb.beta1.squaredNorm();
    aux.alpha_hat = -(Rd - aux.A_hat.transpose() * Rd * pb.A11) * pb.alpha1 /
                    pb.alpha1.squaredNorm();
  }

  check_one_not_eigenvalue(aux.A_hat, tol.circle);
  return aux;
}

ErrorWfa build_error_wfa(const PartitionBlocks& pb, const AuxiliaryWfa& aux) {
  const Index n = pb.n;
  const Index m = n - pb.r;
  if (aux.A_hat.rows() != m)
    throw Error(ErrorCode::dimension_mismatch,
                "build_error_wfa: auxiliary size must be n - r");
  ErrorWfa e;
  e.sigma_k = pb.sigma_k;
  e.r = pb.r;
  e.wfa.A = Matrix::Zero(n + m, n + m);
  e.wfa.A.topLeftCorner(n, n) = pb.assemble_A();
  e.wfa.A.bottomRightCorner(m, m) = aux.A_hat;
  e.wfa.alpha = Vector(n + m);
  e.wfa.alpha.head(n) = pb.assemble_alpha();
  e.wfa.alpha.tail(m) = -aux.alpha_hat;
  e.wfa.beta = Vector(n + m);
  e.wfa.beta.head(n) = pb.assemble_beta();
  e.wfa.beta.tail(m) = aux.beta_hat;
  return e;
}

AllpassResiduals verify_allpass(const ErrorWfa& e, const PartitionBlocks& pb) {
  const Index m = pb.n - pb.r;
  const Index dim = pb.n + m;
  if (e.wfa.states() != dim)
    throw Error(ErrorCode::dimension_mismatch,
                "verify_allpass: error automaton has unexpected size");

  // Closed-form P_e and Q_e; block order (n-r), r, (n-r).
  Matrix Pe = Matrix::Zero(dim, dim);
  Matrix Qe = Matrix::Zero(dim, dim);
  const double sk = pb.sigma_k;
  for (Index i = 0; i < m; ++i) {
    Pe(i, i) = pb.retained(i);
    Qe(i, i) = pb.retained(i);
    Pe(i, pb.n + i) = 1.0;
    Pe(pb.n + i, i) = 1.0;
    Qe(i, pb.n + i) = pb.R(i);
    Qe(pb.n + i, i) = pb.R(i);
    Pe(pb.n + i, pb.n + i) = -pb.retained(i) / pb.R(i);
    Qe(pb.n + i, pb.n + i) = -pb.retained(i) * pb.R(i);
  }
  for (Index i = 0; i < pb.r; ++i) {
    Pe(m + i, m + i) = sk;
    Qe(m + i, m + i) = sk;
  }

  const Matrix& Ae = e.wfa.A;
  const Vector& ae = e.wfa.alpha;
  const Vector& be = e.wfa.beta;
  AllpassResiduals res;
  const double a_scale = Ae.squaredNorm();
  res.a = (Pe - Ae * Pe * Ae.transpose() - be * be.transpose()).norm() /
          (Pe.norm() * (1.0 + a_scale) + be.squaredNorm() + 1e-300);
  res.b = (Qe - Ae.transpose() * Qe * Ae - ae * ae.transpose()).norm() /
          (Qe.norm() * (1.0 + a_scale) + ae.squaredNorm() + 1e-300);
  res.c = (Pe * Qe - sk * sk * Matrix::Identity(dim, dim)).norm() /
          (sk * sk * std::sqrt(static_cast<double>(dim)) + 1e-300);
  return res;
}

std::pair<Wfa, Wfa> block_diagonalize(const AuxiliaryWfa& aux,
                                      const Tolerances& tol) {
  Wfa hat;
  hat.alpha = aux.alpha_hat;
  hat.A = aux.A_hat;
  hat.beta = aux.beta_hat;
  return detail::spectral_split(hat, tol);
}

ReductionReport aak_reduce(const SvaWfa& s, Index k, const ReduceOptions& opt) {
  const Index n = s.wfa.states();
  if (s.singular_numbers.size() != n || n == 0)
    throw Error(ErrorCode::invalid_input,
                "aak_reduce: input is not a populated SVA");
  if (k <= 0 || k >= n)
    throw Error(ErrorCode::invalid_input,
                "aak_reduce: k must satisfy 0 < k < n");

  ReductionReport rep;
  rep.k = k;
  rep.sva_residual = sva_residual(s);
  if (rep.sva_residual > 1e-6) {
    rep.warnings.push_back(
        "input Gramian residual exceeds 1e-6; the SVA form is suspect");
  }

  const PartitionBlocks pb = partition(s, k, opt.tol);
  rep.r = pb.r;
  rep.sigma_k = pb.sigma_k;

  const AuxiliaryWfa aux = solve_auxiliary(pb, opt.tol);
  rep.branch = aux.branch;
  rep.warnings.insert(rep.warnings.end(), aux.warnings.begin(),
                      aux.warnings.end());

  const ErrorWfa ew = build_error_wfa(pb, aux);
  rep.allpass_residuals = verify_allpass(ew, pb);

  auto [stable, unstable] = block_diagonalize(aux, opt.tol);
  if (stable.states() != k) {
    std::ostringstream msg;
    msg << "aak_reduce: stable block has " << stable.states()
        << " states, expected " << k
        << " (inertia of -Sigma R disagrees with the rank target)";
    throw Error(ErrorCode::inertia_mismatch, msg.str());
  }
  rep.reduced = stable;

  const bool do_verify =
      opt.verify && (n <= opt.verify_max_states || opt.force_verify);
  if (!do_verify) return rep;
  rep.verified = true;

  // Oracle certification against the truncated Hankel section.
  const double sigma0 = s.singular_numbers(0);
  Index N = opt.hankel_size;
  if (N <= 0) {
    const double target =
        std::min(1e-8 * sigma0, 0.25 * opt.cert.error_rel * rep.sigma_k);
    bool capped = false;
    N = auto_hankel_size(s.wfa, target, 1024, &capped, opt.tol);
    if (capped)
      rep.warnings.push_back(
          "oracle size capped at 1024 before reaching the tail target");
  }
  rep.oracle_size = N;

  const SpectralError err = spectral_error(s.wfa, rep.reduced, N, opt.tol);
  rep.achieved_error = err.value;
  rep.tail_bound = err.tail_bound;

  const Vector f = coefficients(s.wfa, opt.cert.l2_horizon + 1);
  const Vector fhat = coefficients(rep.reduced, opt.cert.l2_horizon + 1);
  rep.l2_bound_check = (f - fhat).squaredNorm();

  const UnimodularityResult uni =
      unimodularity_check(s, k, opt.unimodular_samples, opt.tol);
  rep.unimodularity_deviation = uni.max_deviation;
  rep.unimodularity_skipped = uni.skipped;

  if (opt.baselines) {
    const Wfa trunc = sva_truncation_baseline(s, k);
    rep.baselines["sva_truncation"] =
        spectral_error(s.wfa, trunc, N, opt.tol).value;
    rep.baselines["svd_truncation"] =
        svd_truncation_baseline(truncated_hankel(s.wfa, N, opt.tol), k).second;
  }

  auto fail = [&rep](const std::string& what) { rep.failures.push_back(what); };
  const auto& c = opt.cert;
  if (std::abs(rep.achieved_error - rep.sigma_k) > c.error_rel * rep.sigma_k)
    fail("achieved error differs from sigma_k beyond " +
         std::to_string(c.error_rel) + " relative");
  if (rep.achieved_error < rep.sigma_k - c.floor_slack)
    fail("achieved error below the Eckart-Young floor");
  if (rep.allpass_residuals.max() > c.allpass)
    fail("all-pass fixed-point residuals exceed tolerance");
  if (rep.unimodularity_deviation > c.unimodularity)
    fail("error symbol is not unimodular on the circle grid");
  if (rep.l2_bound_check > rep.sigma_k * rep.sigma_k + c.l2_slack)
    fail("l2 error bound violated");
  if (opt.baselines &&
      rep.achieved_error >
          rep.baselines.at("sva_truncation") + c.baseline_slack)
    fail("SVA truncation baseline beats the reduction");
  rep.certified = rep.failures.empty();
  return rep;
}

}  // namespace wfared
