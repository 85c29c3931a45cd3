#include "wfared/solvers.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include "wfared/errors.hpp"

namespace wfared {

namespace {

void require_square(const Matrix& A, const char* who) {
  if (A.rows() != A.cols()) {
    std::ostringstream msg;
    msg << who << ": matrix is " << A.rows() << "x" << A.cols();
    throw Error(ErrorCode::dimension_mismatch, msg.str());
  }
}

// Diagonal block layout of a real quasi-triangular matrix.
struct Block {
  Index start;
  Index size;  // 1 or 2
};

std::vector<Block> diagonal_blocks(const Matrix& T) {
  std::vector<Block> blocks;
  const Index n = T.rows();
  Index i = 0;
  while (i < n) {
    if (i + 1 < n && T(i + 1, i) != 0.0) {
      blocks.push_back({i, 2});
      i += 2;
    } else {
      blocks.push_back({i, 1});
      i += 1;
    }
  }
  return blocks;
}

double block_modulus(const Matrix& T, const Block& b) {
  if (b.size == 1) return std::abs(T(b.start, b.start));
  // Conjugate pair: |lambda|^2 = det of the 2x2 block.
  const double det = T(b.start, b.start) * T(b.start + 1, b.start + 1) -
                     T(b.start, b.start + 1) * T(b.start + 1, b.start);
  return std::sqrt(std::max(det, 0.0));
}

// Solves T11 W - W T22 = F for diagonal blocks of size <= 2 via the
// vectorized form.  Throws SingularSystem when the spectra collide.
Matrix small_sylvester(const Matrix& T11, const Matrix& T22, const Matrix& F) {
  const Index p = T11.rows();
  const Index q = T22.rows();
  Matrix K = kronecker(Matrix::Identity(q, q), T11) -
             kronecker(T22.transpose(), Matrix::Identity(p, p));
  Eigen::FullPivLU<Matrix> lu(K);
  const double scale = std::max(T11.cwiseAbs().maxCoeff(),
                                T22.cwiseAbs().maxCoeff());
  lu.setThreshold(1e-13);
  if (!lu.isInvertible() && scale > 0.0) {
    throw Error(ErrorCode::singular_system,
                "Sylvester block system is singular: overlapping spectra");
  }
  Eigen::Map<const Vector> f(F.data(), p * q);
  Vector w = lu.solve(f);
  return Eigen::Map<const Matrix>(w.data(), p, q);
}

// Swaps the adjacent diagonal blocks at `start` (sizes s1, s2) of the real
// Schur form (U, T) by an orthogonal similarity.
void swap_adjacent_blocks(Matrix& U, Matrix& T, Index start, Index s1,
                          Index s2) {
  const Index w = s1 + s2;
  const Matrix A11 = T.block(start, start, s1, s1);
  const Matrix A12 = T.block(start, start + s1, s1, s2);
  const Matrix A22 = T.block(start + s1, start + s1, s2, s2);

  // Columns of [X; I] span the invariant subspace of the trailing block.
  const Matrix X = small_sylvester(A11, A22, -A12);
  Matrix G(w, s2);
  G.topRows(s1) = X;
  G.bottomRows(s2) = Matrix::Identity(s2, s2);
  Eigen::HouseholderQR<Matrix> qr(G);
  const Matrix Q = qr.householderQ();

  T.middleCols(start, w) = T.middleCols(start, w) * Q;
  T.middleRows(start, w) = Q.transpose() * T.middleRows(start, w);
  U.middleCols(start, w) = U.middleCols(start, w) * Q;
  T.block(start + s2, start, s1, s2).setZero();
}

std::vector<std::complex<double>> block_eigenvalues(const Matrix& T,
                                                    const Block& b) {
  if (b.size == 1) return {std::complex<double>(T(b.start, b.start), 0.0)};
  const double a = T(b.start, b.start);
  const double d = T(b.start + 1, b.start + 1);
  const double bc = T(b.start, b.start + 1) * T(b.start + 1, b.start);
  const double tr2 = (a + d) / 2.0;
  const double disc = tr2 * tr2 - (a * d - bc);
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    return {{tr2 + s, 0.0}, {tr2 - s, 0.0}};
  }
  const double s = std::sqrt(-disc);
  return {{tr2, s}, {tr2, -s}};
}

}  // namespace

Matrix kronecker(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j)
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return K;
}

double spectral_radius(const Matrix& A) {
  require_square(A, "spectral_radius");
  if (A.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Matrix solve_discrete_lyapunov(const Matrix& A, const Matrix& S,
                               const Tolerances& tol) {
  require_square(A, "solve_discrete_lyapunov");
  require_square(S, "solve_discrete_lyapunov");
  if (A.rows() != S.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "solve_discrete_lyapunov: A and S sizes differ");
  }
  const Index n = A.rows();
  if (n == 0) return Matrix(0, 0);
  const double s_scale = S.cwiseAbs().maxCoeff();
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, s_scale)) {
    throw Error(ErrorCode::invalid_input,
                "solve_discrete_lyapunov: S is not symmetric");
  }
  const double rho = spectral_radius(A);
  if (rho >= 1.0 - tol.rho) {
    std::ostringstream msg;
    msg << "solve_discrete_lyapunov: spectral radius " << rho
        << " too close to 1";
    throw Error(ErrorCode::non_convergent, msg.str());
  }

  Matrix X;
  if (n <= 32) {
    const Index m = n * n;
    Matrix K = Matrix::Identity(m, m) - kronecker(A, A);
    Eigen::Map<const Vector> s(S.data(), m);
    Vector x = Eigen::PartialPivLU<Matrix>(K).solve(s);
    X = Eigen::Map<const Matrix>(x.data(), n, n);
  } else {
    // Squaring iteration: X_{k+1} = X_k + B_k X_k B_k^T, B_{k+1} = B_k^2.
    X = S;
    Matrix B = A;
    for (int iter = 0; iter < 96; ++iter) {
      const Matrix update = B * X * B.transpose();
      X += update;
      if (update.norm() <= 0.5 * tol.solve * (X.norm() + S.norm())) break;
      B = B * B;
    }
  }
  X = 0.5 * (X + X.transpose());

  const double resid = (X - A * X * A.transpose() - S).norm();
  if (resid > tol.solve * (X.norm() + S.norm()) + 1e-300) {
    std::ostringstream msg;
    msg << "solve_discrete_lyapunov: residual " << resid << " above tolerance";
    throw Error(ErrorCode::non_convergent, msg.str());
  }
  return X;
}

Matrix solve_sylvester(const Matrix& Ap, const Matrix& Am, const Matrix& C,
                       const Tolerances& tol) {
  require_square(Ap, "solve_sylvester");
  require_square(Am, "solve_sylvester");
  const Index p = Ap.rows();
  const Index q = Am.rows();
  if (C.rows() != p || C.cols() != q) {
    throw Error(ErrorCode::dimension_mismatch,
                "solve_sylvester: C has incompatible shape");
  }
  if (p == 0 || q == 0) return Matrix::Zero(p, q);

  Eigen::RealSchur<Matrix> s1(Ap);
  Eigen::RealSchur<Matrix> s2(Am);
  const Matrix U1 = s1.matrixU();
  const Matrix T1 = s1.matrixT();
  const Matrix U2 = s2.matrixU();
  const Matrix T2 = s2.matrixT();

  // T1 Y - Y T2 = F, solved block column by block column.
  const Matrix F = -U1.transpose() * C * U2;
  Matrix Y = Matrix::Zero(p, q);
  const auto rows = diagonal_blocks(T1);
  const auto cols = diagonal_blocks(T2);
  for (Index l = 0; l < static_cast<Index>(cols.size()); ++l) {
    const Block& bl = cols[l];
    for (Index i = static_cast<Index>(rows.size()) - 1; i >= 0; --i) {
      const Block& bi = rows[i];
      Matrix rhs = F.block(bi.start, bl.start, bi.size, bl.size);
      const Index below = bi.start + bi.size;
      if (below < p) {
        rhs -= T1.block(bi.start, below, bi.size, p - below) *
               Y.block(below, bl.start, p - below, bl.size);
      }
      if (bl.start > 0) {
        rhs += Y.block(bi.start, 0, bi.size, bl.start) *
               T2.block(0, bl.start, bl.start, bl.size);
      }
      Y.block(bi.start, bl.start, bi.size, bl.size) = small_sylvester(
          T1.block(bi.start, bi.start, bi.size, bi.size),
          T2.block(bl.start, bl.start, bl.size, bl.size), rhs);
    }
  }
  Matrix X = U1 * Y * U2.transpose();

  const double scale =
      X.norm() * (Ap.norm() + Am.norm()) + C.norm() + 1e-300;
  const double resid = (Ap * X - X * Am + C).norm();
  if (resid > tol.solve * scale) {
    std::ostringstream msg;
    msg << "solve_sylvester: residual " << resid
        << " above tolerance; spectra nearly overlap";
    throw Error(ErrorCode::singular_system, msg.str());
  }
  return X;
}

SchurForm ordered_schur(const Matrix& A, const Tolerances& tol) {
  require_square(A, "ordered_schur");
  const Index n = A.rows();
  SchurForm out;
  if (n == 0) {
    out.U.resize(0, 0);
    out.T.resize(0, 0);
    return out;
  }
  Eigen::RealSchur<Matrix> schur(A);
  out.U = schur.matrixU();
  out.T = schur.matrixT();

  // Bubble passes over adjacent blocks; equal moduli are never swapped, so
  // the relative order of ties is preserved.
  bool swapped = true;
  while (swapped) {
    swapped = false;
    auto blocks = diagonal_blocks(out.T);
    for (std::size_t i = 0; i + 1 < blocks.size(); ++i) {
      const double left = block_modulus(out.T, blocks[i]);
      const double right = block_modulus(out.T, blocks[i + 1]);
      if (left > right * (1.0 + 1e-14) + 1e-300) {
        swap_adjacent_blocks(out.U, out.T, blocks[i].start, blocks[i].size,
                             blocks[i + 1].size);
        swapped = true;
        blocks = diagonal_blocks(out.T);
      }
    }
  }

  Index inside = 0;
  for (const Block& b : diagonal_blocks(out.T)) {
    for (const auto& ev : block_eigenvalues(out.T, b)) {
      const double m = std::abs(ev);
      if (std::abs(m - 1.0) <= tol.circle) {
        std::ostringstream msg;
        msg << "ordered_schur: eigenvalue modulus " << m
            << " within " << tol.circle << " of the unit circle";
        throw Error(ErrorCode::eigenvalue_on_circle, msg.str());
      }
      if (m < 1.0) ++inside;
    }
  }
  out.split_index = inside;
  return out;
}

PivotedCholesky pivoted_cholesky(const Matrix& M, double rel_tol) {
  require_square(M, "pivoted_cholesky");
  const Index n = M.rows();
  PivotedCholesky out;
  out.L = Matrix::Zero(n, n);
  if (n == 0) return out;

  std::vector<Index> piv(n);
  for (Index i = 0; i < n; ++i) piv[i] = i;
  Vector d = M.diagonal();
  const double d0 = std::max(d.maxCoeff(), 0.0);
  const double cutoff = rel_tol * std::max(d0, 1e-300);

  Matrix L = Matrix::Zero(n, n);  // rows in pivoted order
  Index rank = 0;
  for (Index j = 0; j < n; ++j) {
    Index best = j;
    for (Index t = j + 1; t < n; ++t)
      if (d(piv[t]) > d(piv[best])) best = t;
    std::swap(piv[j], piv[best]);
    const double pivot = d(piv[j]);
    if (pivot <= cutoff || d0 == 0.0) break;

    const double root = std::sqrt(pivot);
    L(j, j) = root;
    for (Index i = j + 1; i < n; ++i) {
      double v = M(piv[i], piv[j]);
      for (Index t = 0; t < j; ++t) v -= L(i, t) * L(j, t);
      L(i, j) = v / root;
      d(piv[i]) -= L(i, j) * L(i, j);
    }
    ++rank;
  }

  out.rank = rank;
  out.L = Matrix::Zero(n, rank);
  for (Index i = 0; i < n; ++i) out.L.row(piv[i]) = L.row(i).head(rank);
  return out;
}

}  // namespace wfared
