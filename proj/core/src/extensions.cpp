#include "wfared/extensions.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <cmath>
#include <sstream>

#include "spectral_split.hpp"
#include "wfared/errors.hpp"

namespace wfared {

namespace detail {

std::pair<Wfa, Wfa> spectral_split(const Wfa& w, const Tolerances& tol) {
  validate(w);
  const Index n = w.states();
  if (n == 0) return {w, Wfa{Vector(0), Matrix(0, 0), Vector(0)}};

  const SchurForm schur = ordered_schur(w.A, tol);
  const Index p = schur.split_index;
  const Index q = n - p;

  const Matrix T11 = schur.T.topLeftCorner(p, p);
  const Matrix T12 = schur.T.block(0, p, p, q);
  const Matrix T22 = schur.T.bottomRightCorner(q, q);
  const Matrix X = solve_sylvester(T11, T22, T12, tol);

  // Basis change U * M with M = [I X; 0 I] block-diagonalizes A; the initial
  // weights transform by M^T U^T and the final weights by M^{-1} U^T.
  const Vector ua = schur.U.transpose() * w.alpha;
  const Vector ub = schur.U.transpose() * w.beta;

  Wfa stable;
  stable.A = T11;
  stable.alpha = ua.head(p);
  stable.beta = ub.head(p) - X * ub.tail(q);

  Wfa unstable;
  unstable.A = T22;
  unstable.alpha = X.transpose() * ua.head(p) + ua.tail(q);
  unstable.beta = ub.tail(q);
  return {stable, unstable};
}

}  // namespace detail

namespace {

Wfa reflect(const Wfa& w, const Tolerances& tol) {
  Eigen::FullPivLU<Matrix> lu(w.A);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible())
    throw Error(ErrorCode::singular_transition,
                "reflect: transition matrix is numerically singular");
  Wfa out;
  out.alpha = w.alpha;
  out.A = lu.inverse();
  out.beta = -out.A * w.beta;
  (void)tol;
  return out;
}

// Reduce one split part to the requested rank; empty parts accept only
// rank 0 and rank == size keeps the part unchanged.
Wfa reduce_part(const Wfa& part, Index target, const ReduceOptions& opt,
                std::optional<ReductionReport>& report,
                std::vector<std::string>& warnings, const char* label) {
  const Wfa min = minimize(part, opt.tol);
  const bool empty =
      part.states() == 0 ||
      (min.states() == 1 && min.alpha.isZero() && min.beta.isZero());
  if (empty) {
    if (target != 0) {
      std::ostringstream msg;
      msg << "reduce_general: " << label << " part is empty but rank "
          << target << " was requested";
      throw Error(ErrorCode::invalid_input, msg.str());
    }
    return Wfa{Vector(0), Matrix(0, 0), Vector(0)};
  }
  if (target == min.states()) {
    warnings.push_back(std::string(label) +
                       " part already has the requested rank; kept as is");
    return min;
  }
  if (target <= 0 || target > min.states()) {
    std::ostringstream msg;
    msg << "reduce_general: rank " << target << " invalid for the " << label
        << " part of " << min.states() << " states";
    throw Error(ErrorCode::invalid_input, msg.str());
  }
  const SvaWfa sva = to_sva(min, opt.tol);
  report = aak_reduce(sva, target, opt);
  return report->reduced;
}

}  // namespace

SplitWfa split_stable_unstable(const Wfa& w, const Tolerances& tol) {
  auto [stable, unstable] = detail::spectral_split(w, tol);
  SplitWfa out;
  out.stable = std::move(stable);
  out.unstable = std::move(unstable);
  out.original_n = w.states();
  return out;
}

Wfa reflect_unstable(const Wfa& wu, const Tolerances& tol) {
  validate(wu);
  if (wu.states() == 0) return wu;
  Eigen::VectorXcd ev =
      Eigen::EigenSolver<Matrix>(wu.A, false).eigenvalues();
  for (Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) <= 1.0 + tol.circle) {
      std::ostringstream msg;
      msg << "reflect_unstable: eigenvalue modulus " << std::abs(ev(i))
          << " is not strictly above 1";
      throw Error(ErrorCode::singular_transition, msg.str());
    }
  }
  return reflect(wu, tol);
}

GeneralReduceReport reduce_general(const Wfa& w, Index k_stable,
                                   Index k_unstable,
                                   const ReduceOptions& opt) {
  const SplitWfa split = split_stable_unstable(w, opt.tol);

  GeneralReduceReport rep;
  rep.non_optimal = true;

  const Wfa reduced_stable = reduce_part(split.stable, k_stable, opt,
                                         rep.stable_report, rep.warnings,
                                         "stable");

  Wfa reduced_unstable{Vector(0), Matrix(0, 0), Vector(0)};
  if (split.unstable.states() > 0) {
    const Wfa reflected = reflect_unstable(split.unstable, opt.tol);
    const Wfa reduced_reflected =
        reduce_part(reflected, k_unstable, opt, rep.unstable_report,
                    rep.warnings, "unstable (reflected)");
    if (reduced_reflected.states() > 0)
      reduced_unstable = reflect(reduced_reflected, opt.tol);
  } else if (k_unstable != 0) {
    throw Error(ErrorCode::invalid_input,
                "reduce_general: no unstable part but a positive unstable "
                "rank was requested");
  }

  rep.reduced = direct_sum(reduced_stable, reduced_unstable);
  rep.warnings.push_back("NON-OPTIMAL: parts reduced independently; no "
                         "global spectral-norm certificate exists");

  rep.horizon = std::max<Index>(2 * split.original_n, 16);
  const Vector f = coefficients(w, rep.horizon + 1);
  const Vector g = coefficients(rep.reduced, rep.horizon + 1);
  rep.coefficient_l2 = (f - g).squaredNorm();
  rep.coefficient_max = (f - g).cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace wfared
