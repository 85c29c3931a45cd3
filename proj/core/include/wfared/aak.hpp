#ifndef WFARED_AAK_HPP
#define WFARED_AAK_HPP

#include <array>
#include <map>
#include <string>
#include <vector>

#include "wfared/wfa.hpp"

namespace wfared {

/// Certification thresholds of a verified reduction.  These mirror the
/// guarantees of the construction: the achieved spectral error equals
/// sigma_k, bounded below by the Eckart-Young floor, the all-pass and
/// unimodularity identities hold, and the l2 bound is met.
struct Certification {
  double error_rel = 1e-6;       ///< |achieved - sigma_k| <= error_rel * sigma_k
  double floor_slack = 1e-8;     ///< achieved >= sigma_k - floor_slack
  double allpass = 1e-8;         ///< relative residuals of the three fixed-point equations
  double unimodularity = 1e-8;   ///< max circle deviation of |ratio|/sigma_k from 1
  double l2_slack = 1e-8;        ///< sum (f - fhat)^2 <= sigma_k^2 + l2_slack
  double baseline_slack = 1e-9;  ///< achieved <= SVA-truncation error + baseline_slack
  Index l2_horizon = 1000;
};

/// Maximal group of singular numbers within tol of sigma_k, and the
/// permutation that moves it to the last r coordinates (preserving the
/// relative order of the rest).
struct MultiplicityGroup {
  Index r = 1;
  Index first = 0;
  Index last = 0;
  std::vector<Index> permutation;  ///< permutation[new position] = old index
};

/// Group D[k] with every |D[i] - D[k]| <= tol_rel * D[0].  Throws
/// GroupNotAtBoundary when k is strictly inside its group or the group
/// spans the whole spectrum (no boundary available).
MultiplicityGroup group_multiplicity(const Vector& D, Index k, double tol_rel);

/// The setup partition of Theorem-style block equations, taken after the
/// multiplicity permutation so the sigma_k block sits last:
///   P = Q = diag(Sigma, sigma_k 1_r),  R = sigma_k^2 1 - Sigma^2.
/// A21 is stored explicitly; it equals A12^T for a symmetric SVA and the
/// sign-conjugate transpose in general.
struct PartitionBlocks {
  Index n = 0;
  Index k = 0;
  Index r = 1;
  double sigma_k = 0.0;
  Vector retained;  ///< diagonal of Sigma, size n - r
  Matrix A11, A12, A21, A22;
  Vector alpha1, alpha2, beta1, beta2;
  Vector R;  ///< diagonal of R, no zero entries
  std::vector<Index> permutation;

  Matrix assemble_A() const;
  Vector assemble_alpha() const;
  Vector assemble_beta() const;
};

PartitionBlocks partition(const SvaWfa& s, Index k, const Tolerances& tol = {});

enum class Branch { alpha2_nonzero, alpha2_zero };
const char* to_string(Branch b);

/// The auxiliary automaton (A_hat, alpha_hat, beta_hat) whose symbol is the
/// best bounded approximation; its stable part realizes the optimum.
struct AuxiliaryWfa {
  Matrix A_hat;
  Vector alpha_hat;
  Vector beta_hat;
  Branch branch = Branch::alpha2_nonzero;
  std::vector<std::string> warnings;
};

AuxiliaryWfa solve_auxiliary(const PartitionBlocks& pb,
                             const Tolerances& tol = {});

/// Error automaton E = <(alpha; -alpha_hat), diag(A, A_hat), (beta; beta_hat)>
/// built in the permuted basis of the partition.
struct ErrorWfa {
  Wfa wfa;
  double sigma_k = 0.0;
  Index r = 1;
};

ErrorWfa build_error_wfa(const PartitionBlocks& pb, const AuxiliaryWfa& aux);

/// Relative residuals of the three all-pass fixed-point identities
///   (a) P_e - A_e P_e A_e^T = beta_e beta_e^T
///   (b) Q_e - A_e^T Q_e A_e = alpha_e alpha_e^T
///   (c) P_e Q_e = sigma_k^2 1
/// with P_e, Q_e assembled in closed form from the partition.
struct AllpassResiduals {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double max() const { return a > b ? (a > c ? a : c) : (b > c ? b : c); }
};

AllpassResiduals verify_allpass(const ErrorWfa& e, const PartitionBlocks& pb);

/// Splits the auxiliary automaton into its stable (all |lambda| < 1) and
/// unstable parts via the ordered Schur form and a Sylvester solve.
std::pair<Wfa, Wfa> block_diagonalize(const AuxiliaryWfa& aux,
                                      const Tolerances& tol = {});

struct ReduceOptions {
  bool verify = true;
  Index verify_max_states = 64;  ///< verification is skipped above this size unless forced
  bool force_verify = false;
  Index hankel_size = 0;  ///< 0 = automatic by tail bound
  Index unimodular_samples = 1000;
  bool baselines = true;
  Certification cert{};
  Tolerances tol{};
};

struct ReductionReport {
  Wfa reduced;
  Index k = 0;
  Index r = 1;
  double sigma_k = 0.0;
  Branch branch = Branch::alpha2_nonzero;

  bool verified = false;
  bool certified = false;
  double achieved_error = -1.0;
  double tail_bound = -1.0;
  Index oracle_size = 0;
  double l2_bound_check = -1.0;  ///< sum_{j <= horizon} (f(j) - fhat(j))^2
  double unimodularity_deviation = -1.0;
  Index unimodularity_skipped = 0;
  AllpassResiduals allpass_residuals{};
  double sva_residual = -1.0;  ///< Lyapunov residual of the input SVA

  std::map<std::string, double> baselines;  ///< method name -> spectral error
  std::vector<std::string> warnings;
  std::vector<std::string> failures;  ///< certificates that did not hold
};

/// Optimal spectral-norm rank-k reduction of an SVA, with optional oracle
/// verification against the truncated Hankel section.
ReductionReport aak_reduce(const SvaWfa& s, Index k,
                           const ReduceOptions& opt = {});

}  // namespace wfared

#endif
