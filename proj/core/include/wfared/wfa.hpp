#ifndef WFARED_WFA_HPP
#define WFARED_WFA_HPP

#include <Eigen/Dense>

#include "wfared/solvers.hpp"
#include "wfared/tolerances.hpp"

namespace wfared {

/// Weighted finite automaton over a one-letter alphabet.  The triple
/// (alpha, A, beta) realizes f(k) = alpha^T A^k beta.
struct Wfa {
  Vector alpha;
  Matrix A;
  Vector beta;

  Index states() const { return A.rows(); }
};

/// A WFA in singular value automaton (SVA) form: both Gramians equal
/// diag(singular_numbers) and alpha_i = sign_vector[i] * beta_i.
struct SvaWfa {
  Wfa wfa;
  Vector singular_numbers;      ///< Hankel singular numbers, decreasing
  Eigen::VectorXi sign_vector;  ///< entries in {+1, -1}
};

/// Reachability Gramian P and observability Gramian Q, the solutions of
/// X - A X A^T = beta beta^T and Y - A^T Y A = alpha alpha^T.
struct Gramians {
  Matrix P;
  Matrix Q;
};

/// Canonical minimal automaton of the zero function: one state, all weights
/// zero.  Avoids empty-dimension edge cases.
Wfa zero_wfa();

/// Throws on dimension mismatches or non-finite entries.
void validate(const Wfa& w);

double evaluate(const Wfa& w, Index k);

/// f(0), ..., f(count-1) in a single sweep of vector-matrix products.
Vector coefficients(const Wfa& w, Index count);

/// Automaton of f_a + f_b (block direct sum).
Wfa direct_sum(const Wfa& a, const Wfa& b);

/// Automaton of -f (initial weights negated).
Wfa negated(const Wfa& w);

/// Coefficient-wise comparison on k = 0..horizon.  horizon < 0 selects the
/// default 2 * (n_a + n_b), which suffices for exact rational equivalence.
bool equivalent(const Wfa& a, const Wfa& b, Index horizon = -1,
                const Tolerances& tol = {});

/// Minimal WFA realizing the same series, via Krylov rank factorization of
/// the reachability and observability spaces.
Wfa minimize(const Wfa& w, const Tolerances& tol = {});

/// Requires rho(A) < 1.
Gramians gramians(const Wfa& w, const Tolerances& tol = {});

/// Gramian-balancing SVA computation.  Requires w minimal and rho(A) < 1.
/// The zero automaton maps to an SvaWfa with empty singular numbers.
SvaWfa to_sva(const Wfa& w, const Tolerances& tol = {});

/// Max relative residual of the two SVA fixed-point equations with
/// X = diag(singular_numbers); a quality measure of the SVA form.
double sva_residual(const SvaWfa& s);

/// Checks the SvaWfa invariants (diagonal equal Gramians, decreasing positive
/// singular numbers, sign-paired weights) and throws InvalidInput on failure.
void validate(const SvaWfa& s, double tol = 1e-6);

}  // namespace wfared

#endif
