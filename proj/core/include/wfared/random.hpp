#ifndef WFARED_RANDOM_HPP
#define WFARED_RANDOM_HPP

#include <cstdint>
#include <random>

#include "wfared/wfa.hpp"

namespace wfared {

/// Deterministic random source.  The raw mt19937_64 stream is standardized;
/// the transforms below are implemented here so the sampled sequences are
/// reproducible across standard libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  ///< [0, 1)
  double uniform(double lo, double hi);
  double normal();   ///< Box-Muller
  Index uniform_index(Index lo, Index hi);  ///< inclusive bounds
  bool coin() { return uniform() < 0.5; }

private:
  std::mt19937_64 engine_;
};

struct SvaGenOptions {
  Index n = 4;
  double rho_min = 0.3;
  double rho_max = 0.88;
  double sigma_min_ratio = 0.05;  ///< sigma_{n-1} >= ratio * sigma_0
  double gap_min_rel = 2e-3;      ///< pairwise (s_i - s_{i+1}) / s_i lower bound
  double scale = 1.0;             ///< sigma_0
};

/// Draws an exact SVA: a prescribed diagonal Gramian D together with a
/// symmetric transition matrix solving D - A D A = beta beta^T, constructed
/// from a symmetric square root of D^{1/2} (D - beta beta^T) D^{1/2}.
/// Minimal by construction (P = Q = D positive definite).
SvaWfa random_sva(Rng& rng, const SvaGenOptions& opt);

/// Same construction with prescribed singular numbers (decreasing, positive).
SvaWfa random_sva_with_spectrum(Rng& rng, const Vector& D, double rho_min,
                                double rho_max);

/// Dense generic WFA with spectral radius scaled to rho.
Wfa random_wfa(Rng& rng, Index n, double rho);

/// Well-conditioned random similarity transform of w (same series).
Wfa random_similarity(Rng& rng, const Wfa& w, double spread = 1.0);

/// Mixed-stability automaton: a stable part of n_stable states (rho < 0.9)
/// coupled by a random similarity with n_unstable real poles of modulus in
/// (1.1, 2.0).
Wfa random_mixed_wfa(Rng& rng, Index n_stable, Index n_unstable);

}  // namespace wfared

#endif
