#ifndef WFARED_EXTENSIONS_HPP
#define WFARED_EXTENSIONS_HPP

#include <optional>

#include "wfared/aak.hpp"
#include "wfared/wfa.hpp"

namespace wfared {

/// Spectral split of a WFA with no eigenvalue near the unit circle: the
/// direct sum of the parts is equivalent to the input.
struct SplitWfa {
  Wfa stable;    ///< all eigenvalue moduli < 1
  Wfa unstable;  ///< all eigenvalue moduli > 1
  Index original_n = 0;
};

SplitWfa split_stable_unstable(const Wfa& w, const Tolerances& tol = {});

/// Maps an automaton with all eigenvalue moduli > 1 to
/// <alpha, A^{-1}, -A^{-1} beta>, whose stable symbol carries the same
/// information under z^{j-1} -> z^{-j}.  Applying it twice recovers the
/// original automaton.
Wfa reflect_unstable(const Wfa& wu, const Tolerances& tol = {});

/// Result of the mixed-stability reduction.  Never optimal as a whole: the
/// two parts are reduced independently and the reports carry the per-part
/// certificates only.
struct GeneralReduceReport {
  Wfa reduced;
  bool non_optimal = true;
  std::optional<ReductionReport> stable_report;
  std::optional<ReductionReport> unstable_report;  ///< for the reflected part
  double coefficient_l2 = -1.0;   ///< sum_{k <= horizon} (f - fhat)^2
  double coefficient_max = -1.0;  ///< max_k |f(k) - fhat(k)|
  Index horizon = 0;
  std::vector<std::string> warnings;
};

/// Splits, reduces the stable part and the reflected unstable part to the
/// requested ranks, reflects back and recombines.
GeneralReduceReport reduce_general(const Wfa& w, Index k_stable,
                                   Index k_unstable,
                                   const ReduceOptions& opt = {});

}  // namespace wfared

#endif
