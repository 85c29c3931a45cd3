#ifndef WFARED_SRC_SPECTRAL_SPLIT_HPP
#define WFARED_SRC_SPECTRAL_SPLIT_HPP

#include <utility>

#include "wfared/wfa.hpp"

namespace wfared::detail {

// Ordered-Schur + Sylvester block diagonalization: returns the stable
// (|lambda| < 1) and unstable (|lambda| > 1) parts, whose direct sum is
// equivalent to the input.  Shared by the reduction pipeline and the
// spectral-radius relaxation.
std::pair<Wfa, Wfa> spectral_split(const Wfa& w, const Tolerances& tol);

}  // namespace wfared::detail

#endif
