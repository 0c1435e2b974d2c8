#pragma once

// The potentials used throughout the checks and configs.

#include "specdet/potential.hpp"

namespace specdet::specs {

/// -d^2/dx^2 + |x|^beta.
inline PotentialSpec unperturbed(double beta) { return PotentialSpec(beta, 0.0, Perturbation::none()); }

inline PotentialSpec harmonic() { return unperturbed(2.0); }

/// beta = 2, q = -x^2 on [0, b]: the well flattened on [0, b].
inline PotentialSpec example1(double b, double alpha = 1.0) {
  return PotentialSpec(2.0, alpha, Perturbation::polynomial({{{0.0, b}, {0.0, 0.0, -1.0}}}));
}

/// beta = 2, q = 1 on [-1, 1].
inline PotentialSpec example2(double alpha) {
  return PotentialSpec(2.0, alpha, Perturbation::steps({{{-1.0, 1.0}, 1.0}}));
}

/// beta = 4, q = x^4 on [0, 1].
inline PotentialSpec example3(double alpha) {
  return PotentialSpec(4.0, alpha, Perturbation::polynomial({{{0.0, 1.0}, {0.0, 0.0, 0.0, 0.0, 1.0}}}));
}

}  // namespace specdet::specs
