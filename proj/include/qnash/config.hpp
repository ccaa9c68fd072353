#pragma once

// Numerical tolerances shared by every module. Values are the library
// defaults; functions that accept a Tolerances argument fall back to
// kDefaultTolerances when none is given.

#include <random>

namespace qnash {

using Rng = std::mt19937_64;

struct Tolerances {
  double state_norm = 1e-12;          // |‖v‖ - 1| for a PureState
  double significant_amplitude = 1e-12;  // modulus that fixes the canonical phase
  double projective_equal = 1e-10;    // componentwise, canonical representatives
  double unitary = 1e-10;             // max-entry of U†U - I
  double hermitian = 1e-10;           // max-entry of H - H†
  double probability_sum = 1e-10;     // simplex membership
  double counters_slack = 1e-12;      // Γ_i(p') ≥ Γ_i(p) - slack
  double exact_solver_epsilon = 1e-8; // support enumeration certificates
  double indifference = 1e-12;        // ‖v_i‖ below which a player is indifferent
  double gain_roundoff = 1e-13;       // gains below this (relative to the payoff scale) count as zero
  double eigen_degeneracy = 1e-9;     // top-eigenvalue cluster width
  double cycle_match = 1e-8;          // Fubini-Study match for cycle detection
  int cycle_window = 32;
  double hull_plane = 1e-12;          // orientation fallback in hull construction
  double hull_containment = 1e-9;
  double coincidence_delta = 0.05;
  double coincidence_threshold = 0.95;
  double target_autonormalize = 1e-6; // documents within this of unit norm are renormalized
};

inline constexpr Tolerances kDefaultTolerances{};

}  // namespace qnash
