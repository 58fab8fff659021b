#pragma once

#include "tsc/core.hpp"

namespace tsc {

/// Lambda = I_T (tau = T): plain matrix completion, no temporal structure.
StructureMatrix build_identity(int T);

/// Lambda = (I_tau | ... | I_tau), tau must divide T. Column t selects
/// row t mod tau.
StructureMatrix build_periodic(int tau, int T);

/// Real trigonometric basis with frequency cutoff N: tau = 2N + 1 rows.
/// Row 0 is constant 1; rows 2m-1 and 2m are cos(2*pi*m*t/T) and
/// sin(2*pi*m*t/T) for m = 1..N, evaluated at t = 1..T.
StructureMatrix build_trigonometric(int N, int T);

/// Moves every entry (j, t, y) to (j, t mod tau, y) and replaces the horizon
/// by tau. Entry count and order are preserved; collisions stay as duplicates.
ObservationSet fold_observations(const ObservationSet& obs, int tau);

}  // namespace tsc
