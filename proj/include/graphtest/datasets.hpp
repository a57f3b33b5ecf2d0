#pragma once

#include "graphtest/geometry.hpp"
#include "graphtest/rng.hpp"

namespace graphtest {

// n x d standard normal draws.
Matrix standard_normal(Index n, Index d, Engine& rng);

// N((mu_shift, 0, ..., 0), diag(sigma_scale^2, 1, ..., 1)).
Matrix shifted_scaled_normal(Index n, Index d, double mu_shift, double sigma_scale,
                             Engine& rng);

// Two interleaving half circles as in scikit-learn's make_moons: n/2 points
// on (cos t, sin t) and the rest on (1 - cos t, 1/2 - sin t), t evenly
// spaced in [0, pi], plus isotropic Gaussian noise of standard deviation
// `noise`.
Matrix make_moons(Index n, double noise, Engine& rng);

}  // namespace graphtest
