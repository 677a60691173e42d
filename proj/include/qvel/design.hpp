#pragma once

// Choosing the velocity weight delta: the weight that postpones the first Hopf point the most
// (delta_max), the weight past which velocity information hurts (delta_cap) and, for two queues,
// the weight that minimizes the oscillation amplitude at a given delay (delta_amp).
// All functions require lambda*theta > N*mu and throw UnsupportedRegime otherwise.

#include <utility>

#include "qvel/model.hpp"

namespace qvel {

struct DesignSummary {
    double delta_max = 0.0;
    double delta_1 = 0.0;
    double delta_2 = 0.0;
    double delta_0_cr = 0.0;       ///< first critical delay at delta = 0
    double delta_cr_at_max = 0.0;  ///< first critical delay at delta_max
    double Delta_1 = 0.0;
    double Delta_2 = 0.0;
    double delta_cap = 0.0;
};

/// First critical delay as a function of the weight (params.delta is ignored).
double delta_cr_of(const SystemParams& params, double delta);

/// Closed-form derivative of the first critical delay with respect to delta, on [0, N/(lambda theta)).
double d_delta_cr_d_delta(const SystemParams& params, double delta);

/// Closed-form bracket (delta_1, delta_2) around delta_max.
std::pair<double, double> delta_bounds(const SystemParams& params);

/// Zero of d_delta_cr_d_delta inside the closed-form bracket.
double delta_max(const SystemParams& params);

/// Lower and upper bound on the largest first critical delay. Throws InvariantViolation if the
/// slope at delta_1 is not positive or at delta_2 not negative, which the bounds rely on.
std::pair<double, double> delta_cr_max_bounds(const SystemParams& params);

/// Weight above delta_max where the critical delay falls back to its delta = 0 value.
double delta_cap(const SystemParams& params);

DesignSummary design_summary(const SystemParams& params);

struct AmplitudeMinimizer {
    double delta = 0.0;
    double amplitude = 0.0;    ///< estimate at the minimizer (0 when stabilizing)
    bool stabilizing = false;  ///< the delay is below the critical delay at the returned weight
    double search_upper = 0.0; ///< right end of the searched interval
};

/// Minimizes the second-order amplitude estimate over delta at the fixed delay params.delay.
/// If some weight keeps the equilibrium stable, returns delta_max flagged as stabilizing.
/// The search stops where the corrected frequency omega0 + omega1 reaches zero: beyond that the
/// expansion no longer describes an oscillation and its amplitude is meaningless. Requires N = 2.
AmplitudeMinimizer delta_amp(const SystemParams& params);

/// Same search with the first-order estimate, over the full admissible interval.
AmplitudeMinimizer delta_amp_first_order(const SystemParams& params);

}  // namespace qvel
