#pragma once

#include <vector>

#include "qvel/integrator.hpp"

namespace qvel {

inline constexpr double kDecayThreshold = 1e-3;

struct OscillationMeasurement {
    double amplitude = 0.0;  ///< mean half peak-to-trough of q1 over the window
    double period = 0.0;     ///< mean spacing of successive maxima; 0 if fewer than 2
    bool converged = false;  ///< last 5 half-swings agree within 1% (relative spread)
    bool decayed = false;    ///< max |q1 - q*| in window below kDecayThreshold
    int peaks = 0;           ///< number of maxima found in the window
};

/// Reads the trailing `window_fraction` of the trajectory. Extrema are the sign changes of q1',
/// refined with a parabola through three nodes.
/// Throws Inconclusive if the window holds fewer than 2 maxima and the signal has not decayed.
OscillationMeasurement measure(const Trajectory& traj, double window_fraction = 0.25);

/// 2 pi / period. Throws StateError unless the measurement converged.
double measured_frequency(const OscillationMeasurement& m);

}  // namespace qvel
