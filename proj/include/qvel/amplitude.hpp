#pragma once

// Limit-cycle amplitude for two queues near the first Hopf point. Everything here is written
// for the difference mode x = q1 - q2, so queue amplitudes are half the amplitude of x.

#include "qvel/model.hpp"

namespace qvel {

struct SlowFlowCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double alpha = 0.0;  ///< delay - delta_cr
};

struct LindstedtCoefficients {
    double A = 0.0;
    double omega1 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
    double a4 = 0.0;
};

struct AmplitudeEstimate {
    double first_order = 0.0;      ///< R1 / 2
    double second_order = 0.0;     ///< (A + a2 + a4) / 2
    double omega0 = 0.0;
    double omega_corrected = 0.0;  ///< omega0 + omega1
    LindstedtCoefficients coefficients;
};

enum class HopfSide { CycleForLargerDelay, CycleForSmallerDelay };

/// Radial slow flow dR/d(eta) = R (c2 - c1 R^2) / c3 at the first critical delay.
/// Requires N = 2 and an imaginary crossing. Throws InternalContradiction if c1 or c3 is not positive.
SlowFlowCoefficients slow_flow(const SystemParams& params);

/// Queue amplitude R1/2; 0 on the stable side (delay <= delta_cr).
/// Throws UnsupportedRegime unless N = 2, delta*mu < 1 and an imaginary crossing exists.
double first_order_amplitude(const SystemParams& params);

/// Second-order Lindstedt estimate with eps = 1 and the whole detuning in the first-order delay
/// correction. Returns zeros at or below the critical delay. Throws NumericDegeneracy naming the
/// coefficient if one comes out non-finite.
AmplitudeEstimate second_order_amplitude(const SystemParams& params);

/// Which side of delta_cr the stable cycle lives on. Throws DegenerateRegime at delta*mu = 1.
HopfSide hopf_side(const SystemParams& params);

}  // namespace qvel
