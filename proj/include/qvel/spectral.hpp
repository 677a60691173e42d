#pragma once

// Linear stability of the symmetric equilibrium: the characteristic function
//   Phi(R) = -R - (lambda theta / N)(1 + delta R) e^{-R delay} - mu
// and its purely imaginary roots.

#include <complex>
#include <optional>
#include <vector>

#include "qvel/model.hpp"

namespace qvel {

using cplx = std::complex<double>;

struct HopfPoint {
    double omega_cr = 0.0;
    double delta_cr = 0.0;  ///< critical delay
    int root_index = 0;
    double crossing_rate = 0.0;  ///< d Re(R) / d delay at the crossing
};

struct CharacteristicRoot {
    double real_part = 0.0;
    double imag_part = 0.0;
    double residual = 0.0;
    cplx value() const { return {real_part, imag_part}; }
};

/// Phi(R) at params.delay.
cplx characteristic_residual(cplx root, const SystemParams& params);
/// dPhi/dR at params.delay.
cplx characteristic_derivative(cplx root, const SystemParams& params);

/// Critical frequency; empty when the radicand is not strictly positive (no imaginary crossing).
std::optional<double> omega_cr(const SystemParams& params);

/// Critical delay of branch k. Uses the principal arccos when delta*mu <= 1 and the
/// reflected angle 2 pi - arccos when delta*mu > 1 (the sine condition is negative there).
/// Throws UnsupportedRegime when omega_cr is absent, NumericDomainError for an arccos
/// argument outside [-1, 1] by more than 1e-12.
double delta_cr(const SystemParams& params, int root_index = 0);

/// Closed-form d alpha / d delay at the crossing. Throws NumericDegeneracy if its denominator
/// (positive in theory) falls below 1e-14.
double crossing_rate(const SystemParams& params, const HopfPoint& at);

/// omega_cr, delta_cr and crossing rate for branch k. The returned point ignores params.delay.
HopfPoint hopf_point(const SystemParams& params, int root_index = 0);

/// Damped Newton on Phi from `seed`. Throws NotFound unless |Phi| < 1e-9 within 100 iterations.
CharacteristicRoot find_root_near(const SystemParams& params, cplx seed);

/// Seeds Newton on a grid a in [0.05, a_max], b = j pi / delay (j = 0..40) and returns the distinct
/// roots with nonnegative real part (merged when closer than 1e-6), largest real part first.
std::vector<CharacteristicRoot> scan_right_half_plane(const SystemParams& params);

}  // namespace qvel
