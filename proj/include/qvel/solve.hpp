#pragma once

// Scalar root finding and minimization used by the design module.

#include <functional>

namespace qvel {

/// Root of f on [a, b] where f(a), f(b) have opposite signs. Regula falsi (Illinois variant)
/// interleaved with bisection so the bracket at least halves every other step.
/// Throws DomainError if the bracket is invalid or NumericDegeneracy on non-finite values.
double find_bracketed_root(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-12);

struct Minimum {
    double x;
    double value;
};

/// Golden-section search for a minimum of f on [a, b] to absolute tolerance `tol` in x.
Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol = 1e-8);

}  // namespace qvel
