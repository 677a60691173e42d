#include "qvel/solve.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "qvel/errors.hpp"

namespace qvel {

double find_bracketed_root(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (!(a < b)) std::swap(a, b);
    double fa = f(a), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) throw NumericDegeneracy("root finder: non-finite value at bracket end");
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0) == (fb > 0)) throw DomainError("root finder: bracket does not change sign");

    int side = 0;  // which end was retained last, for the Illinois halving
    for (int it = 0; it < 400; ++it) {
        const double width = b - a;
        if (width <= rel_tol * std::max(std::abs(a), std::abs(b)) || width <= std::numeric_limits<double>::min())
            break;
        double c = (it % 3 == 2) ? 0.5 * (a + b) : (a * fb - b * fa) / (fb - fa);
        if (!(c > a && c < b)) c = 0.5 * (a + b);
        const double fc = f(c);
        if (!std::isfinite(fc)) throw NumericDegeneracy("root finder: non-finite value inside bracket");
        if (fc == 0.0) return c;
        if ((fc > 0) == (fa > 0)) {
            a = c;
            fa = fc;
            if (side == -1) fb *= 0.5;
            side = -1;
        } else {
            b = c;
            fb = fc;
            if (side == 1) fa *= 0.5;
            side = 1;
        }
    }
    return std::abs(fa) < std::abs(fb) ? a : b;
}

Minimum golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    double x = 0.5 * (a + b);
    double fx = f(x);
    if (fc < fx) x = c, fx = fc;
    if (fd < fx) x = d, fx = fd;
    return {x, fx};
}

}  // namespace qvel
