#include "qvel/design.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <tuple>

#include "qvel/amplitude.hpp"
#include "qvel/errors.hpp"
#include "qvel/solve.hpp"
#include "qvel/spectral.hpp"

namespace qvel {

namespace {

void require_oscillatory_load(const SystemParams& p, const char* who) {
    p.validate();
    const double nmu = p.n_queues * p.mu;
    if (!(p.load() > nmu * (1.0 + kBoundaryRelTol)))
        throw UnsupportedRegime(std::string(who) + ": requires lambda*theta > N*mu");
}

// delta at which the velocity term offsets a given delay, see delta_bounds
double bound_formula(const SystemParams& p, double x) {
    const double lt = p.load(), n = p.n_queues;
    return (-x * lt + std::sqrt(lt * lt * x * x + 4 * n * n * x * p.mu + 4 * n * n)) / (2 * lt * (1 + x * p.mu));
}

constexpr int kGrid = 2000;

// Golden-section, then a grid scan as a guard against a second basin.
Minimum robust_minimize(const std::function<double(double)>& f, double lo, double hi) {
    Minimum gold = golden_section(f, lo, hi, 1e-8);
    const double h = (hi - lo) / kGrid;
    Minimum grid{lo, f(lo)};
    for (int i = 1; i <= kGrid; ++i) {
        const double x = lo + h * i;
        const double v = f(x);
        if (v < grid.value) grid = {x, v};
    }
    if (std::abs(gold.x - grid.x) > 1e-3 && grid.value < gold.value) {
        Minimum local = golden_section(f, std::max(lo, grid.x - h), std::min(hi, grid.x + h), 1e-8);
        return local.value <= grid.value ? local : grid;
    }
    return gold;
}

}  // namespace

double delta_cr_of(const SystemParams& p, double delta) {
    require_oscillatory_load(p, "delta_cr_of");
    if (!(delta >= 0.0 && delta < p.ratio_edge()))
        throw UnsupportedRegime("delta_cr_of: delta must lie in [0, N/(lambda theta))");
    return delta_cr(p.with_delta(delta), 0);
}

double d_delta_cr_d_delta(const SystemParams& p, double delta) {
    const double dcr = delta_cr_of(p, delta);
    const double lt2 = p.load() * p.load(), n2 = double(p.n_queues) * p.n_queues;
    return 1.0 / (1.0 + delta * p.mu) - delta * lt2 * dcr / (n2 - delta * delta * lt2);
}

std::pair<double, double> delta_bounds(const SystemParams& p) {
    const double d0 = delta_cr_of(p, 0.0);
    return {bound_formula(p, d0 + p.ratio_edge()), bound_formula(p, d0)};
}

double delta_max(const SystemParams& p) {
    auto [lo, hi] = delta_bounds(p);
    return find_bracketed_root([&](double d) { return d_delta_cr_d_delta(p, d); }, lo, hi, 1e-13);
}

std::pair<double, double> delta_cr_max_bounds(const SystemParams& p) {
    auto [d1, d2] = delta_bounds(p);
    const double s1 = d_delta_cr_d_delta(p, d1), s2 = d_delta_cr_d_delta(p, d2);
    if (!(s1 > 0.0)) throw InvariantViolation("delta_cr_max_bounds: slope at delta_1 is not positive");
    if (!(s2 < 0.0)) throw InvariantViolation("delta_cr_max_bounds: slope at delta_2 is not negative");
    const double D1 = delta_cr_of(p, d1), D2 = delta_cr_of(p, d2);
    const double lower = std::max(D1, D2);
    // tangent lines of a concave function lie above it
    const double upper = std::min(D1 + (d2 - d1) * s1, D2 - (d2 - d1) * s2);
    return {lower, upper};
}

double delta_cap(const SystemParams& p) {
    const double base = delta_cr_of(p, 0.0);
    const double lo = delta_max(p) + 1e-10, hi = (1.0 - 1e-9) * p.ratio_edge();
    return find_bracketed_root([&](double d) { return delta_cr_of(p, d) - base; }, lo, hi, 1e-13);
}

DesignSummary design_summary(const SystemParams& p) {
    DesignSummary s;
    std::tie(s.delta_1, s.delta_2) = delta_bounds(p);
    s.delta_max = delta_max(p);
    s.delta_0_cr = delta_cr_of(p, 0.0);
    s.delta_cr_at_max = delta_cr_of(p, s.delta_max);
    std::tie(s.Delta_1, s.Delta_2) = delta_cr_max_bounds(p);
    s.delta_cap = delta_cap(p);
    return s;
}

namespace {

AmplitudeMinimizer minimize_amplitude(const SystemParams& p, bool second_order, const char* who) {
    require_oscillatory_load(p, who);
    if (p.n_queues != 2) throw UnsupportedRegime(std::string(who) + ": amplitude theory covers two queues only");
    const double dmax = delta_max(p);
    const double upper = (1.0 - 1e-6) * p.ratio_edge();

    AmplitudeMinimizer out;
    if (p.delay <= delta_cr_of(p, dmax) * (1.0 + 1e-12)) {
        out.delta = dmax;
        out.stabilizing = true;
        out.search_upper = upper;
        return out;
    }

    double hi = upper;
    if (second_order) {
        auto freq = [&](double d) { return second_order_amplitude(p.with_delta(d)).omega_corrected; };
        if (!(freq(0.0) > 0.0))
            throw UnsupportedRegime(std::string(who) + ": delay too far past onset for the second-order expansion");
        const double h = upper / kGrid;
        for (int i = 1; i <= kGrid; ++i) {
            if (freq(h * i) <= 0.0) {
                hi = find_bracketed_root(freq, h * (i - 1), h * i, 1e-12);
                hi = std::max(0.0, hi - 1e-9);
                break;
            }
        }
    }

    auto amp = [&](double d) {
        auto q = p.with_delta(d);
        return second_order ? second_order_amplitude(q).second_order : first_order_amplitude(q);
    };
    const Minimum m = robust_minimize(amp, 0.0, hi);
    out.delta = m.x;
    out.amplitude = m.value;
    out.search_upper = hi;
    return out;
}

}  // namespace

AmplitudeMinimizer delta_amp(const SystemParams& p) { return minimize_amplitude(p, true, "delta_amp"); }

AmplitudeMinimizer delta_amp_first_order(const SystemParams& p) {
    return minimize_amplitude(p, false, "delta_amp_first_order");
}

}  // namespace qvel
