#include "qvel/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qvel/errors.hpp"

namespace qvel {

namespace {

struct Extremum {
    double time;
    double value;
    bool is_max;
};

// Vertex of the parabola through nodes j-1, j, j+1 (uniform spacing assumed locally).
Extremum refine(const Trajectory& tr, std::size_t j, bool is_max) {
    const double ym = tr.q(j - 1, 0), y0 = tr.q(j, 0), yp = tr.q(j + 1, 0);
    const double curv = ym - 2 * y0 + yp;
    if (curv == 0.0) return {tr.times[j], y0, is_max};
    const double h = 0.5 * (tr.times[j + 1] - tr.times[j - 1]);
    const double offset = std::clamp(h * (ym - yp) / (2 * curv), -h, h);
    return {tr.times[j] + offset, y0 - (ym - yp) * (ym - yp) / (8 * curv), is_max};
}

}  // namespace

OscillationMeasurement measure(const Trajectory& tr, double window_fraction) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0))
        throw DomainError("measure: window_fraction must lie in (0, 1]");
    if (tr.size() < 3) throw DomainError("measure: trajectory too short");

    const double q_star = equilibrium(tr.params);
    const double t0 = tr.times.front(), t1 = tr.times.back();
    const double t_window = t1 - window_fraction * (t1 - t0);
    const auto first = std::size_t(std::lower_bound(tr.times.begin(), tr.times.end(), t_window) - tr.times.begin());

    OscillationMeasurement out;
    double max_dev = 0.0;
    for (std::size_t k = first; k < tr.size(); ++k) max_dev = std::max(max_dev, std::abs(tr.q(k, 0) - q_star));

    std::vector<Extremum> ext;
    for (std::size_t k = first; k + 1 < tr.size(); ++k) {
        const double d0 = tr.dq(k, 0), d1 = tr.dq(k + 1, 0);
        const bool up_down = d0 > 0.0 && d1 <= 0.0;
        const bool down_up = d0 < 0.0 && d1 >= 0.0;
        if (!up_down && !down_up) continue;
        std::size_t j = k;
        if (up_down ? tr.q(k + 1, 0) > tr.q(k, 0) : tr.q(k + 1, 0) < tr.q(k, 0)) j = k + 1;
        if (j == 0 || j + 1 >= tr.size()) continue;
        Extremum e = refine(tr, j, up_down);
        // keep alternation; a repeated type means the sign test saw noise, keep the stronger one
        if (!ext.empty() && ext.back().is_max == e.is_max) {
            if (e.is_max ? e.value > ext.back().value : e.value < ext.back().value) ext.back() = e;
            continue;
        }
        ext.push_back(e);
    }

    std::vector<double> maxima_t;
    for (const auto& e : ext)
        if (e.is_max) maxima_t.push_back(e.time);
    out.peaks = int(maxima_t.size());
    out.decayed = max_dev < kDecayThreshold;

    if (out.decayed) {
        out.amplitude = max_dev;
        return out;
    }
    if (maxima_t.size() < 2)
        throw Inconclusive("measure: fewer than 2 peaks in the window and no decay; extend the horizon");

    std::vector<double> swings;
    for (std::size_t i = 0; i + 1 < ext.size(); ++i) swings.push_back(0.5 * std::abs(ext[i + 1].value - ext[i].value));
    double sum = 0.0;
    for (double s : swings) sum += s;
    out.amplitude = sum / double(swings.size());
    out.period = (maxima_t.back() - maxima_t.front()) / double(maxima_t.size() - 1);

    if (swings.size() >= 5) {
        auto tail_begin = swings.end() - 5;
        auto [lo, hi] = std::minmax_element(tail_begin, swings.end());
        double mean = 0.0;
        for (auto it = tail_begin; it != swings.end(); ++it) mean += *it / 5.0;
        out.converged = mean > 0.0 && (*hi - *lo) / mean < 0.01;
    }
    return out;
}

double measured_frequency(const OscillationMeasurement& m) {
    if (!m.converged || !(m.period > 0.0)) throw StateError("measured_frequency: measurement has not converged");
    return 2.0 * std::numbers::pi / m.period;
}

}  // namespace qvel
