#include <cstdio>
#include <ostream>

#include "qvel/amplitude.hpp"
#include "qvel/design.hpp"
#include "qvel/errors.hpp"
#include "qvel/harness.hpp"
#include "qvel/spectral.hpp"

namespace qvel {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string stability_label(StabilityRegion r) {
    if (always_stable(r)) return "always-stable";
    if (never_stable(r)) return "never-stable";
    if (r == StabilityRegion::EdgeMarginal) return "marginal";
    return "stable-below-critical-delay";
}

}  // namespace

json analyze_report(const SystemParams& p, int branches) {
    p.validate();
    const auto region = classify_region(p);
    json out;
    out["params"] = to_json(p);
    out["region"] = std::string(to_string(region));
    out["stability"] = stability_label(region);
    out["equilibrium"] = equilibrium(p);

    const auto w = omega_cr(p);
    const bool crossing = w && region != StabilityRegion::EdgeMarginal;
    if (crossing) {
        out["omega_cr"] = *w;
        json points = json::array();
        for (int k = 0; k < branches; ++k) {
            const auto hp = hopf_point(p, k);
            points.push_back({{"root_index", k}, {"delta_cr", hp.delta_cr}, {"crossing_rate", hp.crossing_rate}});
        }
        out["hopf_points"] = points;
    }
    if (region == StabilityRegion::RegionD) out["stable_at_delay"] = p.delay < delta_cr(p, 0);
    else if (always_stable(region)) out["stable_at_delay"] = true;
    else if (never_stable(region)) out["stable_at_delay"] = false;

    if (p.load() > p.n_queues * p.mu * (1.0 + kBoundaryRelTol)) {
        const auto s = design_summary(p);
        out["design"] = {{"delta_max", s.delta_max},       {"delta_1", s.delta_1},
                         {"delta_2", s.delta_2},           {"delta_0_cr", s.delta_0_cr},
                         {"delta_cr_at_max", s.delta_cr_at_max}, {"Delta_1", s.Delta_1},
                         {"Delta_2", s.Delta_2},           {"delta_cap", s.delta_cap}};
    }

    if (crossing && p.n_queues == 2) {
        const auto sf = slow_flow(p);
        out["slow_flow"] = {{"c1", sf.c1}, {"c2", sf.c2}, {"c3", sf.c3}, {"alpha", sf.alpha}};
        if (std::abs(p.delta * p.mu - 1.0) > kBoundaryRelTol)
            out["hopf_side"] = hopf_side(p) == HopfSide::CycleForLargerDelay ? "cycle-for-larger-delay"
                                                                            : "cycle-for-smaller-delay";
        if (p.delta * p.mu < 1.0 && p.delay > delta_cr(p, 0)) {
            const auto est = second_order_amplitude(p);
            const auto& c = est.coefficients;
            out["amplitude"] = {{"first_order", est.first_order},
                                {"second_order", est.second_order},
                                {"omega0", est.omega0},
                                {"omega_corrected", est.omega_corrected},
                                {"coefficients",
                                 {{"A", c.A}, {"omega1", c.omega1}, {"a1", c.a1}, {"a2", c.a2}, {"a3", c.a3}, {"a4", c.a4}}}};
            if (region == StabilityRegion::RegionD) {
                try {
                    const auto m = delta_amp(p);
                    out["delta_amp"] = {{"delta", m.delta},
                                        {"amplitude", m.amplitude},
                                        {"stabilizing", m.stabilizing},
                                        {"search_upper", m.search_upper}};
                } catch (const UnsupportedRegime&) {
                    // expansion invalid for this delay: leave the field out
                }
            }
        }
    }
    return out;
}

json measurement_json(const OscillationMeasurement& m) {
    json out = {{"amplitude", m.amplitude}, {"converged", m.converged}, {"decayed", m.decayed}, {"peaks", m.peaks}};
    if (m.period > 0.0) out["period"] = m.period;
    if (m.converged) out["frequency"] = measured_frequency(m);
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const int n = tr.n_queues();
    os << 't';
    for (int i = 1; i <= n; ++i) os << ",q" << i;
    for (int i = 1; i <= n; ++i) os << ",dq" << i;
    os << '\n';
    for (std::size_t k = 0; k < tr.size(); ++k) {
        os << format_double(tr.times[k]);
        for (double v : tr.value(k)) os << ',' << format_double(v);
        for (double v : tr.derivative(k)) os << ',' << format_double(v);
        os << '\n';
    }
}

json trajectory_json(const Trajectory& tr) {
    json q = json::array(), dq = json::array();
    for (std::size_t k = 0; k < tr.size(); ++k) {
        auto v = tr.value(k);
        auto d = tr.derivative(k);
        q.push_back(std::vector<double>(v.begin(), v.end()));
        dq.push_back(std::vector<double>(d.begin(), d.end()));
    }
    return {{"params", to_json(tr.params)}, {"t", tr.times}, {"q", q}, {"dq", dq}};
}

}  // namespace qvel
