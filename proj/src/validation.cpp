#include "qvel/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>

#include "qvel/amplitude.hpp"
#include "qvel/design.hpp"
#include "qvel/errors.hpp"
#include "qvel/integrator.hpp"
#include "qvel/metrics.hpp"
#include "qvel/solve.hpp"
#include "qvel/spectral.hpp"

namespace qvel {

namespace {

std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

SystemParams baseline_params() { return SystemParams{}; }  // N=2, lambda=10, mu=1, theta=1, delta=0

// Solves Re/Im of Phi(i w) = 0 for (w, delay) by Newton with a finite-difference Jacobian.
// Kept independent of the closed forms on purpose.
std::pair<double, double> imaginary_axis_root(const SystemParams& p, double w, double delay) {
    const double g = p.load() / p.n_queues;
    auto F = [&](double w_, double d_) {
        const double c = std::cos(w_ * d_), s = std::sin(w_ * d_);
        return std::pair{-p.mu - g * (c + p.delta * w_ * s), -w_ - g * (p.delta * w_ * c - s)};
    };
    for (int it = 0; it < 60; ++it) {
        auto [f1, f2] = F(w, delay);
        if (std::hypot(f1, f2) < 1e-14) break;
        const double hw = 1e-7 * std::max(1.0, w), hd = 1e-7 * std::max(1.0, delay);
        auto [a1, a2] = F(w + hw, delay);
        auto [b1, b2] = F(w, delay + hd);
        const double j11 = (a1 - f1) / hw, j21 = (a2 - f2) / hw, j12 = (b1 - f1) / hd, j22 = (b2 - f2) / hd;
        const double det = j11 * j22 - j12 * j21;
        w -= (f1 * j22 - f2 * j12) / det;
        delay -= (j11 * f2 - j21 * f1) / det;
    }
    return {w, delay};
}

OscillationMeasurement simulate(const SystemParams& p, double epsilon, double horizon, double window = 0.25,
                                PerturbationMode mode = PerturbationMode::Antisymmetric) {
    auto traj = integrate(p, make_history(EquilibriumPerturbed{epsilon, mode}, p), {horizon, 64});
    return measure(traj, window);
}

CriterionResult hopf_residual() {
    double worst = 0.0;
    int points = 0;
    for (int n : {2, 3, 5})
        for (double ratio : {1.25, 2.5, 5.0, 10.0})
            for (double mu : {0.2, 0.5, 1.0, 2.0})
                for (double frac : {0.1, 0.5, 0.9}) {
                    SystemParams p;
                    p.n_queues = n;
                    p.lambda = ratio * n * mu;
                    p.mu = mu;
                    p.theta = 1.0;
                    p.delta = frac * p.ratio_edge();
                    if (classify_region(p) != StabilityRegion::RegionD) throw InternalContradiction("grid left RegionD");
                    const double w = *omega_cr(p);
                    for (int k = 0; k < 3; ++k) {
                        const double r = std::abs(characteristic_residual({0.0, w}, p.with_delay(delta_cr(p, k))));
                        worst = std::max(worst, r);
                        ++points;
                    }
                }
    return {1, "hopf-residual", worst < 1e-9, fmt("max |Phi(i w_cr, D_cr,k)| = %.3e over %d points (< 1e-9)", worst, points)};
}

CriterionResult stability_flip() {
    const auto p = baseline_params();
    const double dcr = delta_cr(p, 0);
    const auto [w_or, d_or] = imaginary_axis_root(p, 5.0, 0.35);
    const bool oracle_ok = std::abs(d_or - dcr) < 1e-9 && std::abs(w_or - *omega_cr(p)) < 1e-9;

    auto below = integrate(p.with_delay(0.9 * dcr), make_history(EquilibriumPerturbed{0.1}, p.with_delay(0.9 * dcr)),
                           {200.0, 64});
    const auto mb = measure(below);
    const double final_dev = std::abs(below.values[(below.size() - 1) * 2] - equilibrium(p));
    const auto ma = simulate(p.with_delay(1.1 * dcr), 0.1, 200.0);
    const bool ok = oracle_ok && mb.decayed && final_dev < 1e-3 && !ma.decayed && ma.amplitude > 0.05;
    return {2, "stability-flip", ok,
            fmt("D_cr = %.6f (2D Newton oracle %.6f); 0.9 D_cr: max dev on [150,200] %.2e, decayed=%d; "
                "1.1 D_cr: amplitude %.4f (> 0.05)",
                dcr, d_or, mb.amplitude, int(mb.decayed), ma.amplitude)};
}

CriterionResult frequency_match() {
    const auto p = baseline_params();
    const double w0 = *omega_cr(p);
    const auto m = simulate(p.with_delay(1.02 * delta_cr(p, 0)), 0.1, 600.0);
    const double w = m.converged ? measured_frequency(m) : 0.0;
    const double rel = std::abs(w - w0) / w0;
    return {3, "frequency-match", m.converged && rel < 0.05,
            fmt("measured %.5f vs sqrt(24) = %.5f, rel diff %.4f (< 0.05), converged=%d", w, w0, rel, int(m.converged))};
}

CriterionResult supercritical_scaling() {
    const auto p = baseline_params();
    const double dcr = delta_cr(p, 0);
    const auto m1 = simulate(p.with_delay(dcr + 0.01), 0.1, 1500.0, 0.1);
    const auto m4 = simulate(p.with_delay(dcr + 0.04), 0.1, 1500.0, 0.1);
    const double ratio = m4.amplitude / m1.amplitude;
    return {4, "supercritical-scaling", m1.converged && m4.converged && std::abs(ratio - 2.0) <= 0.2,
            fmt("amp(0.01) = %.5f, amp(0.04) = %.5f, ratio %.4f (2 +- 0.2)", m1.amplitude, m4.amplitude, ratio)};
}

CriterionResult first_order_match() {
    const auto p = baseline_params().with_delay(delta_cr(baseline_params(), 0) + 0.2);
    const double theory = first_order_amplitude(p);
    const auto m = simulate(p, 0.1, 400.0);
    const double rel = std::abs(m.amplitude - theory) / theory;
    return {5, "first-order-amplitude", m.converged && rel <= 0.15 && std::abs(theory - 1.383) < 1e-3,
            fmt("simulated %.5f vs R1/2 = %.5f, rel diff %.4f (<= 0.15)", m.amplitude, theory, rel)};
}

CriterionResult second_order_superiority() {
    double e1 = 0.0, e2 = 0.0, r1 = 0.0, r2 = 0.0;
    std::string worst;
    bool all_converged = true;
    for (double delta : {0.0, 0.05, 0.10, 0.15, 0.19})
        for (double alpha : {0.05, 0.1, 0.2}) {
            auto p = baseline_params().with_delta(delta);
            p.delay = delta_cr(p, 0) + alpha;
            const auto est = second_order_amplitude(p);
            const auto m = simulate(p, 0.1, std::max(400.0, 600.0 * p.delay));
            all_converged = all_converged && m.converged;
            const double a = std::abs(est.first_order - m.amplitude), b = std::abs(est.second_order - m.amplitude);
            e1 = std::max(e1, a);
            if (b > e2) {
                e2 = b;
                worst = fmt("delta=%.2f alpha=%.2f: sim %.4f, o2 %.4f", delta, alpha, m.amplitude, est.second_order);
            }
            r1 = std::max(r1, a / m.amplitude);
            r2 = std::max(r2, b / m.amplitude);
        }
    const double ratio = e2 / e1;
    return {6, "second-order-superiority", all_converged && ratio <= 0.2,
            fmt("max abs error o1 %.4f, o2 %.4f, ratio %.3f (<= 0.2); worst o2 at %s; relative-error ratio %.3f",
                e1, e2, ratio, worst.c_str(), r2 / r1)};
}

CriterionResult design_orderings() {
    int checked = 0, failures = 0;
    double worst_gap = 0.0;
    for (double lambda : {4.0, 6.0, 10.0, 15.0, 25.0})
        for (double mu : {0.2, 0.5, 1.0, 1.5, 1.9}) {
            SystemParams p;
            p.lambda = lambda;
            p.mu = mu;
            const auto s = design_summary(p);
            const double edge = p.ratio_edge();
            const bool order = 0 < s.delta_1 && s.delta_1 < s.delta_max && s.delta_max < s.delta_2 &&
                               s.delta_2 < s.delta_cap && s.delta_cap < edge && s.Delta_1 < s.delta_cr_at_max &&
                               s.delta_cr_at_max < s.Delta_2;
            const auto gold = golden_section([&](double d) { return -delta_cr_of(p, d); }, 0.0,
                                             (1 - 1e-6) * edge, 1e-10);
            const double gap = std::abs(gold.x - s.delta_max);
            worst_gap = std::max(worst_gap, gap);
            failures += !order || gap > 1e-6;
            ++checked;
        }
    return {7, "design-orderings", failures == 0,
            fmt("%d/%d grid points ordered; max |delta_max - golden argmax| = %.2e (< 1e-6)", checked - failures,
                checked, worst_gap)};
}

CriterionResult concavity() {
    const auto p = baseline_params();
    const double edge = p.ratio_edge();
    const double at0 = d_delta_cr_d_delta(p, 0.0);
    double prev = INFINITY, worst_rel = 0.0;
    bool decreasing = true;
    const double h = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const double d = 0.99 * edge * i / 99.0;
        const double v = d_delta_cr_d_delta(p, d);
        decreasing = decreasing && v < prev;
        prev = v;
        // fourth-order central stencil (one-sided points stay inside the domain)
        const double dd = std::max(d, 2 * h);
        const double fd = (-delta_cr_of(p, dd + 2 * h) + 8 * delta_cr_of(p, dd + h) - 8 * delta_cr_of(p, dd - h) +
                           delta_cr_of(p, dd - 2 * h)) /
                          (12 * h);
        const double exact = d_delta_cr_d_delta(p, dd);
        worst_rel = std::max(worst_rel, std::abs(fd - exact) / std::max(std::abs(exact), 1e-300));
    }
    return {8, "concavity", decreasing && std::abs(at0 - 1.0) < 1e-10 && worst_rel < 1e-6,
            fmt("strictly decreasing=%d on 100 points; slope at 0 minus 1 = %.1e; max rel FD mismatch %.2e (< 1e-6)",
                int(decreasing), at0 - 1.0, worst_rel)};
}

CriterionResult conservation() {
    auto p = baseline_params();
    p.delay = 1.0;
    auto run = [&](int m) {
        return conservation_residual(
            integrate(p, make_history(EquilibriumPerturbed{0.5, PerturbationMode::Uniform}, p), {10.0, m}));
    };
    const double e64 = run(64), e128 = run(128);
    const double order = std::log2(e64 / e128);
    return {9, "conservation", e64 < 1e-8 && order >= 3.7,
            fmt("residual %.3e at 64 steps/delay (< 1e-8), %.3e at 128; observed order %.2f (>= 3.7)", e64, e128, order)};
}

CriterionResult harm_threshold() {
    const auto p = baseline_params();
    const double cap = delta_cap(p), base = delta_cr_of(p, 0.0);
    const double below = delta_cr_of(p, cap - 0.01) - base, above = delta_cr_of(p, cap + 0.01) - base;
    return {10, "harm-threshold", below > 0 && above < 0,
            fmt("delta_cap = %.6f; D_cr - D_cr(0) = %.4e at cap-0.01, %.4e at cap+0.01", cap, below, above)};
}

CriterionResult amplitude_minimizer() {
    const auto p = baseline_params().with_delay(0.5);
    const auto second = delta_amp(p);
    const auto first = delta_amp_first_order(p);
    const bool ok = !second.stabilizing && second.delta > 0.08 && second.delta < 0.14 && first.delta > 0.17;
    return {11, "amplitude-minimizer", ok,
            fmt("second-order minimizer %.4f (in (0.08, 0.14)), first-order minimizer %.4f (> 0.17)", second.delta,
                first.delta)};
}

CriterionResult region_behavior() {
    int runs = 0, decayed = 0;
    SystemParams b;
    b.lambda = 1.0;
    for (double delta : {0.0, 1.0})
        for (double delay : {0.1, 1.0, 5.0}) {
            auto p = b.with_delta(delta).with_delay(delay);
            if (classify_region(p) != StabilityRegion::RegionB) throw InternalContradiction("expected RegionB");
            const double qs = equilibrium(p);
            std::vector<InitialHistory> kinds{EquilibriumPerturbed{0.1}, EquilibriumPerturbed{0.45},
                                              EquilibriumPerturbed{0.3, PerturbationMode::Uniform},
                                              ConstantHistory{{2 * qs, 0.0}}};
            for (const auto& k : kinds) {
                auto m = measure(integrate(p, make_history(k, p)));
                decayed += m.decayed;
                ++runs;
            }
        }
    auto e = baseline_params().with_delta(0.2).with_delay(0.5);
    bool edge_ok = classify_region(e) == StabilityRegion::EdgeUnstable;
    std::string edge_detail;
    try {
        auto m = simulate(e, 0.1, default_horizon(e));
        edge_ok = edge_ok && !m.decayed;
        edge_detail = fmt("amplitude %.4f", m.amplitude);
    } catch (const IntegrationDiverged& err) {
        edge_detail = fmt("diverged at t = %.3f", err.last_valid_time());
    }
    return {12, "region-behavior", edge_ok && decayed == runs,
            fmt("RegionB: %d/%d runs decayed; EdgeUnstable at delay 0.5 does not decay (%s)", decayed, runs,
                edge_detail.c_str())};
}

}  // namespace

std::vector<CriterionResult> run_acceptance() {
    const std::vector<std::pair<int, std::function<CriterionResult()>>> checks{
        {1, hopf_residual},         {2, stability_flip},   {3, frequency_match},     {4, supercritical_scaling},
        {5, first_order_match},     {6, second_order_superiority}, {7, design_orderings}, {8, concavity},
        {9, conservation},          {10, harm_threshold},  {11, amplitude_minimizer}, {12, region_behavior}};
    static const char* names[] = {"",
                                  "hopf-residual",
                                  "stability-flip",
                                  "frequency-match",
                                  "supercritical-scaling",
                                  "first-order-amplitude",
                                  "second-order-superiority",
                                  "design-orderings",
                                  "concavity",
                                  "conservation",
                                  "harm-threshold",
                                  "amplitude-minimizer",
                                  "region-behavior"};
    std::vector<CriterionResult> out;
    for (const auto& [id, check] : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r = {id, names[id], false, std::string("exception: ") + e.what()};
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    return fmt("[%s] %2d %-26s %s", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.detail.c_str());
}

}  // namespace qvel
