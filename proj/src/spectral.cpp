#include "qvel/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qvel/errors.hpp"

namespace qvel {

namespace {

constexpr double kPi = std::numbers::pi;

double gain(const SystemParams& p) { return p.load() / p.n_queues; }

}  // namespace

cplx characteristic_residual(cplx root, const SystemParams& p) {
    return -root - gain(p) * (1.0 + p.delta * root) * std::exp(-root * p.delay) - p.mu;
}

cplx characteristic_derivative(cplx root, const SystemParams& p) {
    const cplx e = std::exp(-root * p.delay);
    return -1.0 - gain(p) * e * (p.delta - p.delay * (1.0 + p.delta * root));
}

std::optional<double> omega_cr(const SystemParams& p) {
    p.validate();
    const double lt = p.load(), n = p.n_queues;
    const double num = lt * lt - n * n * p.mu * p.mu;
    const double den = n * n - p.delta * p.delta * lt * lt;
    if (den == 0.0) return std::nullopt;
    const double r = num / den;
    if (!(r > 0.0) || !std::isfinite(r)) return std::nullopt;
    return std::sqrt(r);
}

double delta_cr(const SystemParams& p, int root_index) {
    if (root_index < 0) throw DomainError("delta_cr: root_index must be nonnegative");
    const auto w = omega_cr(p);
    if (!w) throw UnsupportedRegime("delta_cr: no purely imaginary crossing for these parameters");
    const double lt = p.load(), n = p.n_queues;
    double c = -(p.delta * lt * lt + n * n * p.mu) / (n * lt * (1.0 + p.delta * p.mu));
    if (std::abs(c) > 1.0 + 1e-12)
        throw NumericDomainError("delta_cr: arccos argument " + std::to_string(c) + " outside [-1, 1]");
    c = std::clamp(c, -1.0, 1.0);
    double angle = std::acos(c);
    if (p.delta * p.mu > 1.0) angle = 2.0 * kPi - angle;
    return (angle + 2.0 * kPi * root_index) / *w;
}

double crossing_rate(const SystemParams& p, const HopfPoint& at) {
    const double lt2 = p.load() * p.load(), n2 = double(p.n_queues) * p.n_queues;
    const double d = p.delta, mu = p.mu, w = at.omega_cr, D = at.delta_cr;
    const double dw2 = 1.0 + d * d * w * w;
    const double num = (n2 - d * d * lt2) * dw2 * w * w;
    const double den = lt2 * dw2 * ((d - D) * (d - D) + d * d * D * D * w * w) +
                       n2 * (1.0 - 2.0 * d * mu + 2.0 * D * mu + d * d * w * w * (2.0 * D * mu - 1.0));
    if (!(den > 1e-14)) throw NumericDegeneracy("crossing_rate: denominator " + std::to_string(den) + " not positive");
    return num / den;
}

HopfPoint hopf_point(const SystemParams& p, int root_index) {
    HopfPoint hp;
    hp.root_index = root_index;
    hp.delta_cr = delta_cr(p, root_index);
    hp.omega_cr = *omega_cr(p);
    hp.crossing_rate = crossing_rate(p, hp);
    return hp;
}

CharacteristicRoot find_root_near(const SystemParams& p, cplx seed) {
    p.validate();
    cplx r = seed;
    cplx f = characteristic_residual(r, p);
    double damping = 1.0;
    for (int it = 0; it < 100 && std::abs(f) >= 1e-9; ++it) {
        const cplx df = characteristic_derivative(r, p);
        if (df == 0.0 || !std::isfinite(std::abs(df))) break;
        const cplx step = -f / df;
        damping = std::min(1.0, 2.0 * damping);
        cplx trial;
        cplx f_trial;
        for (int halving = 0; halving < 40; ++halving, damping *= 0.5) {
            trial = r + damping * step;
            f_trial = characteristic_residual(trial, p);
            if (std::isfinite(std::abs(f_trial)) && std::abs(f_trial) < std::abs(f)) break;
        }
        r = trial;
        f = f_trial;
        if (!std::isfinite(std::abs(f))) break;
    }
    // polish: a couple of undamped steps tighten the last digits
    for (int it = 0; it < 3 && std::isfinite(std::abs(f)) && std::abs(f) < 1e-6; ++it) {
        const cplx df = characteristic_derivative(r, p);
        const cplx trial = r - f / df;
        const cplx f_trial = characteristic_residual(trial, p);
        if (!(std::abs(f_trial) < std::abs(f))) break;
        r = trial;
        f = f_trial;
    }
    const double res = std::abs(f);
    if (!(res < 1e-9)) throw NotFound("find_root_near: Newton did not converge from the given seed");
    return {r.real(), r.imag(), res};
}

std::vector<CharacteristicRoot> scan_right_half_plane(const SystemParams& p) {
    p.validate();
    if (p.delay <= 0.0) {
        // Phi is affine in R: a single real root
        const double g = gain(p);
        const double r = -(p.mu + g) / (1.0 + p.delta * g);
        std::vector<CharacteristicRoot> out;
        if (r >= 0.0) out.push_back({r, 0.0, std::abs(characteristic_residual(r, p))});
        return out;
    }
    // large roots satisfy |1 + delta R| e^{-a delay} ~ |R| N / (lambda theta), so their real part
    // approaches log(delta lambda theta / N) / delay
    const double ratio = p.delta * gain(p);
    const double a_max = 1.0 + p.mu + gain(p) * (1.0 + p.delta) + 2.0 * std::max(0.0, std::log(ratio)) / p.delay;
    constexpr int kReal = 12, kImag = 40;

    std::vector<CharacteristicRoot> found;
    for (int i = 0; i < kReal; ++i) {
        const double a = 0.05 + (a_max - 0.05) * i / (kReal - 1);
        for (int j = 0; j <= kImag; ++j) {
            const double b = j * kPi / p.delay;
            try {
                auto root = find_root_near(p, {a, b});
                if (root.real_part < -1e-9) continue;
                if (root.imag_part < 0) root.imag_part = -root.imag_part;  // report the upper member of the pair
                found.push_back(root);
            } catch (const NotFound&) {
            }
        }
    }
    std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.residual < y.residual; });
    std::vector<CharacteristicRoot> unique;
    for (const auto& r : found) {
        bool dup = std::any_of(unique.begin(), unique.end(),
                               [&](const auto& u) { return std::abs(u.value() - r.value()) < 1e-6; });
        if (!dup) unique.push_back(r);
    }
    std::sort(unique.begin(), unique.end(), [](const auto& x, const auto& y) {
        return x.real_part != y.real_part ? x.real_part > y.real_part : x.imag_part < y.imag_part;
    });
    return unique;
}

}  // namespace qvel
