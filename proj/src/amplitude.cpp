#include "qvel/amplitude.hpp"

#include <cmath>
#include <string>

#include "qvel/errors.hpp"
#include "qvel/spectral.hpp"

namespace qvel {

namespace {

struct Onset {
    double omega;
    double delay;  // first critical delay
};

Onset require_two_queue_onset(const SystemParams& p, const char* who) {
    p.validate();
    if (p.n_queues != 2) throw UnsupportedRegime(std::string(who) + ": amplitude theory covers two queues only");
    const auto w = omega_cr(p);
    if (!w) throw UnsupportedRegime(std::string(who) + ": no Hopf crossing for these parameters");
    return {*w, delta_cr(p, 0)};
}

void require_lower_branch(const SystemParams& p, const char* who) {
    if (p.delta * p.mu >= 1.0)
        throw UnsupportedRegime(std::string(who) + ": the amplitude formulas assume delta*mu < 1");
}

double checked(double v, const char* name) {
    if (!std::isfinite(v)) throw NumericDegeneracy(std::string("second_order_amplitude: coefficient ") + name + " is not finite");
    return v;
}

}  // namespace

SlowFlowCoefficients slow_flow(const SystemParams& p) {
    const auto [w, d0] = require_two_queue_onset(p, "slow_flow");
    const double mu = p.mu, d = p.delta, th = p.theta, lt = p.load();
    const double w2 = w * w;
    const double P = (mu * mu + w2) * (1 + d * d * w2);
    const double Q = mu - d * mu * mu - d * w2 + d * d * mu * w2;

    SlowFlowCoefficients sf;
    sf.alpha = p.delay - d0;
    sf.c1 = th * th * (mu * mu + w2) * (P * d0 + Q);
    sf.c2 = 4 * sf.alpha * lt * lt * w2 * (1 - d * d * mu * mu);
    sf.c3 = 4 * lt * lt * (P * d0 * d0 + 2 * Q * d0 + (1 - d * mu) * (1 - d * mu));
    if (!(sf.c1 > 0)) throw InternalContradiction("slow_flow: c1 = " + std::to_string(sf.c1) + " is not positive");
    if (!(sf.c3 > 0)) throw InternalContradiction("slow_flow: c3 = " + std::to_string(sf.c3) + " is not positive");
    return sf;
}

double first_order_amplitude(const SystemParams& p) {
    const auto [w, d0] = require_two_queue_onset(p, "first_order_amplitude");
    require_lower_branch(p, "first_order_amplitude");
    const double d1 = p.delay - d0;
    if (d1 <= 0.0) return 0.0;
    const double th = p.theta, mu = p.mu, d = p.delta, lt = p.load(), lt2 = lt * lt;
    const double num = 4 * d1 * (lt2 - 4 * mu * mu) * std::pow(4 - d * d * lt2, 2);
    const double den = th * th * (1 - d * d * mu * mu) *
                       (16 * mu + lt2 * (4 * d0 - 4 * d + d * d * d * lt2 - 4 * d * d * mu - 4 * d * d * d0 * mu * mu));
    return 0.5 * std::sqrt(num / den);
}

AmplitudeEstimate second_order_amplitude(const SystemParams& p) {
    const auto [w, D] = require_two_queue_onset(p, "second_order_amplitude");
    require_lower_branch(p, "second_order_amplitude");

    AmplitudeEstimate est;
    est.omega0 = w;
    est.omega_corrected = w;
    const double D1 = p.delay - D;
    if (D1 <= 0.0) return est;

    const double th = p.theta, lam = p.lambda, mu = p.mu, d = p.delta;
    const double th2 = th * th, lam2 = lam * lam, lt2 = th2 * lam2, mu2 = mu * mu;
    const double d2 = d * d, w2 = w * w;
    const double dw = d2 * w2 + 1;
    const double mw = mu2 + w2;

    auto& c = est.coefficients;
    c.A = 2 * first_order_amplitude(p);
    const double A = checked(c.A, "A");
    const double A2 = A * A, A3 = A2 * A;

    c.omega1 = checked(4 * D1 * lt2 * (d2 * mu2 - 1) * std::sqrt(lt2 - 4 * mu2) /
                           (std::sqrt(4 - d2 * lt2) *
                            (lt2 * (d * (d2 * lt2 - 4 * d * mu * (D * mu + 1) - 4) + 4 * D) + 16 * mu)),
                       "omega1");
    const double W1 = c.omega1;

    const double den = lt2 * lt2 * dw * dw * dw * (mu2 + 9 * w2) + 16 * (9 * d2 * w2 + 1) * mw * mw * mw +
                       8 * lt2 *
                           (-9 * d2 * d2 * w2 * w2 * w2 * w2 - 6 * mu2 * w2 * (d2 * mu2 + 1) +
                            2 * d2 * w2 * w2 * w2 * (d * mu * (9 * d * mu - 32) + 9) +
                            3 * w2 * w2 * (d2 * d2 * mu2 * mu2 - 12 * d2 * mu2 + 1) - mu2 * mu2);
    c.a1 = checked(-(2 * A3 * th2 * w2 * w * (lt2 * mu * dw * dw * dw - 4 * d2 * d * mw * mw * mw)) / den, "a1");
    c.a3 = -c.a1 / 3;
    c.a4 = checked(-(A3 * th2 *
                     (lt2 * dw * dw * dw * (mu2 * mu2 + 6 * mu2 * w2 - 3 * w2 * w2) +
                      4 * (3 * d2 * d2 * w2 * w2 - 6 * d2 * w2 - 1) * mw * mw * mw)) /
                       (12 * den),
                   "a4");
    const double a1 = c.a1, a3 = c.a3, a4 = c.a4;

    // shared quadratic-in-w forms of the secular condition
    const double g1 = d2 * D * w2 * w2 + w2 * (d * (d * mu * (D * mu + 1) - 1) + D) + mu * (-d * mu + D * mu + 1);
    const double num =
        A3 * A2 * th2 * th2 * dw * dw *
            (d2 * mu * w2 + mu2 * (d * (d * D * w2 - 1) + D) + w2 * (d * (d * D * w2 - 1) + D) + mu) -
        12 * A3 * th2 * w *
            (W1 * (d * (3 * d2 * d * D * w2 * w2 + d * w2 * (d * (d * mu * (2 * D * mu + 3) - 3) + 4 * D) +
                        d * mu * (-2 * d * mu + 2 * D * mu + 3) - 1) +
                   D) -
             D1 * w * (d2 * mu2 - 1) * dw) +
        12 * A2 * th2 *
            (a1 * w * (d2 * mu2 - 1) * dw +
             a3 * w * (d2 * (w2 * (d * mu * (-3 * d * mu + 8 * D * mu + 8) - 5) + 8 * d * D * w2 * w2 + mu2) - 1) +
             a4 * (3 * d2 * d2 * D * w2 * w2 * w2 + 3 * d2 * w2 * w2 * (d * (d * mu * (D * mu + 1) - 1) - 2 * D) +
                   w2 * (d * (d * mu * (5 * d * mu - 6 * D * mu - 6) + 1) - D) + mu * (d * mu - D * mu - 1))) -
        96 * A *
            (2 * D1 * w * W1 *
                 (mu * (mu * (2 * d2 - 2 * d * D + D * D) - d + D) + d2 * D * D * w2 * w2 +
                  D * w2 * (d * (d * mu * (D * mu + 1) - 2) + D) - 1) +
             D * W1 * W1 *
                 (d2 * D * D * w2 * w2 + D * w2 * (d * (d * mu * (D * mu + 1) - 3) + D) +
                  mu * (2 * d - D) * (d * mu - D * mu - 1)) +
             D1 * D1 * w2 * g1) -
        192 * a1 *
            (W1 * (d2 * D * D * w2 * w2 + D * w2 * (d * (d * mu * (D * mu + 2) - 2) + D) +
                   (-d * mu + D * mu + 1) * (-d * mu + D * mu + 1)) +
             D1 * w * g1);
    const double dena2 = 3 * A2 * th2 * dw * g1 + 16 * D1 * w2 * (d2 * mu2 - 1);
    c.a2 = checked(num / (12 * dena2), "a2");

    est.first_order = 0.5 * A;
    est.second_order = checked(0.5 * (A + c.a2 + c.a4), "amplitude");
    est.omega_corrected = w + W1;
    return est;
}

HopfSide hopf_side(const SystemParams& p) {
    p.validate();
    const double s = p.delta * p.mu;
    if (std::abs(s - 1.0) <= kBoundaryRelTol) throw DegenerateRegime("hopf_side: delta*mu = 1, c2 vanishes identically");
    if (!omega_cr(p)) throw UnsupportedRegime("hopf_side: no Hopf crossing for these parameters");
    return s < 1.0 ? HopfSide::CycleForLargerDelay : HopfSide::CycleForSmallerDelay;
}

}  // namespace qvel
