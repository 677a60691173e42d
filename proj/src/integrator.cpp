#include "qvel/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qvel/errors.hpp"

namespace qvel {

namespace {

struct Hermite {
    double h00, h10, h01, h11;     // value weights (h10/h11 already scaled by cell width)
    double d00, d10, d01, d11;     // derivative weights
};

Hermite hermite_weights(double s, double width) {
    const double s2 = s * s, s3 = s2 * s;
    return {2 * s3 - 3 * s2 + 1,
            (s3 - 2 * s2 + s) * width,
            -2 * s3 + 3 * s2,
            (s3 - s2) * width,
            (6 * s2 - 6 * s) / width,
            3 * s2 - 4 * s + 1,
            (6 * s - 6 * s2) / width,
            3 * s2 - 2 * s};
}

void hermite_eval(const Hermite& w, std::span<const double> q0, std::span<const double> d0,
                  std::span<const double> q1, std::span<const double> d1, std::span<double> q,
                  std::span<double> dq) {
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = w.h00 * q0[i] + w.h10 * d0[i] + w.h01 * q1[i] + w.h11 * d1[i];
        dq[i] = w.d00 * q0[i] + w.d10 * d0[i] + w.d01 * q1[i] + w.d11 * d1[i];
    }
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

// Solves v = lambda p(q + delta v) - mu q for v by Newton. The Jacobian of the residual is
// -(I + c (diag p - p p^T)) with c = lambda theta delta, inverted by Sherman-Morrison.
class ImplicitRate {
public:
    explicit ImplicitRate(const SystemParams& p)
        : p_(p), n_(std::size_t(p.n_queues)), info_(n_), prob_(n_), g_(n_), dinv_g_(n_), dinv_p_(n_) {}

    void solve(std::span<const double> q, std::span<double> v) {
        const double c = p_.lambda * p_.theta * p_.delta;
        std::vector<double> zero(n_, 0.0);
        rhs_into(q, q, zero, p_, info_, v);  // delta = 0 guess
        if (p_.delta == 0.0) return;
        for (int it = 0; it < 50; ++it) {
            for (std::size_t i = 0; i < n_; ++i) info_[i] = q[i] + p_.delta * v[i];
            mnl_probabilities(info_, p_.theta, prob_);
            double gnorm = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                g_[i] = p_.lambda * prob_[i] - p_.mu * q[i] - v[i];
                gnorm = std::max(gnorm, std::abs(g_[i]));
            }
            double pg = 0.0, pp = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                double dinv = 1.0 / (1.0 + c * prob_[i]);
                dinv_g_[i] = dinv * g_[i];
                dinv_p_[i] = dinv * prob_[i];
                pg += prob_[i] * dinv_g_[i];
                pp += prob_[i] * dinv_p_[i];
            }
            const double coef = c * pg / (1.0 - c * pp);
            double step = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                double dv = dinv_g_[i] + coef * dinv_p_[i];
                v[i] += dv;
                step = std::max(step, std::abs(dv));
            }
            if (step <= 1e-15 * (1.0 + gnorm) || gnorm == 0.0) return;
        }
    }

private:
    const SystemParams& p_;
    std::size_t n_;
    std::vector<double> info_, prob_, g_, dinv_g_, dinv_p_;
};

Trajectory integrate_ode(const SystemParams& params, const HistorySegment& history, double horizon) {
    const int n = params.n_queues;
    const double h = 0.01 / params.mu;
    const auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));

    Trajectory tr;
    tr.params = params;
    tr.history = history;
    tr.step = h;
    tr.times.resize(steps + 1);
    tr.values.resize((steps + 1) * n);
    tr.derivatives.resize((steps + 1) * n);

    ImplicitRate rate(params);
    std::vector<double> y(n), k1(n), k2(n), k3(n), k4(n), tmp(n);
    auto q0 = history.value_at(0.0);
    std::copy(q0.begin(), q0.end(), y.begin());
    rate.solve(y, k1);
    std::copy(y.begin(), y.end(), tr.values.begin());
    std::copy(k1.begin(), k1.end(), tr.derivatives.begin());

    for (std::size_t s = 0; s < steps; ++s) {
        const double t = double(s) * h;
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
        rate.solve(tmp, k2);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
        rate.solve(tmp, k3);
        for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
        rate.solve(tmp, k4);
        for (int i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (!all_finite(y)) throw IntegrationDiverged("state became non-finite after t = " + std::to_string(t), t);
        rate.solve(y, k1);
        if (!all_finite(k1)) throw IntegrationDiverged("rate became non-finite after t = " + std::to_string(t), t);
        tr.times[s + 1] = double(s + 1) * h;
        std::copy(y.begin(), y.end(), tr.values.begin() + (s + 1) * n);
        std::copy(k1.begin(), k1.end(), tr.derivatives.begin() + (s + 1) * n);
    }
    tr.left_derivatives = tr.derivatives;
    return tr;
}

}  // namespace

HistorySegment::HistorySegment(int n_queues, std::vector<double> times, std::vector<double> values,
                               std::vector<double> derivatives)
    : n_(n_queues), times_(std::move(times)), values_(std::move(values)), derivatives_(std::move(derivatives)) {
    if (n_ < 1) throw DomainError("history: n_queues must be positive");
    if (times_.empty()) throw DomainError("history: no samples");
    if (values_.size() != times_.size() * n_ || derivatives_.size() != times_.size() * n_)
        throw DomainError("history: values/derivatives not congruent with times");
    for (std::size_t k = 1; k < times_.size(); ++k)
        if (!(times_[k] > times_[k - 1])) throw DomainError("history: times must be strictly increasing");
    if (!all_finite(times_) || !all_finite(values_) || !all_finite(derivatives_))
        throw DomainError("history: non-finite sample");
}

void HistorySegment::eval(double t, std::span<double> q, std::span<double> dq) const {
    const double span_tol = 1e-12 * std::max(1.0, end() - start());
    if (t < start() - span_tol || t > end() + span_tol)
        throw DomainError("history: t = " + std::to_string(t) + " outside sampled range");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t j = it == times_.begin() ? 0 : std::size_t(it - times_.begin()) - 1;
    if (j + 1 >= times_.size() || t == times_[j]) {
        auto v = value(j), d = derivative(j);
        std::copy(v.begin(), v.end(), q.begin());
        std::copy(d.begin(), d.end(), dq.begin());
        return;
    }
    const double width = times_[j + 1] - times_[j];
    hermite_eval(hermite_weights((t - times_[j]) / width, width), value(j), derivative(j), value(j + 1),
                 derivative(j + 1), q, dq);
}

std::vector<double> HistorySegment::value_at(double t) const {
    std::vector<double> q(n_), dq(n_);
    eval(t, q, dq);
    return q;
}

HistorySegment make_history(const InitialHistory& kind, const SystemParams& params) {
    params.validate();
    const int n = params.n_queues;
    const double delay = params.delay;

    auto flat = [&](std::vector<double> q) {
        if (int(q.size()) != n) throw DomainError("history: expected " + std::to_string(n) + " queue values");
        for (double x : q)
            if (!std::isfinite(x) || x < 0.0) throw DomainError("history: queue values must be finite and nonnegative");
        std::vector<double> times = delay > 0.0 ? std::vector<double>{-delay, 0.0} : std::vector<double>{0.0};
        std::vector<double> values;
        for (std::size_t k = 0; k < times.size(); ++k) values.insert(values.end(), q.begin(), q.end());
        std::vector<double> derivs(values.size(), 0.0);
        return HistorySegment(n, std::move(times), std::move(values), std::move(derivs));
    };

    if (auto c = std::get_if<ConstantHistory>(&kind)) return flat(c->values);

    if (auto e = std::get_if<EquilibriumPerturbed>(&kind)) {
        if (!std::isfinite(e->epsilon)) throw DomainError("history: epsilon must be finite");
        std::vector<double> q(n, equilibrium(params));
        if (e->mode == PerturbationMode::Uniform) {
            for (double& x : q) x += e->epsilon;
        } else {
            q[0] += e->epsilon;
            q[1] -= e->epsilon;
        }
        return flat(std::move(q));
    }

    const auto& custom = std::get<CustomHistory>(kind).samples;
    if (custom.n_queues() != n) throw DomainError("history: queue count does not match params");
    const double tol = 1e-12 * std::max(1.0, delay);
    if (custom.start() > -delay + tol || std::abs(custom.end()) > tol)
        throw DomainError("history: custom samples must cover [-delay, 0] and end at 0");
    for (std::size_t k = 0; k < custom.size(); ++k)
        for (double x : custom.value(k))
            if (x < 0.0) throw DomainError("history: queue values must be nonnegative");
    return custom;
}

double default_horizon(const SystemParams& params) { return std::max(200.0 / params.mu, 60.0 * params.delay); }

std::vector<double> Trajectory::value_at(double t) const {
    const int n = n_queues();
    if (t < 0.0) return history.value_at(t);
    if (t > end_time() * (1 + 1e-14)) throw DomainError("trajectory: t beyond end of integration");
    std::size_t j = std::min(static_cast<std::size_t>(t / step), size() - 1);
    while (j > 0 && times[j] > t) --j;
    while (j + 1 < size() && times[j + 1] <= t) ++j;
    std::vector<double> q(n), dq(n);
    if (j + 1 >= size() || t == times[j]) {
        auto v = value(j);
        return {v.begin(), v.end()};
    }
    const double width = times[j + 1] - times[j];
    hermite_eval(hermite_weights((t - times[j]) / width, width), value(j), derivative(j),
                 {values.data() + (j + 1) * n, std::size_t(n)},
                 {left_derivatives.data() + (j + 1) * n, std::size_t(n)}, q, dq);
    return q;
}

Trajectory integrate(const SystemParams& params, const HistorySegment& history, IntegrationOptions opts) {
    params.validate();
    const double horizon = opts.horizon > 0.0 ? opts.horizon : default_horizon(params);
    if (!std::isfinite(horizon)) throw DomainError("integrate: horizon must be finite");
    if (opts.steps_per_delay < 8) throw DomainError("integrate: steps_per_delay must be at least 8");
    if (history.n_queues() != params.n_queues) throw DomainError("integrate: history has wrong queue count");
    if (params.delay == 0.0) return integrate_ode(params, history, horizon);

    const int n = params.n_queues;
    const std::size_t un = std::size_t(n);
    const double delay = params.delay;
    const std::size_t m = std::size_t(opts.steps_per_delay);
    const double h = delay / double(m);
    const double tol = 1e-12 * std::max(1.0, delay);
    if (history.start() > -delay + tol || std::abs(history.end()) > tol)
        throw DomainError("integrate: history must cover [-delay, 0]");

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
    Trajectory tr;
    tr.params = params;
    tr.history = history;
    tr.step = h;
    tr.times.resize(steps + 1);
    tr.values.resize((steps + 1) * un);
    tr.derivatives.resize((steps + 1) * un);
    tr.left_derivatives.resize((steps + 1) * un);

    auto node_time = [&](std::size_t k) { return double(k / m) * delay + double(k % m) * h; };
    auto q_at = [&](std::size_t k) { return std::span<double>(tr.values.data() + k * un, un); };
    auto dr_at = [&](std::size_t k) { return std::span<double>(tr.derivatives.data() + k * un, un); };
    auto dl_at = [&](std::size_t k) { return std::span<double>(tr.left_derivatives.data() + k * un, un); };

    std::vector<double> scratch(un), dq_lag(un), q_lag(un), dq_lag_l(un), q_hist0(un), dq_hist0(un);
    std::vector<double> y(un), k2(un), k3(un), k4(un), tmp(un);
    history.eval(0.0, q_hist0, dq_hist0);

    // node 0: value from history, left derivative = f'(0), right derivative from the model
    std::copy(q_hist0.begin(), q_hist0.end(), q_at(0).begin());
    std::copy(dq_hist0.begin(), dq_hist0.end(), dl_at(0).begin());
    history.eval(-delay, q_lag, dq_lag);
    rhs_into(q_at(0), q_lag, dq_lag, params, scratch, dr_at(0));

    // Delayed state at node index k - m, one-sided. Index below zero reads the history.
    auto lagged_node = [&](std::size_t k, bool left, std::span<double> q, std::span<double> dq) {
        if (k < m) {
            history.eval(node_time(k) - delay, q, dq);
            return;
        }
        const std::size_t j = k - m;
        auto v = tr.value(j);
        std::copy(v.begin(), v.end(), q.begin());
        std::span<const double> d;
        if (j == 0 && left) d = dq_hist0;
        else d = left ? dl_at(j) : dr_at(j);
        std::copy(d.begin(), d.end(), dq.begin());
    };

    const Hermite mid = hermite_weights(0.5, h);
    std::size_t k = 0;
    try {
        for (; k < steps; ++k) {
            const double t = node_time(k);
            std::copy(tr.value(k).begin(), tr.value(k).end(), y.begin());
            auto k1 = dr_at(k);

            // delayed state at t + h/2 - delay
            if (k + 1 <= m) {
                history.eval(t + 0.5 * h - delay, q_lag, dq_lag);
            } else {
                const std::size_t j = k - m;
                hermite_eval(mid, tr.value(j), dr_at(j), tr.value(j + 1), dl_at(j + 1), q_lag, dq_lag);
            }
            for (std::size_t i = 0; i < un; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
            rhs_into(tmp, q_lag, dq_lag, params, scratch, k2);
            for (std::size_t i = 0; i < un; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
            rhs_into(tmp, q_lag, dq_lag, params, scratch, k3);

            lagged_node(k + 1, true, q_lag, dq_lag_l);
            for (std::size_t i = 0; i < un; ++i) tmp[i] = y[i] + h * k3[i];
            rhs_into(tmp, q_lag, dq_lag_l, params, scratch, k4);

            auto next = q_at(k + 1);
            for (std::size_t i = 0; i < un; ++i) next[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            if (!all_finite(next)) throw IntegrationDiverged("state became non-finite after t = " + std::to_string(t), t);

            tr.times[k + 1] = node_time(k + 1);
            rhs_into(next, q_lag, dq_lag_l, params, scratch, dl_at(k + 1));
            lagged_node(k + 1, false, q_lag, dq_lag);
            if (std::equal(dq_lag.begin(), dq_lag.end(), dq_lag_l.begin())) {
                std::copy(dl_at(k + 1).begin(), dl_at(k + 1).end(), dr_at(k + 1).begin());
            } else {
                rhs_into(next, q_lag, dq_lag, params, scratch, dr_at(k + 1));
            }
            if (!all_finite(dr_at(k + 1)) || !all_finite(dl_at(k + 1)))
                throw IntegrationDiverged("rate became non-finite after t = " + std::to_string(t), t);
        }
    } catch (const DomainError& e) {
        // softmax rejects non-finite announcements before the state itself overflows
        throw IntegrationDiverged(std::string("integration diverged: ") + e.what(), node_time(k));
    }
    return tr;
}

double conservation_residual(const Trajectory& traj) {
    if (traj.size() == 0) throw DomainError("conservation_residual: empty trajectory");
    const auto& p = traj.params;
    const double target = p.lambda / p.mu;
    auto total = [&](std::size_t k) {
        double s = 0.0;
        for (double x : traj.value(k)) s += x;
        return s;
    };
    const double s0 = total(0) - target;
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
        worst = std::max(worst, std::abs(total(k) - target - s0 * std::exp(-p.mu * traj.times[k])));
    return worst;
}

}  // namespace qvel
