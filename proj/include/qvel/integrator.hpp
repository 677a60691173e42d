#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "qvel/model.hpp"

namespace qvel {

/// Sampled (t, q, q') record with cubic Hermite interpolation between samples.
/// Storage is row-major: sample k occupies [k*n, (k+1)*n).
class HistorySegment {
public:
    HistorySegment() = default;
    HistorySegment(int n_queues, std::vector<double> times, std::vector<double> values,
                   std::vector<double> derivatives);

    int n_queues() const { return n_; }
    std::size_t size() const { return times_.size(); }
    double start() const { return times_.front(); }
    double end() const { return times_.back(); }

    const std::vector<double>& times() const { return times_; }
    std::span<const double> value(std::size_t k) const { return {values_.data() + k * n_, std::size_t(n_)}; }
    std::span<const double> derivative(std::size_t k) const {
        return {derivatives_.data() + k * n_, std::size_t(n_)};
    }

    /// Hermite interpolation; exact at stored samples. `t` must lie in [start(), end()].
    void eval(double t, std::span<double> q, std::span<double> dq) const;
    std::vector<double> value_at(double t) const;

private:
    int n_ = 0;
    std::vector<double> times_, values_, derivatives_;
};

struct ConstantHistory {
    std::vector<double> values;
};

enum class PerturbationMode { Antisymmetric, Uniform };

/// q* + eps on every queue (Uniform) or +eps on queue 1, -eps on queue 2 (Antisymmetric).
struct EquilibriumPerturbed {
    double epsilon = 0.1;
    PerturbationMode mode = PerturbationMode::Antisymmetric;
};

struct CustomHistory {
    HistorySegment samples;  ///< must cover [-delay, 0]
};

using InitialHistory = std::variant<ConstantHistory, EquilibriumPerturbed, CustomHistory>;

/// Builds the initial function on [-delay, 0]. Throws DomainError on negative values or bad coverage.
HistorySegment make_history(const InitialHistory& kind, const SystemParams& params);

/// Solution on [0, horizon] plus the history it was started from.
///
/// `derivatives` holds the right-sided derivative (rhs at the node). At multiples of the delay
/// the neutral term makes q' jump; the left-sided limit is kept separately so interpolation on
/// either side of a breakpoint stays smooth.
class Trajectory {
public:
    SystemParams params;
    HistorySegment history;
    double step = 0.0;
    std::vector<double> times;
    std::vector<double> values;            ///< row-major, size() * N
    std::vector<double> derivatives;       ///< right-sided q'
    std::vector<double> left_derivatives;  ///< left-sided q'

    int n_queues() const { return params.n_queues; }
    std::size_t size() const { return times.size(); }
    double end_time() const { return times.back(); }
    std::span<const double> value(std::size_t k) const {
        return {values.data() + k * n_queues(), std::size_t(n_queues())};
    }
    std::span<const double> derivative(std::size_t k) const {
        return {derivatives.data() + k * n_queues(), std::size_t(n_queues())};
    }
    double q(std::size_t k, int i) const { return values[k * n_queues() + i]; }
    double dq(std::size_t k, int i) const { return derivatives[k * n_queues() + i]; }

    /// State at any t in [-delay, end_time()], Hermite-interpolated.
    std::vector<double> value_at(double t) const;
};

struct IntegrationOptions {
    double horizon = 0.0;        ///< <= 0 selects max(200/mu, 60*delay)
    int steps_per_delay = 64;
};

double default_horizon(const SystemParams& params);

/// Method-of-steps RK4 for the neutral system. For delay == 0 the implicit relation for q'
/// is solved by Newton at every stage and the step is 0.01/mu.
/// Throws IntegrationDiverged if the state stops being finite.
Trajectory integrate(const SystemParams& params, const HistorySegment& history, IntegrationOptions opts = {});

/// max_t | sum_i q_i(t) - lambda/mu - (sum_i q_i(0) - lambda/mu) e^{-mu t} |
double conservation_residual(const Trajectory& traj);

}  // namespace qvel
