#pragma once

// Fluid model of N queues where arrivals pick a queue by a multinomial logit
// over a delayed announcement q_i(t - delay) + delta * q_i'(t - delay).

#include <span>
#include <string_view>
#include <vector>

namespace qvel {

struct SystemParams {
    double lambda = 10.0;  ///< arrival rate
    double mu = 1.0;       ///< per-customer service rate
    double theta = 1.0;    ///< logit sensitivity
    int n_queues = 2;
    double delta = 0.0;    ///< velocity weight
    double delay = 0.0;    ///< announcement lag

    /// Throws DomainError unless all rates are positive and finite, n_queues >= 2, delta, delay >= 0.
    void validate() const;

    double load() const { return lambda * theta; }  ///< lambda*theta
    double ratio_edge() const;                         ///< N / (lambda*theta)

    SystemParams with_delta(double d) const {
        auto p = *this;
        p.delta = d;
        return p;
    }
    SystemParams with_delay(double d) const {
        auto p = *this;
        p.delay = d;
        return p;
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

struct QueueState {
    double time = 0.0;
    std::vector<double> values;
    std::vector<double> derivatives;
};

enum class StabilityRegion {
    RegionA,        ///< lambda*theta < N*mu, delta > N/(lambda*theta): never stable
    RegionB,        ///< lambda*theta <= N*mu, delta < N/(lambda*theta): stable for every delay
    RegionC,        ///< lambda*theta > N*mu, delta > N/(lambda*theta): never stable
    RegionD,        ///< lambda*theta > N*mu, delta < N/(lambda*theta): stable below the first critical delay
    EdgeStable,     ///< delta == N/(lambda*theta), delta*mu > 1
    EdgeUnstable,   ///< delta == N/(lambda*theta), delta*mu < 1
    EdgeMarginal,   ///< delta == N/(lambda*theta), delta*mu == 1
};

std::string_view to_string(StabilityRegion r);

/// True for regions where the equilibrium is stable for every delay.
bool always_stable(StabilityRegion r);
/// True for regions where the equilibrium is unstable for every delay.
bool never_stable(StabilityRegion r);

/// Relative tolerance used when comparing against region boundaries.
inline constexpr double kBoundaryRelTol = 1e-12;

/// Logit choice probabilities exp(-theta*info_i) / sum_j exp(-theta*info_j).
/// Evaluated with max-subtraction so large |theta*info| never overflows.
std::vector<double> mnl_probabilities(std::span<const double> info, double theta);
void mnl_probabilities(std::span<const double> info, double theta, std::span<double> out);

/// q + delta * qdot, elementwise.
std::vector<double> announcement(std::span<const double> q_delayed, std::span<const double> qdot_delayed,
                                 double delta);

/// Right-hand side lambda * p_i(announcement) - mu * q_i(t).
std::vector<double> rhs(std::span<const double> current, std::span<const double> q_delayed,
                        std::span<const double> qdot_delayed, const SystemParams& params);

/// Allocation-free variant used by the integrator; `scratch` must hold N doubles.
void rhs_into(std::span<const double> current, std::span<const double> q_delayed,
              std::span<const double> qdot_delayed, const SystemParams& params, std::span<double> scratch,
              std::span<double> out);

/// The unique equilibrium lambda / (N mu), shared by every queue.
double equilibrium(const SystemParams& params);

/// Stability region as a pure function of (lambda*theta, mu, N, delta). The delay is ignored.
StabilityRegion classify_region(const SystemParams& params);

}  // namespace qvel
