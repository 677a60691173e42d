#include "qvel/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qvel/errors.hpp"

namespace qvel {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void require_finite(std::span<const double> v, const char* what) {
    for (double x : v)
        if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite entry");
}

// a vs b with relative tolerance; returns -1, 0, +1
int rel_compare(double a, double b) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    if (std::abs(a - b) <= kBoundaryRelTol * scale) return 0;
    return a < b ? -1 : 1;
}

}  // namespace

void SystemParams::validate() const {
    if (!finite_positive(lambda)) throw DomainError("lambda must be positive and finite");
    if (!finite_positive(mu)) throw DomainError("mu must be positive and finite");
    if (!finite_positive(theta)) throw DomainError("theta must be positive and finite");
    if (n_queues < 2) throw DomainError("n_queues must be at least 2");
    if (!std::isfinite(delta) || delta < 0.0) throw DomainError("delta must be finite and nonnegative");
    if (!std::isfinite(delay) || delay < 0.0) throw DomainError("delay must be finite and nonnegative");
    double r = ratio_edge();
    if (!finite_positive(r)) throw DomainError("N/(lambda*theta) is not finite");
}

double SystemParams::ratio_edge() const { return n_queues / (lambda * theta); }

std::string_view to_string(StabilityRegion r) {
    switch (r) {
        case StabilityRegion::RegionA: return "RegionA";
        case StabilityRegion::RegionB: return "RegionB";
        case StabilityRegion::RegionC: return "RegionC";
        case StabilityRegion::RegionD: return "RegionD";
        case StabilityRegion::EdgeStable: return "EdgeStable";
        case StabilityRegion::EdgeUnstable: return "EdgeUnstable";
        case StabilityRegion::EdgeMarginal: return "EdgeMarginal";
    }
    return "?";
}

bool always_stable(StabilityRegion r) {
    return r == StabilityRegion::RegionB || r == StabilityRegion::EdgeStable;
}

bool never_stable(StabilityRegion r) {
    return r == StabilityRegion::RegionA || r == StabilityRegion::RegionC || r == StabilityRegion::EdgeUnstable;
}

void mnl_probabilities(std::span<const double> info, double theta, std::span<double> out) {
    if (!(std::isfinite(theta) && theta > 0.0)) throw DomainError("theta must be positive and finite");
    if (out.size() != info.size()) throw DomainError("mnl_probabilities: output length mismatch");
    if (info.empty()) throw DomainError("mnl_probabilities: empty input");
    require_finite(info, "mnl_probabilities");
    // smallest announcement gets the largest weight
    double lo = *std::min_element(info.begin(), info.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < info.size(); ++i) {
        out[i] = std::exp(-theta * (info[i] - lo));
        sum += out[i];
    }
    for (double& p : out) p /= sum;
}

std::vector<double> mnl_probabilities(std::span<const double> info, double theta) {
    std::vector<double> out(info.size());
    mnl_probabilities(info, theta, out);
    return out;
}

std::vector<double> announcement(std::span<const double> q_delayed, std::span<const double> qdot_delayed,
                                 double delta) {
    if (q_delayed.size() != qdot_delayed.size()) throw DomainError("announcement: length mismatch");
    require_finite(q_delayed, "announcement");
    require_finite(qdot_delayed, "announcement");
    if (!std::isfinite(delta)) throw DomainError("announcement: non-finite delta");
    std::vector<double> out(q_delayed.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = q_delayed[i] + delta * qdot_delayed[i];
    return out;
}

void rhs_into(std::span<const double> current, std::span<const double> q_delayed,
              std::span<const double> qdot_delayed, const SystemParams& params, std::span<double> scratch,
              std::span<double> out) {
    const std::size_t n = current.size();
    for (std::size_t i = 0; i < n; ++i) scratch[i] = q_delayed[i] + params.delta * qdot_delayed[i];
    mnl_probabilities(scratch, params.theta, out);
    for (std::size_t i = 0; i < n; ++i) out[i] = params.lambda * out[i] - params.mu * current[i];
}

std::vector<double> rhs(std::span<const double> current, std::span<const double> q_delayed,
                        std::span<const double> qdot_delayed, const SystemParams& params) {
    params.validate();
    const auto n = static_cast<std::size_t>(params.n_queues);
    if (current.size() != n || q_delayed.size() != n || qdot_delayed.size() != n)
        throw DomainError("rhs: vectors must have length n_queues");
    require_finite(current, "rhs");
    require_finite(q_delayed, "rhs");
    require_finite(qdot_delayed, "rhs");
    std::vector<double> scratch(n), out(n);
    rhs_into(current, q_delayed, qdot_delayed, params, scratch, out);
    return out;
}

double equilibrium(const SystemParams& params) {
    params.validate();
    return params.lambda / (params.n_queues * params.mu);
}

StabilityRegion classify_region(const SystemParams& params) {
    params.validate();
    const double lt = params.load();
    const int load_vs_service = rel_compare(lt, params.n_queues * params.mu);
    const int weight_vs_edge = rel_compare(params.delta, params.ratio_edge());

    if (weight_vs_edge == 0) {
        int s = rel_compare(params.delta * params.mu, 1.0);
        if (s > 0) return StabilityRegion::EdgeStable;
        if (s < 0) return StabilityRegion::EdgeUnstable;
        return StabilityRegion::EdgeMarginal;
    }
    if (load_vs_service <= 0)
        return weight_vs_edge > 0 ? StabilityRegion::RegionA : StabilityRegion::RegionB;
    return weight_vs_edge > 0 ? StabilityRegion::RegionC : StabilityRegion::RegionD;
}

}  // namespace qvel
