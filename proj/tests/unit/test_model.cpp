#include <doctest.h>

#include <cmath>
#include <random>

#include "qvel/errors.hpp"
#include "qvel/model.hpp"

using namespace qvel;

namespace {

// Softmax written directly from the definition, without the shift used by the library.
std::vector<double> naive_softmax(const std::vector<double>& info, double theta) {
    double total = 0.0;
    for (double x : info) total += std::exp(-theta * x);
    std::vector<double> p;
    for (double x : info) p.push_back(std::exp(-theta * x) / total);
    return p;
}

SystemParams baseline() { return {10.0, 1.0, 1.0, 2, 0.0, 0.0}; }

}  // namespace

TEST_SUITE("model") {

TEST_CASE("logit probabilities") {
    auto p = mnl_probabilities(std::vector<double>{5, 5}, 1.0);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-15));

    p = mnl_probabilities(std::vector<double>{0, 100}, 1.0);
    CHECK(p[0] >= 1.0 - 1e-40);
    CHECK(p[1] < 1e-40);

    p = mnl_probabilities(std::vector<double>{5, 5 + std::log(3.0)}, 1.0);
    CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(mnl_probabilities(std::vector<double>{1, NAN}, 1.0), DomainError);
    CHECK_THROWS_AS(mnl_probabilities(std::vector<double>{1, INFINITY}, 1.0), DomainError);
}

TEST_CASE("logit probabilities never overflow and match the naive formula") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> info(2 + trial % 4);
        for (auto& x : info) x = u(rng);
        const double theta = 0.1 + (trial % 7) * 0.3;
        const auto p = mnl_probabilities(info, theta);
        const auto ref = naive_softmax(info, theta);
        double total = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(p[i] >= 0.0);
            CHECK(p[i] == doctest::Approx(ref[i]).epsilon(1e-12));
            total += p[i];
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto p = mnl_probabilities(std::vector<double>{-1e6, 1e6}, 1.0);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 0.0);
}

TEST_CASE("announcement") {
    using V = std::vector<double>;
    CHECK(announcement(V{5, 5}, V{0, 0}, 0.1) == V{5, 5});
    CHECK(announcement(V{4, 6}, V{1, -1}, 0.5) == V{4.5, 5.5});
    CHECK(announcement(V{5, 5}, V{2, -2}, 0.0) == V{5, 5});
    CHECK_THROWS_AS(announcement(V{5, 5}, V{2}, 0.0), DomainError);
}

TEST_CASE("right-hand side") {
    using V = std::vector<double>;
    const auto p = baseline();
    const auto eq = rhs(V{5, 5}, V{5, 5}, V{0, 0}, p);
    CHECK(std::abs(eq[0]) < 1e-14);
    CHECK(std::abs(eq[1]) < 1e-14);

    const auto r = rhs(V{5, 5}, V{4, 6}, V{0, 0}, p);
    const double e4 = std::exp(-4.0), e6 = std::exp(-6.0);
    CHECK(r[0] == doctest::Approx(10 * e4 / (e4 + e6) - 5).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(10 * e6 / (e4 + e6) - 5).epsilon(1e-14));
    CHECK(r[0] == doctest::Approx(3.8080).epsilon(1e-4));

    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 50; ++trial) {
        auto params = SystemParams{u(rng) + 0.5, 0.2 + u(rng) / 5, 0.5, 3, 0.1, 1.0};
        V cur(3), qd(3), dd(3);
        for (int i = 0; i < 3; ++i) cur[i] = u(rng), qd[i] = u(rng), dd[i] = u(rng) - 5;
        const double shift = (params.lambda / params.mu - cur[0] - cur[1] - cur[2]) / 3;
        for (auto& c : cur) c += shift;
        const auto out = rhs(cur, qd, dd, params);
        CHECK(std::abs(out[0] + out[1] + out[2]) < 1e-12);
    }
}

TEST_CASE("equilibrium") {
    CHECK(equilibrium(baseline()) == 5.0);
    CHECK(equilibrium({5, 1, 1, 5, 0, 0}) == 1.0);
    CHECK(equilibrium({1, 0.5, 1, 2, 0, 0}) == 1.0);
}

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(baseline().validate());
    CHECK_THROWS_AS((SystemParams{-1, 1, 1, 2, 0, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SystemParams{1, 0, 1, 2, 0, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SystemParams{1, 1, NAN, 2, 0, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SystemParams{1, 1, 1, 1, 0, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SystemParams{1, 1, 1, 2, -0.1, 0}.validate()), DomainError);
    CHECK_THROWS_AS((SystemParams{1, 1, 1, 2, 0, -1}.validate()), DomainError);
}

TEST_CASE("stability regions") {
    CHECK(classify_region({1, 1, 1, 2, 0, 0}) == StabilityRegion::RegionB);
    CHECK(classify_region(baseline().with_delta(0.1)) == StabilityRegion::RegionD);
    CHECK(classify_region(baseline().with_delta(0.3)) == StabilityRegion::RegionC);
    CHECK(classify_region(baseline().with_delta(0.2)) == StabilityRegion::EdgeUnstable);
    CHECK(classify_region({1, 1, 1, 2, 3, 0}) == StabilityRegion::RegionA);
    CHECK(classify_region({1, 0.8, 1, 2, 2, 0}) == StabilityRegion::EdgeStable);
    CHECK(classify_region({2, 1, 1, 2, 1, 0}) == StabilityRegion::EdgeMarginal);
    CHECK(always_stable(StabilityRegion::RegionB));
    CHECK(always_stable(StabilityRegion::EdgeStable));
    CHECK(never_stable(StabilityRegion::RegionA));
    CHECK(never_stable(StabilityRegion::RegionC));
    CHECK(never_stable(StabilityRegion::EdgeUnstable));
    CHECK(to_string(StabilityRegion::RegionD) == "RegionD");
}

TEST_CASE("regions depend on lambda*theta only and ignore the delay") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.1, 5);
    for (int trial = 0; trial < 300; ++trial) {
        SystemParams p{u(rng) * 4, u(rng), u(rng), 2 + trial % 4, u(rng) / 4, u(rng)};
        const double c = u(rng);
        auto scaled = p;
        scaled.lambda *= c;
        scaled.theta /= c;
        CHECK(classify_region(p) == classify_region(scaled));
        CHECK(classify_region(p) == classify_region(p.with_delay(3 * p.delay + 1)));
    }
}

}  // TEST_SUITE
