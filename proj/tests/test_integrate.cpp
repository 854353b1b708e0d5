#include <doctest.h>

#include <cmath>

#include "syncmfg/integrate.hpp"
#include "test_helpers.hpp"

using namespace syncmfg;

TEST_SUITE_BEGIN("integrate");

TEST_CASE("origin stays put") {
    const Trajectory t = integrate({1.0, 1.0, 6.0}, {0.0, 0.0}, {0.0, 10.0});
    CHECK(t.stop == StopReason::MAX_TIME);
    for (const auto& p : t.points) {
        CHECK(p.a == 0.0);
        CHECK(p.q == 0.0);
    }
    CHECK(t.times.back() == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("ergodic energy drift stays tiny") {
    IntegrateOptions opts;
    opts.record_dt = 0.01;
    const Trajectory t = integrate({0.0, 1.0, 8.0}, {0.1, 0.0}, {0.0, 50.0}, opts);
    CHECK(t.stop == StopReason::MAX_TIME);
    CHECK(t.energy_drift < 1e-8);
}

TEST_CASE("saddle stable direction converges to the origin") {
    const ModelParams p{1.0, 1.0, 5.0};
    const auto origin = linearize(p, StationaryPoint{0.0, 0.0});
    const double lam = origin.eigenvalues[1].real();
    REQUIRE(lam < 0.0);
    const Vec2 v = eigenvector(p, origin, lam);

    SUBCASE("eigenvector seed, ball at the seeding scale") {
        IntegrateOptions opts;
        opts.detect_convergence = true;
        opts.conv_radius = 1e-4;
        const Trajectory t =
            integrate(p, {1e-4 * v.a, 1e-4 * v.q}, {0.0, 200.0}, opts);
        CHECK(t.stop == StopReason::CONVERGED);
        CHECK(t.fixed_point_id == 0);
    }
    SUBCASE("second-order manifold seed reaches a much smaller ball") {
        const Vec2 seed = manifold_seed(p, StationaryPoint{0.0, 0.0}, lam, v, 1e-4);
        IntegrateOptions opts;
        opts.detect_convergence = true;
        opts.conv_radius = 1e-6;
        const Trajectory t = integrate(p, {seed.a, seed.q}, {0.0, 200.0}, opts);
        CHECK(t.stop == StopReason::CONVERGED);
        CHECK(t.fixed_point_id == 0);
    }
}

TEST_CASE("reverse-then-forward returns to the start") {
    const ModelParams p{1.0, 1.0, 5.0};
    int completed = 0;
    auto g = testutil::rng(8);
    for (int i = 0; i < 12; ++i) {
        const PhasePoint start{testutil::uniform(g, -0.3, 0.3), testutil::uniform(g, -0.4, 0.4)};
        const double span = testutil::uniform(g, 0.5, 2.5);
        Trajectory back;
        try {
            back = integrate(p, start, {0.0, -span});
        } catch (const NumericalError&) {
            continue;
        }
        if (back.stop != StopReason::MAX_TIME) continue;
        const PhasePoint turn = back.back();
        const Trajectory fwd = integrate(p, turn, {0.0, span});
        if (fwd.stop != StopReason::MAX_TIME) continue;
        ++completed;
        CHECK(std::abs(fwd.back().a - start.a) < 1e-7);
        CHECK(std::abs(fwd.back().q - start.q) < 1e-7);
    }
    CHECK(completed >= 5);
}

TEST_CASE("forward flow cannot leave D, reverse flow can hit the boundary") {
    const ModelParams p{1.0, 1.0, 5.0};
    SUBCASE("forward from near the boundary") {
        IntegrateOptions opts;
        opts.escape_abs_a = 1e6;
        const Trajectory t = integrate(p, {0.5, 0.99}, {0.0, 10.0}, opts);
        CHECK(t.stop != StopReason::BOUNDARY_HIT);
        for (const auto& pt : t.points) CHECK(std::abs(pt.q) <= 1.0 + 1e-12);
    }
    SUBCASE("reverse run exits through q = +1") {
        const Trajectory t = integrate(p, {0.02, 0.3}, {0.0, -20.0});
        CHECK(t.stop == StopReason::BOUNDARY_HIT);
        CHECK(t.boundary_q == 1.0);
        CHECK(t.back().q == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(t.reversed);
    }
}

TEST_CASE("trajectory symmetry under point negation") {
    const ModelParams p{0.0, 1.0, 8.0};
    IntegrateOptions opts;
    opts.record_dt = 0.05;
    const Trajectory t1 = integrate(p, {0.3, 0.1}, {0.0, 15.0}, opts);
    const Trajectory t2 = integrate(p, {-0.3, -0.1}, {0.0, 15.0}, opts);
    REQUIRE(t1.size() == t2.size());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(std::abs(t1.points[i].a + t2.points[i].a) < 1e-9);
        CHECK(std::abs(t1.points[i].q + t2.points[i].q) < 1e-9);
    }
}

TEST_CASE("poincare section return on an ergodic orbit") {
    const ModelParams p{0.0, 1.0, 8.0};
    IntegrateOptions opts;
    opts.section_returns = 1;
    const Trajectory t = integrate(p, {0.3, 0.0}, {0.0, 100.0}, opts);
    CHECK(t.stop == StopReason::SECTION_RETURN);
    CHECK(std::abs(t.back().q) < 1e-9);
    CHECK(t.back().a > 0.0);
    // conservative orbit returns to its seed
    CHECK(t.back().a == doctest::Approx(0.3).epsilon(1e-6));
    // small-amplitude period is close to 2*pi/sqrt(kappa - kappa_c) = pi
    const Trajectory ts = integrate(p, {1e-3, 0.0}, {0.0, 100.0}, opts);
    CHECK(ts.event_time == doctest::Approx(M_PI).epsilon(1e-3));
}

TEST_CASE("blow-up reports stiffness or escape") {
    const ModelParams p{1.0, 1.0, 5.0};
    CHECK_THROWS_AS(integrate(p, {2.0, 0.5}, {0.0, 10.0}), NumericalError);
    IntegrateOptions opts;
    opts.escape_abs_a = 1e6;
    const Trajectory t = integrate(p, {2.0, 0.5}, {0.0, 10.0}, opts);
    CHECK(t.stop == StopReason::ESCAPED);
    CHECK(std::abs(t.back().a) > 1e6);
}

TEST_CASE("uniform recording grid") {
    IntegrateOptions opts;
    opts.record_dt = 0.25;
    const Trajectory t = integrate({0.0, 1.0, 8.0}, {0.2, 0.0}, {0.0, 5.0}, opts);
    REQUIRE(t.size() >= 21);
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        CHECK(t.times[i] - t.times[i - 1] == doctest::Approx(0.25).epsilon(1e-9));
    }
    CHECK(t.times.back() == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("start outside D is rejected") {
    CHECK_THROWS_AS(integrate({1.0, 1.0, 5.0}, {0.0, 1.5}, {0.0, 1.0}), DomainError);
}

TEST_SUITE_END();
