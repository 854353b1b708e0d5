#include <doctest.h>

#include <cmath>

#include "syncmfg/discounted.hpp"
#include "syncmfg/value.hpp"
#include "test_helpers.hpp"

using namespace syncmfg;

namespace {

double distance_to_polyline(const std::vector<PhasePoint>& poly, double a, double q) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : poly) best = std::min(best, std::hypot(p.a - a, p.q - q));
    return best;
}

}  // namespace

TEST_SUITE_BEGIN("discounted");

TEST_CASE("subcritical curve is a monotone graph through the origin") {
    const ModelParams p{1.0, 1.0, 5.0};
    const EquilibriumCurve c = trace_equilibrium_curve(p);
    CHECK(c.regime == Regime::SUBCRITICAL);
    CHECK(c.monotone);
    CHECK(c.winding_count == 0);
    CHECK(c.points.front().q == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(c.points.back().q == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(distance_to_polyline(c.points, 0.0, 0.0) < 1e-6);
    CHECK(c.seed_check < 1e-7);
}

TEST_CASE("weakly supercritical curve passes through all three points") {
    const ModelParams p{1.0, 1.0, 6.2};
    const EquilibriumCurve c = trace_equilibrium_curve(p);
    CHECK(c.regime == Regime::SUPERCRITICAL_A);
    CHECK(c.monotone);
    for (const auto& fp : stationary_equilibria(p)) {
        CHECK(distance_to_polyline(c.points, fp.a, fp.q) < 1e-6);
    }
}

TEST_CASE("strongly supercritical curve spirals") {
    const ModelParams p{1.0, 1.0, 10.0};
    const EquilibriumCurve c = trace_equilibrium_curve(p);
    CHECK(c.regime == Regime::SUPERCRITICAL_B);
    CHECK_FALSE(c.monotone);
    CHECK(c.winding_count >= 3);
}

TEST_CASE("curve is antisymmetric") {
    for (const double k : {5.0, 10.0}) {
        const EquilibriumCurve c = trace_equilibrium_curve({1.0, 1.0, k});
        for (std::size_t i = 0; i < c.points.size(); i += 37) {
            CHECK(distance_to_polyline(c.points, -c.points[i].a, -c.points[i].q) < 1e-6);
        }
    }
}

TEST_CASE("curve requires the discounted model away from thresholds") {
    CHECK_THROWS_AS(trace_equilibrium_curve({0.0, 1.0, 8.0}), ModelMismatchError);
    CHECK_THROWS_AS(trace_equilibrium_curve({1.0, 1.0, 6.0}), PreconditionError);
}

TEST_CASE("subcritical NE: unique, increasing, converging to the origin") {
    const ModelParams p{1.0, 1.0, 5.0};
    const EquilibriumCurve c = trace_equilibrium_curve(p);

    const auto at_zero = solve_ne(p, 0.0, c);
    REQUIRE(at_zero.size() == 1);
    CHECK(at_zero[0].a_star == 0.0);
    CHECK(at_zero[0].limit == 0);
    CHECK(at_zero[0].trajectory.stop == StopReason::CONVERGED);

    double last = -1e9;
    for (int i = 0; i <= 20; ++i) {
        const double q0 = -0.9 + 0.09 * i;
        const auto sols = solve_ne(p, q0, c);
        REQUIRE(sols.size() == 1);
        CHECK(sols[0].a_star > last);
        last = sols[0].a_star;
        CHECK(sols[0].trajectory.stop == StopReason::CONVERGED);
        CHECK(sols[0].limit == 0);
        CHECK(sols[0].trajectory.points.front().a == doctest::Approx(sols[0].a_star));
        CHECK(sols[0].trajectory.points.front().q == doctest::Approx(q0));
    }
}

TEST_CASE("weakly supercritical NE converge to sign(q0) side") {
    const ModelParams p{1.0, 1.0, 6.2};
    const EquilibriumCurve c = trace_equilibrium_curve(p);
    for (const double q0 : {0.1, 0.5, 0.9}) {
        const auto sols = solve_ne(p, q0, c);
        REQUIRE(sols.size() == 1);
        CHECK(sols[0].limit == 2);
        const auto neg = solve_ne(p, -q0, c);
        REQUIRE(neg.size() == 1);
        CHECK(neg[0].limit == 0);
        CHECK(neg[0].a_star == doctest::Approx(-sols[0].a_star).epsilon(1e-7));
    }
}

TEST_CASE("spiral regime: many NE near the center, one far out") {
    const ModelParams p{1.0, 1.0, 10.0};
    const EquilibriumCurve c = trace_equilibrium_curve(p);

    const auto near = solve_ne(p, 0.01, c);
    CHECK(near.size() >= 3);
    bool limit_pos = false, limit_neg = false, multi_turn = false;
    for (const auto& s : near) {
        if (s.limit == 2) limit_pos = true;
        if (s.limit == 0) limit_neg = true;
        if (s.half_turns >= 2) multi_turn = true;
        CHECK(s.trajectory.stop == StopReason::CONVERGED);
    }
    CHECK(limit_pos);
    CHECK(limit_neg);
    CHECK(multi_turn);

    const auto far = solve_ne(p, 0.9, c);
    CHECK(far.size() == 1);

    SUBCASE("negation symmetry of the solution set") {
        const auto mirrored = solve_ne(p, -0.01, c);
        REQUIRE(mirrored.size() == near.size());
        for (std::size_t i = 0; i < near.size(); ++i) {
            CHECK(mirrored[i].a_star ==
                  doctest::Approx(-near[near.size() - 1 - i].a_star).epsilon(1e-6));
        }
    }
}

TEST_CASE("NE flows satisfy the MFG system and the value reconstruction") {
    const ModelParams p{1.0, 1.0, 6.2};
    const auto sols = solve_ne(p, 0.5);
    REQUIRE(sols.size() == 1);
    const Trajectory& tr = sols[0].trajectory;
    const ScalarFlow af{tr.times, tr.a_values()};
    const ScalarFlow qf{tr.times, tr.q_values()};
    const MfgResidualReport rep = mfg_residual(af, qf, p);
    CHECK(rep.res_a < 1e-6);
    CHECK(rep.res_q < 1e-6);
    CHECK(rep.res_value < 1e-5);
}

TEST_SUITE_END();
