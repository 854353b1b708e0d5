#include <doctest.h>

#include <cmath>

#include "syncmfg/dynamics.hpp"
#include "test_helpers.hpp"

using namespace syncmfg;

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("vector field values") {
    CHECK(vector_field({1.0, 1.0, 6.0}, {0.0, 0.0}) == std::pair{0.0, 0.0});
    CHECK(vector_field({0.3, 0.7, 2.0}, {0.0, 0.0}) == std::pair{0.0, 0.0});

    const auto [da, dq] = vector_field({1.0, 1.0, 6.0}, {1.0, 0.0});
    CHECK(da == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(dq == doctest::Approx(1.0).epsilon(1e-15));

    // Closed-form stationary point of the ergodic system
    const auto [da2, dq2] = vector_field({0.0, 1.0, 8.0}, {1.1231056256176605, 0.3596117967977924});
    CHECK(std::abs(da2) < 1e-8);
    CHECK(std::abs(dq2) < 1e-8);

    CHECK_THROWS_AS(vector_field({1.0, 1.0, 6.0}, {0.0, 1.5}), DomainError);
}

TEST_CASE("vector field is antisymmetric") {
    auto g = testutil::rng(1);
    for (int i = 0; i < 500; ++i) {
        ModelParams p;
        p.beta = testutil::uniform(g, 0.0, 2.0);
        p.sigma2 = testutil::uniform(g, 0.2, 2.0);
        p.kappa = testutil::uniform(g, 0.5, 12.0);
        const double a = testutil::uniform(g, -3.0, 3.0);
        const double q = testutil::uniform(g, -1.0, 1.0);
        const auto [da, dq] = vector_field(p, {a, q});
        const auto [dan, dqn] = vector_field(p, {-a, -q});
        CHECK(dan == doctest::Approx(-da).epsilon(1e-13));
        CHECK(dqn == doctest::Approx(-dq).epsilon(1e-13));
    }
}

TEST_CASE("divergence of the field equals beta") {
    auto g = testutil::rng(2);
    const double h = 1e-5;
    for (int i = 0; i < 1000; ++i) {
        ModelParams p;
        p.beta = testutil::uniform(g, 0.0, 2.0);
        p.sigma2 = testutil::uniform(g, 0.2, 2.0);
        p.kappa = testutil::uniform(g, 0.5, 12.0);
        double a = testutil::uniform(g, -2.0, 2.0);
        if (std::abs(a) < 0.01) a = 0.02;
        const double q = testutil::uniform(g, -0.9, 0.9);
        const auto [fa_p, fq_p] = vector_field(p, {a + h, q});
        const auto [fa_m, fq_m] = vector_field(p, {a - h, q});
        const auto [ga_p, gq_p] = vector_field(p, {a, q + h});
        const auto [ga_m, gq_m] = vector_field(p, {a, q - h});
        const double div = (fa_p - fa_m) / (2 * h) + (gq_p - gq_m) / (2 * h);
        CHECK(div == doctest::Approx(p.beta).epsilon(1e-6));
    }
}

TEST_CASE("hamiltonian values") {
    CHECK(hamiltonian(0, 0.0, 0.5, {1.0, 1.0, 8.0}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(hamiltonian(1, 2.0, 0.25, {1.0, 1.0, 4.0}) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(hamiltonian(1, -2.0, 0.25, {1.0, 1.0, 4.0}) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK_THROWS_AS(hamiltonian(0, 1.0, 1.2, {1.0, 1.0, 4.0}), DomainError);
}

TEST_CASE("a-equation in Hamiltonian form") {
    // da/dt from the field equals beta*a + H(1,a,p) - H(0,-a,p) with p=(q+1)/2
    auto g = testutil::rng(3);
    for (int i = 0; i < 500; ++i) {
        ModelParams p;
        p.beta = testutil::uniform(g, 0.0, 2.0);
        p.sigma2 = testutil::uniform(g, 0.2, 2.0);
        p.kappa = testutil::uniform(g, 0.5, 12.0);
        const double a = testutil::uniform(g, -3.0, 3.0);
        const double q = testutil::uniform(g, -1.0, 1.0);
        const auto [da, dq] = vector_field(p, {a, q});
        const double prob = (q + 1.0) / 2.0;
        const double rhs = p.beta * a + hamiltonian(1, a, prob, p) - hamiltonian(0, -a, prob, p);
        CHECK(da == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("energy first integral") {
    CHECK(energy({0.0, 1.0, 8.0}, {0.0, 0.0}) == 0.0);
    // frozen from exact evaluation: E(abar, qbar) = (71 - 17 sqrt(17))/8
    CHECK(energy({0.0, 1.0, 8.0}, {1.1231056256176605, 0.3596117967977924}) ==
          doctest::Approx(0.1134005455624713).epsilon(1e-12));
    CHECK_THROWS_AS(energy({1.0, 1.0, 8.0}, {0.1, 0.1}), ModelMismatchError);

    SUBCASE("E is symmetric under (a,q) -> (-a,-q)") {
        auto g = testutil::rng(4);
        for (int i = 0; i < 1000; ++i) {
            ModelParams p{0.0, testutil::uniform(g, 0.2, 2.0), testutil::uniform(g, 0.5, 12.0)};
            const double a = testutil::uniform(g, -3.0, 3.0);
            const double q = testutil::uniform(g, -1.0, 1.0);
            CHECK(energy(p, {a, q}) == doctest::Approx(energy(p, {-a, -q})).epsilon(1e-13));
        }
    }
    SUBCASE("gradient of E is orthogonal to the field") {
        auto g = testutil::rng(5);
        for (int i = 0; i < 1000; ++i) {
            ModelParams p{0.0, testutil::uniform(g, 0.2, 2.0), testutil::uniform(g, 0.5, 12.0)};
            double a = testutil::uniform(g, -3.0, 3.0);
            if (a == 0.0) a = 0.1;
            const double q = testutil::uniform(g, -1.0, 1.0);
            const auto [da, dq] = vector_field(p, {a, q});
            const Vec2 grad = energy_gradient(p, {a, q});
            const double dot = grad.a * da + grad.q * dq;
            const double scale = std::hypot(grad.a, grad.q) * std::hypot(da, dq) + 1e-30;
            CHECK(std::abs(dot) / scale < 1e-9);
        }
    }
}

TEST_CASE("kolmogorov right-hand side") {
    CHECK(kolmogorov_rhs(0.5, {0.0, 0.0}, 1.0) == 0.0);
    CHECK(kolmogorov_rhs(0.0, {0.0, 0.0}, 1.0) == 1.0);
    CHECK(kolmogorov_rhs(0.75, {2.0, 0.0}, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("control from a probability flow") {
    SUBCASE("constant one-half flow has zero control") {
        ProbabilityFlow f;
        for (int i = 0; i <= 100; ++i) {
            f.times.push_back(0.01 * i);
            f.p.push_back(0.5);
        }
        const ControlFlow c = control_from_flow(f, 1.0);
        for (std::size_t i = 0; i < c.times.size(); ++i) {
            CHECK(std::abs(c.alpha0[i]) < 1e-12);
            CHECK(std::abs(c.alpha1[i]) < 1e-12);
        }
    }
    SUBCASE("constant 0.75 flow") {
        ProbabilityFlow f;
        for (int i = 0; i <= 100; ++i) {
            f.times.push_back(0.01 * i);
            f.p.push_back(0.75);
        }
        const ControlFlow c = control_from_flow(f, 1.0);
        for (std::size_t i = 0; i < c.times.size(); ++i) {
            CHECK(c.alpha0[i] == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(c.alpha1[i] == 0.0);
            // Kolmogorov residual vanishes
            CHECK(kolmogorov_rhs(f.p[i], {c.alpha0[i], c.alpha1[i]}, 1.0) ==
                  doctest::Approx(0.0).epsilon(1e-10));
        }
    }
    SUBCASE("flow touching 0 or 1 is rejected with a location") {
        ProbabilityFlow f;
        f.times = {0.0, 0.1, 0.2, 0.3};
        f.p = {0.5, 0.6, 1.0, 0.7};
        try {
            control_from_flow(f, 1.0);
            CHECK(false);
        } catch (const DomainError& e) {
            CHECK(std::string(e.what()).find("0.2") != std::string::npos);
        }
    }
}

TEST_CASE("specialize control") {
    SUBCASE("pointwise examples") {
        const FeedbackPair r1 = specialize_control(FeedbackPair{3.0, 1.0}, 0.5);
        CHECK(r1.alpha0 == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(r1.alpha1 == 0.0);
        const FeedbackPair r2 = specialize_control(FeedbackPair{1.0, 3.0}, 0.5);
        CHECK(r2.alpha0 == 0.0);
        CHECK(r2.alpha1 == doctest::Approx(2.0).epsilon(1e-15));
        const FeedbackPair r3 = specialize_control(FeedbackPair{5.0, 0.0}, 0.3);
        CHECK(r3.alpha0 == doctest::Approx(5.0).epsilon(1e-15));
        CHECK(r3.alpha1 == 0.0);
        CHECK_THROWS_AS(specialize_control(FeedbackPair{1.0, 1.0}, 0.0), DomainError);
    }
    SUBCASE("drift preserved exactly, magnitudes never grow") {
        auto g = testutil::rng(6);
        for (int i = 0; i < 1000; ++i) {
            const double p = testutil::uniform(g, 0.05, 0.95);
            const FeedbackPair in{testutil::uniform(g, 0.0, 5.0), testutil::uniform(g, 0.0, 5.0)};
            const FeedbackPair sp = specialize_control(in, p);
            const double s2 = testutil::uniform(g, 0.2, 2.0);
            CHECK(sp.special());
            CHECK(sp.alpha0 <= in.alpha0 + 1e-14);
            CHECK(sp.alpha1 <= in.alpha1 + 1e-14);
            CHECK(kolmogorov_rhs(p, sp, s2) == doctest::Approx(kolmogorov_rhs(p, in, s2)).epsilon(1e-13));
        }
    }
}

TEST_SUITE_END();
