#include "syncmfg/value.hpp"

#include <algorithm>
#include <cmath>

#include "syncmfg/ode.hpp"

namespace syncmfg {

namespace {

double clamp01(double p) { return std::clamp(p, 0.0, 1.0); }

double pos(double z) { return z > 0.0 ? z : 0.0; }
double neg(double z) { return z < 0.0 ? -z : 0.0; }

}  // namespace

std::vector<double> ValueFunction::a() const {
    std::vector<double> out(v0.size());
    for (std::size_t i = 0; i < v0.size(); ++i) out[i] = v0[i] - v1[i];
    return out;
}

double stationary_gap(const ModelParams& params, double p) {
    const double q = 2.0 * p - 1.0;
    const double c = params.beta + 2.0 * params.sigma2;
    if (q >= 0.0) return -c + std::sqrt(c * c + 2.0 * params.kappa * q);
    return c - std::sqrt(c * c - 2.0 * params.kappa * q);
}

ValueFunction solve_value_on(const ModelParams& params, const std::function<double(double)>& p_of_t,
                             const std::vector<double>& grid, TailMode tail) {
    params.validate();
    if (grid.size() < 2) throw PreconditionError("solve_value_on: need a grid");
    if (tail == TailMode::STATIONARY_TAIL && !(params.beta > 0.0)) {
        throw ModelMismatchError("solve_value_on: STATIONARY_TAIL requires beta > 0");
    }
    const double T = grid.back();

    Vec yT(2);
    if (tail == TailMode::STATIONARY_TAIL) {
        const double p_inf = clamp01(p_of_t(T));
        const double a_inf = stationary_gap(params, p_inf);
        const double v1_inf = hamiltonian(1, a_inf, p_inf, params) / params.beta;
        yT = {v1_inf + a_inf, v1_inf};
    } else {
        yT = {0.0, 0.0};
    }

    // v' = beta v - H(x, gap, p(t)), integrated from T down to grid.front().
    OdeRhs rhs = [&params, &p_of_t](double t, const Vec& v, Vec& d) {
        const double p = clamp01(p_of_t(t));
        const double a = v[0] - v[1];
        d[0] = params.beta * v[0] - hamiltonian(0, -a, p, params);
        d[1] = params.beta * v[1] - hamiltonian(1, a, p, params);
    };

    std::vector<double> rec(grid.rbegin(), grid.rend());
    const std::vector<Vec> sol = solve_ivp_record(rhs, T, grid.front(), yT, rec);

    ValueFunction out;
    out.times = grid;
    out.v0.resize(grid.size());
    out.v1.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.v0[i] = sol[grid.size() - 1 - i][0];
        out.v1[i] = sol[grid.size() - 1 - i][1];
    }
    if (tail == TailMode::STATIONARY_TAIL) {
        out.tail_bound = params.kappa * std::exp(-params.beta * T) / params.beta;
    }
    return out;
}

ValueFunction solve_value_backward(const ModelParams& params, const ProbabilityFlow& p_flow,
                                   double horizon, TailMode tail) {
    if (p_flow.times.size() < 2) throw PreconditionError("solve_value_backward: need a flow");
    if (horizon < 0.0) throw PreconditionError("solve_value_backward: horizon must be >= 0");
    if (horizon > p_flow.times.back() + 1e-9) {
        throw PreconditionError("solve_value_backward: flow does not cover the horizon");
    }
    if (horizon == 0.0) {
        ValueFunction out;
        out.times = {0.0};
        if (tail == TailMode::STATIONARY_TAIL) {
            params.validate();
            if (!(params.beta > 0.0)) {
                throw ModelMismatchError("solve_value_backward: STATIONARY_TAIL requires beta > 0");
            }
            const double p_inf = clamp01(p_flow.p.front());
            const double a_inf = stationary_gap(params, p_inf);
            const double v1_inf = hamiltonian(1, a_inf, p_inf, params) / params.beta;
            out.v0 = {v1_inf + a_inf};
            out.v1 = {v1_inf};
        } else {
            out.v0 = {0.0};
            out.v1 = {0.0};
        }
        return out;
    }
    const HermiteInterpolant pi(p_flow.times, p_flow.p);
    std::vector<double> grid;
    for (std::size_t i = 0; i < p_flow.times.size(); ++i) {
        if (p_flow.times[i] <= horizon + 1e-12) grid.push_back(p_flow.times[i]);
    }
    if (grid.empty() || grid.back() < horizon - 1e-12) grid.push_back(horizon);
    return solve_value_on(
        params, [&pi](double t) { return pi(t); }, grid, tail);
}

ValueFunction solve_value_periodic(const ModelParams& params, const ScalarFlow& a_flow,
                                   const ProbabilityFlow& p_flow, double anchor) {
    params.validate();
    if (!params.ergodic()) {
        throw ModelMismatchError("solve_value_periodic: requires the ergodic model");
    }
    if (a_flow.times.size() != p_flow.times.size() || a_flow.times.size() < 3) {
        throw PreconditionError("solve_value_periodic: flows must share a grid");
    }
    const std::size_t n = a_flow.times.size();

    // H(1, a(t), p(t)) and H(0, -a(t), p(t)) on the grid, phase-shifted by the
    // anchor when requested.
    std::vector<double> t = a_flow.times;
    std::vector<double> h1(n), h0(n), av(n);
    if (anchor != 0.0) {
        if (!p_flow.period) throw PreconditionError("solve_value_periodic: anchor needs a period");
        const double tau = *p_flow.period;
        PeriodicInterpolant aper(a_flow.times, a_flow.values, tau);
        PeriodicInterpolant pper(p_flow.times, p_flow.p, tau);
        for (std::size_t i = 0; i < n; ++i) {
            av[i] = aper(t[i] + anchor);
            const double p = clamp01(pper(t[i] + anchor));
            h1[i] = hamiltonian(1, av[i], p, params);
            h0[i] = hamiltonian(0, -av[i], p, params);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            av[i] = a_flow.values[i];
            const double p = clamp01(p_flow.p[i]);
            h1[i] = hamiltonian(1, av[i], p, params);
            h0[i] = hamiltonian(0, -av[i], p, params);
        }
    }

    const double span = t.back() - t.front();
    const double lambda = integrate_grid(t, h1) / span;

    // V(t,1) = int_0^t (lambda - H1); V(t,0) = a(0) + int_0^t (lambda - H0).
    std::vector<double> g1(n), g0(n);
    for (std::size_t i = 0; i < n; ++i) {
        g1[i] = lambda - h1[i];
        g0[i] = lambda - h0[i];
    }
    const std::vector<double> i1 = cumulative_integral(t, g1);
    const std::vector<double> i0 = cumulative_integral(t, g0);

    ValueFunction out;
    out.times = t;
    out.v0.resize(n);
    out.v1.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.v0[i] = av[0] + i0[i];
        out.v1[i] = i1[i];
    }
    out.lambda_bar = lambda;
    return out;
}

DiscountedCost cost_discounted(const ScalarFlow& a_flow, const ProbabilityFlow& p_flow, double q0,
                               const ModelParams& params) {
    params.validate();
    if (!(params.beta > 0.0)) throw ModelMismatchError("cost_discounted: requires beta > 0");
    if (a_flow.times.size() != p_flow.times.size()) {
        throw PreconditionError("cost_discounted: control and flow grids differ");
    }
    if (std::abs(q0) > 1.0) throw DomainError("cost_discounted: |q0| > 1");

    const std::vector<double>& t = a_flow.times;
    const double T = t.back();
    const HermiteInterpolant ai(a_flow.times, a_flow.values);

    // Law of the controlled chain: rho' = (sigma2 + a^+)(1 - rho) - (sigma2 + a^-) rho.
    OdeRhs rhs = [&params, &ai](double tt, const Vec& y, Vec& d) {
        const double a = ai(tt);
        const double rho = clamp01(y[0]);
        d[0] = (params.sigma2 + pos(a)) * (1.0 - rho) - (params.sigma2 + neg(a)) * rho;
    };
    const std::vector<Vec> rho = solve_ivp_record(rhs, t.front(), T, {(q0 + 1.0) / 2.0}, t);

    std::vector<double> integrand(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double a = a_flow.values[i];
        const double p = clamp01(p_flow.p[i]);
        const double r = clamp01(rho[i][0]);
        const double run = (1.0 - r) * (0.5 * pos(a) * pos(a) + params.kappa * p) +
                           r * (0.5 * neg(a) * neg(a) + params.kappa * (1.0 - p));
        integrand[i] = std::exp(-params.beta * (t[i] - t.front())) * run;
    }

    DiscountedCost out;
    out.truncated = integrate_grid(t, integrand);
    out.tail_bound = params.kappa * std::exp(-params.beta * (T - t.front())) / params.beta;

    const double p_inf = clamp01(p_flow.p.back());
    const double a_inf = stationary_gap(params, p_inf);
    const double v1_inf = hamiltonian(1, a_inf, p_inf, params) / params.beta;
    const double v0_inf = v1_inf + a_inf;
    const double rT = clamp01(rho.back()[0]);
    out.tail_estimate =
        std::exp(-params.beta * (T - t.front())) * ((1.0 - rT) * v0_inf + rT * v1_inf);
    out.cost = out.truncated + out.tail_estimate;
    return out;
}

MfgResidualReport mfg_residual(const ScalarFlow& a_flow, const ScalarFlow& q_flow,
                               const ModelParams& params) {
    params.validate();
    if (a_flow.times.size() != q_flow.times.size() || a_flow.times.size() < 5) {
        throw PreconditionError("mfg_residual: flows must share a grid of >= 5 points");
    }
    const std::vector<double>& t = a_flow.times;
    const std::size_t n = t.size();

    const std::vector<double> da = grid_derivative(t, a_flow.values, 2);
    const std::vector<double> dq = grid_derivative(t, q_flow.values, 2);

    MfgResidualReport rep;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = a_flow.values[i];
        const double q = std::clamp(q_flow.values[i], -1.0, 1.0);
        const auto [fa, fq] = vector_field(params, PhasePoint{a, q});
        rep.res_a = std::max(rep.res_a, std::abs(da[i] - fa));
        rep.res_q = std::max(rep.res_q, std::abs(dq[i] - fq));
    }

    if (params.beta > 0.0) {
        ProbabilityFlow pf;
        pf.times = t;
        pf.p.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pf.p[i] = std::clamp((q_flow.values[i] + 1.0) / 2.0, 0.0, 1.0);
        }
        const ValueFunction vf =
            solve_value_backward(params, pf, t.back(), TailMode::STATIONARY_TAIL);
        const std::vector<double> arec = vf.a();
        const HermiteInterpolant ar(vf.times, arec);
        for (std::size_t i = 0; i < n; ++i) {
            rep.res_value = std::max(rep.res_value, std::abs(a_flow.values[i] - ar(t[i])));
        }
    } else {
        // Antiderivative reconstruction: A(t) = a(0) + int_0^t (H1 - H0).
        std::vector<double> diff(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double p = std::clamp((q_flow.values[i] + 1.0) / 2.0, 0.0, 1.0);
            diff[i] = hamiltonian(1, a_flow.values[i], p, params) -
                      hamiltonian(0, -a_flow.values[i], p, params);
        }
        const std::vector<double> acc = cumulative_integral(t, diff);
        for (std::size_t i = 0; i < n; ++i) {
            rep.res_value =
                std::max(rep.res_value, std::abs(a_flow.values[i] - (a_flow.values[0] + acc[i])));
        }
    }
    return rep;
}

}  // namespace syncmfg
