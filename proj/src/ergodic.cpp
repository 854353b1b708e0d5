#include "syncmfg/ergodic.hpp"

#include <algorithm>
#include <cmath>

#include "syncmfg/ode.hpp"

namespace syncmfg {

namespace {

void require_ergodic(const ModelParams& p, const char* who) {
    p.validate();
    if (!p.ergodic()) throw ModelMismatchError(std::string(who) + ": requires beta = 0");
}

double kappa_c(const ModelParams& p) { return 4.0 * p.sigma2 * p.sigma2; }

// Largest |a| on the lens: the saddle gap abar.
double supercritical_abar(const ModelParams& p) {
    return stationary_equilibria(p)[2].a;
}

}  // namespace

double subcritical_manifold_graph(const ModelParams& params, double a) {
    require_ergodic(params, "subcritical_manifold_graph");
    const double kc = kappa_c(params);
    if (!(params.kappa < kc)) {
        throw PreconditionError("subcritical_manifold_graph: requires kappa < kappa_c");
    }
    const double s = a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0);
    const double root =
        std::sqrt(a * a + 8.0 * params.sigma2 * std::abs(a) + 4.0 * (kc - params.kappa));
    return (s * a * a + 4.0 * params.sigma2 * a + a * root) / (2.0 * params.kappa);
}

PeriodicOrbit periodic_orbit(const ModelParams& params, double a0) {
    require_ergodic(params, "periodic_orbit");
    const double kc = kappa_c(params);
    if (!(params.kappa > kc)) throw PreconditionError("periodic_orbit: requires kappa > kappa_c");
    if (!(a0 > 0.0)) throw DomainError("periodic_orbit: a0 must be positive");
    const auto fps = stationary_equilibria(params);
    const double e_lens = energy(params, {fps[2].a, fps[2].q});
    const double e0 = energy(params, {a0, 0.0});
    if (!(e0 < e_lens)) {
        throw DomainError("periodic_orbit: (a0, 0) lies outside the lens");
    }

    const double t_linear = 2.0 * M_PI / std::sqrt(params.kappa - kc);
    IntegrateOptions opts;
    opts.section_returns = 1;
    Trajectory probe = integrate(params, {a0, 0.0}, {0.0, 100.0 * t_linear}, opts);
    if (probe.stop != StopReason::SECTION_RETURN) {
        throw NumericalError("periodic_orbit: no section return (not periodic)");
    }
    PeriodicOrbit orbit;
    orbit.seed = {a0, 0.0};
    orbit.period = probe.event_time;
    orbit.energy = e0;

    IntegrateOptions rec;
    rec.record_dt = orbit.period / 1024.0;
    orbit.orbit = integrate(params, {a0, 0.0}, {0.0, orbit.period}, rec);
    return orbit;
}

LensReport lens(const ModelParams& params) {
    require_ergodic(params, "lens");
    const double kc = kappa_c(params);
    if (!(params.kappa > kc)) throw PreconditionError("lens: requires kappa > kappa_c");
    const auto fps = stationary_equilibria(params);

    LensReport rep;
    rep.saddle_neg = linearize(params, fps[0]);
    rep.saddle_pos = linearize(params, fps[2]);
    rep.energy_level = energy(params, {fps[2].a, fps[2].q});

    // Each heteroclinic arc is the unstable manifold of one saddle; the side
    // flowing into the lens is picked by outcome.
    auto trace_arc = [&](int from_id, int to_id) {
        const StationaryPoint from = from_id == 2 ? rep.saddle_pos : rep.saddle_neg;
        const double lam_u =
            std::max(from.eigenvalues[0].real(), from.eigenvalues[1].real());
        const Vec2 vu = eigenvector(params, from, lam_u);
        for (const double sgn : {1.0, -1.0}) {
            const Vec2 seed = manifold_seed(params, from, lam_u, vu, sgn * 1e-8);
            IntegrateOptions opts;
            opts.rel_tol = 1e-12;
            opts.abs_tol = 1e-14;
            opts.max_step = 0.1;
            opts.detect_convergence = true;
            opts.conv_radius = 1e-5;  // the traced arc lands this close to the far saddle
            opts.conv_steps = 1;
            opts.conv_target = to_id;
            opts.escape_abs_a = 6.0 * std::sqrt(params.kappa) + 20.0;
            Trajectory t;
            try {
                t = integrate(params, {seed.a, seed.q}, {0.0, 2000.0}, opts);
            } catch (const NumericalError&) {
                continue;
            }
            if (t.stop == StopReason::CONVERGED && t.fixed_point_id == to_id) {
                std::vector<PhasePoint> arc;
                arc.push_back({from.a, from.q});
                for (const PhasePoint& p : t.points) arc.push_back(p);
                arc.push_back({fps[to_id].a, fps[to_id].q});
                return arc;
            }
        }
        throw NumericalError("lens: heteroclinic arc not found");
    };

    rep.upper = trace_arc(2, 0);  // from (abar,qbar) above the origin to the mirror saddle
    rep.lower = trace_arc(0, 2);
    return rep;
}

std::vector<Trajectory> solve_finite_horizon(const ModelParams& params, double q0, double T) {
    require_ergodic(params, "solve_finite_horizon");
    if (!(T > 0.0)) throw PreconditionError("solve_finite_horizon: T must be positive");
    if (std::abs(q0) > 1.0) throw DomainError("solve_finite_horizon: |q0| > 1");

    const double kc = kappa_c(params);
    double a_extent;
    if (params.kappa > kc) {
        a_extent = supercritical_abar(params);
    } else {
        // Range of the manifold graph inside the strip: n(a_bd) = 1.
        double lo = 0.0, hi = 1.0;
        while (subcritical_manifold_graph(params, hi) < 1.0) hi *= 2.0;
        for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
            const double mid = 0.5 * (lo + hi);
            (subcritical_manifold_graph(params, mid) < 1.0 ? lo : hi) = mid;
        }
        a_extent = hi;
    }
    const double limit = a_extent + 1.0;

    IntegrateOptions opts;
    opts.escape_abs_a = 6.0 * std::sqrt(params.kappa) + 20.0;
    auto terminal_gap = [&](double a0, bool& valid) {
        const Trajectory t = integrate(params, {a0, q0}, {0.0, T}, opts);
        valid = t.stop == StopReason::MAX_TIME;
        return valid ? t.back().a : 0.0;
    };

    const int grid_n = 2001;
    std::vector<double> a0s(grid_n), gap(grid_n);
    std::vector<bool> valid(grid_n);
    for (int i = 0; i < grid_n; ++i) {
        a0s[i] = -limit + 2.0 * limit * i / (grid_n - 1);
        bool v = false;
        double g = 0.0;
        try {
            g = terminal_gap(a0s[i], v);
        } catch (const NumericalError&) {
            v = false;
        }
        valid[i] = v;
        gap[i] = g;
    }

    std::vector<double> roots;
    auto add_root = [&](double r) {
        for (const double x : roots) {
            if (std::abs(x - r) < 1e-6) return;
        }
        roots.push_back(r);
    };
    for (int i = 0; i + 1 < grid_n; ++i) {
        if (!valid[i] || !valid[i + 1]) continue;
        if (std::abs(gap[i]) < 1e-8) {
            add_root(a0s[i]);
            continue;
        }
        if (gap[i] * gap[i + 1] < 0.0) {
            double lo = a0s[i], hi = a0s[i + 1];
            double glo = gap[i];
            for (int it = 0; it < 80 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                bool v = false;
                double gm = 0.0;
                try {
                    gm = terminal_gap(mid, v);
                } catch (const NumericalError&) {
                    v = false;
                }
                if (!v) break;
                if ((glo < 0.0) == (gm < 0.0)) {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double r = 0.5 * (lo + hi);
            bool v = false;
            if (std::abs(terminal_gap(r, v)) < 1e-8 && v) add_root(r);
        }
    }
    if (valid[grid_n - 1] && std::abs(gap[grid_n - 1]) < 1e-8) add_root(a0s[grid_n - 1]);

    if (roots.empty()) {
        throw NumericalError("solve_finite_horizon: no solution found on the shooting grid");
    }
    std::sort(roots.begin(), roots.end());

    std::vector<Trajectory> out;
    IntegrateOptions rec = opts;
    rec.record_dt = std::min(0.01, T / 400.0);
    for (const double a0 : roots) {
        out.push_back(integrate(params, {a0, q0}, {0.0, T}, rec));
    }
    return out;
}

double turnpike_fraction(const Trajectory& traj, double delta, const ModelParams& params) {
    params.validate();
    if (traj.points.empty()) throw PreconditionError("turnpike_fraction: empty trajectory");
    const auto fps = stationary_equilibria(params);
    if (fps.size() < 3) return 0.0;
    if (traj.size() == 1) {
        const PhasePoint& p = traj.points[0];
        const double d = std::min(std::hypot(p.a - fps[2].a, p.q - fps[2].q),
                                  std::hypot(p.a - fps[0].a, p.q - fps[0].q));
        return d <= delta ? 1.0 : 0.0;
    }
    double inside = 0.0, total = 0.0;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        double w = 0.0;
        if (i > 0) w += 0.5 * (traj.times[i] - traj.times[i - 1]);
        if (i + 1 < traj.size()) w += 0.5 * (traj.times[i + 1] - traj.times[i]);
        const PhasePoint& p = traj.points[i];
        const double d = std::min(std::hypot(p.a - fps[2].a, p.q - fps[2].q),
                                  std::hypot(p.a - fps[0].a, p.q - fps[0].q));
        total += w;
        if (d <= delta) inside += w;
    }
    return total > 0.0 ? inside / total : 0.0;
}

double ergodic_lambda(const ScalarFlow& a_flow, const ProbabilityFlow& p_flow,
                      const ModelParams& params) {
    require_ergodic(params, "ergodic_lambda");
    if (a_flow.times.size() != p_flow.times.size() || a_flow.times.size() < 3) {
        throw PreconditionError("ergodic_lambda: flows must share a grid");
    }
    const std::size_t n = a_flow.times.size();
    const double scale_a =
        std::max(1e-12, *std::max_element(a_flow.values.begin(), a_flow.values.end()) -
                            *std::min_element(a_flow.values.begin(), a_flow.values.end()));
    const bool const_a = scale_a <= 1e-12;
    if (!const_a) {
        const double gap_a = std::abs(a_flow.values.front() - a_flow.values.back());
        const double gap_p = std::abs(p_flow.p.front() - p_flow.p.back());
        if (gap_a > 1e-5 * std::max(1.0, scale_a) || gap_p > 1e-5) {
            throw PreconditionError("ergodic_lambda: flows are not periodic on their span");
        }
    }
    std::vector<double> h1(n);
    for (std::size_t i = 0; i < n; ++i) {
        h1[i] = hamiltonian(1, a_flow.values[i], std::clamp(p_flow.p[i], 0.0, 1.0), params);
    }
    const double span = a_flow.times.back() - a_flow.times.front();

    // Uniform grids use composite Simpson; fall back to the Hermite-corrected
    // trapezoid otherwise.
    bool uniform = true;
    const double dt = a_flow.times[1] - a_flow.times[0];
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (std::abs((a_flow.times[i + 1] - a_flow.times[i]) - dt) > 1e-9 * std::max(1.0, dt)) {
            uniform = false;
            break;
        }
    }
    const double integral = uniform ? simpson_uniform(a_flow.times, h1)
                                    : integrate_grid(a_flow.times, h1);
    return integral / span;
}

VanishingDiscountReport vanishing_discount(const ModelParams& params,
                                           const ProbabilityFlow& p_flow,
                                           const std::vector<double>& beta_seq) {
    require_ergodic(params, "vanishing_discount");
    if (beta_seq.size() < 2) throw PreconditionError("vanishing_discount: need >= 2 betas");
    for (std::size_t i = 1; i < beta_seq.size(); ++i) {
        if (!(beta_seq[i] < beta_seq[i - 1]) || !(beta_seq[i] > 0.0)) {
            throw PreconditionError("vanishing_discount: betas must be positive decreasing");
        }
    }
    if (p_flow.times.size() < 4) throw PreconditionError("vanishing_discount: need a flow");

    // Periodic (or constant) population flow, evaluated for arbitrary t >= 0.
    double tau = p_flow.period.value_or(0.0);
    std::function<double(double)> p_of_t;
    const auto [pmin_it, pmax_it] = std::minmax_element(p_flow.p.begin(), p_flow.p.end());
    if (*pmax_it - *pmin_it <= 1e-12) {
        const double pc = p_flow.p.front();
        p_of_t = [pc](double) { return pc; };
        if (tau <= 0.0) tau = p_flow.times.back() - p_flow.times.front();
    } else {
        if (tau <= 0.0) throw PreconditionError("vanishing_discount: flow must be periodic");
        PeriodicInterpolant pi(p_flow.times, p_flow.p, tau);
        p_of_t = [pi](double t) { return pi(t); };
    }

    VanishingDiscountReport rep;
    rep.betas = beta_seq;
    rep.min_beta_v = std::numeric_limits<double>::infinity();
    for (const double beta : beta_seq) {
        ModelParams pb = params;
        pb.beta = beta;
        const double horizon = std::max(20.0 / beta, 2.0 * tau);
        // Record densely over two periods at the front, then to the horizon.
        std::vector<double> grid;
        const int m = 512;
        for (int i = 0; i <= m; ++i) grid.push_back(2.0 * tau * i / m);
        grid.push_back(horizon);
        const ValueFunction vf = solve_value_on(pb, p_of_t, grid, TailMode::STATIONARY_TAIL);
        rep.beta_v.push_back(beta * vf.v0.front());
        for (std::size_t i = 0; i + 1 < vf.times.size(); ++i) {  // skip the frozen-tail node
            rep.max_beta_v = std::max({rep.max_beta_v, beta * vf.v0[i], beta * vf.v1[i]});
            rep.min_beta_v = std::min({rep.min_beta_v, beta * vf.v0[i], beta * vf.v1[i]});
            rep.max_abs_gap = std::max(rep.max_abs_gap, std::abs(vf.v0[i] - vf.v1[i]));
        }
    }
    const std::size_t n = beta_seq.size();
    const double b1 = beta_seq[n - 2], b2 = beta_seq[n - 1];
    const double x1 = rep.beta_v[n - 2], x2 = rep.beta_v[n - 1];
    rep.lambda_estimate = (b1 * x2 - b2 * x1) / (b1 - b2);
    rep.bounds_ok = rep.min_beta_v >= -1e-9 && rep.max_beta_v <= params.kappa + 1e-9;
    rep.gap_bound_ok = rep.max_abs_gap <= 2.0 * std::sqrt(params.kappa) + 1e-9;
    return rep;
}

}  // namespace syncmfg

