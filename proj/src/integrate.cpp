#include "syncmfg/integrate.hpp"

#include <algorithm>
#include <cmath>

namespace syncmfg {

namespace {

constexpr double kEventTimeTol = 1e-10;

double clamp_q(double q) { return std::clamp(q, -1.0, 1.0); }

// Field evaluation for the stepper: q silently clamped to [-1,1] so RK stages
// that poke past the boundary by rounding stay evaluable; direction folds the
// time reversal into the RHS.
struct PlanarRhs {
    ModelParams params;
    double dir;
    void operator()(double, const Vec& y, Vec& dydt) const {
        const double a = y[0], q = clamp_q(y[1]);
        const double da =
            (params.beta + 2.0 * params.sigma2) * a +
            0.5 * (a > 0.0 ? 1.0 : (a < 0.0 ? -1.0 : 0.0)) * a * a - params.kappa * q;
        const double dq = a - (2.0 * params.sigma2 + std::abs(a)) * q;
        dydt[0] = dir * da;
        dydt[1] = dir * dq;
    }
};

// Bisection on the dense interpolant for g(theta) = y[comp](theta) - level.
double locate_crossing(const DenseStep& dense, std::size_t comp, double level, double lo,
                       double hi) {
    double glo = dense.eval1(comp, lo) - level;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gmid = dense.eval1(comp, mid) - level;
        if ((glo <= 0.0) == (gmid <= 0.0)) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
        }
        if ((hi - lo) * std::abs(dense.h) < kEventTimeTol) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::MAX_TIME: return "MAX_TIME";
        case StopReason::CONVERGED: return "CONVERGED";
        case StopReason::BOUNDARY_HIT: return "BOUNDARY_HIT";
        case StopReason::SECTION_RETURN: return "SECTION_RETURN";
        case StopReason::ESCAPED: return "ESCAPED";
        case StopReason::Q_LEVEL_HIT: return "Q_LEVEL_HIT";
        case StopReason::A_LEVEL_HIT: return "A_LEVEL_HIT";
    }
    return "?";
}

std::vector<double> Trajectory::a_values() const {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i].a;
    return out;
}

std::vector<double> Trajectory::q_values() const {
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) out[i] = points[i].q;
    return out;
}

ProbabilityFlow Trajectory::p_flow() const {
    ProbabilityFlow f;
    f.times = times;
    f.p.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) f.p[i] = (points[i].q + 1.0) / 2.0;
    return f;
}

Trajectory integrate(const ModelParams& params, const PhasePoint& start,
                     std::pair<double, double> t_span, const IntegrateOptions& opts) {
    params.validate();
    if (std::abs(start.q) > 1.0 + opts.boundary_clamp) {
        throw DomainError("integrate: start outside the strip D");
    }
    if (!std::isfinite(t_span.first) || !std::isfinite(t_span.second)) {
        throw DomainError("integrate: time span must be finite");
    }

    const double t0 = t_span.first;
    const double total = std::abs(t_span.second - t_span.first);
    const double dir = t_span.second >= t_span.first ? 1.0 : -1.0;

    Trajectory traj;
    traj.reversed = dir < 0.0;

    const std::vector<StationaryPoint> fps = stationary_equilibria(params);

    Vec y = {start.a, clamp_q(start.q)};
    double s = 0.0;

    auto emit = [&](double si, double a, double q) {
        if (!traj.times.empty() && t0 + si <= traj.times.back() + 1e-15) return;
        traj.times.push_back(t0 + si);
        traj.points.push_back({a, q});
    };
    emit(0.0, y[0], y[1]);

    if (total == 0.0) {
        traj.stop = StopReason::MAX_TIME;
        if (params.ergodic()) traj.energy_drift = 0.0;
        return traj;
    }

    OdeOptions oo;
    oo.rel_tol = opts.rel_tol;
    oo.abs_tol = opts.abs_tol;
    oo.max_step = opts.max_step;
    PlanarRhs rhs{params, dir};
    DormandPrince5 stepper([rhs](double t, const Vec& yy, Vec& dd) { rhs(t, yy, dd); }, 2, oo);
    stepper.start(0.0, y, 1.0);

    double next_record = opts.record_dt > 0.0 ? opts.record_dt : 0.0;
    int conv_counter = 0;
    int conv_id = -1;
    bool done = false;
    DenseStep dense;
    Vec ytmp(2);

    std::size_t steps = 0;
    while (!done) {
        if (++steps > oo.max_steps) {
            throw NumericalError("integrate: step budget exhausted", t0 + s, y[0], y[1]);
        }
        stepper.clamp_next_step(std::max(total - s, 1e-13));
        double s_prev = s;
        try {
            stepper.step(s, y, dense);
        } catch (const NumericalError&) {
            throw NumericalError("integrate: step-size underflow (stiffness)", t0 + s, y[0], y[1]);
        }

        double s_stop = s;           // where this step's emission ends
        bool truncated = false;

        // Level crossings: the strip boundary and the optional user levels.
        struct LevelEvent {
            double level;
            std::size_t comp;
            StopReason reason;
        };
        LevelEvent levels[4] = {{1.0, 1, StopReason::BOUNDARY_HIT},
                                {-1.0, 1, StopReason::BOUNDARY_HIT},
                                {0.0, 1, StopReason::Q_LEVEL_HIT},
                                {0.0, 0, StopReason::A_LEVEL_HIT}};
        int n_levels = 2;
        if (opts.stop_at_q) levels[n_levels++] = {*opts.stop_at_q, 1, StopReason::Q_LEVEL_HIT};
        if (opts.stop_at_a) levels[n_levels++] = {*opts.stop_at_a, 0, StopReason::A_LEVEL_HIT};
        for (int li = 0; li < n_levels; ++li) {
            const double level = levels[li].level;
            const std::size_t comp = levels[li].comp;
            const double g0 = dense.eval1(comp, 0.0) - level;
            const double g1 = dense.eval1(comp, 1.0) - level;
            if (g0 == 0.0 && s_prev == 0.0) continue;  // started exactly on the level
            if ((g0 < 0.0 && g1 >= 0.0) || (g0 > 0.0 && g1 <= 0.0)) {
                const double th = locate_crossing(dense, comp, level, 0.0, 1.0);
                const double sc = s_prev + th * dense.h;
                if (!truncated || sc < s_stop) {
                    s_stop = sc;
                    truncated = true;
                    traj.stop = levels[li].reason;
                    if (traj.stop == StopReason::BOUNDARY_HIT) traj.boundary_q = level;
                    traj.event_time = t0 + sc;
                }
            }
        }

        // Poincare-section crossings: q rising through 0 with a > 0.
        if (opts.section_returns > 0 && !truncated) {
            const double q0v = dense.eval1(1, 0.0);
            const double q1v = dense.eval1(1, 1.0);
            if (q0v < 0.0 && q1v >= 0.0) {
                const double th = locate_crossing(dense, 1, 0.0, 0.0, 1.0);
                const double ac = dense.eval1(0, th);
                if (ac > 0.0) {
                    const double sc = s_prev + th * dense.h;
                    ++traj.section_count;
                    if (traj.section_count >= opts.section_returns) {
                        s_stop = sc;
                        truncated = true;
                        traj.stop = StopReason::SECTION_RETURN;
                        traj.event_time = t0 + sc;
                    }
                }
            }
        }

        // Emit uniform records up to the stop point of this step.
        if (opts.record_dt > 0.0) {
            while (next_record < s_stop - 1e-15 && next_record < total) {
                const double th = (next_record - s_prev) / dense.h;
                dense.eval(th, ytmp);
                emit(next_record, ytmp[0], clamp_q(ytmp[1]));
                next_record += opts.record_dt;
            }
        }

        if (truncated) {
            const double th = (s_stop - s_prev) / dense.h;
            dense.eval(th, ytmp);
            double qe = ytmp[1];
            if (traj.stop == StopReason::BOUNDARY_HIT) qe = traj.boundary_q;
            if (traj.stop == StopReason::Q_LEVEL_HIT) qe = *opts.stop_at_q;
            if (traj.stop == StopReason::A_LEVEL_HIT) ytmp[0] = *opts.stop_at_a;
            emit(s_stop, ytmp[0], clamp_q(qe));
            done = true;
            break;
        }

        // Step-end clamp near the boundary.
        if (std::abs(y[1]) > 1.0 && std::abs(y[1]) - 1.0 <= opts.boundary_clamp) {
            y[1] = y[1] > 0.0 ? 1.0 : -1.0;
        }

        if (opts.record_dt == 0.0) emit(s, y[0], y[1]);

        // Escape guard.
        if (std::abs(y[0]) > opts.escape_abs_a) {
            if (opts.record_dt > 0.0) emit(s, y[0], clamp_q(y[1]));
            traj.stop = StopReason::ESCAPED;
            traj.event_time = t0 + s;
            done = true;
            break;
        }

        // Convergence: stay within conv_radius of one stationary point for
        // conv_steps consecutive accepted steps.
        if (opts.detect_convergence) {
            int nearest = -1;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < fps.size(); ++i) {
                if (opts.conv_target >= 0 && static_cast<int>(i) != opts.conv_target) continue;
                const double d = std::hypot(y[0] - fps[i].a, y[1] - fps[i].q);
                if (d < best) {
                    best = d;
                    nearest = static_cast<int>(i);
                }
            }
            if (best <= opts.conv_radius) {
                if (nearest == conv_id) {
                    ++conv_counter;
                } else {
                    conv_id = nearest;
                    conv_counter = 1;
                }
                if (conv_counter >= opts.conv_steps) {
                    if (opts.record_dt > 0.0) emit(s, y[0], clamp_q(y[1]));
                    traj.stop = StopReason::CONVERGED;
                    traj.fixed_point_id = conv_id;
                    traj.event_time = t0 + s;
                    done = true;
                    break;
                }
            } else {
                conv_counter = 0;
                conv_id = -1;
            }
        }

        if (s >= total - 1e-13) {
            if (opts.record_dt > 0.0 && (traj.times.empty() || traj.times.back() < t0 + s - 1e-15)) {
                emit(s, y[0], clamp_q(y[1]));
            }
            traj.stop = StopReason::MAX_TIME;
            done = true;
        }
    }

    if (params.ergodic()) {
        const double e0 = energy(params, traj.points.front());
        double drift = 0.0;
        for (const PhasePoint& p : traj.points) {
            drift = std::max(drift, std::abs(energy(params, p) - e0));
        }
        traj.energy_drift = drift;
    }
    return traj;
}

}  // namespace syncmfg
