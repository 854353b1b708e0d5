#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "syncmfg/dynamics.hpp"
#include "syncmfg/model.hpp"
#include "syncmfg/ode.hpp"

namespace syncmfg {

enum class StopReason {
    MAX_TIME,
    CONVERGED,       // stayed near a stationary point
    BOUNDARY_HIT,    // crossed q = +1 or q = -1 (reverse time only, forward flow stays in D)
    SECTION_RETURN,  // requested number of Poincare-section returns reached
    ESCAPED,         // |a| exceeded opts.escape_abs_a (opt-in guard for shooting)
    Q_LEVEL_HIT,     // crossed the opt-in level opts.stop_at_q
    A_LEVEL_HIT,     // crossed the opt-in level opts.stop_at_a
};

const char* stop_reason_name(StopReason r);

struct IntegrateOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;  // 0 = unlimited
    // Output: 0 records every accepted step, > 0 records at uniform spacing
    // via dense output (event points are appended exactly either way).
    double record_dt = 0.0;

    // Convergence event (off by default; a start at a fixed point then runs
    // to MAX_TIME as a constant trajectory).
    bool detect_convergence = false;
    double conv_radius = 1e-8;
    int conv_steps = 5;
    int conv_target = -1;  // restrict to this stationary-point index; -1 = any

    // Poincare section {q = 0, a > 0}, positive-direction (q rising)
    // crossings; 0 disables. Stops after this many crossings.
    int section_returns = 0;

    // Stop at the first crossing of q (resp. a) through this level (any
    // direction).
    std::optional<double> stop_at_q;
    std::optional<double> stop_at_a;

    // Escape guard for shooting; infinity disables.
    double escape_abs_a = std::numeric_limits<double>::infinity();

    // Renormalize |q| <= 1 at step end when within this distance of the
    // boundary (D-invariance is exact in the model, not in floating point).
    double boundary_clamp = 1e-12;
};

struct Trajectory {
    std::vector<double> times;       // strictly increasing, starting at t0
    std::vector<PhasePoint> points;  // one per time
    StopReason stop = StopReason::MAX_TIME;
    int fixed_point_id = -1;   // CONVERGED: index into stationary_equilibria (sorted by q)
    double boundary_q = 0.0;   // BOUNDARY_HIT: +1 or -1
    double event_time = std::numeric_limits<double>::quiet_NaN();  // crossing/return time
    int section_count = 0;     // positive-direction section crossings seen
    double energy_drift = std::numeric_limits<double>::quiet_NaN();  // max |E-E0| when beta==0
    bool reversed = false;     // integrated in reverse time (t1 < t0)

    std::size_t size() const { return times.size(); }
    const PhasePoint& back() const { return points.back(); }
    double duration() const { return times.empty() ? 0.0 : times.back() - times.front(); }

    // Component views (copies) for flow-based consumers.
    std::vector<double> a_values() const;
    std::vector<double> q_values() const;
    ProbabilityFlow p_flow() const;  // p = (q+1)/2 on the same grid
};

// Integrate the planar system from `start` over t_span = (t0, t1); t1 < t0
// integrates the time-reversed field with times recorded increasing from t0.
// Event times are located to 1e-10 via dense-output bisection.
Trajectory integrate(const ModelParams& params, const PhasePoint& start,
                     std::pair<double, double> t_span, const IntegrateOptions& opts = {});

}  // namespace syncmfg
