#include "syncmfg/discounted.hpp"

#include <algorithm>
#include <cmath>

namespace syncmfg {

namespace {

constexpr double kSeedOffset = 1e-7;
constexpr double kSeedCheckOffset = 1e-8;
constexpr double kTailSeedOffset = 1e-8;
constexpr double kOriginBall = 1e-6;     // truncation radius for inward spirals
constexpr double kSnapRadius = 1e-6;     // |q0 - q_fp| treated as the fixed point itself
constexpr double kBracketHalfWidth = 5e-4;

double escape_threshold(const ModelParams& p) { return 6.0 * std::sqrt(p.kappa) + 20.0; }

IntegrateOptions trace_options(const ModelParams& p) {
    IntegrateOptions o;
    o.rel_tol = 1e-12;
    o.abs_tol = 1e-14;
    o.max_step = 0.25;
    o.escape_abs_a = escape_threshold(p);
    return o;
}

int origin_index(const std::vector<StationaryPoint>& fps) {
    for (std::size_t i = 0; i < fps.size(); ++i) {
        if (fps[i].a == 0.0 && fps[i].q == 0.0) return static_cast<int>(i);
    }
    return -1;
}

// Reverse-time trace of one stable-manifold branch from a second-order seed.
CurveBranch trace_branch(const ModelParams& params, const std::vector<StationaryPoint>& fps,
                         int fp_id, double offset, bool stop_at_origin) {
    const StationaryPoint fp = linearize(params, fps[fp_id]);
    const double lam = std::min(fp.eigenvalues[0].real(), fp.eigenvalues[1].real());
    if (!(lam < 0.0)) throw NumericalError("trace_branch: no stable direction");
    const Vec2 v = eigenvector(params, fp, lam);
    const Vec2 seed = manifold_seed(params, fp, lam, v, offset);

    IntegrateOptions opts = trace_options(params);
    if (stop_at_origin) {
        opts.detect_convergence = true;
        opts.conv_radius = kOriginBall;
        opts.conv_steps = 1;
        opts.conv_target = origin_index(fps);
    }
    CurveBranch b;
    b.fp_id = fp_id;
    b.seed_offset = offset;
    b.lambda = lam;
    b.eigvec = v;
    b.trace = integrate(params, {seed.a, seed.q}, {0.0, -4000.0}, opts);
    if (b.trace.stop == StopReason::BOUNDARY_HIT) {
        b.outward = true;
    } else if (b.trace.stop == StopReason::CONVERGED) {
        b.outward = false;
    } else {
        throw NumericalError("trace_branch: manifold neither hit the boundary nor joined the origin");
    }
    return b;
}

// Re-seed at 1e-8 and measure how close the short trace passes to the 1e-7
// seed of the given branch (insensitivity check for the seeding offset).
double seed_consistency(const ModelParams& params, const std::vector<StationaryPoint>& fps,
                        const CurveBranch& branch) {
    const StationaryPoint fp = fps[branch.fp_id];
    const double sgn = branch.seed_offset > 0.0 ? 1.0 : -1.0;
    const Vec2 seed8 =
        manifold_seed(params, fp, branch.lambda, branch.eigvec, sgn * kSeedCheckOffset);
    const double grow_time = std::log(2.0 * kSeedOffset / kSeedCheckOffset) / -branch.lambda;
    IntegrateOptions opts = trace_options(params);
    const Trajectory t = integrate(params, {seed8.a, seed8.q}, {0.0, -grow_time}, opts);
    const Vec2 ref = manifold_seed(params, fp, branch.lambda, branch.eigvec, branch.seed_offset);
    double best = std::numeric_limits<double>::infinity();
    for (const PhasePoint& p : t.points) {
        best = std::min(best, std::hypot(p.a - ref.a, p.q - ref.q));
    }
    return best;
}

bool is_monotone(const std::vector<PhasePoint>& pts) {
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].q < pts[i - 1].q - 1e-12) return false;
        if (pts[i].a < pts[i - 1].a - 1e-12) return false;
    }
    return true;
}

int sign_changes_q(const std::vector<PhasePoint>& pts) {
    // Deadband keeps round-off jitter near q = 0 from counting as turns.
    constexpr double kDeadband = 1e-7;
    int count = 0;
    double last = 0.0;
    for (const PhasePoint& p : pts) {
        if (std::abs(p.q) <= kDeadband) continue;
        const double s = p.q > 0.0 ? 1.0 : -1.0;
        if (last != 0.0 && s != last) ++count;
        last = s;
    }
    return count;
}

void append_reversed(std::vector<PhasePoint>& out, const Trajectory& t) {
    for (auto it = t.points.rbegin(); it != t.points.rend(); ++it) out.push_back(*it);
}

void append_forward(std::vector<PhasePoint>& out, const Trajectory& t) {
    for (const PhasePoint& p : t.points) out.push_back(p);
}

// Escape-direction predicate for the shooting refinement: +1/-1 for the sign
// of a at escape, 0 when the forward path stays bounded over the horizon.
int escape_direction(const ModelParams& params, double a, double q0) {
    IntegrateOptions opts;
    opts.rel_tol = 1e-11;
    opts.abs_tol = 1e-13;
    opts.max_step = 0.5;
    opts.escape_abs_a = escape_threshold(params);
    opts.detect_convergence = true;
    opts.conv_radius = 1e-8;
    opts.conv_steps = 5;
    const Trajectory t = integrate(params, {a, q0}, {0.0, 600.0}, opts);
    if (t.stop == StopReason::ESCAPED) return t.back().a > 0.0 ? 1 : -1;
    return 0;
}

struct Crossing {
    std::size_t branch;
    double trace_time;  // reverse-trace time of the crossing
    double a;           // control gap at the crossing
};

}  // namespace

EquilibriumCurve trace_equilibrium_curve(const ModelParams& params) {
    params.validate();
    if (!(params.beta > 0.0)) {
        throw ModelMismatchError("trace_equilibrium_curve: requires beta > 0 (discounted model)");
    }
    const RegimeReport rep = critical_coupling(params);
    if (rep.regime == Regime::BOUNDARY) {
        throw PreconditionError("trace_equilibrium_curve: kappa sits on a regime threshold");
    }
    const std::vector<StationaryPoint> fps = stationary_equilibria(params);

    EquilibriumCurve curve;
    curve.regime = rep.regime;

    if (rep.regime == Regime::SUBCRITICAL) {
        // Both halves of the origin's stable manifold, outward to the boundary.
        CurveBranch up = trace_branch(params, fps, 0, kSeedOffset, false);
        CurveBranch down = trace_branch(params, fps, 0, -kSeedOffset, false);
        if (!(up.trace.boundary_q > 0.0) || !(down.trace.boundary_q < 0.0)) {
            throw NumericalError("trace_equilibrium_curve: unexpected boundary orientation");
        }
        curve.seed_check = seed_consistency(params, fps, up);
        append_reversed(curve.points, down.trace);
        curve.points.push_back({0.0, 0.0});
        append_forward(curve.points, up.trace);
        curve.branches.push_back(std::move(down));
        curve.branches.push_back(std::move(up));
    } else {
        // Stable manifolds of the two saddles; inward halves join the origin.
        const int neg = 0, pos = 2;
        CurveBranch pos_a = trace_branch(params, fps, pos, kSeedOffset, true);
        CurveBranch pos_b = trace_branch(params, fps, pos, -kSeedOffset, true);
        if (pos_a.outward == pos_b.outward) {
            throw NumericalError("trace_equilibrium_curve: saddle branches failed to split");
        }
        CurveBranch& pos_out = pos_a.outward ? pos_a : pos_b;
        CurveBranch& pos_in = pos_a.outward ? pos_b : pos_a;
        CurveBranch neg_a = trace_branch(params, fps, neg, kSeedOffset, true);
        CurveBranch neg_b = trace_branch(params, fps, neg, -kSeedOffset, true);
        if (neg_a.outward == neg_b.outward) {
            throw NumericalError("trace_equilibrium_curve: saddle branches failed to split");
        }
        CurveBranch& neg_out = neg_a.outward ? neg_a : neg_b;
        CurveBranch& neg_in = neg_a.outward ? neg_b : neg_a;
        if (!(pos_out.trace.boundary_q > 0.0) || !(neg_out.trace.boundary_q < 0.0)) {
            throw NumericalError("trace_equilibrium_curve: unexpected boundary orientation");
        }

        curve.winding_count = std::max(sign_changes_q(pos_in.trace.points),
                                       sign_changes_q(neg_in.trace.points));
        curve.seed_check = seed_consistency(params, fps, pos_out);

        append_reversed(curve.points, neg_out.trace);
        curve.points.push_back({fps[neg].a, fps[neg].q});
        append_forward(curve.points, neg_in.trace);
        curve.points.push_back({0.0, 0.0});
        append_reversed(curve.points, pos_in.trace);
        curve.points.push_back({fps[pos].a, fps[pos].q});
        append_forward(curve.points, pos_out.trace);

        curve.branches.push_back(std::move(neg_out));
        curve.branches.push_back(std::move(neg_in));
        curve.branches.push_back(std::move(pos_in));
        curve.branches.push_back(std::move(pos_out));
    }
    curve.monotone = is_monotone(curve.points);
    return curve;
}

std::vector<NashSolution> solve_ne(const ModelParams& params, double q0) {
    return solve_ne(params, q0, trace_equilibrium_curve(params));
}

std::vector<NashSolution> solve_ne(const ModelParams& params, double q0,
                                   const EquilibriumCurve& curve) {
    params.validate();
    if (!(params.beta > 0.0)) throw ModelMismatchError("solve_ne: requires beta > 0");
    if (std::abs(q0) > 1.0) throw DomainError("solve_ne: |q0| > 1");

    const std::vector<StationaryPoint> fps = stationary_equilibria(params);
    std::vector<NashSolution> out;

    // Crossings of every branch trace with the line q = q0.
    std::vector<Crossing> crossings;
    for (std::size_t bi = 0; bi < curve.branches.size(); ++bi) {
        const Trajectory& tr = curve.branches[bi].trace;
        for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
            const double g0 = tr.points[i].q - q0;
            const double g1 = tr.points[i + 1].q - q0;
            const bool bracket = (g0 < 0.0 && g1 > 0.0) || (g0 > 0.0 && g1 < 0.0);
            const bool exact_end = (g1 == 0.0) && (i + 2 == tr.size());
            if (!bracket && !exact_end) continue;
            if (exact_end) {
                crossings.push_back({bi, tr.times[i + 1], tr.points[i + 1].a});
                continue;
            }
            // Locate the crossing exactly by re-running the reverse flow over
            // this segment with a q-level stop; the result lies on the branch.
            IntegrateOptions opts = trace_options(params);
            opts.stop_at_q = q0;
            const double seg = tr.times[i + 1] - tr.times[i];
            const Trajectory loc =
                integrate(params, tr.points[i], {0.0, -2.0 * seg - 1e-6}, opts);
            if (loc.stop != StopReason::Q_LEVEL_HIT) continue;
            crossings.push_back({bi, tr.times[i] + (loc.times.back() - loc.times.front()),
                                 loc.back().a});
        }
    }

    // Shooting refinement, then a composed trajectory: curve section run
    // forward, then a fresh manifold tail into the limit point.
    for (const Crossing& c : crossings) {
        const CurveBranch& branch = curve.branches[c.branch];
        double a_star = c.a;

        const double w = kBracketHalfWidth;
        int plo = escape_direction(params, a_star - w, q0);
        int phi = escape_direction(params, a_star + w, q0);
        if (plo != 0 && phi != 0 && plo != phi) {
            double lo = a_star - w, hi = a_star + w;
            for (int it = 0; it < 64 && hi - lo > 1e-14 * std::max(1.0, std::abs(a_star)); ++it) {
                const double mid = 0.5 * (lo + hi);
                const int pm = escape_direction(params, mid, q0);
                if (pm == 0) {
                    lo = hi = mid;
                    break;
                }
                if (pm == plo) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double refined = 0.5 * (lo + hi);
            // Keep the curve point unless the shooting result genuinely
            // disagrees (it should not).
            if (std::abs(refined - a_star) < 10.0 * w) a_star = refined;
        }

        NashSolution sol;
        sol.a_star = a_star;
        sol.limit = branch.fp_id;

        // Piece A: branch samples up to the crossing, reversed into forward time.
        Trajectory traj;
        traj.times.push_back(0.0);
        traj.points.push_back({a_star, q0});
        const Trajectory& tr = branch.trace;
        for (std::size_t k = tr.size(); k-- > 0;) {
            const double tau = tr.times[k] - tr.times.front();
            if (tau >= c.trace_time - 1e-12) continue;
            traj.times.push_back(c.trace_time - tau);
            traj.points.push_back(tr.points[k]);
        }

        // Piece B: tail from a tight second-order manifold seed.
        const StationaryPoint fp = fps[branch.fp_id];
        const double sgn = branch.seed_offset > 0.0 ? 1.0 : -1.0;
        const Vec2 tail_seed =
            manifold_seed(params, fp, branch.lambda, branch.eigvec, sgn * kTailSeedOffset);
        IntegrateOptions topts;
        topts.rel_tol = 1e-12;
        topts.abs_tol = 1e-14;
        topts.max_step = 0.25;
        topts.detect_convergence = true;
        topts.conv_radius = 1e-8;
        topts.conv_steps = 5;
        topts.conv_target = branch.fp_id;
        const Trajectory tail =
            integrate(params, {tail_seed.a, tail_seed.q}, {0.0, 4000.0}, topts);
        if (tail.stop != StopReason::CONVERGED) {
            throw NumericalError("solve_ne: manifold tail failed to converge");
        }
        const double t_off = traj.times.back();
        for (std::size_t k = 1; k < tail.size(); ++k) {
            traj.times.push_back(t_off + tail.times[k]);
            traj.points.push_back(tail.points[k]);
        }
        traj.stop = StopReason::CONVERGED;
        traj.fixed_point_id = branch.fp_id;
        traj.event_time = traj.times.back();

        sol.trajectory = std::move(traj);
        sol.half_turns = sign_changes_q(sol.trajectory.points);
        out.push_back(std::move(sol));
    }

    // Fixed points whose q matches q0: the stationary solution itself.
    // Skipped when a traced crossing already represents that solution.
    for (std::size_t i = 0; i < fps.size(); ++i) {
        const double dq = q0 - fps[i].q;
        if (std::abs(dq) > kSnapRadius) continue;
        bool covered = false;
        for (const NashSolution& s : out) {
            if (s.limit == static_cast<int>(i) && std::abs(s.a_star - fps[i].a) < 1e-3) {
                covered = true;
            }
        }
        if (covered) continue;
        NashSolution sol;
        sol.limit = static_cast<int>(i);
        if (std::abs(dq) <= 1e-9) {
            sol.a_star = fps[i].a;
        } else {
            // Inside the seeding gap of the traced branches: linearized offset
            // along the stable eigenvector.
            const StationaryPoint lp = linearize(params, fps[i]);
            const double lam = std::min(lp.eigenvalues[0].real(), lp.eigenvalues[1].real());
            if (lam < 0.0) {
                const Vec2 v = eigenvector(params, lp, lam);
                sol.a_star = fps[i].a + v.a / v.q * dq;
            } else {
                sol.a_star = fps[i].a;
            }
        }
        IntegrateOptions copts;
        copts.detect_convergence = true;
        copts.conv_radius = 1e-8;
        copts.conv_steps = 5;
        copts.conv_target = static_cast<int>(i);
        Trajectory traj = integrate(params, {fps[i].a, fps[i].q}, {0.0, 50.0}, copts);
        traj.points.front() = {sol.a_star, q0};
        sol.trajectory = std::move(traj);
        sol.half_turns = 0;
        out.push_back(std::move(sol));
    }

    if (out.empty()) {
        throw NumericalError("solve_ne: no intersection of the equilibrium curve with q0 = " +
                             std::to_string(q0));
    }

    std::sort(out.begin(), out.end(),
              [](const NashSolution& x, const NashSolution& y) { return x.a_star < y.a_star; });
    // Merge duplicates from adjacent-segment brackets.
    std::vector<NashSolution> dedup;
    for (auto& s : out) {
        if (!dedup.empty() && std::abs(dedup.back().a_star - s.a_star) < 1e-7) continue;
        dedup.push_back(std::move(s));
    }
    return dedup;
}

}  // namespace syncmfg

