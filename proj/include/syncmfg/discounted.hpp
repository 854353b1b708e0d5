#pragma once

#include <vector>

#include "syncmfg/integrate.hpp"
#include "syncmfg/model.hpp"

namespace syncmfg {

// One traced stable-manifold branch of the equilibrium curve.
struct CurveBranch {
    int fp_id = 0;            // owning stationary point (index, sorted by q)
    double seed_offset = 0.0; // signed arc offset of the seed along the eigenvector
    double lambda = 0.0;      // stable eigenvalue at the owning point
    Vec2 eigvec;              // unit stable eigenvector, q-component >= 0
    Trajectory trace;         // reverse-time trace from the seed
    bool outward = false;     // ends at the strip boundary (else joins the origin)
};

// The set of bounded-solution initial points: stable manifolds joined through
// all stationary points, ordered as a polyline from the q=-1 hit to the q=+1 hit.
struct EquilibriumCurve {
    std::vector<PhasePoint> points;
    Regime regime = Regime::SUBCRITICAL;
    bool monotone = false;
    int winding_count = 0;         // q sign changes along an inward branch
    std::vector<CurveBranch> branches;
    double seed_check = 0.0;       // distance defect of the 1e-8 re-seed trace
};

// Trace the equilibrium curve (stable manifolds / script-C). Requires beta > 0.
EquilibriumCurve trace_equilibrium_curve(const ModelParams& params);

struct NashSolution {
    double a_star = 0.0;
    Trajectory trajectory;  // forward path from (a_star, q0), stops CONVERGED
    int limit = -1;         // id of the limit stationary point
    int half_turns = 0;     // q sign changes along the trajectory
};

// All discounted Nash equilibria starting from q0, sorted by a_star.
std::vector<NashSolution> solve_ne(const ModelParams& params, double q0);
std::vector<NashSolution> solve_ne(const ModelParams& params, double q0,
                                   const EquilibriumCurve& curve);

}  // namespace syncmfg
