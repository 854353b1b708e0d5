#pragma once

#include <vector>

#include "syncmfg/integrate.hpp"
#include "syncmfg/model.hpp"
#include "syncmfg/value.hpp"

namespace syncmfg {

struct PeriodicOrbit {
    PhasePoint seed;   // on the section {q = 0, a > 0}
    double period = 0.0;
    double energy = 0.0;
    Trajectory orbit;  // one period, uniform recording
};

struct LensReport {
    double energy_level = 0.0;
    std::vector<PhasePoint> upper;  // heteroclinic arc from (abar,qbar) to (-abar,-qbar)
    std::vector<PhasePoint> lower;  // mirror arc
    StationaryPoint saddle_pos, saddle_neg;
};

// Periodic Nash orbit through (a0, 0); requires beta = 0, kappa > kappa_c,
// and the seed strictly inside the lens.
PeriodicOrbit periodic_orbit(const ModelParams& params, double a0);

// Lens bounded by the saddle manifolds (supercritical ergodic model).
LensReport lens(const ModelParams& params);

// Closed form of the subcritical ergodic stable manifold q = n(a).
double subcritical_manifold_graph(const ModelParams& params, double a);

// Finite-horizon equilibria: forward trajectories from (a0, q0) with a(T) = 0,
// found by shooting on a 2001-point grid plus bisection refinement.
std::vector<Trajectory> solve_finite_horizon(const ModelParams& params, double q0, double T);

// Fraction of trajectory time spent within delta of a self-organizing SNE.
double turnpike_fraction(const Trajectory& traj, double delta, const ModelParams& params);

// Ergodic constant: period average of H(1, a(s), p(s)).
double ergodic_lambda(const ScalarFlow& a_flow, const ProbabilityFlow& p_flow,
                      const ModelParams& params);

struct VanishingDiscountReport {
    double lambda_estimate = 0.0;
    std::vector<double> betas;
    std::vector<double> beta_v;   // beta * v_beta(0, 0) per beta
    double max_beta_v = 0.0;      // sup over the grid and both states
    double min_beta_v = 0.0;
    double max_abs_gap = 0.0;     // sup |a_beta|
    bool bounds_ok = false;       // 0 <= beta v <= kappa for every beta
    bool gap_bound_ok = false;    // sup |a_beta| <= 2 sqrt(kappa)
};

// Vanishing-discount approximation of the ergodic constant on a periodic
// (or constant) flow; Richardson extrapolation of beta * v_beta(0,0).
VanishingDiscountReport vanishing_discount(const ModelParams& params,
                                           const ProbabilityFlow& p_flow,
                                           const std::vector<double>& beta_seq);

}  // namespace syncmfg
