#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "syncmfg/model.hpp"

namespace syncmfg {

// Point (a, q) of the planar system; q = 2p - 1.
struct PhasePoint {
    double a = 0.0;
    double q = 0.0;
};

// Nonnegative rate increments (alpha0, alpha1); special iff alpha0*alpha1 == 0.
struct FeedbackPair {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    bool special() const { return alpha0 * alpha1 == 0.0; }
};

// Probability flow p(t) on a strictly increasing time grid.
struct ProbabilityFlow {
    std::vector<double> times;
    std::vector<double> p;
    std::optional<double> period;  // set for periodic flows
};

// Feedback-control flow on the same grid as the probability flow it belongs to.
struct ControlFlow {
    std::vector<double> times;
    std::vector<double> alpha0;
    std::vector<double> alpha1;
};

// Planar vector field:
//   da/dt = (beta + 2 sigma2) a + sign(a) a^2/2 - kappa q
//   dq/dt = a - (2 sigma2 + |a|) q
// sign(0) = 0. Errors if |q| > 1.
std::pair<double, double> vector_field(const ModelParams& params, const PhasePoint& point);

// Hamiltonian H(x, a, p) = sigma2*a - (a^-)^2/2 + kappa*l(x,p),
// with l(0,p) = p and l(1,p) = 1 - p. Errors if p outside [0,1].
double hamiltonian(int x, double a, double p, const ModelParams& params);

// First integral of the ergodic (beta = 0) system:
//   E = kappa q^2/2 + a^2/2 - 2 sigma2 a q - (a^2/2) sign(a) q.
// Errors if beta > 0 (E is not conserved then).
double energy(const ModelParams& params, const PhasePoint& point);

// Analytic gradient of E, for orthogonality checks.
Vec2 energy_gradient(const ModelParams& params, const PhasePoint& point);

// Kolmogorov right-hand side: (sigma2 + alpha0)(1-p) - (sigma2 + alpha1) p.
double kolmogorov_rhs(double p, const FeedbackPair& alpha, double sigma2);

// Unique special control reproducing a probability flow (Lemma-style
// construction): alpha_p(t,0) = (p' + sigma2(2p-1))^+ / (1-p),
// alpha_p(t,1) = (p' + sigma2(2p-1))^- / p. p' by second-order finite
// differences on the grid. Errors (with location) if p touches {0,1}.
ControlFlow control_from_flow(const ProbabilityFlow& p_flow, double sigma2);

// Special control with the same Kolmogorov right-hand side as (alpha, p):
// pointwise smaller in magnitude, drift preserved exactly.
ControlFlow specialize_control(const ControlFlow& alpha, const ProbabilityFlow& p_flow);
FeedbackPair specialize_control(const FeedbackPair& alpha, double p);

}  // namespace syncmfg
