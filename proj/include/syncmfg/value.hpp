#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "syncmfg/dynamics.hpp"
#include "syncmfg/model.hpp"

namespace syncmfg {

// Scalar flow on a time grid (control gap a(t), cost integrands, ...).
struct ScalarFlow {
    std::vector<double> times;
    std::vector<double> values;
};

enum class TailMode {
    STATIONARY_TAIL,  // terminal value from the algebraic stationary solve at frozen p(T)
    ZERO_TAIL,        // v(T, .) = 0 (finite horizon)
};

struct ValueFunction {
    std::vector<double> times;
    std::vector<double> v0;
    std::vector<double> v1;
    std::optional<double> lambda_bar;
    double tail_bound = 0.0;  // kappa * exp(-beta T) / beta for STATIONARY_TAIL

    std::vector<double> a() const;  // v0 - v1 samplewise
};

// Control gap of the stationary dynamic-programming solve at frozen p:
// the unique root of (beta + 2 sigma2) a + sign(a) a^2/2 = kappa (2p - 1).
double stationary_gap(const ModelParams& params, double p);

// Backward dynamic-programming solve of
//   -dv/dt + beta v = H(x, v(., x+1) - v(., x), p(t))
// on [0, T] given the probability flow. ZERO_TAIL also admits beta = 0.
ValueFunction solve_value_backward(const ModelParams& params, const ProbabilityFlow& p_flow,
                                   double horizon, TailMode tail);

// Same solve against an arbitrary p(t) callable, recorded on `grid`.
ValueFunction solve_value_on(const ModelParams& params, const std::function<double(double)>& p_of_t,
                             const std::vector<double>& grid, TailMode tail);

// Periodic ergodic value via the explicit antiderivative construction with
// lambda = period mean of H(1, a, p); anchor shifts the integration phase.
ValueFunction solve_value_periodic(const ModelParams& params, const ScalarFlow& a_flow,
                                   const ProbabilityFlow& p_flow, double anchor = 0.0);

struct DiscountedCost {
    double cost = 0.0;        // truncated + tail estimate
    double truncated = 0.0;   // integral over [0, T]
    double tail_bound = 0.0;  // kappa e^{-beta T} / beta
    double tail_estimate = 0.0;
};

// Expected discounted cost of following the special control encoded by the
// gap flow a(t) against the population flow p(t), starting from q0.
DiscountedCost cost_discounted(const ScalarFlow& a_flow, const ProbabilityFlow& p_flow, double q0,
                               const ModelParams& params);

struct MfgResidualReport {
    double res_a = 0.0;      // sup-norm residual of the backward (a) equation
    double res_q = 0.0;      // sup-norm residual of the forward (q) equation
    double res_value = 0.0;  // sup |a - (v0 - v1)| after an independent reconstruction
};

// Residual verification of the MFG system on a candidate (a, q) pair.
MfgResidualReport mfg_residual(const ScalarFlow& a_flow, const ScalarFlow& q_flow,
                               const ModelParams& params);

}  // namespace syncmfg
