#include "syncmfg/dynamics.hpp"

#include <cmath>
#include <string>

#include "syncmfg/ode.hpp"

namespace syncmfg {

namespace {
double pos(double z) { return z > 0.0 ? z : 0.0; }
double neg(double z) { return z < 0.0 ? -z : 0.0; }
double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }
}  // namespace

std::pair<double, double> vector_field(const ModelParams& params, const PhasePoint& pt) {
    if (std::abs(pt.q) > 1.0) {
        throw DomainError("vector_field: |q| > 1 (q = " + std::to_string(pt.q) + ")");
    }
    const double a = pt.a, q = pt.q;
    const double da = (params.beta + 2.0 * params.sigma2) * a + 0.5 * sign0(a) * a * a - params.kappa * q;
    const double dq = a - (2.0 * params.sigma2 + std::abs(a)) * q;
    return {da, dq};
}

double hamiltonian(int x, double a, double p, const ModelParams& params) {
    if (p < 0.0 || p > 1.0) {
        throw DomainError("hamiltonian: p outside [0,1] (p = " + std::to_string(p) + ")");
    }
    const double running = x == 0 ? p : 1.0 - p;
    const double am = neg(a);
    return params.sigma2 * a - 0.5 * am * am + params.kappa * running;
}

double energy(const ModelParams& params, const PhasePoint& pt) {
    if (!params.ergodic()) {
        throw ModelMismatchError("energy: first integral exists only for beta = 0");
    }
    const double a = pt.a, q = pt.q;
    return params.kappa * q * q / 2.0 + a * a / 2.0 - 2.0 * params.sigma2 * a * q -
           0.5 * a * a * sign0(a) * q;
}

Vec2 energy_gradient(const ModelParams& params, const PhasePoint& pt) {
    if (!params.ergodic()) {
        throw ModelMismatchError("energy_gradient: beta must be 0");
    }
    const double a = pt.a, q = pt.q;
    return {a - 2.0 * params.sigma2 * q - std::abs(a) * q,
            params.kappa * q - 2.0 * params.sigma2 * a - 0.5 * sign0(a) * a * a};
}

double kolmogorov_rhs(double p, const FeedbackPair& alpha, double sigma2) {
    if (p < 0.0 || p > 1.0) {
        throw DomainError("kolmogorov_rhs: p outside [0,1]");
    }
    return (sigma2 + alpha.alpha0) * (1.0 - p) - (sigma2 + alpha.alpha1) * p;
}

ControlFlow control_from_flow(const ProbabilityFlow& p_flow, double sigma2) {
    if (p_flow.times.size() < 3) {
        throw PreconditionError("control_from_flow: need at least 3 grid points");
    }
    for (std::size_t i = 0; i < p_flow.p.size(); ++i) {
        if (p_flow.p[i] <= 0.0 || p_flow.p[i] >= 1.0) {
            throw DomainError("control_from_flow: p touches {0,1} at t = " +
                              std::to_string(p_flow.times[i]));
        }
    }
    const std::vector<double> dp = grid_derivative(p_flow.times, p_flow.p, 1);
    ControlFlow out;
    out.times = p_flow.times;
    out.alpha0.resize(dp.size());
    out.alpha1.resize(dp.size());
    for (std::size_t i = 0; i < dp.size(); ++i) {
        const double g = dp[i] + sigma2 * (2.0 * p_flow.p[i] - 1.0);
        out.alpha0[i] = pos(g) / (1.0 - p_flow.p[i]);
        out.alpha1[i] = neg(g) / p_flow.p[i];
    }
    return out;
}

FeedbackPair specialize_control(const FeedbackPair& alpha, double p) {
    if (p <= 0.0 || p >= 1.0) {
        throw DomainError("specialize_control: p at {0,1}");
    }
    if (alpha.alpha0 < 0.0 || alpha.alpha1 < 0.0) {
        throw PreconditionError("specialize_control: control must be nonnegative");
    }
    // S = alpha0 (1-p) - alpha1 p is the controlled part of the drift; the
    // special control keeps it on one side only.
    const double s = alpha.alpha0 * (1.0 - p) - alpha.alpha1 * p;
    if (s > 0.0) return {s / (1.0 - p), 0.0};
    if (s < 0.0) return {0.0, -s / p};
    return {0.0, 0.0};
}

ControlFlow specialize_control(const ControlFlow& alpha, const ProbabilityFlow& p_flow) {
    if (alpha.times.size() != p_flow.times.size()) {
        throw PreconditionError("specialize_control: control and flow grids differ");
    }
    ControlFlow out;
    out.times = alpha.times;
    out.alpha0.resize(alpha.times.size());
    out.alpha1.resize(alpha.times.size());
    for (std::size_t i = 0; i < alpha.times.size(); ++i) {
        const FeedbackPair sp =
            specialize_control(FeedbackPair{alpha.alpha0[i], alpha.alpha1[i]}, p_flow.p[i]);
        out.alpha0[i] = sp.alpha0;
        out.alpha1[i] = sp.alpha1;
    }
    return out;
}

}  // namespace syncmfg
