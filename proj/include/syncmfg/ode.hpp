#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "syncmfg/errors.hpp"

namespace syncmfg {

using Vec = std::vector<double>;
using OdeRhs = std::function<void(double t, const Vec& y, Vec& dydt)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_step = 0.0;    // 0 = unlimited
    double init_step = 0.0;   // 0 = automatic
    std::size_t max_steps = 50'000'000;
};

// One accepted Dormand-Prince 5(4) step together with its dense-output
// coefficients (order-4 continuous extension).
struct DenseStep {
    double t0 = 0.0, h = 0.0;
    Vec r1, r2, r3, r4, r5;  // contd5 coefficients, one entry per component

    // Solution at t0 + theta*h, theta in [0, 1].
    void eval(double theta, Vec& out) const;
    double eval1(std::size_t i, double theta) const;
};

// Adaptive Dormand-Prince 5(4) stepper with FSAL and dense output.
// step() advances (t, y) in place by at most opts.max_step in the direction
// of h_signed and fills the dense coefficients of the accepted step.
class DormandPrince5 {
public:
    DormandPrince5(OdeRhs rhs, std::size_t dim, const OdeOptions& opts);

    void start(double t0, const Vec& y0, double direction);
    // Advances one accepted step; returns the step actually taken (signed).
    // Throws NumericalError on step-size underflow.
    double step(double& t, Vec& y, DenseStep& dense);
    double suggested_step() const { return h_; }
    void clamp_next_step(double h_abs);

private:
    OdeRhs rhs_;
    std::size_t dim_;
    OdeOptions opts_;
    double h_ = 0.0;        // current signed step proposal
    double dir_ = 1.0;
    bool have_k1_ = false;  // FSAL cache valid
    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, yerr_, ynew_;
    double initial_step(double t0, const Vec& y0) const;
};

// Finite-difference weights on arbitrary nodes (Fornberg's algorithm).
// Returns weights w such that f^(m)(x0) ~= sum_i w[i] f(nodes[i]).
std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order);

// Derivative of sampled data on an arbitrary strictly increasing grid using
// centered stencils of the given width (2*half+1), one-sided at the ends.
std::vector<double> grid_derivative(const std::vector<double>& t, const std::vector<double>& y,
                                    int half_width);

// Piecewise cubic Hermite interpolant; slopes from 4th-order grid_derivative
// unless provided. Extrapolates with the boundary cubic.
class HermiteInterpolant {
public:
    HermiteInterpolant() = default;
    HermiteInterpolant(std::vector<double> t, std::vector<double> y);
    HermiteInterpolant(std::vector<double> t, std::vector<double> y, std::vector<double> slope);

    double operator()(double tq) const;
    double t_front() const { return t_.front(); }
    double t_back() const { return t_.back(); }
    bool empty() const { return t_.empty(); }

private:
    std::vector<double> t_, y_, d_;
    std::size_t locate(double tq) const;
};

// Periodic wrapper: samples one period [t0, t0 + tau) and evaluates by phase.
class PeriodicInterpolant {
public:
    PeriodicInterpolant() = default;
    PeriodicInterpolant(std::vector<double> t, std::vector<double> y, double period);
    double operator()(double tq) const;
    double period() const { return tau_; }

private:
    HermiteInterpolant base_;
    double t0_ = 0.0, tau_ = 0.0;
};

// Integrate an IVP from t0 to t1 (either direction), returning the solution
// at the given record times (monotone, running from t0 towards t1).
std::vector<Vec> solve_ivp_record(const OdeRhs& rhs, double t0, double t1, const Vec& y0,
                                  const std::vector<double>& record_times,
                                  const OdeOptions& opts = {});

// Composite Simpson on a uniform grid (trailing interval by trapezoid when
// the point count is even).
double simpson_uniform(const std::vector<double>& t, const std::vector<double>& y);

// Hermite-corrected trapezoid rule on an arbitrary grid:
// integral of the piecewise cubic through (t, y) with 4th-order FD slopes.
double integrate_grid(const std::vector<double>& t, const std::vector<double>& y);

// Running integral at the grid points (same rule per interval).
std::vector<double> cumulative_integral(const std::vector<double>& t,
                                        const std::vector<double>& y);

}  // namespace syncmfg
