#include "syncmfg/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace syncmfg {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (5th minus 4th order weights) for the error estimate.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

void DenseStep::eval(double theta, Vec& out) const {
    out.resize(r1.size());
    const double th1 = 1.0 - theta;
    for (std::size_t i = 0; i < r1.size(); ++i) {
        out[i] = r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
    }
}

double DenseStep::eval1(std::size_t i, double theta) const {
    const double th1 = 1.0 - theta;
    return r1[i] + theta * (r2[i] + th1 * (r3[i] + theta * (r4[i] + th1 * r5[i])));
}

DormandPrince5::DormandPrince5(OdeRhs rhs, std::size_t dim, const OdeOptions& opts)
    : rhs_(std::move(rhs)), dim_(dim), opts_(opts) {
    k1_.resize(dim);
    k2_.resize(dim);
    k3_.resize(dim);
    k4_.resize(dim);
    k5_.resize(dim);
    k6_.resize(dim);
    k7_.resize(dim);
    ytmp_.resize(dim);
    yerr_.resize(dim);
    ynew_.resize(dim);
}

double DormandPrince5::initial_step(double t0, const Vec& y0) const {
    Vec f(dim_);
    rhs_(t0, y0, f);
    double dy = 0.0, y = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        const double sc = opts_.abs_tol + opts_.rel_tol * std::abs(y0[i]);
        dy += (f[i] / sc) * (f[i] / sc);
        y += (y0[i] / sc) * (y0[i] / sc);
    }
    double h = 1e-6;
    if (dy > 0.0 && y > 0.0) h = 0.01 * std::sqrt(y / dy);
    if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
    return h;
}

void DormandPrince5::start(double t0, const Vec& y0, double direction) {
    dir_ = direction >= 0.0 ? 1.0 : -1.0;
    h_ = dir_ * (opts_.init_step > 0.0 ? opts_.init_step : initial_step(t0, y0));
    have_k1_ = false;
}

void DormandPrince5::clamp_next_step(double h_abs) {
    if (std::abs(h_) > h_abs) h_ = dir_ * h_abs;
}

double DormandPrince5::step(double& t, Vec& y, DenseStep& dense) {
    if (!have_k1_) {
        rhs_(t, y, k1_);
        have_k1_ = true;
    }
    std::size_t attempts = 0;
    for (;;) {
        if (++attempts > 64) {
            throw NumericalError("step-size control failed to settle at t = " + std::to_string(t));
        }
        double h = h_;
        if (opts_.max_step > 0.0 && std::abs(h) > opts_.max_step) h = dir_ * opts_.max_step;
        if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
            throw NumericalError("step-size underflow at t = " + std::to_string(t));
        }

        for (std::size_t i = 0; i < dim_; ++i) ytmp_[i] = y[i] + h * a21 * k1_[i];
        rhs_(t + c2 * h, ytmp_, k2_);
        for (std::size_t i = 0; i < dim_; ++i) ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs_(t + c3 * h, ytmp_, k3_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        rhs_(t + c4 * h, ytmp_, k4_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        rhs_(t + c5 * h, ytmp_, k5_);
        for (std::size_t i = 0; i < dim_; ++i)
            ytmp_[i] =
                y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
        rhs_(t + h, ytmp_, k6_);
        for (std::size_t i = 0; i < dim_; ++i)
            ynew_[i] =
                y[i] + h * (b1 * k1_[i] + b3 * k3_[i] + b4 * k4_[i] + b5 * k5_[i] + b6 * k6_[i]);
        rhs_(t + h, ynew_, k7_);

        double err = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) {
            yerr_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
            const double sc =
                opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
            err += (yerr_[i] / sc) * (yerr_[i] / sc);
        }
        err = std::sqrt(err / static_cast<double>(dim_));

        if (err <= 1.0) {
            dense.t0 = t;
            dense.h = h;
            dense.r1 = y;
            dense.r2.resize(dim_);
            dense.r3.resize(dim_);
            dense.r4.resize(dim_);
            dense.r5.resize(dim_);
            for (std::size_t i = 0; i < dim_; ++i) {
                const double ydiff = ynew_[i] - y[i];
                const double bspl = h * k1_[i] - ydiff;
                dense.r2[i] = ydiff;
                dense.r3[i] = bspl;
                dense.r4[i] = ydiff - h * k7_[i] - bspl;
                dense.r5[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] +
                                   d6 * k6_[i] + d7 * k7_[i]);
            }
            t += h;
            y = ynew_;
            k1_ = k7_;  // FSAL
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            h_ = h * fac;
            return h;
        }
        h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
}

std::vector<double> fd_weights(double x0, const std::vector<double>& nodes, int order) {
    // Fornberg (1988), Mathematics of Computation 51:699-706.
    const int n = static_cast<int>(nodes.size()) - 1;
    const int m = order;
    std::vector<std::vector<std::vector<double>>> delta(
        m + 1, std::vector<std::vector<double>>(n + 1, std::vector<double>(n + 1, 0.0)));
    delta[0][0][0] = 1.0;
    double c1 = 1.0;
    for (int nn = 1; nn <= n; ++nn) {
        double c2v = 1.0;
        for (int nu = 0; nu < nn; ++nu) {
            const double c3v = nodes[nn] - nodes[nu];
            c2v *= c3v;
            for (int mm = 0; mm <= std::min(nn, m); ++mm) {
                delta[mm][nn][nu] =
                    ((nodes[nn] - x0) * delta[mm][nn - 1][nu] -
                     (mm > 0 ? mm * delta[mm - 1][nn - 1][nu] : 0.0)) /
                    c3v;
            }
        }
        for (int mm = 0; mm <= std::min(nn, m); ++mm) {
            delta[mm][nn][nn] =
                (c1 / c2v) * ((mm > 0 ? mm * delta[mm - 1][nn - 1][nn - 1] : 0.0) -
                              (nodes[nn - 1] - x0) * delta[mm][nn - 1][nn - 1]);
        }
        c1 = c2v;
    }
    std::vector<double> w(n + 1);
    for (int nu = 0; nu <= n; ++nu) w[nu] = delta[m][n][nu];
    return w;
}

std::vector<double> grid_derivative(const std::vector<double>& t, const std::vector<double>& y,
                                    int half_width) {
    const std::size_t n = t.size();
    if (n != y.size() || n < 2) throw PreconditionError("grid_derivative: bad grid");
    const int w = std::max(1, half_width);
    const int stencil = std::min<int>(2 * w + 1, static_cast<int>(n));
    std::vector<double> out(n);
    std::vector<double> nodes(stencil);
    for (std::size_t i = 0; i < n; ++i) {
        int lo = static_cast<int>(i) - stencil / 2;
        lo = std::clamp(lo, 0, static_cast<int>(n) - stencil);
        for (int k = 0; k < stencil; ++k) nodes[k] = t[lo + k];
        const std::vector<double> wts = fd_weights(t[i], nodes, 1);
        double d = 0.0;
        for (int k = 0; k < stencil; ++k) d += wts[k] * y[lo + k];
        out[i] = d;
    }
    return out;
}

HermiteInterpolant::HermiteInterpolant(std::vector<double> t, std::vector<double> y)
    : HermiteInterpolant(std::move(t), std::move(y), {}) {}

HermiteInterpolant::HermiteInterpolant(std::vector<double> t, std::vector<double> y,
                                       std::vector<double> slope)
    : t_(std::move(t)), y_(std::move(y)), d_(std::move(slope)) {
    if (t_.size() != y_.size() || t_.size() < 2) {
        throw PreconditionError("HermiteInterpolant: bad grid");
    }
    if (d_.empty()) d_ = grid_derivative(t_, y_, 2);
    if (d_.size() != t_.size()) throw PreconditionError("HermiteInterpolant: bad slopes");
}

std::size_t HermiteInterpolant::locate(double tq) const {
    if (tq <= t_.front()) return 0;
    if (tq >= t_.back()) return t_.size() - 2;
    const auto it = std::upper_bound(t_.begin(), t_.end(), tq);
    return static_cast<std::size_t>(it - t_.begin()) - 1;
}

double HermiteInterpolant::operator()(double tq) const {
    const std::size_t i = locate(tq);
    const double h = t_[i + 1] - t_[i];
    const double s = (tq - t_[i]) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

PeriodicInterpolant::PeriodicInterpolant(std::vector<double> t, std::vector<double> y,
                                         double period)
    : t0_(t.empty() ? 0.0 : t.front()), tau_(period) {
    if (!(period > 0.0)) throw PreconditionError("PeriodicInterpolant: period must be > 0");
    // Slopes with wrap-around stencils: extend the grid by one period on both
    // sides before differentiating, then keep the core.
    const std::size_t n = t.size();
    if (n < 4) throw PreconditionError("PeriodicInterpolant: need at least 4 samples");
    const bool closed = std::abs((t.back() - t.front()) - period) < 1e-9 * period;
    const std::size_t core = closed ? n - 1 : n;  // unique samples per period
    std::vector<double> te, ye;
    const int pad = 3;
    for (int k = -pad; k < static_cast<int>(core) + pad; ++k) {
        const int idx = ((k % static_cast<int>(core)) + static_cast<int>(core)) %
                        static_cast<int>(core);
        const int wrap = (k - idx) / static_cast<int>(core);
        te.push_back(t[idx] + wrap * period);
        ye.push_back(y[idx]);
    }
    const std::vector<double> de = grid_derivative(te, ye, 2);
    std::vector<double> tc(te.begin() + pad, te.begin() + pad + core + 1);
    std::vector<double> yc(ye.begin() + pad, ye.begin() + pad + core + 1);
    std::vector<double> dc(de.begin() + pad, de.begin() + pad + core + 1);
    base_ = HermiteInterpolant(std::move(tc), std::move(yc), std::move(dc));
}

double PeriodicInterpolant::operator()(double tq) const {
    double s = std::fmod(tq - t0_, tau_);
    if (s < 0.0) s += tau_;
    return base_(t0_ + s);
}

std::vector<Vec> solve_ivp_record(const OdeRhs& rhs, double t0, double t1, const Vec& y0,
                                  const std::vector<double>& record_times, const OdeOptions& opts) {
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    std::vector<Vec> out;
    out.reserve(record_times.size());
    DormandPrince5 stepper(rhs, y0.size(), opts);
    Vec y = y0;
    double t = t0;
    stepper.start(t, y, dir);
    std::size_t next = 0;
    DenseStep dense;
    Vec ytmp(y0.size());
    while (next < record_times.size() && dir * (record_times[next] - t) <= 1e-14) {
        out.push_back(y);
        ++next;
    }
    std::size_t steps = 0;
    while (next < record_times.size()) {
        if (++steps > opts.max_steps) throw NumericalError("solve_ivp_record: step budget exhausted");
        if (dir * (t1 - t) <= 0.0) break;
        stepper.clamp_next_step(std::abs(t1 - t));
        const double t_prev = t;
        stepper.step(t, y, dense);
        while (next < record_times.size() && dir * (record_times[next] - t) <= 1e-13) {
            const double theta = (record_times[next] - t_prev) / dense.h;
            dense.eval(theta, ytmp);
            out.push_back(ytmp);
            ++next;
        }
    }
    while (next < record_times.size()) {  // span ended on a record boundary
        out.push_back(y);
        ++next;
    }
    return out;
}

double simpson_uniform(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    if (n != y.size() || n < 2) throw PreconditionError("simpson_uniform: bad grid");
    const double h = t[1] - t[0];
    double acc = 0.0;
    std::size_t i = 0;
    while (i + 2 < n) {
        acc += h / 3.0 * (y[i] + 4.0 * y[i + 1] + y[i + 2]);
        i += 2;
    }
    if (i + 1 < n) acc += 0.5 * h * (y[i] + y[i + 1]);  // odd tail
    return acc;
}

double integrate_grid(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    if (n != y.size() || n < 2) throw PreconditionError("integrate_grid: bad grid");
    const std::vector<double> d = grid_derivative(t, y, 2);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = t[i + 1] - t[i];
        acc += 0.5 * h * (y[i] + y[i + 1]) + h * h / 12.0 * (d[i] - d[i + 1]);
    }
    return acc;
}

std::vector<double> cumulative_integral(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    if (n != y.size() || n < 2) throw PreconditionError("cumulative_integral: bad grid");
    const std::vector<double> d = grid_derivative(t, y, 2);
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = t[i + 1] - t[i];
        out[i + 1] = out[i] + 0.5 * h * (y[i] + y[i + 1]) + h * h / 12.0 * (d[i] - d[i + 1]);
    }
    return out;
}

}  // namespace syncmfg
