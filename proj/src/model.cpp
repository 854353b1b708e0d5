#include "syncmfg/model.hpp"

#include <algorithm>
#include <cmath>

#include "syncmfg/dynamics.hpp"

namespace syncmfg {

namespace {

constexpr double kBoundaryRelTol = 1e-12;

bool near_threshold(double kappa, double threshold) {
    return std::abs(kappa - threshold) <= kBoundaryRelTol * std::max(std::abs(kappa), std::abs(threshold));
}

double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void ModelParams::validate() const {
    if (!(sigma2 > 0.0)) throw ParameterDomainError("sigma2 must be > 0");
    if (!(kappa > 0.0)) throw ParameterDomainError("kappa must be > 0");
    if (!(beta >= 0.0)) throw ParameterDomainError("beta must be >= 0");
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::SUBCRITICAL: return "SUBCRITICAL";
        case Regime::SUPERCRITICAL_A: return "SUPERCRITICAL_A";
        case Regime::SUPERCRITICAL_B: return "SUPERCRITICAL_B";
        case Regime::ERGODIC_SUB: return "ERGODIC_SUB";
        case Regime::ERGODIC_SUPER: return "ERGODIC_SUPER";
        case Regime::BOUNDARY: return "BOUNDARY";
    }
    return "?";
}

const char* local_type_name(LocalType t) {
    switch (t) {
        case LocalType::SADDLE: return "SADDLE";
        case LocalType::UNSTABLE_NODE: return "UNSTABLE_NODE";
        case LocalType::SPIRAL_SOURCE: return "SPIRAL_SOURCE";
        case LocalType::CENTER: return "CENTER";
        case LocalType::DEGENERATE: return "DEGENERATE";
    }
    return "?";
}

RegimeReport critical_coupling(const ModelParams& params) {
    params.validate();
    RegimeReport rep;
    rep.kappa_c = 2.0 * params.beta * params.sigma2 + 4.0 * params.sigma2 * params.sigma2;
    if (params.beta > 0.0) {
        rep.kappa_spiral = rep.kappa_c + params.beta * params.beta / 4.0;
        rep.kappa_tilde = rep.kappa_c + params.beta * params.beta / 2.0 + params.beta * params.sigma2;
    }
    const double k = params.kappa;
    if (params.ergodic()) {
        if (near_threshold(k, rep.kappa_c)) {
            rep.regime = Regime::BOUNDARY;
        } else {
            rep.regime = k < rep.kappa_c ? Regime::ERGODIC_SUB : Regime::ERGODIC_SUPER;
        }
        return rep;
    }
    if (near_threshold(k, rep.kappa_c) || near_threshold(k, *rep.kappa_spiral)) {
        rep.regime = Regime::BOUNDARY;
    } else if (k < rep.kappa_c) {
        rep.regime = Regime::SUBCRITICAL;
    } else if (k < *rep.kappa_spiral) {
        rep.regime = Regime::SUPERCRITICAL_A;
    } else {
        rep.regime = Regime::SUPERCRITICAL_B;
    }
    return rep;
}

std::vector<StationaryPoint> stationary_equilibria(const ModelParams& params) {
    params.validate();
    const double kc = 2.0 * params.beta * params.sigma2 + 4.0 * params.sigma2 * params.sigma2;
    std::vector<StationaryPoint> out;
    if (params.kappa > kc) {
        const double b3 = params.beta + 3.0 * params.sigma2;
        const double a_bar = -b3 + std::sqrt(b3 * b3 + 2.0 * (params.kappa - kc));
        const double q_bar = a_bar / (a_bar + 2.0 * params.sigma2);
        out.push_back({-a_bar, -q_bar});
        out.push_back({0.0, 0.0});
        out.push_back({a_bar, q_bar});
    } else {
        out.push_back({0.0, 0.0});
    }
    return out;  // already sorted by q
}

Jacobian2 jacobian(const ModelParams& params, double a, double q) {
    const double s = sign0(a);
    Jacobian2 j;
    j.daa = params.beta + 2.0 * params.sigma2 + s * a;  // = beta + 2 sigma2 + |a|
    j.daq = -params.kappa;
    j.dqa = 1.0 - s * q;
    j.dqq = -(2.0 * params.sigma2 + std::abs(a));
    return j;
}

StationaryPoint linearize(const ModelParams& params, const StationaryPoint& point) {
    params.validate();
    auto [da, dq] = vector_field(params, PhasePoint{point.a, point.q});
    const double scale = params.kappa + params.sigma2 + std::abs(point.a) + 1.0;
    if (std::abs(da) > 1e-9 * scale || std::abs(dq) > 1e-9 * scale) {
        throw PreconditionError("linearize: point is not stationary");
    }

    const Jacobian2 j = jacobian(params, point.a, point.q);
    const double tr = j.trace();
    const double det = j.det();
    const double disc = tr * tr - 4.0 * det;

    StationaryPoint out = point;
    out.has_eigen = true;
    if (disc >= 0.0) {
        const double rt = std::sqrt(disc);
        out.eigenvalues = {std::complex<double>((tr + rt) / 2.0, 0.0),
                           std::complex<double>((tr - rt) / 2.0, 0.0)};
    } else {
        const double im = std::sqrt(-disc) / 2.0;
        out.eigenvalues = {std::complex<double>(tr / 2.0, im), std::complex<double>(tr / 2.0, -im)};
    }

    const double det_tol = 1e-12 * std::max(1.0, std::abs(params.kappa));
    if (std::abs(det) <= det_tol) {
        out.local_type = LocalType::DEGENERATE;
    } else if (det < 0.0) {
        out.local_type = LocalType::SADDLE;
    } else if (params.ergodic()) {
        out.local_type = LocalType::CENTER;  // trace = 0, det > 0
    } else if (disc >= 0.0) {
        out.local_type = LocalType::UNSTABLE_NODE;
    } else {
        out.local_type = LocalType::SPIRAL_SOURCE;
    }
    return out;
}

Vec2 eigenvector(const ModelParams& params, const StationaryPoint& point, double lambda) {
    // Second row of (J - lambda I) v = 0: dqa * v_a = (lambda - dqq) * v_q.
    const Jacobian2 j = jacobian(params, point.a, point.q);
    double va = lambda - j.dqq;
    double vq = j.dqa;
    if (std::abs(va) + std::abs(vq) < 1e-14) {  // fall back to the first row
        va = j.daq;
        vq = lambda - j.daa;
    }
    const double n = std::hypot(va, vq);
    va /= n;
    vq /= n;
    if (vq < 0.0 || (vq == 0.0 && va < 0.0)) {
        va = -va;
        vq = -vq;
    }
    return {va, vq};
}

Vec2 manifold_curvature(const ModelParams& params, const StationaryPoint& point,
                        double lambda, const Vec2& v, int side) {
    // Second-order invariance: (J - 2 lambda I) w = 2 mu v - B(v, v), with w
    // orthogonal to v. B is the second differential of the field on the
    // smooth branch with sign(a) frozen to `side` (each one-sided branch has
    // its own curvature at the origin).
    double s = side;
    if (side == 0) {
        if (point.a == 0.0) return {0.0, 0.0};
        s = point.a > 0.0 ? 1.0 : -1.0;
    }
    const double b1 = s * v.a * v.a;          // f1_aa = sign(a)
    const double b2 = -2.0 * s * v.a * v.q;   // f2_aq = f2_qa = -sign(a)
    const Jacobian2 j = jacobian(params, point.a, point.q);

    // Unknowns (w_a, w_q, mu); rows: two invariance equations + orthogonality.
    const double m[3][3] = {
        {j.daa - 2.0 * lambda, j.daq, -2.0 * v.a},
        {j.dqa, j.dqq - 2.0 * lambda, -2.0 * v.q},
        {v.a, v.q, 0.0},
    };
    const double rhs[3] = {-b1, -b2, 0.0};

    // Cramer's rule on the 3x3 system.
    auto det3 = [](const double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
               a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double d = det3(m);
    if (std::abs(d) < 1e-12) return {0.0, 0.0};  // resonant corner case: fall back to tangent seeding
    double mcol[3][3];
    double sol[3];
    for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 3; ++r)
            for (int cc = 0; cc < 3; ++cc) mcol[r][cc] = m[r][cc];
        for (int r = 0; r < 3; ++r) mcol[r][c] = rhs[r];
        sol[c] = det3(mcol) / d;
    }
    return {sol[0], sol[1]};
}

Vec2 manifold_seed(const ModelParams& params, const StationaryPoint& point,
                   double lambda, const Vec2& v, double s) {
    int side = 0;
    if (point.a == 0.0) side = s * v.a >= 0.0 ? 1 : -1;
    const Vec2 w = manifold_curvature(params, point, lambda, v, side);
    return {point.a + s * v.a + 0.5 * s * s * w.a, point.q + s * v.q + 0.5 * s * s * w.q};
}

}  // namespace syncmfg
