#pragma once

#include <array>
#include <complex>
#include <optional>
#include <vector>

#include "syncmfg/errors.hpp"

namespace syncmfg {

// Model parameters (beta, sigma^2, kappa). beta == 0 selects the ergodic cost.
struct ModelParams {
    double beta = 0.0;    // discount rate, >= 0
    double sigma2 = 1.0;  // thermal noise rate, > 0
    double kappa = 1.0;   // coupling strength, > 0

    bool ergodic() const { return beta == 0.0; }
    void validate() const;
};

enum class Regime {
    SUBCRITICAL,
    SUPERCRITICAL_A,
    SUPERCRITICAL_B,
    ERGODIC_SUB,
    ERGODIC_SUPER,
    BOUNDARY,  // kappa equals a threshold within 1e-12 relative
};

const char* regime_name(Regime r);

struct RegimeReport {
    double kappa_c = 0.0;                 // 2*beta*sigma2 + 4*sigma2^2
    std::optional<double> kappa_spiral;   // kappa_c + beta^2/4, only when beta > 0
    std::optional<double> kappa_tilde;    // MFC threshold, only when beta > 0
    Regime regime = Regime::SUBCRITICAL;
};

enum class LocalType {
    SADDLE,
    UNSTABLE_NODE,
    SPIRAL_SOURCE,
    CENTER,
    DEGENERATE,  // zero eigenvalue; kappa exactly at kappa_c (our convention)
};

const char* local_type_name(LocalType t);

struct StationaryPoint {
    double a = 0.0;
    double q = 0.0;
    std::array<std::complex<double>, 2> eigenvalues{};  // filled by linearize()
    LocalType local_type = LocalType::SADDLE;
    bool has_eigen = false;
};

// Critical thresholds and regime classification.
RegimeReport critical_coupling(const ModelParams& params);

// All stationary points of the planar system, sorted by q.
// One point (the origin) for kappa <= kappa_c, three for kappa > kappa_c.
std::vector<StationaryPoint> stationary_equilibria(const ModelParams& params);

// 2x2 Jacobian of the planar field at a point, using the one-sided smooth
// branch of sign(a) away from a = 0.
struct Jacobian2 {
    double daa, daq, dqa, dqq;
    double trace() const { return daa + dqq; }
    double det() const { return daa * dqq - daq * dqa; }
};
Jacobian2 jacobian(const ModelParams& params, double a, double q);

// Fill eigenvalues and local type of a stationary point. Errors if the point
// is not stationary (nullcline residual above tolerance).
StationaryPoint linearize(const ModelParams& params, const StationaryPoint& point);

// Unit eigenvector of the Jacobian at a stationary point for a real
// eigenvalue lambda, oriented with positive q component.
struct Vec2 {
    double a = 0.0, q = 0.0;
};
Vec2 eigenvector(const ModelParams& params, const StationaryPoint& point, double lambda);

// Second-order local approximation of the invariant manifold tangent to the
// eigenvector v at a stationary point: gamma(s) = x* + s v + s^2/2 w.
// Used to seed manifold traces with O(s^3) accuracy. `side` selects the
// smooth branch of sign(a) (+1/-1); 0 means take it from the point itself
// (required nonzero only at the origin, where the branches differ).
Vec2 manifold_curvature(const ModelParams& params, const StationaryPoint& point,
                        double lambda, const Vec2& v, int side = 0);

// Point on the locally corrected manifold at (signed) arc offset s; the
// branch is chosen from the a-component of the offset at the origin.
Vec2 manifold_seed(const ModelParams& params, const StationaryPoint& point,
                   double lambda, const Vec2& v, double s);

}  // namespace syncmfg
