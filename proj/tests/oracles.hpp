// Closed-form reference values for the test suites. Everything here is
// independent of the library's numerical paths: space-form geodesics and
// distances in stereographic coordinates, cap area/volume laws, and the
// Euclidean ball formulas.
#pragma once

#include <cmath>

#include "isolab/util.hpp"

namespace oracles {

using isolab::kPi;
using isolab::VecN;

// Endpoint coordinate radius of exp_0(d * unit) in the stereographic chart of
// curvature K: 2/sqrt(K) tan(sqrt(K) d / 2), with the obvious limits.
inline double model_exp_radius(double K, double d) {
    if (K > 0.0) return 2.0 / std::sqrt(K) * std::tan(std::sqrt(K) * d / 2.0);
    if (K < 0.0) return 2.0 / std::sqrt(-K) * std::tanh(std::sqrt(-K) * d / 2.0);
    return d;
}

// Geodesic distance from the chart origin to coordinate radius rho.
inline double model_dist_from_origin(double K, double rho) {
    if (K > 0.0) return 2.0 / std::sqrt(K) * std::atan(std::sqrt(K) * rho / 2.0);
    if (K < 0.0) return 2.0 / std::sqrt(-K) * std::atanh(std::sqrt(-K) * rho / 2.0);
    return rho;
}

// Distance between arbitrary chart points of the curvature-K model space.
// K > 0: via the round-sphere embedding; K < 0: via the Poincare ball formula;
// K = 0: Euclidean.
inline double model_distance(double K, const VecN& a, const VecN& b) {
    const int n = a.n;
    if (K == 0.0) return (a - b).norm();
    if (K > 0.0) {
        const double s = std::sqrt(K);
        // unit-curvature coordinates
        VecN x = s * a, y = s * b;
        const double qx = dot(x, x) / 4.0, qy = dot(y, y) / 4.0;
        double inner = (1.0 - qx) * (1.0 - qy);
        for (int i = 0; i < n; ++i) inner += x[i] * y[i];
        inner /= (1.0 + qx) * (1.0 + qy);
        inner = std::min(1.0, std::max(-1.0, inner));
        return std::acos(inner) / s;
    }
    const double s = std::sqrt(-K);
    VecN x = 0.5 * s * a, y = 0.5 * s * b;  // unit Poincare ball
    const double num = dot(x - y, x - y);
    const double den = (1.0 - dot(x, x)) * (1.0 - dot(y, y));
    const double c = 1.0 + 2.0 * num / den;
    return std::acosh(c) / s;
}

// Geodesic circle/cap laws on the unit 2-sphere (K=1) and hyperbolic plane.
inline double sphere_cap_length(double r) { return 2.0 * kPi * std::sin(r); }
inline double sphere_cap_area(double r) { return 2.0 * kPi * (1.0 - std::cos(r)); }
inline double hyper_circle_length(double r) { return 2.0 * kPi * std::sinh(r); }
inline double hyper_disc_area(double r) { return 2.0 * kPi * (std::cosh(r) - 1.0); }

// Boundary length as a function of enclosed area: L^2 = 4 pi A - A^2 on the
// unit sphere, L^2 = 4 pi A + A^2 on the hyperbolic plane.
inline double sphere_profile(double v) { return std::sqrt(4.0 * kPi * v - v * v); }
inline double hyper_profile(double v) { return std::sqrt(4.0 * kPi * v + v * v); }

// Geodesic spheres/balls in the unit 3-sphere (K=1).
inline double sphere3_ball_area(double r) {
    const double s = std::sin(r);
    return 4.0 * kPi * s * s;
}
inline double sphere3_ball_volume(double r) {
    return kPi * (2.0 * r - std::sin(2.0 * r));
}

// Euclidean round-ball laws.
inline double euclid_ball_area(int n, double v) {
    return isolab::isoperimetric_constant(n) * std::pow(v, double(n - 1) / n);
}

}  // namespace oracles
