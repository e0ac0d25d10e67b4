// Geodesic primitives on a ChartMetric: the exponential map by fixed-step
// classical RK4 integration of the geodesic equation, its inverse by damped
// Newton shooting, and the induced distance.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "isolab/chart_metric.hpp"
#include "isolab/util.hpp"

namespace isolab {

struct GeodesicOptions {
    double steps_per_unit = 512.0;  // RK4 steps per unit of arc length
    int min_steps = 16;
};

class ChartExitError : public GeometryError {
public:
    ChartExitError(double t, const std::string& who)
        : GeometryError(who + ": geodesic exits chart at t = " + std::to_string(t)),
          exit_time_(t) {}
    double exit_time() const { return exit_time_; }

private:
    double exit_time_;
};

class ConvergenceError : public GeometryError {
public:
    ConvergenceError(const std::string& msg, double residual)
        : GeometryError(msg + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct GeodesicState {
    VecN x;   // position in chart coordinates
    VecN xd;  // velocity d/dt, affine parameter t in [0,1]
};

namespace detail {

inline void rk4_step(const ChartMetric& m, GeodesicState& s, double h) {
    const VecN k1x = s.xd;
    const VecN k1v = m.geodesic_accel(s.x, s.xd);
    const VecN k2x = s.xd + 0.5 * h * k1v;
    const VecN k2v = m.geodesic_accel(s.x + 0.5 * h * k1x, k2x);
    const VecN k3x = s.xd + 0.5 * h * k2v;
    const VecN k3v = m.geodesic_accel(s.x + 0.5 * h * k2x, k3x);
    const VecN k4x = s.xd + h * k3v;
    const VecN k4v = m.geodesic_accel(s.x + h * k3x, k4x);
    s.x += (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    s.xd += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
}

inline int step_count(double length, double dt, const GeodesicOptions& opt) {
    const double want = length * dt * opt.steps_per_unit;
    return std::max(opt.min_steps, int(std::ceil(want)));
}

}  // namespace detail

// Integrates the geodesic with initial data (p, w) over t in [0,1] and returns
// states at the requested parameter values (ascending, in (0,1]). Throws
// ChartExitError with the exit time if the path leaves the chart.
inline std::vector<GeodesicState> geodesic_states(const ManifoldPoint& p, const VecN& w,
                                                  const ChartMetric& m,
                                                  const std::vector<double>& t_values,
                                                  const GeodesicOptions& opt = {}) {
    m.require_interior(p, "exp_map");
    const double len = m.metric_norm(p.x, w);
    std::vector<GeodesicState> out;
    out.reserve(t_values.size());
    GeodesicState s{p.x, w};
    if (len == 0.0) {
        out.assign(t_values.size(), s);
        return out;
    }
    double t = 0.0;
    for (double target : t_values) {
        const double dt = target - t;
        if (dt < 0.0) throw std::invalid_argument("geodesic_states: t values must ascend");
        if (dt > 0.0) {
            const int steps = detail::step_count(len, dt, opt);
            const double h = dt / steps;
            for (int k = 0; k < steps; ++k) {
                detail::rk4_step(m, s, h);
                if (!m.contains(s.x))
                    throw ChartExitError(t + (k + 1) * h, "exp_map");
            }
            t = target;
        }
        out.push_back(s);
    }
    return out;
}

inline GeodesicState exp_map_state(const ManifoldPoint& p, const VecN& w, const ChartMetric& m,
                                   const GeodesicOptions& opt = {}) {
    return geodesic_states(p, w, m, {1.0}, opt).front();
}

// exp_p(w); w given as tangent components at p.
inline ManifoldPoint exp_map(const ManifoldPoint& p, const VecN& w, const ChartMetric& m,
                             const GeodesicOptions& opt = {}) {
    return ManifoldPoint(p.chart_id, exp_map_state(p, w, m, opt).x);
}

inline ManifoldPoint exp_map(const TangentVec& w, const ChartMetric& m,
                             const GeodesicOptions& opt = {}) {
    return exp_map(w.base, w.v, m, opt);
}

struct LogOptions {
    double tol = 1e-12;     // coordinate mismatch, scaled by the local factor
    int max_iter = 40;
    GeodesicOptions geo;
};

// Inverse of exp_map by shooting: damped Newton on the endpoint mismatch with
// a finite-difference Jacobian. Requires q well inside the injectivity regime
// around p; the Euclidean chord is the initial guess.
inline TangentVec log_map(const ManifoldPoint& p, const ManifoldPoint& q, const ChartMetric& m,
                          const LogOptions& opt = {}) {
    m.require_interior(p, "log_map");
    m.require_interior(q, "log_map");
    const int n = m.dim();
    VecN w = q.x - p.x;
    const double scale = std::max(1e-6, (q.x - p.x).norm());
    const double lam_q = m.conformal_factor(q.x);

    auto mismatch = [&](const VecN& wv, VecN& diff) -> double {
        const ManifoldPoint e = exp_map(p, wv, m, opt.geo);
        diff = e.x - q.x;
        return lam_q * diff.norm();
    };

    VecN diff(n);
    double err = mismatch(w, diff);
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        if (err < opt.tol * std::max(1.0, scale)) return TangentVec(p, w);
        // Jacobian of endpoint wrt w by forward differences.
        const double h = 1e-7 * std::max(scale, w.norm());
        double J[9];
        for (int j = 0; j < n; ++j) {
            VecN wj = w;
            wj[j] += h;
            VecN dj(n);
            mismatch(wj, dj);
            for (int i = 0; i < n; ++i) J[i * n + j] = (dj[i] - diff[i]) / h;
        }
        VecN delta = solve_small(J, diff, n);
        double t = 1.0;
        for (int back = 0; back < 30; ++back) {
            VecN trial = w - t * delta;
            VecN dtrial(n);
            const double etrial = mismatch(trial, dtrial);
            if (etrial < err) {
                w = trial;
                diff = dtrial;
                err = etrial;
                break;
            }
            t *= 0.5;
            if (back == 29)
                throw ConvergenceError("log_map: shooting stalled", err);
        }
    }
    if (err < opt.tol * std::max(1.0, scale)) return TangentVec(p, w);
    throw ConvergenceError("log_map: no convergence", err);
}

// d(p, q) = |log_p q|_g.
inline double distance(const ManifoldPoint& p, const ManifoldPoint& q, const ChartMetric& m,
                       const LogOptions& opt = {}) {
    if ((p.x - q.x).norm() == 0.0) return 0.0;
    const TangentVec w = log_map(p, q, m, opt);
    return m.metric_norm(p.x, w.v);
}

}  // namespace isolab
