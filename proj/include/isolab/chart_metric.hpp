// Coordinate charts with conformally flat metrics g = e^{2 phi} delta.
//
// Two families:
//   * model spaces of constant curvature K, using the stereographic factor
//     phi(x) = -log(1 + K|x|^2/4) with analytic derivatives;
//   * user-supplied conformal factors phi given as expression strings, with
//     derivatives by central finite differences of step fd_step.
//
// Everything downstream (Christoffel symbols, geodesics, curvature, volume
// elements) is written against this conformal representation.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "isolab/expression.hpp"
#include "isolab/util.hpp"

namespace isolab {

struct ManifoldPoint {
    int chart_id = 0;
    VecN x;

    ManifoldPoint() = default;
    ManifoldPoint(int id, VecN coords) : chart_id(id), x(coords) {}
    explicit ManifoldPoint(VecN coords) : x(coords) {}
    int dim() const { return x.n; }
};

struct TangentVec {
    ManifoldPoint base;
    VecN v;

    TangentVec() = default;
    TangentVec(ManifoldPoint p, VecN comps) : base(p), v(comps) {}
    int dim() const { return v.n; }
};

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChartMetric {
public:
    enum class Kind { ModelSpace, Conformal };

    static ChartMetric model_space(int n, double K, double chart_radius = 0.0, int id = 0) {
        ChartMetric m;
        m.n_ = check_dim(n);
        m.kind_ = Kind::ModelSpace;
        m.K_ = K;
        if (chart_radius <= 0.0) {
            if (K > 0.0)
                chart_radius = 8.0 / std::sqrt(K);
            else if (K < 0.0)
                chart_radius = 1.8 / std::sqrt(-K);  // Poincare disc has coordinate radius 2/sqrt(-K)
            else
                chart_radius = 10.0;
        }
        if (K < 0.0 && chart_radius >= 2.0 / std::sqrt(-K))
            throw std::invalid_argument("model_space: chart radius exceeds the Poincare disc");
        m.radius_ = chart_radius;
        m.id_ = id;
        return m;
    }

    static ChartMetric conformal(int n, const std::string& phi, double chart_radius = 4.0,
                                 double fd_step = 0.0, int id = 0) {
        ChartMetric m;
        m.n_ = check_dim(n);
        m.kind_ = Kind::Conformal;
        m.phi_ = expr::Program::parse(phi, n);
        m.radius_ = chart_radius;
        m.fd_step_ = fd_step > 0.0 ? fd_step : 1e-4 * chart_radius;
        m.id_ = id;
        return m;
    }

    int dim() const { return n_; }
    Kind kind() const { return kind_; }
    double curvature_param() const { return K_; }
    double chart_radius() const { return radius_; }
    double fd_step() const { return fd_step_; }
    int id() const { return id_; }
    const expr::Program& conformal_expr() const { return phi_; }

    bool contains(const VecN& x) const { return x.norm() < radius_; }
    bool contains(const ManifoldPoint& p) const {
        return p.chart_id == id_ && p.x.n == n_ && contains(p.x);
    }
    void require_interior(const ManifoldPoint& p, const char* who) const {
        if (!contains(p))
            throw std::domain_error(std::string(who) + ": point outside chart");
    }

    // phi, e^{phi}, e^{n phi}
    double phi(const VecN& x) const {
        if (kind_ == Kind::ModelSpace) return -std::log1p(K_ * dot(x, x) / 4.0);
        return phi_.eval(x.a.data());
    }
    double conformal_factor(const VecN& x) const { return std::exp(phi(x)); }
    double sqrt_det_metric(const VecN& x) const { return std::exp(n_ * phi(x)); }

    // Riemannian inner product of tangent components u, v at x.
    double metric_dot(const VecN& x, const VecN& u, const VecN& v) const {
        const double lam = conformal_factor(x);
        return lam * lam * dot(u, v);
    }
    double metric_norm(const VecN& x, const VecN& v) const {
        return conformal_factor(x) * v.norm();
    }

    VecN grad_phi(const VecN& x) const {
        VecN g(n_);
        if (kind_ == Kind::ModelSpace) {
            const double s = 1.0 / (1.0 + K_ * dot(x, x) / 4.0);
            for (int i = 0; i < n_; ++i) g[i] = -0.5 * K_ * x[i] * s;
            return g;
        }
        const double h = fd_step_;
        VecN q = x;
        for (int i = 0; i < n_; ++i) {
            q[i] = x[i] + h;
            const double fp = phi_.eval(q.a.data());
            q[i] = x[i] - h;
            const double fm = phi_.eval(q.a.data());
            q[i] = x[i];
            g[i] = (fp - fm) / (2.0 * h);
        }
        return g;
    }

    // Hessian of phi, row-major into hess[n*n].
    void hess_phi(const VecN& x, double* hess) const {
        if (kind_ == Kind::ModelSpace) {
            const double s = 1.0 / (1.0 + K_ * dot(x, x) / 4.0);
            for (int i = 0; i < n_; ++i)
                for (int j = 0; j < n_; ++j) {
                    double v = 0.25 * K_ * K_ * x[i] * x[j] * s * s;
                    if (i == j) v -= 0.5 * K_ * s;
                    hess[i * n_ + j] = v;
                }
            return;
        }
        const double h = fd_step_;
        const double f0 = phi_.eval(x.a.data());
        VecN q = x;
        for (int i = 0; i < n_; ++i) {
            q[i] = x[i] + h;
            const double fp = phi_.eval(q.a.data());
            q[i] = x[i] - h;
            const double fm = phi_.eval(q.a.data());
            q[i] = x[i];
            hess[i * n_ + i] = (fp - 2.0 * f0 + fm) / (h * h);
        }
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                VecN r = x;
                r[i] += h; r[j] += h;
                const double fpp = phi_.eval(r.a.data());
                r[j] -= 2.0 * h;
                const double fpm = phi_.eval(r.a.data());
                r[i] -= 2.0 * h;
                const double fmm = phi_.eval(r.a.data());
                r[j] += 2.0 * h;
                const double fmp = phi_.eval(r.a.data());
                const double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                hess[i * n_ + j] = v;
                hess[j * n_ + i] = v;
            }
    }

    // Geodesic acceleration: xdd^k = -Gamma^k_{ij} xd^i xd^j, which for a
    // conformal metric reduces to -2 (grad phi . xd) xd + |xd|^2 grad phi.
    VecN geodesic_accel(const VecN& x, const VecN& xd) const {
        const VecN g = grad_phi(x);
        const double gv = dot(g, xd);
        const double v2 = dot(xd, xd);
        VecN a(n_);
        for (int i = 0; i < n_; ++i) a[i] = -2.0 * gv * xd[i] + v2 * g[i];
        return a;
    }

    // Gamma^k_{ij} u^i v^j for the conformal metric:
    //   (grad phi . v) u + (grad phi . u) v - (u . v) grad phi.
    VecN christoffel_apply(const VecN& x, const VecN& u, const VecN& v) const {
        const VecN g = grad_phi(x);
        const double gu = dot(g, u);
        const double gv = dot(g, v);
        const double uv = dot(u, v);
        VecN out(n_);
        for (int i = 0; i < n_; ++i) out[i] = gv * u[i] + gu * v[i] - uv * g[i];
        return out;
    }

    // Scalar curvature of e^{2 phi} delta:
    //   Sc = e^{-2 phi} ( -2(n-1) lap phi - (n-1)(n-2) |grad phi|^2 ).
    double scalar_curvature(const VecN& x) const {
        double hess[9];
        hess_phi(x, hess);
        double lap = 0.0;
        for (int i = 0; i < n_; ++i) lap += hess[i * n_ + i];
        const VecN g = grad_phi(x);
        const double g2 = dot(g, g);
        const double val = -2.0 * (n_ - 1) * lap - double((n_ - 1) * (n_ - 2)) * g2;
        return std::exp(-2.0 * phi(x)) * val;
    }

    // Metric matrix at x (symmetric positive definite), row-major into m[n*n].
    void metric_matrix(const VecN& x, double* m) const {
        const double lam2 = std::exp(2.0 * phi(x));
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m[i * n_ + j] = (i == j) ? lam2 : 0.0;
    }

    // g_p-orthonormal frame aligned with the coordinate axes at p.
    VecN frame_vector(const VecN& p, int axis) const {
        VecN e(n_);
        e[axis] = 1.0 / conformal_factor(p);
        return e;
    }

private:
    static int check_dim(int n) {
        if (n != 2 && n != 3) throw std::invalid_argument("ChartMetric: dimension must be 2 or 3");
        return n;
    }

    int n_ = 2;
    Kind kind_ = Kind::ModelSpace;
    double K_ = 0.0;
    expr::Program phi_;
    double radius_ = 10.0;
    double fd_step_ = 1e-3;
    int id_ = 0;
};

// Sc(p) with the chart-domain check.
inline double scalar_curvature(const ChartMetric& m, const ManifoldPoint& p) {
    m.require_interior(p, "scalar_curvature");
    return m.scalar_curvature(p.x);
}

}  // namespace isolab
