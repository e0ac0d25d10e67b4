// Geometry of radial graphs exp_p(u(t) t), t in the unit tangent sphere at p:
// embedding by geodesic integration, induced area element, enclosed volume by
// radial quadrature of the polar Jacobian, and extrinsic mean curvature from
// the first/second fundamental forms. Differentiation in the sphere variables
// is spectral (Fourier for n=2, spherical harmonics for n=3).
#pragma once

#include <cmath>
#include <vector>

#include "isolab/geodesic.hpp"
#include "isolab/sphere_function.hpp"

namespace isolab {

struct GraphOptions {
    int circle_nodes = 64;      // n=2 embedding quadrature
    int vol_s_nodes = 8;        // radial Gauss-Legendre nodes for volumes
    int diff_bandwidth = 24;    // n=3 spectral differentiation degree
    bool with_volume = true;
    bool with_curvature = true;
    GeodesicOptions geo;
};

// Nodal data of one embedded graph. Area is always filled; volume and H only
// when requested.
struct GraphAssembly {
    int n = 2;                   // ambient dimension
    QuadratureRule quad;
    std::vector<double> u;       // radius at nodes
    std::vector<VecN> position;  // chart coordinates of the embedded nodes
    std::vector<VecN> radial;    // outward d/ds of the radial geodesic at s=1
    std::vector<double> area_element;  // dA per unit sphere measure
    std::vector<double> H;             // mean curvature at nodes
    double area = 0.0;
    double volume = 0.0;
};

namespace detail {

// Spectral differentiation of periodic samples on the uniform circle grid.
inline void circle_derivatives(const std::vector<double>& f, std::vector<double>& d1,
                               std::vector<double>& d2) {
    const int N = int(f.size());
    const int K = N / 2 - 1;
    d1.assign(size_t(N), 0.0);
    d2.assign(size_t(N), 0.0);
    std::vector<double> ca(size_t(K) + 1, 0.0), cb(size_t(K) + 1, 0.0);
    for (int k = 1; k <= K; ++k) {
        double sa = 0.0, sb = 0.0;
        for (int j = 0; j < N; ++j) {
            const double th = 2.0 * kPi * j / N;
            sa += f[size_t(j)] * std::cos(k * th);
            sb += f[size_t(j)] * std::sin(k * th);
        }
        ca[size_t(k)] = 2.0 * sa / N;
        cb[size_t(k)] = 2.0 * sb / N;
    }
    for (int j = 0; j < N; ++j) {
        const double th = 2.0 * kPi * j / N;
        double s1 = 0.0, s2 = 0.0;
        for (int k = 1; k <= K; ++k) {
            const double c = std::cos(k * th), s = std::sin(k * th);
            s1 += k * (-ca[size_t(k)] * s + cb[size_t(k)] * c);
            s2 += -double(k) * k * (ca[size_t(k)] * c + cb[size_t(k)] * s);
        }
        d1[size_t(j)] = s1;
        d2[size_t(j)] = s2;
    }
}

// First/second spectral derivatives of a grid field on S^2.
struct SphereJet {
    std::vector<double> ft, fp, ftt, ftp, fpp;
};

inline void sphere_jet(const SphereTransform& tr, const std::vector<double>& f, SphereJet& jet,
                       bool second) {
    std::vector<double> coef;
    tr.analyze(f.data(), coef);
    const size_t N = tr.n_nodes();
    jet.ft.resize(N);
    jet.fp.resize(N);
    tr.synthesize(coef, jet.ft.data(), SphereTransform::Deriv::Theta);
    tr.synthesize(coef, jet.fp.data(), SphereTransform::Deriv::Phi);
    if (second) {
        jet.ftt.resize(N);
        jet.ftp.resize(N);
        jet.fpp.resize(N);
        tr.synthesize(coef, jet.ftt.data(), SphereTransform::Deriv::ThetaTheta);
        tr.synthesize(coef, jet.ftp.data(), SphereTransform::Deriv::ThetaPhi);
        tr.synthesize(coef, jet.fpp.data(), SphereTransform::Deriv::PhiPhi);
    }
}

// Direction of the tangent-sphere parameter in chart components, using the
// axis-aligned orthonormal frame at p.
inline VecN sphere_direction(double inv_lam, double theta) {
    return VecN(std::cos(theta) * inv_lam, std::sin(theta) * inv_lam);
}
inline VecN sphere_direction(double inv_lam, double theta, double phi) {
    const double st = std::sin(theta);
    return VecN(st * std::cos(phi) * inv_lam, st * std::sin(phi) * inv_lam,
                std::cos(theta) * inv_lam);
}

}  // namespace detail

// Integrates all radial geodesics of the graph and assembles area, enclosed
// volume and mean curvature as requested. u must be positive.
inline GraphAssembly assemble_graph(const ManifoldPoint& p, const SphereFunction& u,
                                    const ChartMetric& m, const GraphOptions& opt = {}) {
    m.require_interior(p, "assemble_graph");
    const int n = m.dim();
    if (u.ambient_dim() != n)
        throw std::invalid_argument("assemble_graph: dimension mismatch");

    GraphAssembly g;
    g.n = n;
    g.quad = u.quadrature(n == 2 ? opt.circle_nodes : 0);
    g.u = u.values_on(g.quad);
    const size_t N = g.quad.size();
    for (size_t i = 0; i < N; ++i)
        if (!(g.u[i] > 0.0))
            throw std::domain_error("assemble_graph: radial function must be positive");

    // radial quadrature for the volume
    std::vector<double> snodes, sweights;
    if (opt.with_volume) {
        std::vector<double> x, w;
        gauss_legendre(opt.vol_s_nodes, x, w);
        snodes.resize(x.size());
        sweights.resize(x.size());
        for (size_t k = 0; k < x.size(); ++k) {
            snodes[k] = 0.5 * (x[k] + 1.0);
            sweights[k] = 0.5 * w[k];
        }
    }
    std::vector<double> tvals = snodes;
    tvals.push_back(1.0);

    const double inv_lam = 1.0 / m.conformal_factor(p.x);
    const size_t ns = snodes.size();
    std::vector<std::vector<GeodesicState>> rows(ns + 1);  // rows[k][node], k=ns is s=1
    for (auto& r : rows) r.resize(N);
    g.position.resize(N);
    g.radial.resize(N);
    for (size_t i = 0; i < N; ++i) {
        VecN dir;
        if (n == 2) {
            dir = detail::sphere_direction(inv_lam, g.quad.theta[i]);
        } else {
            const int np = int(g.quad.phi.size());
            dir = detail::sphere_direction(inv_lam, g.quad.theta[i / size_t(np)],
                                           g.quad.phi[i % size_t(np)]);
        }
        const auto states = geodesic_states(p, g.u[i] * dir, m, tvals, opt.geo);
        for (size_t k = 0; k < states.size(); ++k) rows[k][i] = states[k];
        g.position[i] = states.back().x;
        g.radial[i] = states.back().xd;
    }

    if (n == 2) {
        // spectral d/dtheta of the endpoint curve
        std::vector<double> cx(N), cy(N), dx1(N), dx2(N), dy1(N), dy2(N);
        for (size_t i = 0; i < N; ++i) {
            cx[i] = g.position[i][0];
            cy[i] = g.position[i][1];
        }
        detail::circle_derivatives(cx, dx1, dx2);
        detail::circle_derivatives(cy, dy1, dy2);
        g.area_element.resize(N);
        if (opt.with_curvature) g.H.resize(N);
        for (size_t i = 0; i < N; ++i) {
            const VecN X = g.position[i];
            const VecN T(dx1[i], dy1[i]);
            const double lam = m.conformal_factor(X);
            const double Tn = T.norm();
            if (!(Tn > 0.0)) throw GeometryError("graph geometry: degenerate tangent");
            g.area_element[i] = lam * Tn;
            if (opt.with_curvature) {
                const VecN acc = VecN(dx2[i], dy2[i]) + m.christoffel_apply(X, T, T);
                VecN nrm(-T[1], T[0]);
                if (dot(nrm, g.radial[i]) > 0.0) nrm *= -1.0;  // inward normal
                g.H[i] = dot(acc, nrm) / (lam * Tn * Tn * Tn);
            }
        }
        g.area = 0.0;
        for (size_t i = 0; i < N; ++i) g.area += g.quad.weights[i] * g.area_element[i];

        if (opt.with_volume) {
            double vol = 0.0;
            std::vector<double> rx(N), ry(N), rdx(N), rdy(N), tmp;
            for (size_t k = 0; k < ns; ++k) {
                for (size_t i = 0; i < N; ++i) {
                    rx[i] = rows[k][i].x[0];
                    ry[i] = rows[k][i].x[1];
                }
                detail::circle_derivatives(rx, rdx, tmp);
                detail::circle_derivatives(ry, rdy, tmp);
                double slice = 0.0;
                for (size_t i = 0; i < N; ++i) {
                    const VecN& xs = rows[k][i].x;
                    const VecN& vs = rows[k][i].xd;  // d/ds
                    const double det = vs[0] * rdy[i] - vs[1] * rdx[i];
                    const double lam = m.conformal_factor(xs);
                    slice += g.quad.weights[i] * lam * lam * std::abs(det);
                }
                vol += sweights[k] * slice;
            }
            g.volume = vol;
        }
        return g;
    }

    // n == 3
    const int nt = int(g.quad.theta.size());
    const int np = int(g.quad.phi.size());
    const auto& tr = SphereTransform::get(nt, np, std::min(opt.diff_bandwidth, nt - 1));
    std::vector<std::vector<double>> comp(3, std::vector<double>(N));
    for (size_t i = 0; i < N; ++i)
        for (int c = 0; c < 3; ++c) comp[size_t(c)][i] = g.position[i][c];
    detail::SphereJet jet[3];
    for (int c = 0; c < 3; ++c)
        detail::sphere_jet(tr, comp[size_t(c)], jet[c], opt.with_curvature);

    g.area_element.resize(N);
    if (opt.with_curvature) g.H.resize(N);
    for (size_t i = 0; i < N; ++i) {
        const double sin_t = std::sin(g.quad.theta[i / size_t(np)]);
        const VecN X = g.position[i];
        const VecN Xt(jet[0].ft[i], jet[1].ft[i], jet[2].ft[i]);
        const VecN Xp(jet[0].fp[i], jet[1].fp[i], jet[2].fp[i]);
        const double lam = m.conformal_factor(X);
        const double lam2 = lam * lam;
        const double E = lam2 * dot(Xt, Xt);
        const double F = lam2 * dot(Xt, Xp);
        const double G = lam2 * dot(Xp, Xp);
        const double det = E * G - F * F;
        if (!(det > 0.0)) throw GeometryError("graph geometry: degenerate tangent frame");
        g.area_element[i] = std::sqrt(det) / sin_t;
        if (opt.with_curvature) {
            VecN c(Xt[1] * Xp[2] - Xt[2] * Xp[1], Xt[2] * Xp[0] - Xt[0] * Xp[2],
                   Xt[0] * Xp[1] - Xt[1] * Xp[0]);
            if (dot(c, g.radial[i]) > 0.0) c *= -1.0;  // inward
            const double cn = c.norm();
            const VecN att = VecN(jet[0].ftt[i], jet[1].ftt[i], jet[2].ftt[i]) +
                             m.christoffel_apply(X, Xt, Xt);
            const VecN atp = VecN(jet[0].ftp[i], jet[1].ftp[i], jet[2].ftp[i]) +
                             m.christoffel_apply(X, Xt, Xp);
            const VecN app = VecN(jet[0].fpp[i], jet[1].fpp[i], jet[2].fpp[i]) +
                             m.christoffel_apply(X, Xp, Xp);
            const double IItt = lam * dot(att, c) / cn;
            const double IItp = lam * dot(atp, c) / cn;
            const double IIpp = lam * dot(app, c) / cn;
            g.H[i] = (G * IItt - 2.0 * F * IItp + E * IIpp) / det;
        }
    }
    g.area = 0.0;
    for (size_t i = 0; i < N; ++i) g.area += g.quad.weights[i] * g.area_element[i];

    if (opt.with_volume) {
        double vol = 0.0;
        std::vector<std::vector<double>> rc(3, std::vector<double>(N));
        detail::SphereJet rjet[3];
        for (size_t k = 0; k < ns; ++k) {
            for (size_t i = 0; i < N; ++i)
                for (int c = 0; c < 3; ++c) rc[size_t(c)][i] = rows[k][i].x[c];
            for (int c = 0; c < 3; ++c) detail::sphere_jet(tr, rc[size_t(c)], rjet[c], false);
            double slice = 0.0;
            for (size_t i = 0; i < N; ++i) {
                const double sin_t = std::sin(g.quad.theta[i / size_t(np)]);
                const VecN& xs = rows[k][i].x;
                const VecN& vs = rows[k][i].xd;
                const VecN Xt(rjet[0].ft[i], rjet[1].ft[i], rjet[2].ft[i]);
                const VecN Xp(rjet[0].fp[i], rjet[1].fp[i], rjet[2].fp[i]);
                const double det = vs[0] * (Xt[1] * Xp[2] - Xt[2] * Xp[1]) -
                                   vs[1] * (Xt[0] * Xp[2] - Xt[2] * Xp[0]) +
                                   vs[2] * (Xt[0] * Xp[1] - Xt[1] * Xp[0]);
                const double lam = m.conformal_factor(xs);
                slice += g.quad.weights[i] * lam * lam * lam * std::abs(det) / sin_t;
            }
            vol += sweights[k] * slice;
        }
        g.volume = vol;
    }
    return g;
}

// Area of the embedded graph.
inline double graph_area(const ManifoldPoint& p, const SphereFunction& u, const ChartMetric& m,
                         GraphOptions opt = {}) {
    opt.with_volume = false;
    opt.with_curvature = false;
    return assemble_graph(p, u, m, opt).area;
}

// Riemannian volume of { exp_p(s u(t) t) : 0 <= s <= 1 }.
inline double enclosed_volume(const ManifoldPoint& p, const SphereFunction& u,
                              const ChartMetric& m, GraphOptions opt = {}) {
    opt.with_volume = true;
    opt.with_curvature = false;
    return assemble_graph(p, u, m, opt).volume;
}

// Inward mean curvature of the graph as a SphereFunction (sum of principal
// curvatures; round spheres of radius r in flat space give (n-1)/r).
inline SphereFunction mean_curvature(const ManifoldPoint& p, const SphereFunction& u,
                                     const ChartMetric& m, GraphOptions opt = {}) {
    opt.with_volume = false;
    opt.with_curvature = true;
    const GraphAssembly g = assemble_graph(p, u, m, opt);
    if (g.n == 2) return SphereFunction::from_circle_values(g.H, u.bandwidth());
    SphereFunction h = SphereFunction::grid(u.n_theta(), u.n_phi());
    h.data() = g.H;
    return h;
}

}  // namespace isolab
