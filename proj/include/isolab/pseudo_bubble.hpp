// Pseudo-bubble solver: finds the radial graph u and curvature constant
// lambda with
//     (id - P) H(u) = lambda         (P = projection on degree-1 harmonics,
//                                      so H minus its degree-1 part is constant)
//     enclosed_volume(p, u) = v
// by a damped Newton iteration on the truncated coefficient space of u, with
// the degree-1 modes of u pinned to zero (translation gauge) and lambda as an
// explicit unknown. The Jacobian is assembled by forward differences and
// reused across iterations while contraction stays fast.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <vector>

#include "isolab/graph_geometry.hpp"
#include "isolab/karcher.hpp"

namespace isolab {

struct SolverConfig {
    double tol = 1e-10;           // residual L2 norm; volume is tol-relative
    int max_iter = 40;
    double jacobian_step = 1e-6;  // finite-difference step, relative to r0
    int bandwidth = 16;           // n=2: Fourier modes of u
    int solve_degree = 4;         // n=3: spherical-harmonic degree of the unknowns
    int n_theta = 32, n_phi = 64; // n=3 grid
    GraphOptions graph;
    bool compute_com_offset = true;
    int com_max_nodes = 128;      // subsample cap for the center-of-mass diagnostic
    double volume_cap = 0.0;      // 0: derive from the chart (ball of 1/8 boundary distance)
    std::optional<SphereFunction> init_u;
    double init_lambda = std::numeric_limits<double>::quiet_NaN();
};

struct PseudoBubble {
    ManifoldPoint center;
    SphereFunction u = SphereFunction::fourier();
    double volume = 0.0;
    double area = 0.0;
    double lambda = 0.0;          // mean of H over the tangent sphere
    double residual_norm = 0.0;   // ||(id - P0 - P1) H(u)||_{L2}
    double volume_error = 0.0;    // |enclosed volume - v|
    double com_offset = std::numeric_limits<double>::quiet_NaN();
    double u_mean = 0.0;
    double shape_deviation = 0.0;  // max |u/u_mean - 1|
    double c2_surrogate = 0.0;
    int iterations = 0;
};

class SolveError : public GeometryError {
public:
    SolveError(const std::string& msg, std::vector<double> trace)
        : GeometryError(msg + format_trace(trace)), trace_(std::move(trace)) {}
    const std::vector<double>& trace() const { return trace_; }

private:
    static std::string format_trace(const std::vector<double>& t) {
        std::ostringstream os;
        os << "; |F| trace:";
        for (double v : t) os << " " << v;
        return os.str();
    }
    std::vector<double> trace_;
};

// (id - P0 - P1) H(u): vanishes exactly on pseudo-bubbles.
inline SphereFunction residual(const ManifoldPoint& p, const SphereFunction& u,
                               const ChartMetric& m, const GraphOptions& opt = {}) {
    return remove_mean_and_first(mean_curvature(p, u, m, opt));
}

// Metric length of the straight coordinate ray from x to the chart boundary,
// away from the origin. A cheap scale estimate, not a sharp bound.
inline double boundary_distance_estimate(const ChartMetric& m, const VecN& x) {
    const int n = m.dim();
    VecN dir(n);
    if (x.norm() < 1e-14)
        dir[0] = 1.0;
    else
        dir = (1.0 / x.norm()) * x;
    const double remaining = m.chart_radius() - x.norm();
    const int K = 64;
    double len = 0.0;
    for (int k = 0; k < K; ++k) {
        const double s = (k + 0.5) / K * remaining;
        len += m.conformal_factor(x + s * dir) * remaining / K;
    }
    return len;
}

// Discrete stand-in for the C^{2,alpha} size of u: sup norms of u, u', u''
// plus a Holder quotient of u'' on adjacent nodes (alpha = 1/2).
inline double c2_surrogate(const SphereFunction& u) {
    if (u.sphere_dim() == 1) {
        const auto q = u.quadrature();
        const auto v = u.values_on(q);
        std::vector<double> d1, d2;
        detail::circle_derivatives(v, d1, d2);
        double m0 = 0.0, m1 = 0.0, m2 = 0.0, hq = 0.0;
        const double dth = 2.0 * kPi / double(v.size());
        for (size_t i = 0; i < v.size(); ++i) {
            m0 = std::max(m0, std::abs(v[i]));
            m1 = std::max(m1, std::abs(d1[i]));
            m2 = std::max(m2, std::abs(d2[i]));
            const size_t j = (i + 1) % v.size();
            hq = std::max(hq, std::abs(d2[j] - d2[i]) / std::sqrt(dth));
        }
        return m0 + m1 + m2 + hq;
    }
    const auto& tr = SphereTransform::get(u.n_theta(), u.n_phi(), u.n_theta() - 1);
    detail::SphereJet jet;
    detail::sphere_jet(tr, u.data(), jet, true);
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (size_t i = 0; i < u.data().size(); ++i) {
        m0 = std::max(m0, std::abs(u.data()[i]));
        m1 = std::max(m1, std::max(std::abs(jet.ft[i]), std::abs(jet.fp[i])));
        m2 = std::max(m2, std::abs(jet.ftt[i]));
    }
    return m0 + m1 + m2;
}

namespace detail {

// Packing of the Newton unknowns: coefficient vector of u (degree-1 modes
// excluded) followed by lambda.
struct BubbleBasis {
    int sphere_dim;
    int L;              // n=2 bandwidth or n=3 solve degree
    int nt = 0, np = 0;
    int n_coef = 0;     // unknowns without lambda

    static BubbleBasis make(int ambient_dim, const SolverConfig& cfg) {
        BubbleBasis b;
        b.sphere_dim = ambient_dim - 1;
        if (ambient_dim == 2) {
            b.L = cfg.bandwidth;
            b.n_coef = 2 * b.L - 1;  // a0, a2..aL, b2..bL
        } else {
            b.L = cfg.solve_degree;
            b.nt = cfg.n_theta;
            b.np = cfg.n_phi;
            b.n_coef = 1;
            for (int ell = 2; ell <= b.L; ++ell) b.n_coef += 2 * ell + 1;
        }
        return b;
    }

    SphereFunction synth(const Eigen::VectorXd& z) const {
        if (sphere_dim == 1) {
            SphereFunction u = SphereFunction::fourier(L);
            u.set_a(0, z[0]);
            int idx = 1;
            for (int k = 2; k <= L; ++k) u.set_a(k, z[idx++]);
            for (int k = 2; k <= L; ++k) u.set_b(k, z[idx++]);
            return u;
        }
        const auto& tr = SphereTransform::get(nt, np, L);
        std::vector<double> coef(size_t(tr.n_coef()), 0.0);
        int idx = 0;
        coef[size_t(tr.coef_index(0, 0, false))] = z[idx++] * std::sqrt(4.0 * kPi);
        for (int ell = 2; ell <= L; ++ell) {
            coef[size_t(tr.coef_index(ell, 0, false))] = z[idx++];
            for (int mm = 1; mm <= ell; ++mm) {
                coef[size_t(tr.coef_index(ell, mm, false))] = z[idx++];
                coef[size_t(tr.coef_index(ell, mm, true))] = z[idx++];
            }
        }
        SphereFunction u = SphereFunction::grid(nt, np);
        tr.synthesize(coef, u.data().data());
        return u;
    }

    // coefficient rows of (H - lambda) on the carried modes
    void curvature_rows(const SphereFunction& H, double lambda, Eigen::VectorXd& F) const {
        if (sphere_dim == 1) {
            F[0] = H.a(0) - lambda;
            int idx = 1;
            for (int k = 2; k <= L; ++k) F[idx++] = H.a(k);
            for (int k = 2; k <= L; ++k) F[idx++] = H.b(k);
            return;
        }
        const auto& tr = SphereTransform::get(nt, np, L);
        std::vector<double> coef;
        tr.analyze(H.data().data(), coef);
        int idx = 0;
        F[idx++] = coef[size_t(tr.coef_index(0, 0, false))] / std::sqrt(4.0 * kPi) - lambda;
        for (int ell = 2; ell <= L; ++ell) {
            F[idx++] = coef[size_t(tr.coef_index(ell, 0, false))];
            for (int mm = 1; mm <= ell; ++mm) {
                F[idx++] = coef[size_t(tr.coef_index(ell, mm, false))];
                F[idx++] = coef[size_t(tr.coef_index(ell, mm, true))];
            }
        }
    }

    Eigen::VectorXd constant_start(double r0) const {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n_coef);
        z[0] = r0;
        return z;
    }

    Eigen::VectorXd from_function(const SphereFunction& u) const {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(n_coef);
        if (sphere_dim == 1) {
            z[0] = u.a(0);
            int idx = 1;
            for (int k = 2; k <= L; ++k) z[idx++] = u.a(k);
            for (int k = 2; k <= L; ++k) z[idx++] = u.b(k);
            return z;
        }
        const auto& tr = SphereTransform::get(nt, np, L);
        std::vector<double> coef;
        tr.analyze(u.data().data(), coef);
        int idx = 0;
        z[idx++] = coef[size_t(tr.coef_index(0, 0, false))] / std::sqrt(4.0 * kPi);
        for (int ell = 2; ell <= L; ++ell) {
            z[idx++] = coef[size_t(tr.coef_index(ell, 0, false))];
            for (int mm = 1; mm <= ell; ++mm) {
                z[idx++] = coef[size_t(tr.coef_index(ell, mm, false))];
                z[idx++] = coef[size_t(tr.coef_index(ell, mm, true))];
            }
        }
        return z;
    }
};

}  // namespace detail

// Center-of-mass offset of the boundary measure from p (Karcher mean of the
// embedded nodes weighted by the area element).
inline double boundary_com_offset(const ManifoldPoint& p, const GraphAssembly& g,
                                  const ChartMetric& m, int max_nodes = 128) {
    const size_t N = g.position.size();
    const size_t stride = std::max<size_t>(1, N / size_t(std::max(1, max_nodes)));
    std::vector<ManifoldPoint> pts;
    std::vector<double> w;
    double wsum = 0.0;
    for (size_t i = 0; i < N; i += stride) {
        pts.emplace_back(p.chart_id, g.position[i]);
        const double wi = g.quad.weights[i] * g.area_element[i];
        w.push_back(wi);
        wsum += wi;
    }
    for (double& wi : w) wi /= wsum;
    KarcherOptions kopt;
    kopt.grad_tol = 1e-11;
    const ManifoldPoint com = karcher_mean(pts, w, m, kopt);
    if ((com.x - p.x).norm() == 0.0) return 0.0;
    const TangentVec l = log_map(p, com, m);
    return m.metric_norm(p.x, l.v);
}

// Solves for the pseudo-bubble with center p and enclosed volume v.
inline PseudoBubble solve_beta(const ManifoldPoint& p, double v, const ChartMetric& m,
                               const SolverConfig& cfg = {}) {
    m.require_interior(p, "solve_beta");
    if (!(v > 0.0)) throw std::domain_error("solve_beta: volume must be positive");
    const int n = m.dim();
    const double omega = unit_ball_volume(n);
    const double r0 = std::pow(v / omega, 1.0 / n);

    double cap = cfg.volume_cap;
    if (cap <= 0.0) {
        const double rb = boundary_distance_estimate(m, p.x) / 8.0;
        cap = omega * std::pow(rb, n);
    }
    if (v > cap) {
        std::ostringstream os;
        os << "solve_beta: volume " << v << " exceeds the small-volume cap " << cap;
        throw std::domain_error(os.str());
    }

    const detail::BubbleBasis basis = detail::BubbleBasis::make(n, cfg);
    const int nu = basis.n_coef;
    const int dim = nu + 1;  // + lambda

    GraphOptions gopt = cfg.graph;
    gopt.with_volume = true;
    gopt.with_curvature = true;

    Eigen::VectorXd z(dim);
    if (cfg.init_u) {
        z.head(nu) = basis.from_function(*cfg.init_u);
        z[nu] = std::isnan(cfg.init_lambda) ? double(n - 1) / r0 : cfg.init_lambda;
    } else {
        z.head(nu) = basis.constant_start(r0);
        z[nu] = double(n - 1) / r0;
    }

    struct Eval {
        Eigen::VectorXd F;
        double residual_norm;
        double vol_err;
        GraphAssembly g;
        SphereFunction u = SphereFunction::fourier();
    };
    const double row_scale = r0 * r0;  // balance curvature rows against the volume row

    auto assemble = [&](const Eigen::VectorXd& zz) -> Eval {
        Eval e;
        e.u = basis.synth(zz.head(nu));
        e.g = assemble_graph(p, e.u, m, gopt);
        SphereFunction H = (n == 2) ? SphereFunction::from_circle_values(e.g.H, basis.L)
                                    : [&] {
                                          SphereFunction h = SphereFunction::grid(basis.nt, basis.np);
                                          h.data() = e.g.H;
                                          return h;
                                      }();
        e.F.resize(dim);
        Eigen::VectorXd rows(nu);
        basis.curvature_rows(H, zz[nu], rows);
        e.F.head(nu) = rows * row_scale;
        e.F[nu] = e.g.volume / v - 1.0;
        e.residual_norm = l2_norm(remove_mean_and_first(H));
        e.vol_err = std::abs(e.g.volume - v);
        return e;
    };

    std::vector<double> trace;
    Eval cur = assemble(z);
    trace.push_back(cur.F.norm());

    Eigen::MatrixXd J(dim, dim);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool have_J = false;
    int iterations = 0;

    auto converged = [&](const Eval& e) {
        return e.residual_norm < cfg.tol && e.vol_err < cfg.tol * std::max(v, 1e-30);
    };

    for (int iter = 0; iter < cfg.max_iter && !converged(cur); ++iter) {
        ++iterations;
        if (!have_J) {
            const double h = cfg.jacobian_step * r0;
            for (int j = 0; j < nu; ++j) {
                Eigen::VectorXd zj = z;
                zj[j] += h;
                const Eval ej = assemble(zj);
                J.col(j) = (ej.F - cur.F) / h;
            }
            // lambda column is analytic: only the mean-curvature row sees it
            J.col(nu).setZero();
            J(0, nu) = -row_scale;
            lu.compute(J);
            have_J = true;
        }
        const Eigen::VectorXd step = lu.solve(-cur.F);
        double t = 1.0;
        bool accepted = false;
        for (int back = 0; back < 10; ++back) {
            const Eigen::VectorXd zt = z + t * step;
            try {
                Eval et = assemble(zt);
                if (et.F.norm() < cur.F.norm() || converged(et)) {
                    const double ratio = et.F.norm() / std::max(cur.F.norm(), 1e-300);
                    z = zt;
                    cur = std::move(et);
                    trace.push_back(cur.F.norm());
                    accepted = true;
                    if (ratio > 0.3) have_J = false;  // contraction too slow: refresh
                    break;
                }
            } catch (const std::domain_error&) {
                // trial graph not positive; shrink the step
            } catch (const GeometryError&) {
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (have_J && iter + 1 < cfg.max_iter) {
                have_J = false;  // retry with a fresh Jacobian
                continue;
            }
            throw SolveError("solve_beta: Newton step rejected", trace);
        }
    }
    if (!converged(cur)) throw SolveError("solve_beta: no convergence", trace);

    PseudoBubble out;
    out.center = p;
    out.u = cur.u;
    out.volume = cur.g.volume;
    out.area = cur.g.area;
    out.lambda = z[nu];
    out.residual_norm = cur.residual_norm;
    out.volume_error = cur.vol_err;
    out.iterations = iterations;
    const auto uvals = cur.u.values_on(cur.g.quad);
    double umean = 0.0, wsum = 0.0;
    for (size_t i = 0; i < uvals.size(); ++i) {
        umean += cur.g.quad.weights[i] * uvals[i];
        wsum += cur.g.quad.weights[i];
    }
    umean /= wsum;
    out.u_mean = umean;
    double dev = 0.0;
    for (double uv : uvals) dev = std::max(dev, std::abs(uv / umean - 1.0));
    out.shape_deviation = dev;
    out.c2_surrogate = c2_surrogate(cur.u);
    if (cfg.compute_com_offset)
        out.com_offset = boundary_com_offset(p, cur.g, m, cfg.com_max_nodes);
    return out;
}

// Area of the pseudo-bubble with center p and volume v.
inline double f_area(const ManifoldPoint& p, double v, const ChartMetric& m,
                     const SolverConfig& cfg = {}) {
    return solve_beta(p, v, m, cfg).area;
}

struct UniquenessReport {
    int trials = 0;
    int converged = 0;
    int diverged = 0;
    double max_pairwise_sup = 0.0;  // max over pairs of sup |u_i - u_j|
    uint64_t seed = 0;
};

// Re-runs the solver from randomized starts (non-degree-1 perturbations up to
// 20% of r0) and measures the spread of the converged solutions.
inline UniquenessReport verify_uniqueness(const ManifoldPoint& p, double v, const ChartMetric& m,
                                          int trials, uint64_t seed = 1,
                                          const SolverConfig& cfg = {}) {
    UniquenessReport rep;
    rep.trials = trials;
    rep.seed = seed;
    const int n = m.dim();
    const double r0 = std::pow(v / unit_ball_volume(n), 1.0 / n);
    std::mt19937_64 rng(seed);

    std::vector<PseudoBubble> sols;
    for (int t = 0; t < trials; ++t) {
        SolverConfig c = cfg;
        c.compute_com_offset = false;
        if (t > 0) {
            // perturb the constant start in the carried non-degree-1 modes
            if (n == 2) {
                SphereFunction u0 = SphereFunction::fourier(c.bandwidth);
                u0.set_a(0, r0);
                double peak = 0.0;
                std::vector<std::pair<int, bool>> modes;
                for (int k = 2; k <= std::min(6, c.bandwidth); ++k) {
                    modes.push_back({k, false});
                    modes.push_back({k, true});
                }
                std::vector<double> amp(modes.size());
                for (size_t i = 0; i < modes.size(); ++i) {
                    amp[i] = uniform_in(rng, -1.0, 1.0) / double(modes[i].first);
                    peak += std::abs(amp[i]);
                }
                const double scale = 0.2 * r0 * uniform_in(rng, 0.5, 1.0) / peak;
                for (size_t i = 0; i < modes.size(); ++i) {
                    if (modes[i].second)
                        u0.set_b(modes[i].first, amp[i] * scale);
                    else
                        u0.set_a(modes[i].first, amp[i] * scale);
                }
                c.init_u = u0;
            } else {
                const auto& tr = SphereTransform::get(c.n_theta, c.n_phi, c.solve_degree);
                std::vector<double> coef(size_t(tr.n_coef()), 0.0);
                coef[size_t(tr.coef_index(0, 0, false))] = r0 * std::sqrt(4.0 * kPi);
                double peak = 0.0;
                for (int ell = 2; ell <= c.solve_degree; ++ell)
                    for (int mm = 0; mm <= ell; ++mm) {
                        const double a = uniform_in(rng, -1.0, 1.0);
                        coef[size_t(tr.coef_index(ell, mm, false))] = a;
                        peak += std::abs(a);
                        if (mm > 0) {
                            const double b = uniform_in(rng, -1.0, 1.0);
                            coef[size_t(tr.coef_index(ell, mm, true))] = b;
                            peak += std::abs(b);
                        }
                    }
                const double scale = 0.2 * r0 * uniform_in(rng, 0.5, 1.0) / peak;
                for (int ell = 2; ell <= c.solve_degree; ++ell)
                    for (int mm = 0; mm <= ell; ++mm) {
                        coef[size_t(tr.coef_index(ell, mm, false))] *= scale;
                        if (mm > 0) coef[size_t(tr.coef_index(ell, mm, true))] *= scale;
                    }
                SphereFunction u0 = SphereFunction::grid(c.n_theta, c.n_phi);
                tr.synthesize(coef, u0.data().data());
                c.init_u = u0;
            }
        }
        try {
            sols.push_back(solve_beta(p, v, m, c));
            ++rep.converged;
        } catch (const GeometryError&) {
            ++rep.diverged;
        }
    }
    for (size_t i = 0; i < sols.size(); ++i) {
        const auto qi = sols[i].u.quadrature();
        const auto vi = sols[i].u.values_on(qi);
        for (size_t j = i + 1; j < sols.size(); ++j) {
            const auto vj = sols[j].u.values_on(qi);
            double d = 0.0;
            for (size_t k = 0; k < vi.size(); ++k) d = std::max(d, std::abs(vi[k] - vj[k]));
            rep.max_pairwise_sup = std::max(rep.max_pairwise_sup, d);
        }
    }
    return rep;
}

struct SymmetryReport {
    bool applicable = false;
    std::string note;
    double nonconstant_energy = std::numeric_limits<double>::quiet_NaN();
};

// Detects a rotational symmetry of the chart about p by sampling, and when
// present checks that the solved u is rotation invariant (only the constant
// mode survives).
inline SymmetryReport symmetry_check(const PseudoBubble& pb, const ChartMetric& m) {
    SymmetryReport rep;
    const ManifoldPoint& p = pb.center;
    const int n = m.dim();
    if (n != 2) {
        rep.note = "rotation test implemented for n=2 charts only";
        return rep;
    }
    // does phi(p + R(x-p)) = phi(x) hold for sampled rotations?
    double worst = 0.0;
    for (double rad : {0.1, 0.3, 0.7}) {
        for (int a = 0; a < 8; ++a) {
            const double base = 2.0 * kPi * a / 8.0;
            const VecN x = p.x + VecN(rad * std::cos(base), rad * std::sin(base));
            if (!m.contains(x)) continue;
            for (double rot : {0.7, 2.1}) {
                const VecN y =
                    p.x + VecN(rad * std::cos(base + rot), rad * std::sin(base + rot));
                if (!m.contains(y)) continue;
                worst = std::max(worst, std::abs(m.phi(x) - m.phi(y)));
            }
        }
    }
    if (worst > 1e-10) {
        rep.note = "no stabilizer symmetry: conformal factor is not radial about the center";
        return rep;
    }
    rep.applicable = true;
    SphereFunction dev = pb.u;
    dev.set_a(0, 0.0);
    rep.nonconstant_energy = l2_norm(dev);
    return rep;
}

// Optional re-centering: move p to the boundary center of mass and re-solve,
// up to `rounds` times or until the offset falls below `tol`.
inline PseudoBubble recenter(const PseudoBubble& pb, double v, const ChartMetric& m,
                             const SolverConfig& cfg = {}, int rounds = 5, double tol = 1e-12) {
    PseudoBubble cur = pb;
    if (std::isnan(cur.com_offset))
        throw std::invalid_argument("recenter: solve with compute_com_offset first");
    SolverConfig c = cfg;
    c.compute_com_offset = true;
    for (int r = 0; r < rounds && cur.com_offset > tol; ++r) {
        GraphAssembly g = assemble_graph(cur.center, cur.u, m, c.graph);
        const size_t N = g.position.size();
        std::vector<ManifoldPoint> pts;
        std::vector<double> w;
        double wsum = 0.0;
        for (size_t i = 0; i < N; ++i) {
            pts.emplace_back(cur.center.chart_id, g.position[i]);
            w.push_back(g.quad.weights[i] * g.area_element[i]);
            wsum += w.back();
        }
        for (double& wi : w) wi /= wsum;
        const ManifoldPoint com = karcher_mean(pts, w, m);
        c.init_u = cur.u;
        c.init_lambda = cur.lambda;
        cur = solve_beta(com, v, m, c);
    }
    return cur;
}

}  // namespace isolab
