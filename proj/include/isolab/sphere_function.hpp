// Functions on the unit tangent sphere S^{n-1}.
//
// n = 2: truncated Fourier series, coefficients (a0, a1..aL, b1..bL).
// n = 3: values on an (n_theta x n_phi) latitude-longitude grid with
//        Gauss-Legendre weights in latitude.
//
// Provides quadrature, L^2 inner products, and the Laplace-eigenspace
// projections P (degree-1 harmonics) and Q = id - P.
#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "isolab/sph_harmonics.hpp"
#include "isolab/util.hpp"

namespace isolab {

// Nodes and weights on S^{n-1}; weights sum to |S^{n-1}|.
struct QuadratureRule {
    int sphere_dim = 1;
    std::vector<double> theta;    // n=2: N angles; n=3: colatitudes (size n_theta)
    std::vector<double> phi;      // n=3 only
    std::vector<double> weights;  // per node (flattened i*n_phi+j for n=3)

    size_t size() const { return weights.size(); }

    static QuadratureRule circle(int N) {
        QuadratureRule q;
        q.sphere_dim = 1;
        q.theta.resize(size_t(N));
        q.weights.assign(size_t(N), 2.0 * kPi / N);
        for (int i = 0; i < N; ++i) q.theta[size_t(i)] = 2.0 * kPi * i / N;
        return q;
    }

    static QuadratureRule sphere(int n_theta, int n_phi) {
        const auto& tr = SphereTransform::get(n_theta, n_phi, 1);
        QuadratureRule q;
        q.sphere_dim = 2;
        q.theta = tr.theta();
        q.phi = tr.phi();
        q.weights.resize(size_t(n_theta) * size_t(n_phi));
        for (int i = 0; i < n_theta; ++i)
            for (int j = 0; j < n_phi; ++j)
                q.weights[size_t(i) * size_t(n_phi) + size_t(j)] = tr.weight(i);
        return q;
    }
};

class SphereFunction {
public:
    static constexpr int kDefaultBandwidth = 16;
    static constexpr int kDefaultNTheta = 32;
    static constexpr int kDefaultNPhi = 64;

    // n = 2 representation: Fourier coefficients, all zero.
    static SphereFunction fourier(int bandwidth = kDefaultBandwidth) {
        SphereFunction u;
        u.dim_ = 1;
        u.L_ = bandwidth;
        u.data_.assign(size_t(2 * bandwidth + 1), 0.0);
        return u;
    }

    // n = 3 representation: grid values, all zero.
    static SphereFunction grid(int n_theta = kDefaultNTheta, int n_phi = kDefaultNPhi) {
        SphereFunction u;
        u.dim_ = 2;
        u.nt_ = n_theta;
        u.np_ = n_phi;
        u.data_.assign(size_t(n_theta) * size_t(n_phi), 0.0);
        return u;
    }

    static SphereFunction constant(int sphere_dim, double value) {
        SphereFunction u = (sphere_dim == 1) ? fourier() : grid();
        if (sphere_dim == 1)
            u.data_[0] = value;
        else
            u.data_.assign(u.data_.size(), value);
        return u;
    }

    int sphere_dim() const { return dim_; }
    int ambient_dim() const { return dim_ + 1; }
    int bandwidth() const { return L_; }
    int n_theta() const { return nt_; }
    int n_phi() const { return np_; }
    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    // Fourier coefficient accessors (n = 2 only).
    double a(int k) const { return k == 0 ? data_[0] : data_[size_t(k)]; }
    double b(int k) const { return data_[size_t(L_ + k)]; }
    void set_a(int k, double v) { data_[size_t(k == 0 ? 0 : k)] = v; }
    void set_b(int k, double v) { data_[size_t(L_ + k)] = v; }

    double grid_value(int i, int j) const { return data_[size_t(i) * size_t(np_) + size_t(j)]; }

    QuadratureRule quadrature(int oversample_circle_nodes = 0) const {
        if (dim_ == 1) {
            const int N = oversample_circle_nodes > 0 ? oversample_circle_nodes
                                                      : std::max(64, 4 * L_);
            return QuadratureRule::circle(N);
        }
        return QuadratureRule::sphere(nt_, np_);
    }

    // Values at the nodes of `q` (n=2 synthesizes; n=3 returns the grid data).
    std::vector<double> values_on(const QuadratureRule& q) const {
        if (dim_ == 1) {
            std::vector<double> v(q.theta.size());
            for (size_t i = 0; i < q.theta.size(); ++i) v[i] = eval_circle(q.theta[i]);
            return v;
        }
        return data_;
    }

    double eval_circle(double theta) const {
        double s = data_[0];
        for (int k = 1; k <= L_; ++k)
            s += a(k) * std::cos(k * theta) + b(k) * std::sin(k * theta);
        return s;
    }

    // Fourier analysis of nodal values on the uniform circle grid.
    static SphereFunction from_circle_values(const std::vector<double>& v, int bandwidth) {
        const int N = int(v.size());
        SphereFunction u = fourier(bandwidth);
        double mean = 0.0;
        for (double x : v) mean += x;
        u.data_[0] = mean / N;
        for (int k = 1; k <= bandwidth; ++k) {
            double ca = 0.0, cb = 0.0;
            for (int j = 0; j < N; ++j) {
                const double th = 2.0 * kPi * j / N;
                ca += v[size_t(j)] * std::cos(k * th);
                cb += v[size_t(j)] * std::sin(k * th);
            }
            u.set_a(k, 2.0 * ca / N);
            u.set_b(k, 2.0 * cb / N);
        }
        return u;
    }

    SphereFunction& operator+=(const SphereFunction& o) {
        check_same(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    SphereFunction& operator-=(const SphereFunction& o) {
        check_same(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    SphereFunction& operator*=(double s) {
        for (double& x : data_) x *= s;
        return *this;
    }
    friend SphereFunction operator+(SphereFunction l, const SphereFunction& r) { return l += r; }
    friend SphereFunction operator-(SphereFunction l, const SphereFunction& r) { return l -= r; }
    friend SphereFunction operator*(double s, SphereFunction u) { return u *= s; }

private:
    void check_same(const SphereFunction& o) const {
        if (dim_ != o.dim_ || data_.size() != o.data_.size())
            throw std::invalid_argument("SphereFunction: representation mismatch");
    }

    int dim_ = 1;
    int L_ = 0;
    int nt_ = 0, np_ = 0;
    std::vector<double> data_;
};

// integral over S^{n-1}
inline double integrate(const SphereFunction& u) {
    if (u.sphere_dim() == 1) return 2.0 * kPi * u.a(0);
    const QuadratureRule q = u.quadrature();
    double s = 0.0;
    for (size_t i = 0; i < q.size(); ++i) s += q.weights[i] * u.data()[i];
    return s;
}

inline double inner_product(const SphereFunction& u, const SphereFunction& v) {
    if (u.sphere_dim() == 1) {
        double s = u.a(0) * v.a(0) * 2.0 * kPi;
        for (int k = 1; k <= u.bandwidth(); ++k)
            s += kPi * (u.a(k) * v.a(k) + u.b(k) * v.b(k));
        return s;
    }
    const QuadratureRule q = u.quadrature();
    double s = 0.0;
    for (size_t i = 0; i < q.size(); ++i) s += q.weights[i] * u.data()[i] * v.data()[i];
    return s;
}

inline double l2_norm(const SphereFunction& u) { return std::sqrt(inner_product(u, u)); }

inline double max_abs(const SphereFunction& u) {
    if (u.sphere_dim() == 1) {
        const QuadratureRule q = u.quadrature();
        double m = 0.0;
        for (double th : q.theta) m = std::max(m, std::abs(u.eval_circle(th)));
        return m;
    }
    double m = 0.0;
    for (double x : u.data()) m = std::max(m, std::abs(x));
    return m;
}

inline double mean_value(const SphereFunction& u) {
    return integrate(u) / unit_sphere_area(u.ambient_dim());
}

// Orthogonal projection onto the first Laplace eigenspace of S^{n-1}:
// span{cos t, sin t} for n=2, the three coordinate functions for n=3.
inline SphereFunction project_first_eigenspace(const SphereFunction& u) {
    if (u.sphere_dim() == 1) {
        SphereFunction p = SphereFunction::fourier(u.bandwidth());
        p.set_a(1, u.a(1));
        p.set_b(1, u.b(1));
        return p;
    }
    const auto& tr = SphereTransform::get(u.n_theta(), u.n_phi(), 1);
    std::vector<double> coef;
    tr.analyze(u.data().data(), coef);
    // zero everything except degree 1
    std::vector<double> kept(coef.size(), 0.0);
    kept[size_t(tr.coef_index(1, 0, false))] = coef[size_t(tr.coef_index(1, 0, false))];
    kept[size_t(tr.coef_index(1, 1, false))] = coef[size_t(tr.coef_index(1, 1, false))];
    kept[size_t(tr.coef_index(1, 1, true))] = coef[size_t(tr.coef_index(1, 1, true))];
    SphereFunction p = SphereFunction::grid(u.n_theta(), u.n_phi());
    tr.synthesize(kept, p.data().data());
    return p;
}

// Q = id - P.
inline SphereFunction project_Q(const SphereFunction& u) {
    return u - project_first_eigenspace(u);
}

// Component orthogonal to constants and to the first eigenspace; this is what
// must vanish on a solved bubble.
inline SphereFunction remove_mean_and_first(const SphereFunction& u) {
    SphereFunction r = project_Q(u);
    if (r.sphere_dim() == 1) {
        r.set_a(0, 0.0);
        return r;
    }
    const double m = mean_value(r);
    for (double& x : r.data()) x -= m;
    return r;
}

}  // namespace isolab
