// Real spherical-harmonic analysis/synthesis on a latitude-longitude grid
// (Gauss-Legendre in cos(theta), uniform in phi), including pointwise
// derivative synthesis up to second order. Used for spectral differentiation
// of smooth fields on S^2; bases are orthonormal for the sphere measure.
#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "isolab/util.hpp"

namespace isolab {

// Gauss-Legendre nodes (ascending) and weights on [-1, 1], by Newton iteration
// on the Legendre polynomial.
inline void gauss_legendre(int N, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(size_t(N));
    weights.resize(size_t(N));
    for (int i = 0; i < (N + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (N + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= N; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = N * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[size_t(N - 1 - i)] = x;
        nodes[size_t(i)] = -x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[size_t(i)] = w;
        weights[size_t(N - 1 - i)] = w;
    }
}

// Transform between grid values and fully normalized real SH coefficients.
// Coefficients are packed by m: for m = 0 the ell-run ell = 0..L (cosine only),
// for m >= 1 a cosine run then a sine run.
class SphereTransform {
public:
    SphereTransform(int n_theta, int n_phi, int L) : nt_(n_theta), np_(n_phi), L_(L) {
        if (L_ > nt_ - 1) throw std::invalid_argument("SphereTransform: L exceeds grid bandwidth");
        if (2 * L_ >= np_) throw std::invalid_argument("SphereTransform: L exceeds phi bandwidth");
        std::vector<double> x;
        gauss_legendre(nt_, x, wtheta_);
        theta_.resize(size_t(nt_));
        for (int i = 0; i < nt_; ++i) theta_[size_t(i)] = std::acos(x[size_t(nt_ - 1 - i)]);
        // theta ascending in (0, pi); reorder weights to match
        std::vector<double> w2(wtheta_);
        for (int i = 0; i < nt_; ++i) wtheta_[size_t(i)] = w2[size_t(nt_ - 1 - i)];
        phi_.resize(size_t(np_));
        for (int j = 0; j < np_; ++j) phi_[size_t(j)] = 2.0 * kPi * j / np_;

        build_legendre_tables();
        build_phi_tables();

        offsets_.assign(size_t(L_) + 2, 0);
        int total = L_ + 1;  // m = 0 block
        offsets_[0] = 0;
        offsets_[1] = total;
        for (int m = 1; m <= L_; ++m) {
            total += 2 * (L_ - m + 1);
            offsets_[size_t(m) + 1] = total;
        }
        ncoef_ = total;
    }

    int n_theta() const { return nt_; }
    int n_phi() const { return np_; }
    int bandwidth() const { return L_; }
    int n_coef() const { return ncoef_; }
    size_t n_nodes() const { return size_t(nt_) * size_t(np_); }
    const std::vector<double>& theta() const { return theta_; }
    const std::vector<double>& phi() const { return phi_; }
    // quadrature weight of node (i, j) for the sphere measure
    double weight(int i) const { return wtheta_[size_t(i)] * (2.0 * kPi / np_); }

    // index of the (ell, m) cosine/sine coefficient inside the packed vector
    int coef_index(int ell, int m, bool sine) const {
        if (m == 0) return ell;
        const int base = offsets_[size_t(m)];
        const int run = L_ - m + 1;
        return base + (sine ? run : 0) + (ell - m);
    }

    void analyze(const double* values, std::vector<double>& coef) const {
        coef.assign(size_t(ncoef_), 0.0);
        // phi transform per latitude row
        std::vector<double> fc(size_t(nt_) * size_t(L_ + 1)), fs(size_t(nt_) * size_t(L_ + 1));
        const double dphi_w = 2.0 * kPi / np_;
        for (int i = 0; i < nt_; ++i) {
            const double* row = values + size_t(i) * size_t(np_);
            for (int m = 0; m <= L_; ++m) {
                double sc = 0.0, ss = 0.0;
                const double* cm = &cosmphi_[size_t(m) * size_t(np_)];
                const double* sm = &sinmphi_[size_t(m) * size_t(np_)];
                for (int j = 0; j < np_; ++j) {
                    sc += row[j] * cm[j];
                    ss += row[j] * sm[j];
                }
                fc[size_t(i) * size_t(L_ + 1) + size_t(m)] = sc * dphi_w;
                fs[size_t(i) * size_t(L_ + 1) + size_t(m)] = ss * dphi_w;
            }
        }
        // Legendre projection per order m
        for (int m = 0; m <= L_; ++m) {
            const double norm = (m == 0) ? 1.0 : std::sqrt(2.0);
            for (int ell = m; ell <= L_; ++ell) {
                double ac = 0.0, as = 0.0;
                for (int i = 0; i < nt_; ++i) {
                    const double t = wtheta_[size_t(i)] * plm(i, ell, m);
                    ac += t * fc[size_t(i) * size_t(L_ + 1) + size_t(m)];
                    if (m > 0) as += t * fs[size_t(i) * size_t(L_ + 1) + size_t(m)];
                }
                coef[size_t(coef_index(ell, m, false))] = norm * ac;
                if (m > 0) coef[size_t(coef_index(ell, m, true))] = norm * as;
            }
        }
    }

    enum class Deriv { None, Theta, Phi, ThetaTheta, ThetaPhi, PhiPhi };

    void synthesize(const std::vector<double>& coef, double* out, Deriv d = Deriv::None) const {
        // theta-dependent row amplitudes per order m
        std::vector<double> gc(size_t(nt_) * size_t(L_ + 1), 0.0);
        std::vector<double> gs(size_t(nt_) * size_t(L_ + 1), 0.0);
        for (int m = 0; m <= L_; ++m) {
            const double norm = (m == 0) ? 1.0 : std::sqrt(2.0);
            for (int ell = m; ell <= L_; ++ell) {
                const double ac = norm * coef[size_t(coef_index(ell, m, false))];
                const double as = (m > 0) ? norm * coef[size_t(coef_index(ell, m, true))] : 0.0;
                if (ac == 0.0 && as == 0.0) continue;
                for (int i = 0; i < nt_; ++i) {
                    double base;
                    switch (d) {
                        case Deriv::None:
                        case Deriv::Phi:
                        case Deriv::PhiPhi: base = plm(i, ell, m); break;
                        case Deriv::Theta:
                        case Deriv::ThetaPhi: base = dplm(i, ell, m); break;
                        case Deriv::ThetaTheta: base = d2plm(i, ell, m); break;
                        default: base = 0.0;
                    }
                    gc[size_t(i) * size_t(L_ + 1) + size_t(m)] += ac * base;
                    gs[size_t(i) * size_t(L_ + 1) + size_t(m)] += as * base;
                }
            }
        }
        const bool dphi1 = (d == Deriv::Phi || d == Deriv::ThetaPhi);
        const bool dphi2 = (d == Deriv::PhiPhi);
        for (int i = 0; i < nt_; ++i) {
            double* row = out + size_t(i) * size_t(np_);
            for (int j = 0; j < np_; ++j) row[j] = 0.0;
            for (int m = 0; m <= L_; ++m) {
                double ac = gc[size_t(i) * size_t(L_ + 1) + size_t(m)];
                double as = gs[size_t(i) * size_t(L_ + 1) + size_t(m)];
                if (dphi1) {
                    // d/dphi: cos m p -> -m sin, sin -> m cos
                    const double t = ac;
                    ac = m * as;
                    as = -m * t;
                } else if (dphi2) {
                    ac *= -double(m) * m;
                    as *= -double(m) * m;
                }
                if (ac == 0.0 && as == 0.0) continue;
                const double* cm = &cosmphi_[size_t(m) * size_t(np_)];
                const double* sm = &sinmphi_[size_t(m) * size_t(np_)];
                for (int j = 0; j < np_; ++j) row[j] += ac * cm[j] + as * sm[j];
            }
        }
    }

    // Shared instances keyed by shape; the tables are immutable once built.
    static const SphereTransform& get(int n_theta, int n_phi, int L) {
        static std::mutex mu;
        static std::map<std::tuple<int, int, int>, std::unique_ptr<SphereTransform>> cache;
        std::lock_guard<std::mutex> lock(mu);
        auto& slot = cache[{n_theta, n_phi, L}];
        if (!slot) slot = std::make_unique<SphereTransform>(n_theta, n_phi, L);
        return *slot;
    }

private:
    double plm(int i, int ell, int m) const {
        return plm_[size_t(i) * size_t(nplm_) + size_t(plm_index(ell, m))];
    }
    double dplm(int i, int ell, int m) const {
        return dplm_[size_t(i) * size_t(nplm_) + size_t(plm_index(ell, m))];
    }
    // from the associated Legendre ODE:
    //   P'' = -cot(theta) P' - (ell(ell+1) - m^2/sin^2 theta) P
    double d2plm(int i, int ell, int m) const {
        const double th = theta_[size_t(i)];
        const double s = std::sin(th), c = std::cos(th);
        return -(c / s) * dplm(i, ell, m) -
               (double(ell) * (ell + 1) - double(m) * m / (s * s)) * plm(i, ell, m);
    }
    int plm_index(int ell, int m) const { return m * (L_ + 1) - m * (m - 1) / 2 + (ell - m); }

    void build_legendre_tables() {
        nplm_ = (L_ + 1) * (L_ + 2) / 2;
        plm_.assign(size_t(nt_) * size_t(nplm_), 0.0);
        dplm_.assign(size_t(nt_) * size_t(nplm_), 0.0);
        for (int i = 0; i < nt_; ++i) {
            const double th = theta_[size_t(i)];
            const double x = std::cos(th), s = std::sin(th);
            double* P = &plm_[size_t(i) * size_t(nplm_)];
            // diagonal terms
            P[plm_index(0, 0)] = std::sqrt(1.0 / (4.0 * kPi));
            for (int m = 1; m <= L_; ++m)
                P[plm_index(m, m)] =
                    P[plm_index(m - 1, m - 1)] * s * std::sqrt((2.0 * m + 1.0) / (2.0 * m));
            // first off-diagonal and upward recurrence
            for (int m = 0; m < L_; ++m)
                P[plm_index(m + 1, m)] = P[plm_index(m, m)] * x * std::sqrt(2.0 * m + 3.0);
            for (int m = 0; m <= L_; ++m)
                for (int ell = m + 2; ell <= L_; ++ell) {
                    const double a =
                        std::sqrt((4.0 * ell * ell - 1.0) / (double(ell) * ell - double(m) * m));
                    const double b = std::sqrt(
                        (4.0 * (ell - 1.0) * (ell - 1.0) - 1.0) /
                        (double(ell - 1) * (ell - 1) - double(m) * m));
                    P[plm_index(ell, m)] =
                        a * (x * P[plm_index(ell - 1, m)] - P[plm_index(ell - 2, m)] / b);
                }
            // d/dtheta via sin(theta) P' = ell x P - c P_{ell-1}
            double* D = &dplm_[size_t(i) * size_t(nplm_)];
            for (int m = 0; m <= L_; ++m)
                for (int ell = m; ell <= L_; ++ell) {
                    double below = 0.0;
                    if (ell > m) {
                        const double c = std::sqrt((2.0 * ell + 1.0) *
                                                   (double(ell) * ell - double(m) * m) /
                                                   (2.0 * ell - 1.0));
                        below = c * P[plm_index(ell - 1, m)];
                    }
                    D[plm_index(ell, m)] = (ell * x * P[plm_index(ell, m)] - below) / s;
                }
        }
    }

    void build_phi_tables() {
        cosmphi_.resize(size_t(L_ + 1) * size_t(np_));
        sinmphi_.resize(size_t(L_ + 1) * size_t(np_));
        for (int m = 0; m <= L_; ++m)
            for (int j = 0; j < np_; ++j) {
                cosmphi_[size_t(m) * size_t(np_) + size_t(j)] = std::cos(m * phi_[size_t(j)]);
                sinmphi_[size_t(m) * size_t(np_) + size_t(j)] = std::sin(m * phi_[size_t(j)]);
            }
    }

    int nt_, np_, L_;
    int ncoef_ = 0, nplm_ = 0;
    std::vector<double> theta_, phi_, wtheta_;
    std::vector<double> plm_, dplm_;
    std::vector<double> cosmphi_, sinmphi_;
    std::vector<int> offsets_;
};

}  // namespace isolab
