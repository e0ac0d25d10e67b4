// Greedy coverings by metric balls: a maximal eps-separated net built by
// farthest-point insertion over a coordinate candidate lattice, reported with
// the 3*eps cover, a probe-sampled Lebesgue-number check and the empirical
// overlap multiplicity.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "isolab/geodesic.hpp"

namespace isolab {

struct CoveringOptions {
    int probes = 10000;
    uint64_t seed = 1;
    double candidate_spacing = 0.0;  // metric; defaults to eps/2
    LogOptions log;
};

struct CoveringReport {
    std::vector<ManifoldPoint> centers;
    double eps = 0.0;
    double cover_radius = 0.0;  // 3 * eps
    bool lebesgue_pass = false;
    double lebesgue_min_margin = 0.0;  // min over probes of (2 eps - d(probe, net))
    int multiplicity = 0;              // max number of cover balls containing a probe ball
    int probes = 0;
    uint64_t seed = 0;
};

namespace detail {

// Conformal factor range over the closed box [-R, R]^n, sampled on a coarse
// lattice. Used to bracket metric distances by coordinate distances.
struct FactorBounds {
    double lo, hi;
};

inline FactorBounds factor_bounds_on_box(const ChartMetric& m, double R) {
    const int n = m.dim();
    const int k = 17;
    FactorBounds b{1e300, 0.0};
    VecN x(n);
    const int total = (n == 2) ? k * k : k * k * k;
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        for (int d = 0; d < n; ++d) {
            x[d] = -R + 2.0 * R * double(rem % k) / (k - 1);
            rem /= k;
        }
        if (!m.contains(x)) continue;
        const double lam = m.conformal_factor(x);
        b.lo = std::min(b.lo, lam);
        b.hi = std::max(b.hi, lam);
    }
    // small safety slack for values between samples
    b.lo *= 0.98;
    b.hi *= 1.02;
    return b;
}

}  // namespace detail

// Builds a maximal eps-separated net on the coordinate box [-R, R]^n and the
// 3*eps ball cover around it. For every probed y the ball B(y, eps) must fit
// inside some cover ball, i.e. d(y, net) <= 2*eps.
inline CoveringReport build_covering(const ChartMetric& m, double R, double eps,
                                     const CoveringOptions& opt = {}) {
    if (R <= 0.0 || eps <= 0.0) throw std::invalid_argument("build_covering: R, eps > 0 required");
    if (R >= m.chart_radius())
        throw std::domain_error("build_covering: region exceeds chart");
    const int n = m.dim();
    const detail::FactorBounds fb = detail::factor_bounds_on_box(m, R);

    // Exact metric distance, used only when coordinate bounds cannot decide.
    auto dist = [&](const VecN& a, const VecN& b) {
        return distance(ManifoldPoint(m.id(), a), ManifoldPoint(m.id(), b), m, opt.log);
    };

    // Candidate lattice, metrically (eps/2)-dense.
    const double want = opt.candidate_spacing > 0.0 ? opt.candidate_spacing : 0.5 * eps;
    const double spacing = want / fb.hi;
    const int k = std::max(2, int(std::ceil(2.0 * R / spacing)) + 1);
    std::vector<VecN> cand;
    const int total = (n == 2) ? k * k : k * k * k;
    cand.reserve(size_t(total));
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        VecN x(n);
        for (int d = 0; d < n; ++d) {
            x[d] = -R + 2.0 * R * double(rem % k) / (k - 1);
            rem /= k;
        }
        cand.push_back(x);
    }

    CoveringReport rep;
    rep.eps = eps;
    rep.cover_radius = 3.0 * eps;
    rep.seed = opt.seed;

    // Farthest-point insertion, seeded at the box center. dmin[i] tracks the
    // distance from candidate i to the current net, bracketed lazily.
    std::vector<VecN> centers{VecN(n)};
    auto lower = [&](const VecN& a, const VecN& b) { return fb.lo * (a - b).norm(); };
    auto upper = [&](const VecN& a, const VecN& b) { return fb.hi * (a - b).norm(); };

    std::vector<double> dmin(cand.size());
    auto update_with = [&](const VecN& c) {
        for (size_t i = 0; i < cand.size(); ++i) {
            if (dmin[i] <= 0.0) continue;
            const double lo = lower(cand[i], c);
            if (lo >= dmin[i]) continue;  // cannot reduce the current minimum
            const double hi = upper(cand[i], c);
            // A candidate certainly within eps never gets inserted; capping by
            // the upper bound keeps it out without an exact distance.
            const double d = (hi <= eps) ? hi : dist(cand[i], c);
            dmin[i] = std::min(dmin[i], d);
        }
    };
    for (size_t i = 0; i < cand.size(); ++i) dmin[i] = 1e300;
    update_with(centers[0]);
    for (;;) {
        size_t best = 0;
        for (size_t i = 1; i < cand.size(); ++i)
            if (dmin[i] > dmin[best]) best = i;
        if (dmin[best] < eps) break;
        centers.push_back(cand[best]);
        dmin[best] = 0.0;
        update_with(centers.back());
    }

    for (const VecN& c : centers) rep.centers.emplace_back(m.id(), c);

    // Probe check: nearest-net distance and 2*eps overlap count per probe.
    std::mt19937_64 rng(opt.seed);
    rep.probes = opt.probes;
    rep.lebesgue_min_margin = 1e300;
    rep.lebesgue_pass = true;
    for (int t = 0; t < opt.probes; ++t) {
        VecN y(n);
        for (int d = 0; d < n; ++d) y[d] = uniform_in(rng, -R, R);
        double dnear = 1e300;
        int overlap = 0;
        for (const VecN& c : centers) {
            const double lo = lower(y, c);
            if (lo > 2.0 * eps && lo > dnear) continue;
            const double hi = upper(y, c);
            double d;
            if (hi <= 2.0 * eps)
                d = hi;
            else if (lo > 2.0 * eps)
                d = lo;
            else
                d = dist(y, c);
            dnear = std::min(dnear, d);
            if (d <= 2.0 * eps) ++overlap;
        }
        rep.lebesgue_min_margin = std::min(rep.lebesgue_min_margin, 2.0 * eps - dnear);
        rep.multiplicity = std::max(rep.multiplicity, overlap);
        if (dnear > 2.0 * eps) rep.lebesgue_pass = false;
    }
    return rep;
}

}  // namespace isolab
