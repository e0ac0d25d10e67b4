// Riemannian center of mass of a weighted point cloud: intrinsic gradient
// descent x <- exp_x( tau * sum_i w_i log_x s_i ), with step halving whenever
// the energy 1/2 sum w_i d(x, s_i)^2 fails to decrease.
#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "isolab/geodesic.hpp"

namespace isolab {

struct KarcherOptions {
    double grad_tol = 1e-10;  // stop when the update has metric norm below this
    int max_iter = 100;
    LogOptions log;
};

struct KarcherResult {
    ManifoldPoint mean;
    double grad_norm = 0.0;  // |sum w_i log_x s_i|_g at the returned point
    int iterations = 0;
};

inline KarcherResult karcher_mean_full(const std::vector<ManifoldPoint>& samples,
                                       const std::vector<double>& weights, const ChartMetric& m,
                                       const KarcherOptions& opt = {}) {
    if (samples.empty()) throw std::invalid_argument("karcher_mean: empty sample set");
    if (samples.size() != weights.size())
        throw std::invalid_argument("karcher_mean: weight count mismatch");
    double wsum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("karcher_mean: negative weight");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-8)
        throw std::invalid_argument("karcher_mean: weights must sum to 1");

    const int n = m.dim();
    // Coordinate average is an excellent start for small clouds.
    VecN x0(n);
    for (size_t i = 0; i < samples.size(); ++i) x0 += weights[i] * samples[i].x;
    ManifoldPoint x(samples[0].chart_id, x0);

    auto grad_and_energy = [&](const ManifoldPoint& at, VecN& grad) -> double {
        grad = VecN(n);
        double energy = 0.0;
        for (size_t i = 0; i < samples.size(); ++i) {
            if (weights[i] == 0.0) continue;
            const TangentVec l = log_map(at, samples[i], m, opt.log);
            grad += weights[i] * l.v;
            const double d = m.metric_norm(at.x, l.v);
            energy += 0.5 * weights[i] * d * d;
        }
        return energy;
    };

    VecN grad(n);
    double energy = grad_and_energy(x, grad);
    KarcherResult res;
    for (int iter = 0; iter < opt.max_iter; ++iter) {
        res.iterations = iter;
        res.grad_norm = m.metric_norm(x.x, grad);
        if (res.grad_norm < opt.grad_tol) {
            res.mean = x;
            return res;
        }
        double tau = 1.0;
        bool moved = false;
        for (int back = 0; back < 20; ++back) {
            const ManifoldPoint trial = exp_map(x, tau * grad, m, opt.log.geo);
            VecN gtrial(n);
            const double etrial = grad_and_energy(trial, gtrial);
            if (etrial <= energy) {
                x = trial;
                grad = gtrial;
                energy = etrial;
                moved = true;
                break;
            }
            tau *= 0.5;
        }
        if (!moved) break;
    }
    res.grad_norm = m.metric_norm(x.x, grad);
    if (res.grad_norm >= opt.grad_tol)
        throw ConvergenceError("karcher_mean: descent stalled", res.grad_norm);
    res.mean = x;
    return res;
}

inline ManifoldPoint karcher_mean(const std::vector<ManifoldPoint>& samples,
                                  const std::vector<double>& weights, const ChartMetric& m,
                                  const KarcherOptions& opt = {}) {
    return karcher_mean_full(samples, weights, m, opt).mean;
}

}  // namespace isolab
