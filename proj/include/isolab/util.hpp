// Small shared utilities: fixed-capacity vectors for chart coordinates,
// isoperimetric constants, reproducible RNG helpers, a minimal thread pool.
#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <utility>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace isolab {

inline constexpr double kPi = 3.14159265358979323846;

// |S^{n-1}|: 2*pi for n=2, 4*pi for n=3.
inline double unit_sphere_area(int n) {
    if (n == 2) return 2.0 * kPi;
    if (n == 3) return 4.0 * kPi;
    throw std::invalid_argument("unit_sphere_area: dimension must be 2 or 3");
}

// omega_n = volume of the Euclidean unit n-ball.
inline double unit_ball_volume(int n) {
    if (n == 2) return kPi;
    if (n == 3) return 4.0 * kPi / 3.0;
    throw std::invalid_argument("unit_ball_volume: dimension must be 2 or 3");
}

// c_n = |S^{n-1}| / omega_n^{(n-1)/n}, the sharp Euclidean ratio
// Area(boundary) / Vol^{(n-1)/n} for round balls.
inline double isoperimetric_constant(int n) {
    return unit_sphere_area(n) / std::pow(unit_ball_volume(n), double(n - 1) / n);
}

// Fixed-capacity coordinate vector; dimension is 2 or 3 at runtime.
struct VecN {
    int n = 0;
    std::array<double, 3> a{0.0, 0.0, 0.0};

    VecN() = default;
    explicit VecN(int dim) : n(dim) {}
    VecN(double x, double y) : n(2), a{x, y, 0.0} {}
    VecN(double x, double y, double z) : n(3), a{x, y, z} {}

    double& operator[](int i) { return a[size_t(i)]; }
    double operator[](int i) const { return a[size_t(i)]; }

    VecN& operator+=(const VecN& o) {
        for (int i = 0; i < n; ++i) a[size_t(i)] += o.a[size_t(i)];
        return *this;
    }
    VecN& operator-=(const VecN& o) {
        for (int i = 0; i < n; ++i) a[size_t(i)] -= o.a[size_t(i)];
        return *this;
    }
    VecN& operator*=(double s) {
        for (int i = 0; i < n; ++i) a[size_t(i)] *= s;
        return *this;
    }

    friend VecN operator+(VecN l, const VecN& r) { return l += r; }
    friend VecN operator-(VecN l, const VecN& r) { return l -= r; }
    friend VecN operator*(double s, VecN v) { return v *= s; }
    friend VecN operator*(VecN v, double s) { return v *= s; }

    friend double dot(const VecN& l, const VecN& r) {
        double s = 0.0;
        for (int i = 0; i < l.n; ++i) s += l.a[size_t(i)] * r.a[size_t(i)];
        return s;
    }
    double norm() const { return std::sqrt(dot(*this, *this)); }

    static VecN zero(int dim) { return VecN(dim); }
};

// Solves A y = b for n in {2,3}; A row-major, partial pivoting.
inline VecN solve_small(const double* A, const VecN& b, int n) {
    double m[12];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m[i * (n + 1) + j] = A[i * n + j];
        m[i * (n + 1) + n] = b[i];
    }
    const int w = n + 1;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r * w + c]) > std::abs(m[piv * w + c])) piv = r;
        if (m[piv * w + c] == 0.0) throw std::runtime_error("solve_small: singular matrix");
        if (piv != c)
            for (int j = 0; j < w; ++j) std::swap(m[piv * w + j], m[c * w + j]);
        for (int r = c + 1; r < n; ++r) {
            const double f = m[r * w + c] / m[c * w + c];
            for (int j = c; j < w; ++j) m[r * w + j] -= f * m[c * w + j];
        }
    }
    VecN y(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = m[r * w + n];
        for (int j = r + 1; j < n; ++j) s -= m[r * w + j] * y[j];
        y[r] = s / m[r * w + r];
    }
    return y;
}

// 64-bit mixing (splitmix64); used to derive independent stream seeds.
inline uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0,1) from the top 53 bits; identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
    return double(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Unbiased integer in [0, bound) by rejection.
inline uint64_t uniform_index(std::mt19937_64& rng, uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_index: empty range");
    const uint64_t limit = ~uint64_t(0) - (~uint64_t(0) % bound);
    uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

// Runs fn(i) for i in [0, count). With threads <= 1 this is a plain loop;
// otherwise work is split in contiguous blocks. fn must only write to its
// own slot of any shared output.
inline void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
    if (threads <= 1 || count < 2) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const int k = int(std::min<size_t>(size_t(threads), count));
    std::vector<std::thread> pool;
    pool.reserve(size_t(k));
    std::atomic<size_t> next{0};
    for (int t = 0; t < k; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace isolab
