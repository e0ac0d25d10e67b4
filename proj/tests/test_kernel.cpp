#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "isolab/chart_metric.hpp"
#include "isolab/covering.hpp"
#include "isolab/expression.hpp"
#include "isolab/geodesic.hpp"
#include "isolab/karcher.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {

ManifoldPoint pt(const ChartMetric& m, double x, double y) {
    return ManifoldPoint(m.id(), VecN(x, y));
}

}  // namespace

TEST_CASE("expression parser evaluates with standard precedence") {
    const auto p = expr::Program::parse("1 + 2*3 - 4/2", 2);
    CHECK(p.eval2(0, 0) == Catch::Approx(5.0));

    const auto q = expr::Program::parse("2^3^2", 2);  // right associative
    CHECK(q.eval2(0, 0) == Catch::Approx(512.0));

    const auto r = expr::Program::parse("-x^2 + sin(y)*cos(y)", 2);
    CHECK(r.eval2(3, 0.7) == Catch::Approx(-9.0 + std::sin(0.7) * std::cos(0.7)).epsilon(1e-14));

    const auto s = expr::Program::parse("sqrt(exp(log(x)))", 2);
    CHECK(s.eval2(4.0, 0) == Catch::Approx(2.0).epsilon(1e-14));

    const auto t = expr::Program::parse("0.1*(x^2+y^2)", 2);
    CHECK(t.eval2(1, 2) == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("expression parser reports position and expectation on failure") {
    try {
        expr::Program::parse("sin(x", 2);
        FAIL("expected a parse error");
    } catch (const expr::ParseError& e) {
        CHECK(e.offset() == 5);
        CHECK(e.expected() == "')'");
    }

    try {
        expr::Program::parse("1+*2", 2);
        FAIL("expected a parse error");
    } catch (const expr::ParseError& e) {
        CHECK(e.offset() == 2);
    }

    CHECK_THROWS_AS(expr::Program::parse("foo(2)", 2), expr::ParseError);
    CHECK_THROWS_AS(expr::Program::parse("x+z", 2), expr::ParseError);   // z invalid for n=2
    CHECK_THROWS_AS(expr::Program::parse("x+1 2", 2), expr::ParseError); // trailing junk
    CHECK_NOTHROW(expr::Program::parse("x*y*z", 3));
}

TEST_CASE("model space scalar curvature matches n(n-1)K") {
    for (double K : {1.0, 0.0, -1.0, 2.5}) {
        const auto m = ChartMetric::model_space(2, K);
        for (auto xy : {std::pair{0.0, 0.0}, {0.3, -0.2}, {0.05, 0.4}}) {
            const double sc = scalar_curvature(m, pt(m, xy.first, xy.second));
            CHECK(sc == Catch::Approx(2.0 * K).margin(1e-8));
        }
    }
    const auto m3 = ChartMetric::model_space(3, 1.0);
    ManifoldPoint p(m3.id(), VecN(0.1, -0.2, 0.15));
    CHECK(scalar_curvature(m3, p) == Catch::Approx(6.0).margin(1e-8));
}

TEST_CASE("metric is symmetric positive definite at sample points") {
    const auto conf = ChartMetric::conformal(2, "0.2*exp(-(x^2+y^2))", 4.0);
    double g[9];
    for (auto xy : {std::pair{0.0, 0.0}, {1.0, -0.5}, {-2.0, 1.5}}) {
        conf.metric_matrix(VecN(xy.first, xy.second), g);
        CHECK(g[0] > 0.0);
        CHECK(g[1] == g[2]);
        CHECK(g[0] * g[3] - g[1] * g[2] > 0.0);  // eigenvalues > 0
    }
}

TEST_CASE("stereographic conformal chart reproduces the sphere curvature") {
    const auto m = ChartMetric::conformal(2, "-log(1+(x^2+y^2)/4)", 4.0);
    const double sc = scalar_curvature(m, pt(m, 0.1, 0.2));
    CHECK(sc == Catch::Approx(2.0).margin(1e-5));

    CHECK_THROWS_AS(scalar_curvature(m, pt(m, 5.0, 0.0)), std::domain_error);
}

TEST_CASE("conformal curvature converges at second order in the step") {
    // Halving the finite-difference step should cut the error by about 4.
    const std::string phi = "-log(1+(x^2+y^2)/4)";
    const VecN x(0.1, 0.2);
    auto err = [&](double h) {
        const auto m = ChartMetric::conformal(2, phi, 4.0, h);
        return std::abs(m.scalar_curvature(x) - 2.0);
    };
    const double e1 = err(2e-3);
    const double e2 = err(1e-3);
    const double e4 = err(5e-4);
    const double rate1 = std::log2(e1 / e2);
    const double rate2 = std::log2(e2 / e4);
    CHECK(rate1 > 1.8);
    CHECK(rate1 < 2.2);
    CHECK(rate2 > 1.8);
    CHECK(rate2 < 2.2);
}

TEST_CASE("exp_map is exact on Euclidean space") {
    const auto m = ChartMetric::model_space(2, 0.0);
    const auto q = exp_map(pt(m, 0.0, 0.0), VecN(0.3, 0.4), m);
    CHECK(q.x[0] == Catch::Approx(0.3).margin(1e-14));
    CHECK(q.x[1] == Catch::Approx(0.4).margin(1e-14));
}

TEST_CASE("exp_map hits closed-form space-form geodesics") {
    SECTION("unit sphere, quarter turn from the chart center") {
        const auto m = ChartMetric::model_space(2, 1.0);
        const double d = kPi / 2.0;
        const auto q = exp_map(pt(m, 0.0, 0.0), VecN(d, 0.0), m);
        const double reached = oracles::model_dist_from_origin(1.0, q.x.norm());
        CHECK(reached == Catch::Approx(d).margin(1e-9));
        CHECK(q.x[1] == Catch::Approx(0.0).margin(1e-12));
    }
    SECTION("hyperbolic plane") {
        const auto m = ChartMetric::model_space(2, -1.0);
        const double d = 0.7;
        const auto q = exp_map(pt(m, 0.0, 0.0), VecN(0.0, d), m);
        const double reached = oracles::model_dist_from_origin(-1.0, q.x.norm());
        CHECK(reached == Catch::Approx(d).margin(1e-9));
    }
    SECTION("unit 3-sphere") {
        const auto m = ChartMetric::model_space(3, 1.0);
        const double d = 0.8;
        VecN w(0.0, d / std::sqrt(2.0), d / std::sqrt(2.0));
        const auto q = exp_map(ManifoldPoint(m.id(), VecN::zero(3)), w, m);
        CHECK(oracles::model_dist_from_origin(1.0, q.x.norm()) == Catch::Approx(d).margin(1e-9));
    }
}

TEST_CASE("exp_map preserves the metric speed along the flight") {
    const auto m = ChartMetric::model_space(2, 1.0);
    const ManifoldPoint p = pt(m, 0.2, -0.1);
    const VecN w(0.4, 0.25);
    const double speed0 = m.metric_norm(p.x, w);
    const auto states = geodesic_states(p, w, m, {0.25, 0.5, 0.75, 1.0});
    for (const auto& s : states) {
        CHECK(m.metric_norm(s.x, s.xd) == Catch::Approx(speed0).margin(1e-9));
    }
}

TEST_CASE("exp_map reports the exit time when the geodesic leaves the chart") {
    const auto m = ChartMetric::model_space(2, 0.0, 1.0);  // coordinate radius 1
    try {
        exp_map(pt(m, 0.0, 0.0), VecN(4.0, 0.0), m);
        FAIL("expected ChartExitError");
    } catch (const ChartExitError& e) {
        CHECK(e.exit_time() == Catch::Approx(0.25).margin(0.05));
    }
}

TEST_CASE("log_map inverts exp_map") {
    SECTION("identity case") {
        const auto m = ChartMetric::model_space(2, 1.0);
        const auto p = pt(m, 0.3, 0.2);
        const auto w = log_map(p, p, m);
        CHECK(w.v.norm() == Catch::Approx(0.0).margin(1e-13));
    }
    SECTION("Euclidean chord") {
        const auto m = ChartMetric::model_space(2, 0.0);
        const auto w = log_map(pt(m, 0.1, 0.2), pt(m, -0.4, 0.5), m);
        CHECK(w.v[0] == Catch::Approx(-0.5).margin(1e-12));
        CHECK(w.v[1] == Catch::Approx(0.3).margin(1e-12));
    }
    SECTION("round trip at distance 0.5 on the sphere chart") {
        const auto m = ChartMetric::model_space(2, 1.0);
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 5; ++trial) {
            const double ang = uniform_in(rng, 0.0, 2.0 * kPi);
            const auto p = pt(m, uniform_in(rng, -0.3, 0.3), uniform_in(rng, -0.3, 0.3));
            const double lam = m.conformal_factor(p.x);
            const VecN dir(std::cos(ang) / lam, std::sin(ang) / lam);
            const auto q = exp_map(p, 0.5 * dir, m);
            const auto w = log_map(p, q, m);
            const auto back = exp_map(p, w.v, m);
            CHECK((back.x - q.x).norm() < 1e-9);
            CHECK(m.metric_norm(p.x, w.v) == Catch::Approx(0.5).margin(1e-9));
        }
    }
}

TEST_CASE("exp/log round trip across chart families") {
    std::mt19937_64 rng(11);
    const auto charts = {ChartMetric::model_space(2, 1.0), ChartMetric::model_space(2, -1.0),
                         ChartMetric::conformal(2, "0.2*exp(-(x^2+y^2))", 4.0)};
    for (const auto& m : charts) {
        for (int trial = 0; trial < 4; ++trial) {
            const auto p = pt(m, uniform_in(rng, -0.2, 0.2), uniform_in(rng, -0.2, 0.2));
            const auto q = pt(m, uniform_in(rng, -0.2, 0.2), uniform_in(rng, -0.2, 0.2));
            const auto w = log_map(p, q, m);
            const auto back = exp_map(p, w.v, m);
            CHECK(m.metric_norm(q.x, back.x - q.x) < 1e-8);
        }
    }
}

TEST_CASE("numeric distance agrees with the space-form formulas") {
    for (double K : {1.0, -1.0}) {
        const auto m = ChartMetric::model_space(2, K);
        const auto p = pt(m, 0.15, -0.1);
        const auto q = pt(m, -0.2, 0.3);
        const double want = oracles::model_distance(K, p.x, q.x);
        CHECK(distance(p, q, m) == Catch::Approx(want).margin(1e-9));
    }
}

TEST_CASE("karcher mean of two equal weights is the midpoint in flat space") {
    const auto m = ChartMetric::model_space(2, 0.0);
    const auto mean = karcher_mean({pt(m, 0.0, 0.0), pt(m, 1.0, 0.4)}, {0.5, 0.5}, m);
    CHECK(mean.x[0] == Catch::Approx(0.5).margin(1e-10));
    CHECK(mean.x[1] == Catch::Approx(0.2).margin(1e-10));
}

TEST_CASE("karcher mean reproduces the weighted Euclidean average") {
    const auto m = ChartMetric::model_space(2, 0.0);
    const std::vector<ManifoldPoint> pts{pt(m, 0.0, 0.0), pt(m, 0.8, 0.0), pt(m, 0.0, 0.4)};
    const auto mean = karcher_mean(pts, {0.5, 0.25, 0.25}, m);
    CHECK(mean.x[0] == Catch::Approx(0.2).margin(1e-10));
    CHECK(mean.x[1] == Catch::Approx(0.1).margin(1e-10));
}

TEST_CASE("karcher mean of a geodesic circle recovers its center") {
    const auto m = ChartMetric::model_space(2, 1.0);
    const auto p = pt(m, 0.1, 0.05);
    const double lam = m.conformal_factor(p.x);
    std::vector<ManifoldPoint> samples;
    std::vector<double> weights;
    const int N = 24;
    for (int i = 0; i < N; ++i) {
        const double ang = 2.0 * kPi * i / N;
        const VecN dir(std::cos(ang) / lam, std::sin(ang) / lam);
        samples.push_back(exp_map(p, 0.2 * dir, m));
        weights.push_back(1.0 / N);
    }
    const auto res = karcher_mean_full(samples, weights, m);
    CHECK((res.mean.x - p.x).norm() < 1e-8);
    CHECK(res.grad_norm < 1e-8);  // first-order condition
}

TEST_CASE("covering of the flat square has the Lebesgue property") {
    const auto m = ChartMetric::model_space(2, 0.0);
    CoveringOptions opt;
    opt.probes = 2000;
    opt.seed = 5;
    const auto rep = build_covering(m, 1.0, 0.25, opt);  // square of side 2
    CHECK(rep.lebesgue_pass);
    CHECK(rep.lebesgue_min_margin >= 0.0);
    // Packing count: centers are eps-separated, so eps/2-balls around them are
    // disjoint inside a (2 eps + eps/2)-ball around any probe.
    const int packing_bound = int(std::floor(std::pow(2.5 / 0.5, 2)));
    CHECK(rep.multiplicity <= packing_bound);
    CHECK(rep.multiplicity >= 1);
}

TEST_CASE("covering of a sphere-chart region passes probe checks") {
    const auto m = ChartMetric::model_space(2, 1.0);
    CoveringOptions opt;
    opt.probes = 10000;
    opt.seed = 9;
    const auto rep = build_covering(m, 0.5, 0.1, opt);
    CHECK(rep.lebesgue_pass);
    CHECK(rep.centers.size() > 10);
}
