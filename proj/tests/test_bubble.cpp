#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "isolab/pseudo_bubble.hpp"
#include "oracles.hpp"

using namespace isolab;

namespace {
const double c2 = isoperimetric_constant(2);
const double c3 = isoperimetric_constant(3);
}  // namespace

TEST_CASE("residual vanishes on round graphs of model spaces") {
    const auto euclid = ChartMetric::model_space(2, 0.0);
    const ManifoldPoint p0(euclid.id(), VecN(0.0, 0.0));
    CHECK(l2_norm(residual(p0, SphereFunction::constant(1, 0.2), euclid)) < 1e-10);

    const auto sphere = ChartMetric::model_space(2, 1.0);
    CHECK(l2_norm(residual(ManifoldPoint(sphere.id(), VecN(0.0, 0.0)),
                           SphereFunction::constant(1, 0.2), sphere)) < 1e-9);
}

TEST_CASE("residual detects non-constant curvature") {
    const auto euclid = ChartMetric::model_space(2, 0.0);
    const ManifoldPoint p0(euclid.id(), VecN(0.0, 0.0));
    SphereFunction u = SphereFunction::constant(1, 0.2);
    u.set_a(2, 0.02);  // r (1 + 0.1 cos 2t)
    CHECK(l2_norm(residual(p0, u, euclid)) > 1e-3);
}

TEST_CASE("flat-plane bubbles are round to machine accuracy") {
    const auto m = ChartMetric::model_space(2, 0.0);
    const ManifoldPoint p(m.id(), VecN(0.0, 0.0));
    for (double v : {1e-3, 1e-2}) {
        const PseudoBubble pb = solve_beta(p, v, m);
        CHECK(pb.area == Catch::Approx(c2 * std::sqrt(v)).epsilon(1e-8));
        CHECK(pb.shape_deviation < 1e-10);
        CHECK(pb.volume_error < 1e-10 * v);
        CHECK(pb.residual_norm < 1e-10);
        CHECK(pb.lambda == Catch::Approx(1.0 / std::sqrt(v / kPi)).epsilon(1e-7));
        CHECK(pb.com_offset < 1e-8);
    }
}

TEST_CASE("sphere and hyperbolic bubbles hit the cap laws") {
    SECTION("unit sphere") {
        const auto m = ChartMetric::model_space(2, 1.0);
        const ManifoldPoint p(m.id(), VecN(0.0, 0.0));
        const double v = 0.05;
        const PseudoBubble pb = solve_beta(p, v, m);
        CHECK(pb.area == Catch::Approx(oracles::sphere_profile(v)).epsilon(1e-6));
        CHECK(pb.shape_deviation < 1e-8);
    }
    SECTION("hyperbolic plane") {
        const auto m = ChartMetric::model_space(2, -1.0);
        const ManifoldPoint p(m.id(), VecN(0.0, 0.0));
        const double v = 0.05;
        const PseudoBubble pb = solve_beta(p, v, m);
        CHECK(pb.area == Catch::Approx(oracles::hyper_profile(v)).epsilon(1e-6));
    }
    SECTION("off-center solves agree by homogeneity") {
        const auto m = ChartMetric::model_space(2, 1.0);
        const double v = 0.02;
        const double a0 = f_area(ManifoldPoint(m.id(), VecN(0.0, 0.0)), v, m);
        const double a1 = f_area(ManifoldPoint(m.id(), VecN(0.35, -0.15)), v, m);
        CHECK(a0 == Catch::Approx(oracles::sphere_profile(v)).epsilon(1e-6));
        CHECK(a1 == Catch::Approx(a0).epsilon(1e-7));
    }
}

TEST_CASE("flat three-dimensional bubble") {
    const auto m = ChartMetric::model_space(3, 0.0);
    const ManifoldPoint p(m.id(), VecN::zero(3));
    const double v = 1e-3;
    const PseudoBubble pb = solve_beta(p, v, m);
    CHECK(pb.area == Catch::Approx(c3 * std::pow(v, 2.0 / 3.0)).epsilon(1e-6));
    CHECK(pb.shape_deviation < 1e-8);
    CHECK(pb.volume_error < 1e-10 * v);
}

TEST_CASE("volume cap is enforced") {
    const auto m = ChartMetric::model_space(2, 1.0);
    const ManifoldPoint p(m.id(), VecN(0.0, 0.0));
    CHECK_THROWS_AS(solve_beta(p, 3.0, m), std::domain_error);
    CHECK_THROWS_AS(solve_beta(p, -1.0, m), std::domain_error);
}

TEST_CASE("small-volume shape: u stays within a hair of its mean") {
    const double v = 1e-4;
    for (double K : {0.0, 1.0, -1.0}) {
        const auto m = ChartMetric::model_space(2, K);
        const PseudoBubble pb = solve_beta(ManifoldPoint(m.id(), VecN(0.0, 0.0)), v, m);
        CHECK(pb.shape_deviation < 1e-3);
    }
    const auto bump = ChartMetric::conformal(2, "0.2*exp(-(x^2+y^2))", 4.0);
    const PseudoBubble pb = solve_beta(ManifoldPoint(bump.id(), VecN(0.3, 0.1)), v, bump);
    CHECK(pb.shape_deviation < 1e-2);
}

TEST_CASE("uniqueness under randomized restarts on the flat plane") {
    const auto m = ChartMetric::model_space(2, 0.0);
    const auto rep =
        verify_uniqueness(ManifoldPoint(m.id(), VecN(0.0, 0.0)), 0.01, m, 10, 42);
    CHECK(rep.converged == 10);
    CHECK(rep.max_pairwise_sup < 1e-8);
}

TEST_CASE("symmetry check on radial and non-radial charts") {
    SECTION("flat plane: every mode above the constant is empty") {
        const auto m = ChartMetric::model_space(2, 0.0);
        const PseudoBubble pb = solve_beta(ManifoldPoint(m.id(), VecN(0.0, 0.0)), 0.01, m);
        const auto rep = symmetry_check(pb, m);
        REQUIRE(rep.applicable);
        CHECK(rep.nonconstant_energy < 1e-10);
    }
    SECTION("radial conformal factor about the origin") {
        const auto m = ChartMetric::conformal(2, "0.1*(x^2+y^2)", 4.0);
        const PseudoBubble pb = solve_beta(ManifoldPoint(m.id(), VecN(0.0, 0.0)), 0.01, m);
        const auto rep = symmetry_check(pb, m);
        REQUIRE(rep.applicable);
        CHECK(rep.nonconstant_energy < 1e-8);
    }
    SECTION("non-radial factor is skipped with a note") {
        const auto m = ChartMetric::conformal(2, "0.1*x", 4.0);
        const PseudoBubble pb = solve_beta(ManifoldPoint(m.id(), VecN(0.0, 0.0)), 0.01, m);
        const auto rep = symmetry_check(pb, m);
        CHECK_FALSE(rep.applicable);
        CHECK(rep.note.find("no stabilizer symmetry") != std::string::npos);
    }
}

TEST_CASE("center-of-mass offset is small and shrinks with volume") {
    const auto bump = ChartMetric::conformal(2, "0.2*exp(-(x^2+y^2))", 4.0);
    const ManifoldPoint p(bump.id(), VecN(0.4, 0.2));
    double prev = 1e300;
    SolverConfig cfg;
    for (double v : {8e-3, 2e-3, 5e-4, 1e-4}) {
        const PseudoBubble pb = solve_beta(p, v, bump, cfg);
        CHECK(pb.com_offset < 0.01 * pb.u_mean);
        CHECK(pb.com_offset < prev);
        prev = pb.com_offset;
    }
}

TEST_CASE("re-centering leaves the area unchanged at gauge accuracy") {
    const auto m = ChartMetric::model_space(2, 1.0);
    const PseudoBubble pb = solve_beta(ManifoldPoint(m.id(), VecN(0.2, -0.1)), 0.01, m);
    const PseudoBubble pc = recenter(pb, 0.01, m);
    CHECK(std::abs(pc.area - pb.area) / pb.area < 1e-8);
}
