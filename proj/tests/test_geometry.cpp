#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rpr/geometry.hpp"
#include "test_designs.hpp"

using namespace rpr;
using rprtest::kDeg;

TEST_CASE("normalize_angle wraps to (-pi, pi]") {
    CHECK(normalize_angle(0.0) == doctest::Approx(0.0));
    CHECK(normalize_angle(kPi) == doctest::Approx(kPi));
    CHECK(normalize_angle(-kPi) == doctest::Approx(kPi)); // boundary maps to +pi
    CHECK(normalize_angle(3.0 * kPi) == doctest::Approx(kPi));
    CHECK(normalize_angle(-3.5 * kPi) == doctest::Approx(0.5 * kPi));
    CHECK(normalize_angle(123456.789) ==
          doctest::Approx(std::remainder(123456.789, 2.0 * kPi)).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_angle(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(normalize_angle(INFINITY), std::invalid_argument);
}

TEST_CASE("angle_diff is a wrapped difference") {
    CHECK(angle_diff(170.0 * kDeg, -170.0 * kDeg) == doctest::Approx(-20.0 * kDeg));
    CHECK(angle_diff(10.0 * kDeg, 350.0 * kDeg) == doctest::Approx(20.0 * kDeg));
}

TEST_CASE("anchor layout of the zero-offset similar design") {
    const RobotDesign d = rprtest::zero_offset_similar();
    const auto A = base_anchors(d);
    CHECK(A[0].x == doctest::Approx(-0.30310889132455352).epsilon(1e-14));
    CHECK(A[0].y == doctest::Approx(-0.175).epsilon(1e-14));
    CHECK(A[1].x == doctest::Approx(0.30310889132455352).epsilon(1e-14));
    CHECK(A[1].y == doctest::Approx(-0.175).epsilon(1e-14));
    CHECK(A[2].x == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(A[2].y == doctest::Approx(0.35).epsilon(1e-14));

    // First two anchors share the same height by construction.
    CHECK(A[0].y == A[1].y);

    const auto C = platform_points_local(d);
    CHECK(C[0].x == doctest::Approx(-0.08660254037844386).epsilon(1e-14));
    CHECK(C[0].y == doctest::Approx(-0.05).epsilon(1e-14));
    CHECK(C[1].x == doctest::Approx(0.08660254037844386).epsilon(1e-14));
    CHECK(C[1].y == doctest::Approx(-0.05).epsilon(1e-14));
    CHECK(C[2].x == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK(C[2].y == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("triangle chord lengths follow the circumradius parameterization") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 20; ++n) {
        const RobotDesign d = rprtest::random_design(rng);
        const auto A = base_anchors(d);
        // Vertices 1-2 subtend the angle pi - 2*alpha at the circumcenter.
        CHECK((A[0] - A[1]).norm() ==
              doctest::Approx(2.0 * d.Rb * std::cos(d.alpha_b)).epsilon(1e-12));
        for (const auto& v : A)
            CHECK(v.norm() == doctest::Approx(d.Rb).epsilon(1e-12));
    }
}

TEST_CASE("platform points are the rigid transform of the local points") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int n = 0; n < 20; ++n) {
        const RobotDesign d = rprtest::random_design(rng);
        const Pose pose{0.4 * u(rng), 0.4 * u(rng), kPi * u(rng)};
        const auto world = platform_points(d, pose);
        const auto local = platform_points_local(d);
        for (int i = 0; i < 3; ++i) {
            const Vec2 expect = Vec2{pose.x, pose.y} + rotate(local[(size_t)i], pose.phi);
            CHECK(world[(size_t)i].x == doctest::Approx(expect.x).epsilon(1e-14));
            CHECK(world[(size_t)i].y == doctest::Approx(expect.y).epsilon(1e-14));
        }
        // Rigid: pairwise distances never depend on the pose.
        CHECK((world[0] - world[1]).norm() ==
              doctest::Approx((local[0] - local[1]).norm()).epsilon(1e-12));
    }
}

TEST_CASE("design validation rejects out-of-range parameters") {
    RobotDesign d = rprtest::zero_offset_similar();
    CHECK_NOTHROW(d.validate());

    RobotDesign bad = d;
    bad.Rb = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = d;
    bad.alpha_b = 95.0 * kDeg;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = d;
    bad.beta_p = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = d;
    bad.L = {-0.01, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    // Apex angle placing vertex 3 on top of vertex 1 degenerates the triangle.
    bad = d;
    bad.alpha_b = -30.0 * kDeg;
    bad.beta_b = 120.0 * kDeg; // beta/2 - alpha = 90 degrees
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("working mode string round trip") {
    CHECK(WorkingMode::from_string("+-+").to_string() == "+-+");
    CHECK(WorkingMode::all_plus().to_string() == "+++");
    CHECK(WorkingMode::all_minus().to_string() == "---");
    CHECK_THROWS_AS(WorkingMode::from_string("++"), std::invalid_argument);
    CHECK_THROWS_AS(WorkingMode::from_string("+0+"), std::invalid_argument);
}
