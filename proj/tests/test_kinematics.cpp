#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "doctest.h"
#include "rpr/kinematics.hpp"
#include "test_designs.hpp"

using namespace rpr;
using rprtest::kDeg;

namespace {

/// Independent route to the platform position at fixed orientation: solve the
/// two line conditions of legs 1-2 directly (2x2 Cramer), bypassing the
/// closed-form reduction entirely.
std::optional<Vec2> position_from_pair(const RobotDesign& d, const std::array<double, 3>& theta,
                                       double phi) {
    const auto A = base_anchors(d);
    const auto local = platform_points_local(d);
    const Vec2 f1 = leg_normal(theta[0]);
    const Vec2 f2 = leg_normal(theta[1]);
    const double det = f1.cross(f2);
    if (std::abs(det) < 1e-14)
        return std::nullopt;
    const double r1 = d.L[0] + f1.dot(A[0] - rotate(local[0], phi));
    const double r2 = d.L[1] + f2.dot(A[1] - rotate(local[1], phi));
    return Vec2{(r1 * f2.y - r2 * f1.y) / det, (f1.x * r2 - f2.x * r1) / det};
}

double pose_gap(const Pose& a, const Pose& b) {
    return std::max({std::abs(a.x - b.x), std::abs(a.y - b.y),
                     std::abs(angle_diff(a.phi, b.phi))});
}

} // namespace

TEST_CASE("single-leg inverse kinematics, zero offset") {
    const RobotDesign d = rprtest::zero_offset_similar();
    const Pose home{0.0, 0.0, 0.0};

    const auto plus = leg_ik(d, home, 0, +1);
    REQUIRE(plus.has_value());
    CHECK(plus->theta == doctest::Approx(30.0 * kDeg).epsilon(1e-13));
    CHECK(plus->rho == doctest::Approx(0.25).epsilon(1e-13));
    CHECK_FALSE(plus->axis_indeterminate);

    const auto minus = leg_ik(d, home, 0, -1);
    REQUIRE(minus.has_value());
    CHECK(minus->theta == doctest::Approx(-150.0 * kDeg).epsilon(1e-13));
    CHECK(minus->rho == doctest::Approx(-0.25).epsilon(1e-13));
}

TEST_CASE("single-leg inverse kinematics reconstructs the attachment point") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int solved = 0;
    while (solved < 50) {
        const RobotDesign d = rprtest::random_design(rng);
        const Pose pose{0.4 * u(rng), 0.4 * u(rng), kPi * u(rng)};
        const auto C = platform_points(d, pose);
        const auto A = base_anchors(d);
        for (int leg = 0; leg < 3; ++leg) {
            for (int sign : {+1, -1}) {
                const auto sol = leg_ik(d, pose, leg, sign);
                if (!sol)
                    continue;
                ++solved;
                // Anchor + rotated (rho, L) lands exactly on the platform point.
                const Vec2 rebuilt =
                    A[(size_t)leg] + rotate(Vec2{sol->rho, d.L[(size_t)leg]}, sol->theta);
                CHECK((rebuilt - C[(size_t)leg]).norm() < 1e-12);
                if (sign > 0)
                    CHECK(sol->rho >= 0.0);
                else
                    CHECK(sol->rho <= 0.0);
                CHECK(sol->theta <= kPi);
                CHECK(sol->theta > -kPi);
            }
        }
    }
}

TEST_CASE("single-leg unreachable and axis-indeterminate cases") {
    const RobotDesign d = rprtest::offset_family_design();
    // Attachment point closer to the anchor than the lateral offset.
    const auto A = base_anchors(d);
    const auto local = platform_points_local(d);
    const Vec2 target = A[0] + Vec2{0.01, 0.0}; // distance 0.01 < L1 = 0.07
    const Pose pose{target.x - rotate(local[0], 0.2).x, target.y - rotate(local[0], 0.2).y, 0.2};
    CHECK_FALSE(leg_ik(d, pose, 0, +1).has_value());
    CHECK_FALSE(leg_ik(d, pose, 0, -1).has_value());

    // Zero-offset leg with the attachment point exactly on the anchor: the
    // actuated angle is indeterminate and reported as such.
    const RobotDesign z = rprtest::zero_offset_similar();
    const auto zloc = platform_points_local(z);
    const auto zA = base_anchors(z);
    const Pose onto{zA[0].x - rotate(zloc[0], 0.3).x, zA[0].y - rotate(zloc[0], 0.3).y, 0.3};
    const auto sol = leg_ik(z, onto, 0, +1);
    REQUIRE(sol.has_value());
    CHECK(sol->axis_indeterminate);
    CHECK(sol->rho == 0.0);
    CHECK(sol->theta == 0.0);
}

TEST_CASE("full inverse kinematics at the home pose") {
    const RobotDesign d = rprtest::zero_offset_similar();
    const auto ik = inverse_kinematics(d, Pose{0.0, 0.0, 0.0}, WorkingMode::all_plus());
    REQUIRE(ik.state.has_value());
    CHECK(ik.state->theta[0] == doctest::Approx(30.0 * kDeg).epsilon(1e-13));
    CHECK(ik.state->theta[1] == doctest::Approx(150.0 * kDeg).epsilon(1e-13));
    CHECK(ik.state->theta[2] == doctest::Approx(-90.0 * kDeg).epsilon(1e-13));
    for (double rho : ik.state->rho)
        CHECK(rho == doctest::Approx(0.25).epsilon(1e-13));
    CHECK(max_closure_residual(d, Pose{0.0, 0.0, 0.0}, *ik.state) < 1e-14);
}

TEST_CASE("inverse kinematics respects the working mode and closure") {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    int solved = 0;
    while (solved < 100) {
        const RobotDesign d = rprtest::random_design(rng);
        const Pose pose{0.4 * u(rng), 0.4 * u(rng), kPi * u(rng)};
        WorkingMode mode;
        for (auto& s : mode.sign)
            s = coin(rng) ? +1 : -1;
        const auto ik = inverse_kinematics(d, pose, mode);
        if (!ik.state) {
            CHECK(ik.unreachable_leg >= 0);
            CHECK(ik.unreachable_leg <= 2);
            continue;
        }
        ++solved;
        CHECK(max_closure_residual(d, pose, *ik.state) < 1e-12);
        for (int i = 0; i < 3; ++i) {
            if (mode.sign[(size_t)i] > 0)
                CHECK(ik.state->rho[(size_t)i] >= 0.0);
            else
                CHECK(ik.state->rho[(size_t)i] <= 0.0);
        }
    }
}

TEST_CASE("reduction coefficients match an independent two-line solve") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 40) {
        const RobotDesign d = rprtest::random_design(rng);
        const std::array<double, 3> theta{kPi * u(rng), kPi * u(rng), kPi * u(rng)};
        const auto co = dk_coefficients(d, theta);
        if (!co)
            continue;
        ++checked;
        const auto A = base_anchors(d);
        const auto local = platform_points_local(d);
        const double tol = 1e-10 * d.full_scale();
        for (int k = 0; k < 20; ++k) {
            const double phi = kPi * u(rng);
            const auto P = position_from_pair(d, theta, phi);
            REQUIRE(P.has_value());
            // rho rows of the reduction.
            const auto C = [&](int i) { return *P + rotate(local[(size_t)i], phi); };
            const double rho1 = leg_axis(theta[0]).dot(C(0) - A[0]);
            const double rho2 = leg_axis(theta[1]).dot(C(1) - A[1]);
            CHECK(std::abs(co->rho(0, phi) - rho1) < tol);
            CHECK(std::abs(co->rho(1, phi) - rho2) < tol);
            // Detached-joint locus and its line residual.
            const Vec2 C3 = C(2);
            const Vec2 e = ellipse_point(*co, phi);
            CHECK((e - C3).norm() < tol);
            const double res3 = leg_normal(theta[2]).dot(C3 - A[2]) - d.L[2];
            CHECK(std::abs(co->line_residual(phi) - res3) < tol);
        }
    }
}

TEST_CASE("detached-joint locus is a conic (least-squares fit)") {
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 10) {
        const RobotDesign d = rprtest::random_design(rng);
        const std::array<double, 3> theta{kPi * u(rng), kPi * u(rng), kPi * u(rng)};
        const auto co = dk_coefficients(d, theta);
        if (!co)
            continue;
        ++checked;

        // Fit A x^2 + B xy + C y^2 + D x + E y + F = 0 with A + C = 1 to 64
        // samples; an exact conic leaves machine-level residuals.
        double M[5][5] = {};
        double rhs[5] = {};
        std::vector<Vec2> pts;
        Vec2 mean{0.0, 0.0};
        for (int k = 0; k < 64; ++k) {
            const Vec2 p = ellipse_point(*co, -kPi + 2.0 * kPi * k / 64.0);
            pts.push_back(p);
            mean = mean + p * (1.0 / 64.0);
        }
        for (const auto& raw : pts) {
            const Vec2 p = raw - mean; // center for conditioning
            const double row[5] = {p.x * p.x - p.y * p.y, p.x * p.y, p.x, p.y, 1.0};
            const double target = -p.y * p.y;
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j)
                    M[i][j] += row[i] * row[j];
                rhs[i] += row[i] * target;
            }
        }
        // Solve the 5x5 normal equations by Gaussian elimination.
        double a[5][6];
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j)
                a[i][j] = M[i][j];
            a[i][5] = rhs[i];
        }
        for (int col = 0; col < 5; ++col) {
            int piv = col;
            for (int r = col + 1; r < 5; ++r)
                if (std::abs(a[r][col]) > std::abs(a[piv][col]))
                    piv = r;
            REQUIRE(std::abs(a[piv][col]) > 1e-18);
            for (int j = col; j < 6; ++j)
                std::swap(a[piv][j], a[col][j]);
            for (int r = col + 1; r < 5; ++r) {
                const double m = a[r][col] / a[col][col];
                for (int j = col; j < 6; ++j)
                    a[r][j] -= m * a[col][j];
            }
        }
        double sol[5];
        for (int i = 4; i >= 0; --i) {
            double acc = a[i][5];
            for (int j = i + 1; j < 5; ++j)
                acc -= a[i][j] * sol[j];
            sol[i] = acc / a[i][i];
        }
        double worst = 0.0;
        for (const auto& raw : pts) {
            const Vec2 p = raw - mean;
            const double res = sol[0] * (p.x * p.x - p.y * p.y) + sol[1] * p.x * p.y +
                               sol[2] * p.x + sol[3] * p.y + sol[4] + p.y * p.y;
            worst = std::max(worst, std::abs(res));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("direct kinematics round trip from inverse kinematics") {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> coin(0, 1);
    int checked = 0;
    while (checked < 60) {
        const RobotDesign d = rprtest::random_design(rng);
        const Pose pose{0.35 * u(rng), 0.35 * u(rng), kPi * u(rng)};
        WorkingMode mode;
        for (auto& s : mode.sign)
            s = coin(rng) ? +1 : -1;
        const auto ik = inverse_kinematics(d, pose, mode);
        if (!ik.state)
            continue;
        const auto dk = direct_kinematics(d, ik.state->theta);
        if (dk.kind != DkResult::Kind::Poses)
            continue; // families are exercised elsewhere
        ++checked;
        double best = 1e300;
        for (const auto& p : dk.poses)
            best = std::min(best, pose_gap(p.pose, pose));
        CHECK(best < 1e-9);
        // Every root closes the loops and respects phi-sorted order.
        for (size_t i = 0; i < dk.poses.size(); ++i) {
            JointState st;
            st.theta = ik.state->theta;
            st.rho = dk.poses[i].rho;
            CHECK(max_closure_residual(d, dk.poses[i].pose, st) < 1e-10);
            if (i > 0)
                CHECK(dk.poses[i - 1].pose.phi <= dk.poses[i].pose.phi);
        }
    }
}

TEST_CASE("direct kinematics prismatic values agree with per-leg inverse kinematics") {
    std::mt19937_64 rng(26);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 30) {
        const RobotDesign d = rprtest::random_design(rng);
        const Pose seed{0.35 * u(rng), 0.35 * u(rng), kPi * u(rng)};
        const auto ik = inverse_kinematics(d, seed, WorkingMode::all_plus());
        if (!ik.state)
            continue;
        const auto dk = direct_kinematics(d, ik.state->theta);
        if (dk.kind != DkResult::Kind::Poses)
            continue;
        ++checked;
        for (const auto& root : dk.poses) {
            for (int leg = 0; leg < 3; ++leg) {
                const int sign = root.rho[(size_t)leg] >= 0.0 ? +1 : -1;
                const auto sol = leg_ik(d, root.pose, leg, sign);
                REQUIRE(sol.has_value());
                CHECK(std::abs(sol->rho - root.rho[(size_t)leg]) < 1e-9);
            }
        }
    }
}

TEST_CASE("no-assembly joint triples exist and have a rootless line residual") {
    const RobotDesign d = rprtest::finite_roots_design();
    const std::array<double, 3> base{30.0 * kDeg, 150.0 * kDeg, 0.0};
    bool saw_no_assembly = false;
    bool saw_poses = false;
    for (int k = 0; k < 64; ++k) {
        auto theta = base;
        theta[2] = -kPi + 2.0 * kPi * k / 64.0;
        const auto dk = direct_kinematics(d, theta);
        if (dk.kind == DkResult::Kind::NoAssembly) {
            saw_no_assembly = true;
            const auto co = dk_coefficients(d, theta);
            REQUIRE(co.has_value());
            double closest = 1e300;
            for (int s = 0; s < 2000; ++s)
                closest = std::min(closest,
                                   std::abs(co->line_residual(-kPi + 2.0 * kPi * s / 2000.0)));
            CHECK(closest > 1e-6); // the line truly misses the locus
        } else if (dk.kind == DkResult::Kind::Poses) {
            saw_poses = true;
            CHECK(dk.poses.size() <= 2);
        }
    }
    CHECK(saw_no_assembly);
    CHECK(saw_poses);
}

TEST_CASE("tangency: a vanishing discriminant yields one grazing root") {
    const RobotDesign d = rprtest::finite_roots_design();
    const std::array<double, 3> base{30.0 * kDeg, 150.0 * kDeg, 0.0};
    const auto disc = [&](double t3) {
        auto theta = base;
        theta[2] = t3;
        const auto co = dk_coefficients(d, theta);
        REQUIRE(co.has_value());
        return co->c[1] * co->c[1] + co->c[2] * co->c[2] - co->c[0] * co->c[0];
    };
    // Bracket a sign change of the discriminant along theta3, then bisect.
    double lo = 0.0, hi = 0.0;
    bool found = false;
    double prev_t = -kPi, prev_v = disc(-kPi);
    for (int k = 1; k <= 256 && !found; ++k) {
        const double t = -kPi + 2.0 * kPi * k / 256.0;
        const double v = disc(t);
        if ((prev_v < 0.0) != (v < 0.0)) {
            lo = prev_t;
            hi = t;
            found = true;
        }
        prev_t = t;
        prev_v = v;
    }
    REQUIRE(found);
    double flo = disc(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = disc(mid);
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-16)
            break;
    }
    auto theta = base;
    theta[2] = 0.5 * (lo + hi);
    const double scale = d.Rb + d.Rp;
    if (std::abs(disc(theta[2])) <= 1e-12 * scale * scale) {
        const auto dk = direct_kinematics(d, theta);
        REQUIRE(dk.kind == DkResult::Kind::Poses);
        CHECK(dk.tangent);
        CHECK(dk.poses.size() == 1);
        JointState st;
        st.theta = theta;
        st.rho = dk.poses[0].rho;
        CHECK(max_closure_residual(d, dk.poses[0].pose, st) < 1e-6);
    }
}

TEST_CASE("parallel support legs fall back to another pair") {
    const RobotDesign d = rprtest::zero_offset_similar();
    const std::array<double, 3> theta{20.0 * kDeg, 20.0 * kDeg + 1e-12, 140.0 * kDeg};
    CHECK_FALSE(dk_coefficients(d, theta).has_value());
    const auto pair = dk_coefficients_best_pair(d, theta);
    REQUIRE(pair.has_value());
    CHECK_FALSE((pair->i == 0 && pair->j == 1));
    const auto dk = direct_kinematics(d, theta);
    // Whatever the outcome, it must not be misreported as a parallel-leg family.
    if (dk.kind == DkResult::Kind::SelfMotionFamily)
        CHECK(dk.family_reason != DkResult::FamilyReason::ParallelLegs);
    if (dk.kind == DkResult::Kind::Poses) {
        for (const auto& p : dk.poses) {
            JointState st;
            st.theta = theta;
            st.rho = p.rho;
            CHECK(max_closure_residual(d, p.pose, st) < 1e-8);
        }
    }
}

TEST_CASE("all prismatic axes parallel is reported as a translation family") {
    const RobotDesign d = rprtest::zero_offset_similar();
    const std::array<double, 3> theta{10.0 * kDeg, 10.0 * kDeg, 10.0 * kDeg};
    CHECK_FALSE(dk_coefficients_best_pair(d, theta).has_value());
    const auto dk = direct_kinematics(d, theta);
    REQUIRE(dk.kind == DkResult::Kind::SelfMotionFamily);
    CHECK(dk.family_reason == DkResult::FamilyReason::ParallelLegs);
}

TEST_CASE("degenerate-ellipse family at a self-motion joint triple") {
    const RobotDesign d = rprtest::offset_family_design();
    // theta1 - theta2 = -60 deg, theta3 - theta2 = 60 deg collapse the locus.
    const std::array<double, 3> theta{-60.0 * kDeg, 0.0, 60.0 * kDeg};
    const auto dk = direct_kinematics(d, theta);
    REQUIRE(dk.kind == DkResult::Kind::SelfMotionFamily);
    CHECK(dk.family_reason == DkResult::FamilyReason::DegenerateEllipse);
    const auto co = dk_coefficients(d, theta);
    REQUIRE(co.has_value());
    CHECK(std::abs(co->det_b()) < 1e-12);
    for (double c : co->c)
        CHECK(std::abs(c) < 1e-12);
}

TEST_CASE("two-root formula cross-check via the half-angle form") {
    std::mt19937_64 rng(27);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int checked = 0;
    while (checked < 30) {
        const RobotDesign d = rprtest::random_design(rng);
        const std::array<double, 3> theta{kPi * u(rng), kPi * u(rng), kPi * u(rng)};
        const auto co = dk_coefficients(d, theta);
        if (!co)
            continue;
        const double c1 = co->c[0], c2 = co->c[1], c3 = co->c[2];
        const double disc = c2 * c2 + c3 * c3 - c1 * c1;
        if (disc < 1e-8 || std::abs(c1 - c2) < 1e-6)
            continue; // keep clear of the tangent and half-angle degeneracies
        ++checked;
        // Roots from tan(phi/2) substitution: (c1 - c2) t^2 + 2 c3 t + c1 + c2 = 0.
        const double tp = (-c3 + std::sqrt(disc)) / (c1 - c2);
        const double tm = (-c3 - std::sqrt(disc)) / (c1 - c2);
        std::array<double, 2> expect{normalize_angle(2.0 * std::atan(tp)),
                                     normalize_angle(2.0 * std::atan(tm))};
        std::sort(expect.begin(), expect.end());
        const auto dk = direct_kinematics(d, theta);
        REQUIRE(dk.kind == DkResult::Kind::Poses);
        REQUIRE(dk.poses.size() == 2);
        CHECK(std::abs(angle_diff(dk.poses[0].pose.phi, expect[0])) < 1e-9);
        CHECK(std::abs(angle_diff(dk.poses[1].pose.phi, expect[1])) < 1e-9);
    }
}
