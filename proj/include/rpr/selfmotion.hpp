#pragma once

#include <vector>

#include "rpr/geometry.hpp"
#include "rpr/kinematics.hpp"

namespace rpr {

/// Angle gaps (theta1 - theta2, theta3 - theta2) that collapse the
/// direct-kinematics ellipse onto the third leg's line.  Two candidate values
/// each, giving four branches.
struct BranchAngles {
    std::array<double, 2> epsilon; // alpha_p + pi/2, alpha_p - pi/2 (wrapped)
    std::array<double, 2> delta;   // beta_p/2, beta_p/2 + pi (wrapped)

    struct Branch {
        double epsilon = 0.0;
        double delta = 0.0;
    };
    /// The 4 combinations in the fixed order (e0,d0), (e0,d1), (e1,d0), (e1,d1).
    std::array<Branch, 4> combos() const;
};

BranchAngles branch_angles(const RobotDesign& d);

/// Coefficients of the branch compatibility equation
///   d1*cos(theta2) + d2*sin(theta2) + d3 = 0.
/// Evaluated from the published closed forms, then checked against an exact
/// 3-point trigonometric fit of the reduction's line residual; if the two
/// routes disagree beyond 1e-8 * scale the fitted values win.
struct DCoefficients {
    double d1 = 0.0, d2 = 0.0, d3 = 0.0;
    bool fitted_override = false; // true when the published forms lost
    double printed_deviation = 0.0;
};

/// Throws std::domain_error when |sin(epsilon)| < 1e-10 (degenerate branch).
DCoefficients d_coefficients(const RobotDesign& d, double epsilon, double delta);

/// Max residual |c1(theta2) - (d1 cos + d2 sin + d3)| over >= 64 sampled
/// theta2, where c1 comes from the actual direct-kinematics reduction.
double validate_d(const RobotDesign& d, double epsilon, double delta, int samples = 64);

struct JointSetResult {
    enum class Kind {
        Roots,            // up to two isolated theta2 roots
        NoRealRoots,      // d3^2 > d1^2 + d2^2
        AllConfigurations // identically satisfied: every theta2 works
    };
    Kind kind = Kind::NoRealRoots;
    std::vector<double> theta2;                      // ascending
    std::vector<std::array<double, 3>> joint_sets;   // (theta2+eps, theta2, theta2+delta)
};

/// Actuated triples on which this branch's self-motion condition holds.
JointSetResult cardanic_joint_sets(const RobotDesign& d, double epsilon, double delta);

struct SelfMotionBranchReport {
    double epsilon = 0.0;
    double delta = 0.0;
    DCoefficients d;
    double offset_residual = 0.0; // L1 sin(delta) - L2 sin(delta-eps) - L3 sin(eps)
    bool infinitely_many = false;
    JointSetResult roots;
};

struct SelfMotionReport {
    enum class Classification { None, FiniteSets, InfinitelyMany };
    Classification classification = Classification::None;
    bool similar_triangles = false; // base/platform angles equal to 1e-10
    std::array<SelfMotionBranchReport, 4> branches;
    std::vector<std::array<double, 3>> joint_sets; // deduped union, lexicographic
};

/// Design-level self-motion census over all four branches.
/// Throws std::domain_error when the branches themselves are degenerate
/// (cos(alpha_p) ~ 0, so legs 1 and 2 would be parallel on every branch).
SelfMotionReport classify_self_motions(const RobotDesign& d);

/// One sample of the circular self-motion: platform pose at (theta2, phi),
/// the moving circle centre O', and the diametral point W traced through it.
struct CardanicSample {
    Pose pose;
    Vec2 circle_center; // O'
    Vec2 wheel_point;   // W, with W - O' = 2 (P - O')
};

/// Exact point of the self-motion family for a branch that admits one.
/// Throws std::domain_error when the branch conditions do not hold.
CardanicSample cardanic_path(const RobotDesign& d, double epsilon, double delta, double theta2,
                             double phi);

/// Tracer-point position of the same motion in rolling-circle (radial) form;
/// the branch is identified by its epsilon value.  Requires similar
/// base/platform triangles.  Cross-validates cardanic_path.
Vec2 epicycloid_point(const RobotDesign& d, double epsilon, double theta2, double phi);

struct PaminsaReport {
    bool phi_s_exists = false;        // requires Rp <= Rb
    bool translational_special = false; // Rp == Rb: zero-orientation translation case
    double phi_s = 0.0;               // acos(Rp/Rb) when it exists (take +/-)
    double R1 = 0.0;                  // |Rb - Rp|, circle radius at phi = 0
    double nu = 0.0;                  // R1 / Rb
    double circle_radius = 0.0;       // self-motion circle radius at the pose's phi
    double circle_residual = 0.0;     // x^2 + y^2 - (Rb^2 + Rp^2 - 2 Rb Rp cos phi)
    bool on_self_motion_circle = false;
    double det_formula = 0.0;         // closed-form determinant at (pose, state)
    double det_a = 0.0;               // matrix determinant, for cross-checking
};

/// Closed-form singularity analysis for zero-offset designs with similar
/// base/platform triangles.  Throws std::domain_error when the design does
/// not qualify or (pose, state) is inconsistent.
PaminsaReport paminsa_analysis(const RobotDesign& d, const Pose& pose, const JointState& state);

} // namespace rpr
