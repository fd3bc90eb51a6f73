#pragma once

#include <optional>
#include <vector>

#include "rpr/geometry.hpp"

namespace rpr {

/// One admissible actuated-joint configuration for a single leg.
struct LegSolution {
    double theta = 0.0;
    double rho = 0.0;
    /// True only in the zero-offset coincidence case (attachment point on the
    /// anchor): rho is exactly 0 and theta is reported as 0 by convention.
    bool axis_indeterminate = false;
};

/// Solves one leg for a given pose.  branch_sign (+1/-1) selects the solution
/// with non-negative / negative prismatic extension.  Returns std::nullopt
/// when the attachment point is closer to the anchor than the lateral offset
/// allows (unreachable).
std::optional<LegSolution> leg_ik(const RobotDesign& d, const Pose& pose, int leg,
                                  int branch_sign);

struct IkResult {
    std::optional<JointState> state;
    int unreachable_leg = -1; // first leg that failed, 0-based; -1 when ok
    std::array<bool, 3> axis_indeterminate = {false, false, false};
};

/// Full inverse kinematics in a working mode.  theta values are wrapped to
/// (-pi, pi]; rho values are signed.
IkResult inverse_kinematics(const RobotDesign& d, const Pose& pose, const WorkingMode& mode);

/// Per-leg 2-vector loop-closure residuals, packed (leg1.x, leg1.y, leg2.x, ...).
/// All six vanish iff (pose, state) is kinematically consistent.
std::array<double, 6> closure_residual(const RobotDesign& d, const Pose& pose,
                                       const JointState& state);

/// Largest absolute entry of closure_residual.
double max_closure_residual(const RobotDesign& d, const Pose& pose, const JointState& state);

/// Coefficients of the one-parameter direct-kinematics reduction obtained by
/// detaching the third leg: for a fixed actuated triple theta,
///   rho_{j}(phi)  = a[j][0] + a[j][1] cos(phi) + a[j][2] sin(phi),   j = 0,1
///   C3(phi)       = (b[0][0], b[1][0]) + b-matrix * (cos(phi), sin(phi))
///   line residual = c[0] + c[1] cos(phi) + c[2] sin(phi)
/// C3(phi) traces an ellipse whose degeneracy is governed by det_b().
struct DkCoefficients {
    std::array<std::array<double, 3>, 2> a = {};
    std::array<std::array<double, 3>, 2> b = {};
    std::array<double, 3> c = {0.0, 0.0, 0.0};

    double det_b() const { return b[0][1] * b[1][2] - b[0][2] * b[1][1]; }
    double rho(int j, double phi) const {
        return a[j][0] + a[j][1] * std::cos(phi) + a[j][2] * std::sin(phi);
    }
    double line_residual(double phi) const {
        return c[0] + c[1] * std::cos(phi) + c[2] * std::sin(phi);
    }
};

/// Point of the detached-joint locus at platform orientation phi.
Vec2 ellipse_point(const DkCoefficients& k, double phi);

/// Builds DkCoefficients for legs (1,2) as the supporting pair and leg 3
/// detached.  Returns std::nullopt when legs 1 and 2 are parallel
/// (|sin(theta2 - theta1)| <= 1e-10), which makes the reduction singular.
std::optional<DkCoefficients> dk_coefficients(const RobotDesign& d,
                                              const std::array<double, 3>& theta);

/// DkCoefficients together with the leg permutation that produced them:
/// legs (i, j) support the reduction, leg k is detached.
struct PairCoefficients {
    int i = 0, j = 1, k = 2;
    DkCoefficients co;
};

/// Builds the reduction with the best-conditioned supporting pair (largest
/// |sin| of the pair's angle gap, ties resolved in the order (1,2), (2,3),
/// (3,1)).  Returns std::nullopt only when all three prismatic axes are
/// mutually parallel.
std::optional<PairCoefficients> dk_coefficients_best_pair(const RobotDesign& d,
                                                          const std::array<double, 3>& theta);

struct DkPose {
    Pose pose;
    std::array<double, 3> rho = {0.0, 0.0, 0.0};
};

struct DkResult {
    enum class Kind { Poses, SelfMotionFamily, NoAssembly };
    enum class FamilyReason { DegenerateEllipse, ParallelLegs };

    Kind kind = Kind::NoAssembly;
    FamilyReason family_reason = FamilyReason::DegenerateEllipse;
    std::vector<DkPose> poses; // sorted by phi ascending; 1 entry when tangent
    bool tangent = false;      // single grazing intersection (double root)
};

/// Direct kinematics for a fixed actuated triple.  At most two assembly
/// modes exist; a vanishing discriminant yields a single tangent root.  When
/// the detached-joint locus degenerates onto the third leg's line, or all
/// three prismatic axes are parallel, the configuration admits a self-motion
/// and a family marker is returned instead of isolated poses.
DkResult direct_kinematics(const RobotDesign& d, const std::array<double, 3>& theta);

} // namespace rpr
