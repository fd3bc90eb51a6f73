#pragma once

#include <optional>
#include <vector>

#include "rpr/geometry.hpp"
#include "rpr/kinematics.hpp"

namespace rpr {

struct Mat3 {
    std::array<std::array<double, 3>, 3> m = {};

    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

/// A non-trivial kernel direction of a (numerically singular) 3x3 matrix:
/// the largest cross product of two rows.  Zero vector if the matrix is ~0.
std::array<double, 3> null_vector(const Mat3& a);

/// First-order input-output model  A * (phi_dot, x_dot, y_dot) = B * theta_dot
/// with B diagonal in the prismatic extensions.
struct VelocityModel {
    Mat3 A;
    std::array<double, 3> rho = {0.0, 0.0, 0.0}; // diagonal of B
    double det_a = 0.0;
    double det_b = 0.0;
};

/// Builds the velocity model.  Throws std::invalid_argument when (pose, state)
/// is kinematically inconsistent (max closure residual >= 1e-8).
VelocityModel velocity_model(const RobotDesign& d, const Pose& pose, const JointState& state);

/// Line along which leg i can transmit force onto the platform: through the
/// attachment point, normal to the prismatic axis.
struct ForceLine {
    Vec2 point;
    Vec2 dir; // unit
};

std::array<ForceLine, 3> force_lines(const RobotDesign& d, const Pose& pose,
                                     const JointState& state);

/// Intersection of two lines; std::nullopt when they are parallel
/// (|cross of directions| <= 1e-12).
std::optional<Vec2> line_intersection(const ForceLine& a, const ForceLine& b);

struct SingularityVerdict {
    enum class Kind { Regular, Type1, Type2 };
    enum class Type2Kind { ConcurrentRotation, ParallelTranslation, CardanicSelfMotion };

    Kind kind = Kind::Regular;
    std::array<bool, 3> type1_legs = {false, false, false}; // legs with vanishing rho
    std::array<bool, 3> type1_ri = {false, false, false};   // vanished with zero offset
    Type2Kind type2 = Type2Kind::ConcurrentRotation;
    std::optional<Vec2> instant_center; // common point of the force lines
};

/// Classifies the configuration.  Type 1: some prismatic extension vanishes.
/// Type 2: the velocity matrix A is singular; the sub-kind tells whether the
/// force lines meet in a finite point, are parallel, or the configuration
/// lies on a full self-motion family.  Throws std::invalid_argument on an
/// inconsistent (pose, state).
SingularityVerdict classify(const RobotDesign& d, const Pose& pose, const JointState& state,
                            double tol = 1e-8);

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
};

struct LocusScan {
    int nx = 0, ny = 0;
    double phi = 0.0;
    std::vector<double> xs, ys;               // node coordinates
    std::vector<std::optional<double>> det_a; // row-major [iy*nx + ix]; nullopt unreachable
    std::vector<std::vector<Vec2>> contours;  // det A = 0 polylines (closed loops repeat
                                              // their first point)
};

/// Samples det A for a fixed orientation over a rectangular grid and extracts
/// its zero contours by linear interpolation; cells touching unreachable
/// nodes never produce contour segments.  Throws std::invalid_argument on a
/// malformed grid and std::domain_error when no node is reachable.
LocusScan locus_scan(const RobotDesign& d, double phi, const Rect& region, int nx, int ny,
                     const WorkingMode& mode);

} // namespace rpr
