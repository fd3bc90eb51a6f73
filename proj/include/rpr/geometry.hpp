#pragma once

#include <array>
#include <cmath>
#include <string>

namespace rpr {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }

/// Counterclockwise rotation of v by angle a.
inline Vec2 rotate(const Vec2& v, double a) {
    const double c = std::cos(a), s = std::sin(a);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Unit vector along the prismatic axis of a leg whose actuated joint sits at angle theta.
inline Vec2 leg_axis(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Unit vector normal to the prismatic axis (direction of the fixed lateral offset).
inline Vec2 leg_normal(double theta) { return {-std::sin(theta), std::cos(theta)}; }

/// Wraps an angle to (-pi, pi].  Throws std::invalid_argument on non-finite input.
double normalize_angle(double a);

/// Signed angular difference a - b wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return normalize_angle(a - b); }

/// Geometric parameters of one 3-RPR manipulator.  Both the fixed base and the
/// moving platform are triangles described by a circumradius R, a shape angle
/// alpha locating the first two vertices and a central angle beta locating the
/// third vertex.  L[i] is the fixed lateral offset between the prismatic axis
/// of leg i and its platform attachment point (may be zero).
struct RobotDesign {
    double Rb = 0.0;      // base circumradius
    double alpha_b = 0.0; // base shape angle, radians, in (-pi/2, pi/2)
    double beta_b = 0.0;  // base apex central angle, radians, in (0, 2*pi)
    double Rp = 0.0;      // platform circumradius
    double alpha_p = 0.0; // platform shape angle, radians, in (-pi/2, pi/2)
    double beta_p = 0.0;  // platform apex central angle, radians, in (0, 2*pi)
    std::array<double, 3> L = {0.0, 0.0, 0.0}; // per-leg lateral offsets, >= 0

    /// Throws std::invalid_argument naming the offending field when any
    /// parameter is out of range or a triangle degenerates.
    void validate() const;

    /// Characteristic length used for relative tolerances.
    double scale() const { return Rb + Rp; }

    /// Characteristic length including offsets (used by singularity thresholds).
    double full_scale() const { return Rb + Rp + std::max({L[0], L[1], L[2]}); }
};

/// Platform pose: position of the platform circumcenter and orientation phi.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0; // radians

    Pose normalized() const { return {x, y, normalize_angle(phi)}; }
};

/// Actuated joint angles theta[i] and signed prismatic extensions rho[i].
struct JointState {
    std::array<double, 3> theta = {0.0, 0.0, 0.0};
    std::array<double, 3> rho = {0.0, 0.0, 0.0};
};

/// One solution-branch selector per leg: +1 selects the branch with
/// non-negative prismatic extension, -1 the reversed one.
struct WorkingMode {
    std::array<int, 3> sign = {+1, +1, +1};

    static WorkingMode all_plus() { return {}; }
    static WorkingMode all_minus() { return {{-1, -1, -1}}; }

    /// Parses a 3-character string of '+'/'-'.  Throws std::invalid_argument.
    static WorkingMode from_string(const std::string& s);
    std::string to_string() const;
};

/// Fixed revolute-joint anchors of the three legs, in the base frame whose
/// origin is the base circumcenter.
std::array<Vec2, 3> base_anchors(const RobotDesign& d);

/// Platform attachment points in the platform frame (circumcenter origin).
std::array<Vec2, 3> platform_points_local(const RobotDesign& d);

/// Platform attachment points in the base frame for a given pose.
std::array<Vec2, 3> platform_points(const RobotDesign& d, const Pose& pose);

} // namespace rpr
