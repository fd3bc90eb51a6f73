#include "rpr/geometry.hpp"

#include <stdexcept>

namespace rpr {

double normalize_angle(double a) {
    if (!std::isfinite(a)) {
        throw std::invalid_argument("normalize_angle: non-finite angle");
    }
    double w = std::remainder(a, 2.0 * kPi); // (-pi, pi], with -pi possible
    if (w <= -kPi) {
        w += 2.0 * kPi;
    }
    return w;
}

WorkingMode WorkingMode::from_string(const std::string& s) {
    if (s.size() != 3) {
        throw std::invalid_argument("working mode must be exactly 3 characters of '+'/'-'");
    }
    WorkingMode m;
    for (int i = 0; i < 3; ++i) {
        if (s[i] == '+') {
            m.sign[i] = +1;
        } else if (s[i] == '-') {
            m.sign[i] = -1;
        } else {
            throw std::invalid_argument("working mode characters must be '+' or '-'");
        }
    }
    return m;
}

std::string WorkingMode::to_string() const {
    std::string s(3, '+');
    for (int i = 0; i < 3; ++i) {
        s[i] = sign[i] >= 0 ? '+' : '-';
    }
    return s;
}

namespace {

void require(bool ok, const char* message) {
    if (!ok) {
        throw std::invalid_argument(message);
    }
}

void validate_triangle(double R, double alpha, double beta, const char* who) {
    require(std::isfinite(R) && std::isfinite(alpha) && std::isfinite(beta),
            "design: non-finite triangle parameter");
    if (R <= 0.0) {
        throw std::invalid_argument(std::string("design: ") + who + " circumradius must be > 0");
    }
    if (!(alpha > -kPi / 2.0 && alpha < kPi / 2.0)) {
        throw std::invalid_argument(std::string("design: ") + who +
                                    " alpha must lie in (-pi/2, pi/2)");
    }
    if (!(beta > 0.0 && beta < 2.0 * kPi)) {
        throw std::invalid_argument(std::string("design: ") + who + " beta must lie in (0, 2*pi)");
    }
    // Vertices 1,2 coincide iff cos(alpha)=0 (excluded by the alpha range) and
    // vertices 2,3 iff sin(beta/2)=0 (excluded by the beta range).  Vertex 3
    // meets vertex 1 when beta/2 - alpha is an odd multiple of pi/2.
    if (std::abs(std::cos(beta / 2.0 - alpha)) < 1e-12) {
        throw std::invalid_argument(std::string("design: ") + who +
                                    " triangle degenerates (vertex 3 meets vertex 1)");
    }
}

} // namespace

void RobotDesign::validate() const {
    validate_triangle(Rb, alpha_b, beta_b, "base");
    validate_triangle(Rp, alpha_p, beta_p, "platform");
    for (int i = 0; i < 3; ++i) {
        require(std::isfinite(L[i]), "design: non-finite leg offset");
        if (L[i] < 0.0) {
            throw std::invalid_argument("design: leg offsets must be >= 0");
        }
    }
}

std::array<Vec2, 3> base_anchors(const RobotDesign& d) {
    const double ca = std::cos(d.alpha_b), sa = std::sin(d.alpha_b);
    return {Vec2{-d.Rb * ca, -d.Rb * sa}, Vec2{d.Rb * ca, -d.Rb * sa},
            Vec2{d.Rb * std::cos(d.beta_b - d.alpha_b), d.Rb * std::sin(d.beta_b - d.alpha_b)}};
}

std::array<Vec2, 3> platform_points_local(const RobotDesign& d) {
    const double ca = std::cos(d.alpha_p), sa = std::sin(d.alpha_p);
    return {Vec2{-d.Rp * ca, -d.Rp * sa}, Vec2{d.Rp * ca, -d.Rp * sa},
            Vec2{d.Rp * std::cos(d.beta_p - d.alpha_p), d.Rp * std::sin(d.beta_p - d.alpha_p)}};
}

std::array<Vec2, 3> platform_points(const RobotDesign& d, const Pose& pose) {
    const auto local = platform_points_local(d);
    const Vec2 p{pose.x, pose.y};
    std::array<Vec2, 3> world;
    for (int i = 0; i < 3; ++i) {
        world[i] = p + rotate(local[i], pose.phi);
    }
    return world;
}

} // namespace rpr
