#include "rpr/selfmotion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rpr/singularity.hpp"

namespace rpr {

namespace {

constexpr double kEpsilonSinTol = 1e-10;  // branch unusable below this
constexpr double kPrintedFormTolRel = 1e-8;   // printed-vs-fitted agreement
constexpr double kFamilyResidualRel = 1e-12;  // offset condition for a family
constexpr double kSimilarAngleTol = 1e-10;    // base/platform angle equality
constexpr double kTripleDedupeTol = 1e-9;

double offset_condition_residual(const RobotDesign& d, double epsilon, double delta) {
    return d.L[0] * std::sin(delta) - d.L[1] * std::sin(delta - epsilon) -
           d.L[2] * std::sin(epsilon);
}

bool triangles_similar(const RobotDesign& d) {
    return std::abs(d.alpha_b - d.alpha_p) < kSimilarAngleTol &&
           std::abs(d.beta_b - d.beta_p) < kSimilarAngleTol;
}

/// The compatibility coefficients in their originally published closed form.
/// Kept verbatim (including the long middle expression) so the validated
/// evaluation below can report how far the published form drifts.
void printed_d(const RobotDesign& d, double eps, double del, double out[3]) {
    const double se = std::sin(eps);
    out[0] = d.Rb * (std::sin(del + d.alpha_b - d.beta_b) - std::sin(d.alpha_b - del));
    out[1] = d.Rb *
                 (std::sin(del + eps + d.alpha_b - d.beta_b) -
                  std::sin(del - eps + d.alpha_b - d.beta_b) - std::sin(eps + d.alpha_b - del)) /
                 se -
             d.Rb * (std::sin(-eps + d.alpha_b - del) + 2.0 * std::sin(-eps + d.alpha_b + del)) /
                 se;
    out[2] = (d.L[0] * std::sin(del) - d.L[1] * std::sin(del - eps) - d.L[2] * std::sin(eps)) / se;
}

/// Line residual constant term c1 evaluated through the actual reduction at
/// theta = (theta2 + eps, theta2, theta2 + delta).
double c1_at(const RobotDesign& d, double eps, double del, double theta2) {
    std::array<double, 3> theta{theta2 + eps, theta2, theta2 + del};
    auto co = dk_coefficients(d, theta);
    if (!co)
        throw std::domain_error("selfmotion: leg pair degenerate while sampling c1");
    return co->c[0];
}

/// Exact 3-point trigonometric fit of c1(theta2) = d1 cos + d2 sin + d3.
/// Sample angles 0, 2pi/3, -2pi/3 give a perfectly conditioned system with a
/// closed-form inverse.
void fitted_d(const RobotDesign& d, double eps, double del, double out[3]) {
    const double third = 2.0 * kPi / 3.0;
    const double ca = c1_at(d, eps, del, 0.0);
    const double cb = c1_at(d, eps, del, third);
    const double cc = c1_at(d, eps, del, -third);
    out[0] = (2.0 * ca - cb - cc) / 3.0;
    out[1] = (cb - cc) / std::sqrt(3.0);
    out[2] = (ca + cb + cc) / 3.0;
}

} // namespace

std::array<BranchAngles::Branch, 4> BranchAngles::combos() const {
    return {{{epsilon[0], delta[0]},
             {epsilon[0], delta[1]},
             {epsilon[1], delta[0]},
             {epsilon[1], delta[1]}}};
}

BranchAngles branch_angles(const RobotDesign& d) {
    BranchAngles b;
    b.epsilon[0] = normalize_angle(d.alpha_p + kPi / 2.0);
    b.epsilon[1] = normalize_angle(d.alpha_p - kPi / 2.0);
    b.delta[0] = normalize_angle(d.beta_p / 2.0);
    b.delta[1] = normalize_angle(d.beta_p / 2.0 + kPi);
    return b;
}

DCoefficients d_coefficients(const RobotDesign& d, double epsilon, double delta) {
    if (std::abs(std::sin(epsilon)) < kEpsilonSinTol)
        throw std::domain_error("d_coefficients: sin(epsilon) ~ 0, branch is degenerate");

    double printed[3];
    double fitted[3];
    printed_d(d, epsilon, delta, printed);
    fitted_d(d, epsilon, delta, fitted);

    DCoefficients out;
    out.printed_deviation = std::max({std::abs(printed[0] - fitted[0]),
                                      std::abs(printed[1] - fitted[1]),
                                      std::abs(printed[2] - fitted[2])});
    out.fitted_override = out.printed_deviation > kPrintedFormTolRel * d.full_scale();
    const double* use = out.fitted_override ? fitted : printed;
    out.d1 = use[0];
    out.d2 = use[1];
    out.d3 = use[2];
    return out;
}

double validate_d(const RobotDesign& d, double epsilon, double delta, int samples) {
    if (samples < 3)
        throw std::invalid_argument("validate_d: need at least 3 samples");
    DCoefficients dc = d_coefficients(d, epsilon, delta);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double t = -kPi + (k + 0.5) * 2.0 * kPi / samples;
        const double model = dc.d1 * std::cos(t) + dc.d2 * std::sin(t) + dc.d3;
        worst = std::max(worst, std::abs(c1_at(d, epsilon, delta, t) - model));
    }
    return worst;
}

JointSetResult cardanic_joint_sets(const RobotDesign& d, double epsilon, double delta) {
    DCoefficients dc = d_coefficients(d, epsilon, delta);
    JointSetResult out;

    const double tiny = kFamilyResidualRel * d.full_scale();
    const double amp = std::hypot(dc.d1, dc.d2);
    if (amp < tiny && std::abs(dc.d3) < tiny) {
        out.kind = JointSetResult::Kind::AllConfigurations;
        return out;
    }
    // Non-existence test, kept as the exact published inequality.
    if (dc.d3 * dc.d3 > dc.d2 * dc.d2 + dc.d1 * dc.d1) {
        out.kind = JointSetResult::Kind::NoRealRoots;
        return out;
    }

    out.kind = JointSetResult::Kind::Roots;
    const double psi = std::atan2(dc.d2, dc.d1);
    const double u = std::clamp(-dc.d3 / amp, -1.0, 1.0);
    const double gamma = std::acos(u);
    double r0 = normalize_angle(psi + gamma);
    double r1 = normalize_angle(psi - gamma);
    out.theta2.push_back(r0);
    if (std::abs(angle_diff(r0, r1)) > 1e-12)
        out.theta2.push_back(r1);
    std::sort(out.theta2.begin(), out.theta2.end());
    for (double t : out.theta2)
        out.joint_sets.push_back({normalize_angle(t + epsilon), t, normalize_angle(t + delta)});
    return out;
}

SelfMotionReport classify_self_motions(const RobotDesign& d) {
    SelfMotionReport rep;
    rep.similar_triangles = triangles_similar(d);

    const BranchAngles ba = branch_angles(d);
    const auto combos = ba.combos();
    bool any_infinite = false;
    bool any_roots = false;

    std::vector<std::array<double, 3>> pool;
    for (std::size_t i = 0; i < combos.size(); ++i) {
        SelfMotionBranchReport& br = rep.branches[i];
        br.epsilon = combos[i].epsilon;
        br.delta = combos[i].delta;
        br.offset_residual = offset_condition_residual(d, br.epsilon, br.delta);
        br.d = d_coefficients(d, br.epsilon, br.delta);
        br.roots = cardanic_joint_sets(d, br.epsilon, br.delta);
        br.infinitely_many =
            rep.similar_triangles &&
            std::abs(br.offset_residual) < kFamilyResidualRel * d.full_scale();
        if (br.infinitely_many || br.roots.kind == JointSetResult::Kind::AllConfigurations)
            any_infinite = true;
        if (br.roots.kind == JointSetResult::Kind::Roots && !br.roots.joint_sets.empty()) {
            any_roots = true;
            pool.insert(pool.end(), br.roots.joint_sets.begin(), br.roots.joint_sets.end());
        }
    }

    if (any_infinite)
        rep.classification = SelfMotionReport::Classification::InfinitelyMany;
    else if (any_roots)
        rep.classification = SelfMotionReport::Classification::FiniteSets;
    else
        rep.classification = SelfMotionReport::Classification::None;

    std::sort(pool.begin(), pool.end());
    for (const auto& trip : pool) {
        bool dup = false;
        for (const auto& kept : rep.joint_sets) {
            const double gap = std::max({std::abs(angle_diff(trip[0], kept[0])),
                                         std::abs(angle_diff(trip[1], kept[1])),
                                         std::abs(angle_diff(trip[2], kept[2]))});
            if (gap < kTripleDedupeTol) {
                dup = true;
                break;
            }
        }
        if (!dup)
            rep.joint_sets.push_back(trip);
    }
    return rep;
}

CardanicSample cardanic_path(const RobotDesign& d, double epsilon, double delta, double theta2,
                             double phi) {
    if (std::abs(std::sin(epsilon)) < kEpsilonSinTol)
        throw std::domain_error("cardanic_path: sin(epsilon) ~ 0, branch is degenerate");
    if (!triangles_similar(d))
        throw std::domain_error("cardanic_path: base and platform triangles are not similar");
    if (std::abs(offset_condition_residual(d, epsilon, delta)) > 1e-9 * d.full_scale())
        throw std::domain_error("cardanic_path: offsets violate the self-motion condition");

    std::array<double, 3> theta{theta2 + epsilon, theta2, theta2 + delta};
    auto co = dk_coefficients(d, theta);
    if (!co)
        throw std::domain_error("cardanic_path: leg pair degenerate");

    const auto A = base_anchors(d);
    const auto local = platform_points_local(d);
    const double rho2 = co->rho(1, phi);
    const Vec2 C2 = A[1] + leg_axis(theta[1]) * rho2 + leg_normal(theta[1]) * d.L[1];
    const Vec2 P = C2 - rotate(local[1], phi);

    const double cap = d.alpha_p + 2.0 * theta2; // direction of O' -> P at phi = 0
    const Vec2 r{std::cos(cap - phi), std::sin(cap - phi)};

    CardanicSample s;
    s.pose = Pose{P.x, P.y, normalize_angle(phi)};
    s.circle_center = P - r * d.Rp;
    s.wheel_point = P + r * d.Rp;
    return s;
}

Vec2 epicycloid_point(const RobotDesign& d, double epsilon, double theta2, double phi) {
    if (!triangles_similar(d))
        throw std::domain_error("epicycloid_point: base and platform triangles are not similar");
    const double ca = std::cos(d.alpha_p);
    if (std::abs(ca) < kEpsilonSinTol)
        throw std::domain_error("epicycloid_point: cos(alpha_p) ~ 0, branch is degenerate");

    // Identify which of the two admissible branch angles epsilon denotes.
    double lambda = 0.0;
    if (std::abs(angle_diff(epsilon, d.alpha_p - kPi / 2.0)) < 1e-9)
        lambda = (d.L[0] - d.L[1] * std::sin(d.alpha_p)) / ca;
    else if (std::abs(angle_diff(epsilon, d.alpha_p + kPi / 2.0)) < 1e-9)
        lambda = -(d.L[0] + d.L[1] * std::sin(d.alpha_p)) / ca;
    else
        throw std::domain_error("epicycloid_point: epsilon is not a branch angle of this design");

    const double R =
        std::sqrt(std::max(0.0, d.Rb * d.Rb + d.Rp * d.Rp - 2.0 * d.Rb * d.Rp * std::cos(phi)));
    const double eta = std::atan2(d.Rp * std::sin(d.alpha_p - phi) - d.Rb * std::sin(d.alpha_p),
                                  d.Rp * std::cos(d.alpha_p - phi) - d.Rb * std::cos(d.alpha_p));
    const Vec2 radial{R * std::cos(eta + 2.0 * theta2), R * std::sin(eta + 2.0 * theta2)};
    return radial + rotate(Vec2{lambda, d.L[1]}, theta2);
}

PaminsaReport paminsa_analysis(const RobotDesign& d, const Pose& pose, const JointState& state) {
    const double tol = 1e-12 * d.scale();
    for (double L : d.L)
        if (std::abs(L) > tol)
            throw std::domain_error("paminsa_analysis: design must have zero lateral offsets");
    if (!triangles_similar(d))
        throw std::domain_error(
            "paminsa_analysis: base and platform triangles must be similar");

    const VelocityModel vm = velocity_model(d, pose, state); // validates consistency

    PaminsaReport rep;
    rep.R1 = std::abs(d.Rb - d.Rp);
    rep.nu = rep.R1 / d.Rb;
    if (std::abs(d.Rp - d.Rb) <= tol) {
        rep.translational_special = true;
        rep.phi_s_exists = true;
        rep.phi_s = 0.0;
    } else if (d.Rp < d.Rb) {
        rep.phi_s_exists = true;
        rep.phi_s = std::acos(d.Rp / d.Rb);
    }

    const double cphi = std::cos(pose.phi);
    const double circle_sq = d.Rb * d.Rb + d.Rp * d.Rp - 2.0 * d.Rb * d.Rp * cphi;
    rep.circle_radius = std::sqrt(std::max(0.0, circle_sq));
    rep.circle_residual = pose.x * pose.x + pose.y * pose.y - circle_sq;
    rep.on_self_motion_circle = std::abs(rep.circle_residual) < 1e-9 * d.scale() * d.scale();

    rep.det_a = vm.det_a;
    // Sign matches velocity_model's convention for the phi column (the
    // quarter-turn derivative), hence the leading minus.
    rep.det_formula = -2.0 * d.Rp * std::cos(d.alpha_p) *
                      (std::sin(d.alpha_p - d.beta_p) - std::sin(d.alpha_p)) *
                      (d.Rb * cphi - d.Rp) * rep.circle_residual /
                      (state.rho[0] * state.rho[1] * state.rho[2]);
    return rep;
}

} // namespace rpr
