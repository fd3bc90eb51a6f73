#include "rpr/kinematics.hpp"

#include <algorithm>
#include <cmath>

namespace rpr {

namespace {

// Legs are treated as parallel when |sin| of their angle gap falls below this.
constexpr double kParallelSinTol = 1e-10;
// Relative tolerance (vs. design scale) for the identically-satisfied line
// equation and the degenerate-ellipse determinant test.
constexpr double kFamilyTolRel = 1e-10;
// Relative tolerance (vs. scale^2) deciding when the intersection
// discriminant counts as a double root.
constexpr double kTangentDiscRel = 1e-12;

double clamp_unit(double v) { return std::min(1.0, std::max(-1.0, v)); }

} // namespace

std::optional<LegSolution> leg_ik(const RobotDesign& d, const Pose& pose, int leg,
                                  int branch_sign) {
    const Vec2 A = base_anchors(d)[static_cast<size_t>(leg)];
    const Vec2 C = platform_points(d, pose)[static_cast<size_t>(leg)];
    const double dx = C.x - A.x;
    const double dy = C.y - A.y;
    const double Loff = d.L[static_cast<size_t>(leg)];
    const double dist2 = dx * dx + dy * dy;
    const double disc = dist2 - Loff * Loff;
    if (disc < 0.0) {
        return std::nullopt; // attachment point inside the offset circle
    }
    LegSolution s;
    s.rho = (branch_sign >= 0 ? 1.0 : -1.0) * std::sqrt(disc);
    const double tiny = 1e-14 * d.scale();
    if (Loff == 0.0 && dist2 <= tiny * tiny) {
        // Attachment point on the anchor: every theta closes the loop.
        s.theta = 0.0;
        s.rho = 0.0;
        s.axis_indeterminate = true;
        return s;
    }
    // (dx, dy) = Rot(theta) * (rho, L)  =>  theta = atan2(dy, dx) - atan2(L, rho).
    s.theta = normalize_angle(std::atan2(dy, dx) - std::atan2(Loff, s.rho));
    return s;
}

IkResult inverse_kinematics(const RobotDesign& d, const Pose& pose, const WorkingMode& mode) {
    IkResult out;
    JointState st;
    for (int i = 0; i < 3; ++i) {
        const auto leg = leg_ik(d, pose, i, mode.sign[static_cast<size_t>(i)]);
        if (!leg) {
            out.unreachable_leg = i;
            return out;
        }
        st.theta[static_cast<size_t>(i)] = leg->theta;
        st.rho[static_cast<size_t>(i)] = leg->rho;
        out.axis_indeterminate[static_cast<size_t>(i)] = leg->axis_indeterminate;
    }
    out.state = st;
    return out;
}

std::array<double, 6> closure_residual(const RobotDesign& d, const Pose& pose,
                                       const JointState& state) {
    const auto A = base_anchors(d);
    const auto C = platform_points(d, pose);
    std::array<double, 6> r{};
    for (int i = 0; i < 3; ++i) {
        const auto iu = static_cast<size_t>(i);
        const Vec2 chain = state.rho[iu] * leg_axis(state.theta[iu]) +
                           d.L[iu] * leg_normal(state.theta[iu]);
        const Vec2 res = (C[iu] - A[iu]) - chain;
        r[2 * iu] = res.x;
        r[2 * iu + 1] = res.y;
    }
    return r;
}

double max_closure_residual(const RobotDesign& d, const Pose& pose, const JointState& state) {
    const auto r = closure_residual(d, pose, state);
    double m = 0.0;
    for (double v : r) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

Vec2 ellipse_point(const DkCoefficients& k, double phi) {
    const double c = std::cos(phi), s = std::sin(phi);
    return {k.b[0][0] + k.b[0][1] * c + k.b[0][2] * s,
            k.b[1][0] + k.b[1][1] * c + k.b[1][2] * s};
}

std::optional<DkCoefficients> dk_coefficients(const RobotDesign& d,
                                              const std::array<double, 3>& theta) {
    const double S = std::sin(theta[1] - theta[0]);
    if (std::abs(S) <= kParallelSinTol) {
        return std::nullopt;
    }
    const auto A = base_anchors(d);
    const double c1 = std::cos(theta[0]), s1 = std::sin(theta[0]);
    const double c2 = std::cos(theta[1]), s2 = std::sin(theta[1]);
    const double c3 = std::cos(theta[2]), s3 = std::sin(theta[2]);
    const double dxA = A[1].x - A[0].x;
    const double c21 = std::cos(theta[1] - theta[0]);
    const double ca = std::cos(d.alpha_p);
    const double L1 = d.L[0], L2 = d.L[1], L3 = d.L[2];

    DkCoefficients k;
    k.a[0][0] = (dxA * s2 + L1 * c21 - L2) / S;
    k.a[0][1] = -2.0 * d.Rp * s2 * ca / S;
    k.a[0][2] = 2.0 * d.Rp * c2 * ca / S;
    k.a[1][0] = (dxA * s1 - L2 * c21 + L1) / S;
    k.a[1][1] = -2.0 * d.Rp * s1 * ca / S;
    k.a[1][2] = 2.0 * d.Rp * c1 * ca / S;

    const double K = 2.0 * d.Rp * std::cos(d.alpha_p - d.beta_p / 2.0);
    const double Kc = K * std::cos(d.beta_p / 2.0);
    const double Ks = K * std::sin(d.beta_p / 2.0);
    k.b[0][0] = A[0].x + k.a[0][0] * c1 - L1 * s1;
    k.b[1][0] = A[0].y + k.a[0][0] * s1 + L1 * c1;
    k.b[0][1] = k.a[0][1] * c1 + Kc;
    k.b[1][1] = k.a[0][1] * s1 + Ks;
    k.b[0][2] = k.a[0][2] * c1 - Ks;
    k.b[1][2] = k.a[0][2] * s1 + Kc;

    k.c[0] = (k.b[1][0] - A[2].y) * c3 + (A[2].x - k.b[0][0]) * s3 - L3;
    k.c[1] = k.b[1][1] * c3 - k.b[0][1] * s3;
    k.c[2] = k.b[1][2] * c3 - k.b[0][2] * s3;
    return k;
}

namespace {

// Direct-kinematics reduction with an arbitrary supporting pair (i, j) and
// detached leg k.  Same layout as DkCoefficients, but rows of `a` refer to
// legs i and j.
std::optional<PairCoefficients> build_pair(const RobotDesign& d,
                                           const std::array<double, 3>& theta, int i, int j,
                                           int k) {
    const auto iu = static_cast<size_t>(i), ju = static_cast<size_t>(j),
               ku = static_cast<size_t>(k);
    const double S = std::sin(theta[ju] - theta[iu]);
    if (std::abs(S) <= kParallelSinTol) {
        return std::nullopt;
    }
    const auto A = base_anchors(d);
    const auto P0 = platform_points_local(d);
    const Vec2 ui = leg_axis(theta[iu]), uj = leg_axis(theta[ju]);
    const Vec2 ni = leg_normal(theta[iu]), nj = leg_normal(theta[ju]);

    // Loop closure between anchors i and j:
    //   rho_i * ui - rho_j * uj = rhs0 + rhsc*cos(phi) + rhss*sin(phi).
    const Vec2 zij = P0[ju] - P0[iu];
    const Vec2 rhs0 = (A[ju] - A[iu]) - d.L[iu] * ni + d.L[ju] * nj;
    const Vec2 rhsc{-zij.x, -zij.y};
    const Vec2 rhss{zij.y, -zij.x};
    const double det = -S; // det [ui, -uj]

    PairCoefficients pr;
    pr.i = i;
    pr.j = j;
    pr.k = k;
    const std::array<Vec2, 3> rhs = {rhs0, rhsc, rhss};
    for (int m = 0; m < 3; ++m) {
        const auto mu = static_cast<size_t>(m);
        pr.co.a[0][mu] = uj.cross(rhs[mu]) / det;
        pr.co.a[1][mu] = ui.cross(rhs[mu]) / det;
    }

    // Locus of the detached attachment point C_k(phi).
    const Vec2 zik = P0[ku] - P0[iu];
    pr.co.b[0][0] = A[iu].x + pr.co.a[0][0] * ui.x + d.L[iu] * ni.x;
    pr.co.b[1][0] = A[iu].y + pr.co.a[0][0] * ui.y + d.L[iu] * ni.y;
    pr.co.b[0][1] = pr.co.a[0][1] * ui.x + zik.x;
    pr.co.b[1][1] = pr.co.a[0][1] * ui.y + zik.y;
    pr.co.b[0][2] = pr.co.a[0][2] * ui.x - zik.y;
    pr.co.b[1][2] = pr.co.a[0][2] * ui.y + zik.x;

    // Leg-k line equation coefficients.
    const double ck = std::cos(theta[ku]), sk = std::sin(theta[ku]);
    pr.co.c[0] = (pr.co.b[1][0] - A[ku].y) * ck + (A[ku].x - pr.co.b[0][0]) * sk - d.L[ku];
    pr.co.c[1] = pr.co.b[1][1] * ck - pr.co.b[0][1] * sk;
    pr.co.c[2] = pr.co.b[1][2] * ck - pr.co.b[0][2] * sk;
    return pr;
}

DkPose pose_from_root(const RobotDesign& d, const std::array<double, 3>& theta,
                      const PairCoefficients& pr, double phi) {
    const auto A = base_anchors(d);
    const auto P0 = platform_points_local(d);
    const auto iu = static_cast<size_t>(pr.i), ju = static_cast<size_t>(pr.j),
               ku = static_cast<size_t>(pr.k);
    const double rho_i = pr.co.rho(0, phi);
    const double rho_j = pr.co.rho(1, phi);
    const Vec2 Ci = A[iu] + rho_i * leg_axis(theta[iu]) + d.L[iu] * leg_normal(theta[iu]);
    const Vec2 P = Ci - rotate(P0[iu], phi);
    const Vec2 Ck = ellipse_point(pr.co, phi);
    DkPose dp;
    dp.pose = Pose{P.x, P.y, normalize_angle(phi)};
    dp.rho[iu] = rho_i;
    dp.rho[ju] = rho_j;
    dp.rho[ku] = leg_axis(theta[ku]).dot(Ck - A[ku]);
    return dp;
}

} // namespace

std::optional<PairCoefficients> dk_coefficients_best_pair(const RobotDesign& d,
                                                          const std::array<double, 3>& theta) {
    // Best-conditioned supporting pair; ties resolve in listed order.
    const std::array<std::array<int, 3>, 3> perms = {{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};
    const std::array<double, 3> gaps = {std::abs(std::sin(theta[1] - theta[0])),
                                        std::abs(std::sin(theta[2] - theta[1])),
                                        std::abs(std::sin(theta[0] - theta[2]))};
    size_t best = 0;
    for (size_t p = 1; p < 3; ++p) {
        if (gaps[p] > gaps[best]) {
            best = p;
        }
    }
    if (gaps[best] <= kParallelSinTol) {
        return std::nullopt;
    }
    return build_pair(d, theta, perms[best][0], perms[best][1], perms[best][2]);
}

DkResult direct_kinematics(const RobotDesign& d, const std::array<double, 3>& theta) {
    DkResult out;
    const auto pr = dk_coefficients_best_pair(d, theta);
    if (!pr) {
        // All three prismatic axes parallel: the reduction is singular in
        // every labeling and the platform can only translate along them.
        out.kind = DkResult::Kind::SelfMotionFamily;
        out.family_reason = DkResult::FamilyReason::ParallelLegs;
        return out;
    }

    const double scale = d.scale();
    const double c_tol = kFamilyTolRel * scale;
    const double detb_tol = kFamilyTolRel * scale * scale;
    const auto& c = pr->co.c;
    const double max_c = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
    if (max_c < c_tol && std::abs(pr->co.det_b()) < detb_tol) {
        out.kind = DkResult::Kind::SelfMotionFamily;
        out.family_reason = DkResult::FamilyReason::DegenerateEllipse;
        return out;
    }

    const double amp = std::hypot(c[1], c[2]);
    const double disc = amp * amp - c[0] * c[0];
    const double disc_tol = kTangentDiscRel * scale * scale;
    if (amp <= c_tol || disc < -disc_tol) {
        out.kind = DkResult::Kind::NoAssembly;
        return out;
    }
    const double psi = std::atan2(c[2], c[1]);
    const double gamma = std::acos(clamp_unit(-c[0] / amp));
    std::vector<double> roots;
    if (std::abs(disc) <= disc_tol) {
        out.tangent = true;
        roots.push_back(psi + gamma);
    } else {
        roots.push_back(psi - gamma);
        roots.push_back(psi + gamma);
    }

    out.kind = DkResult::Kind::Poses;
    for (double phi : roots) {
        out.poses.push_back(pose_from_root(d, theta, *pr, phi));
    }
    std::sort(out.poses.begin(), out.poses.end(),
              [](const DkPose& l, const DkPose& r) { return l.pose.phi < r.pose.phi; });
    return out;
}

} // namespace rpr
