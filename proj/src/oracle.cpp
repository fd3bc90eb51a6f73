#include "rpr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <tuple>

#include "rpr/kinematics.hpp"
#include "rpr/singularity.hpp"

namespace rpr {

namespace {

constexpr double kDedupeTol = 1e-6;
constexpr double kNearSingularDet = 1e-6;  // times scale^3
constexpr double kNearSingularRho = 1e-6;  // times scale

struct Residuals {
    std::array<double, 3> f;
    double max_abs;
    double sq;
};

Residuals line_residuals(const RobotDesign& d, const std::array<Vec2, 3>& A,
                         const std::array<Vec2, 3>& local, const std::array<double, 3>& theta,
                         double x, double y, double phi) {
    Residuals r{};
    r.max_abs = 0.0;
    r.sq = 0.0;
    for (int i = 0; i < 3; ++i) {
        const auto iu = static_cast<size_t>(i);
        const Vec2 C = Vec2{x, y} + rotate(local[iu], phi);
        const double fi = leg_normal(theta[iu]).dot(C - A[iu]) - d.L[iu];
        r.f[iu] = fi;
        r.max_abs = std::max(r.max_abs, std::abs(fi));
        r.sq += fi * fi;
    }
    return r;
}

/// Solves the symmetric 3x3 system M s = rhs by Gaussian elimination with
/// partial pivoting.  Returns false when a pivot collapses.
bool solve3(double M[3][3], const double rhs[3], double s[3]) {
    double a[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j)
            a[i][j] = M[i][j];
        a[i][3] = rhs[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int rrow = col + 1; rrow < 3; ++rrow)
            if (std::abs(a[rrow][col]) > std::abs(a[piv][col]))
                piv = rrow;
        if (std::abs(a[piv][col]) < 1e-300)
            return false;
        if (piv != col)
            for (int j = col; j < 4; ++j)
                std::swap(a[piv][j], a[col][j]);
        for (int rrow = col + 1; rrow < 3; ++rrow) {
            const double m = a[rrow][col] / a[col][col];
            for (int j = col; j < 4; ++j)
                a[rrow][j] -= m * a[col][j];
        }
    }
    for (int i = 2; i >= 0; --i) {
        double acc = a[i][3];
        for (int j = i + 1; j < 3; ++j)
            acc -= a[i][j] * s[j];
        s[i] = acc / a[i][i];
    }
    return true;
}

bool pose_close(const Pose& a, const Pose& b) {
    return std::abs(a.x - b.x) < kDedupeTol && std::abs(a.y - b.y) < kDedupeTol &&
           std::abs(angle_diff(a.phi, b.phi)) < kDedupeTol;
}

} // namespace

void SolverConfig::validate() const {
    const double eps100 = 100.0 * std::numeric_limits<double>::epsilon();
    if (max_iterations <= 0 || seed_count <= 0)
        throw std::invalid_argument("SolverConfig: iteration and seed counts must be positive");
    if (!(step_tolerance > 0.0) || !(residual_tolerance > 0.0) || !(damping > 0.0))
        throw std::invalid_argument("SolverConfig: tolerances and damping must be positive");
    if (residual_tolerance < eps100)
        throw std::invalid_argument("SolverConfig: residual_tolerance below 100x machine epsilon");
}

std::vector<Pose> numeric_dk(const RobotDesign& d, const std::array<double, 3>& theta,
                             const SolverConfig& config) {
    config.validate();
    d.validate();

    const auto A = base_anchors(d);
    const auto local = platform_points_local(d);

    // Deterministic seed stream: failures must reproduce exactly.
    std::mt19937_64 rng(0x3d9f5ULL);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double radius = d.Rb + d.Rp;

    std::vector<Pose> found;
    for (int s = 0; s < config.seed_count; ++s) {
        const double r = radius * std::sqrt(u01(rng));
        const double ang = 2.0 * kPi * u01(rng) - kPi;
        double q[3] = {r * std::cos(ang), r * std::sin(ang), 2.0 * kPi * u01(rng) - kPi};

        double lambda = config.damping;
        bool converged = false;
        Residuals res = line_residuals(d, A, local, theta, q[0], q[1], q[2]);
        for (int it = 0; it < config.max_iterations; ++it) {
            if (res.max_abs < config.residual_tolerance) {
                converged = true;
                break;
            }
            // Jacobian of the residuals in (x, y, phi).
            double J[3][3];
            for (int i = 0; i < 3; ++i) {
                const auto iu = static_cast<size_t>(i);
                const Vec2 f = leg_normal(theta[iu]);
                const Vec2 dC = rotate(local[iu], q[2] + kPi / 2.0); // d/dphi of rotate
                J[i][0] = f.x;
                J[i][1] = f.y;
                J[i][2] = f.dot(dC);
            }
            // Normal equations with Levenberg-Marquardt damping.
            double JtJ[3][3], Jtf[3];
            for (int i = 0; i < 3; ++i) {
                Jtf[i] = 0.0;
                for (int j = 0; j < 3; ++j) {
                    double acc = 0.0;
                    for (int k = 0; k < 3; ++k)
                        acc += J[k][i] * J[k][j];
                    JtJ[i][j] = acc;
                }
                for (int k = 0; k < 3; ++k)
                    Jtf[i] += J[k][i] * res.f[static_cast<size_t>(k)];
            }

            bool stepped = false;
            double step_norm = 0.0;
            for (int attempt = 0; attempt < 12; ++attempt) {
                double M[3][3];
                for (int i = 0; i < 3; ++i)
                    for (int j = 0; j < 3; ++j)
                        M[i][j] = JtJ[i][j] + (i == j ? lambda : 0.0);
                double delta[3];
                double rhs[3] = {-Jtf[0], -Jtf[1], -Jtf[2]};
                if (!solve3(M, rhs, delta)) {
                    lambda *= 10.0;
                    continue;
                }
                const double qn[3] = {q[0] + delta[0], q[1] + delta[1], q[2] + delta[2]};
                const Residuals rn = line_residuals(d, A, local, theta, qn[0], qn[1], qn[2]);
                if (rn.sq < res.sq) {
                    q[0] = qn[0];
                    q[1] = qn[1];
                    q[2] = qn[2];
                    res = rn;
                    lambda = std::max(lambda / 3.0, config.damping);
                    step_norm = std::sqrt(delta[0] * delta[0] + delta[1] * delta[1] +
                                          delta[2] * delta[2]);
                    stepped = true;
                    break;
                }
                lambda *= 10.0;
            }
            if (!stepped)
                break; // stuck in a local minimum of the residual norm
            if (step_norm < config.step_tolerance) {
                converged = res.max_abs < config.residual_tolerance;
                break;
            }
        }
        if (res.max_abs < config.residual_tolerance)
            converged = true;
        if (!converged)
            continue;

        const Pose pose{q[0], q[1], normalize_angle(q[2])};
        bool dup = false;
        for (const auto& kept : found)
            if (pose_close(pose, kept)) {
                dup = true;
                break;
            }
        if (!dup)
            found.push_back(pose);
    }

    std::sort(found.begin(), found.end(), [](const Pose& a, const Pose& b) {
        return std::tie(a.phi, a.x, a.y) < std::tie(b.phi, b.x, b.y);
    });
    return found;
}

std::optional<double> jacobian_fd_check(const RobotDesign& d, const Pose& pose,
                                        const WorkingMode& mode, double step) {
    if (!(step > 0.0))
        throw std::invalid_argument("jacobian_fd_check: step must be positive");
    const auto ik = inverse_kinematics(d, pose, mode);
    if (!ik.state)
        return std::nullopt;

    const VelocityModel vm = velocity_model(d, pose, *ik.state);
    const double scale = d.full_scale();
    if (std::abs(vm.det_a) <= kNearSingularDet * scale * scale * scale)
        return std::nullopt;
    for (double rho : vm.rho)
        if (std::abs(rho) <= kNearSingularRho * scale)
            return std::nullopt;

    // Analytic d(theta)/d(x, y, phi): row i of B^-1 A, reordered so that the
    // pose coordinates come in (x, y, phi) order (A's columns are phi, x, y).
    double analytic[3][3];
    for (int i = 0; i < 3; ++i) {
        const auto iu = static_cast<size_t>(i);
        analytic[i][0] = vm.A.m[iu][1] / vm.rho[iu];
        analytic[i][1] = vm.A.m[iu][2] / vm.rho[iu];
        analytic[i][2] = vm.A.m[iu][0] / vm.rho[iu];
    }

    double worst = 0.0;
    for (int j = 0; j < 3; ++j) {
        Pose plus = pose, minus = pose;
        double* pc = (j == 0) ? &plus.x : (j == 1) ? &plus.y : &plus.phi;
        double* mc = (j == 0) ? &minus.x : (j == 1) ? &minus.y : &minus.phi;
        *pc += step;
        *mc -= step;
        const auto ikp = inverse_kinematics(d, plus, mode);
        const auto ikm = inverse_kinematics(d, minus, mode);
        if (!ikp.state || !ikm.state)
            return std::nullopt;
        for (int i = 0; i < 3; ++i) {
            const auto iu = static_cast<size_t>(i);
            const double fd =
                angle_diff(ikp.state->theta[iu], ikm.state->theta[iu]) / (2.0 * step);
            const double err =
                std::abs(fd - analytic[i][j]) / std::max(1.0, std::abs(analytic[i][j]));
            worst = std::max(worst, err);
        }
    }
    return worst;
}

ProbeResult selfmotion_probe(const RobotDesign& d, const std::array<double, 3>& theta,
                             int samples) {
    if (samples < 8)
        throw std::invalid_argument("selfmotion_probe: need at least 8 samples");

    SolverConfig cfg;
    cfg.seed_count = 8 * samples;
    ProbeResult out;
    out.family_points = numeric_dk(d, theta, cfg);
    if (static_cast<int>(out.family_points.size()) < samples)
        return out; // too few poses: at most isolated assembly modes

    const double max_gap = 4.0 * (2.0 * kPi / samples);
    double worst_gap = 0.0;
    for (size_t i = 1; i < out.family_points.size(); ++i)
        worst_gap = std::max(worst_gap,
                             out.family_points[i].phi - out.family_points[i - 1].phi);
    const double wrap = (out.family_points.front().phi + 2.0 * kPi) -
                        out.family_points.back().phi;
    worst_gap = std::max(worst_gap, wrap);
    out.is_family = worst_gap <= max_gap;
    return out;
}

} // namespace rpr
