#pragma once

#include <optional>
#include <vector>

#include "rpr/geometry.hpp"

namespace rpr {

/// Knobs of the iterative direct-kinematics solver.
struct SolverConfig {
    int max_iterations = 200;
    double step_tolerance = 1e-15;     // give up once steps shrink below this
    double residual_tolerance = 1e-11; // max leg residual of an accepted pose
    double damping = 1e-10;            // initial Levenberg-Marquardt damping
    int seed_count = 64;               // deterministic multistart seeds

    /// Throws std::invalid_argument when a knob is non-positive or the
    /// residual tolerance is below 100x machine epsilon.
    void validate() const;
};

/// Iterative direct kinematics, independent of the closed-form reduction:
/// damped least squares on the three line-closure residuals
///   f_i . (C_i(x, y, phi) - A_i) - L_i
/// started from seed_count pseudo-random seeds drawn deterministically over a
/// disc of radius Rb + Rp and phi in (-pi, pi].  Converged poses are
/// deduplicated (component distance < 1e-6) and sorted by (phi, x, y).
/// Returns an empty list when no seed converges (unreachable joints).
std::vector<Pose> numeric_dk(const RobotDesign& d, const std::array<double, 3>& theta,
                             const SolverConfig& config = SolverConfig{});

/// Central finite-difference verification of the velocity model at a pose:
/// compares d(theta)/d(x, y, phi) obtained by differencing inverse kinematics
/// against the analytic columns of B^-1 A.  Returns the maximum relative
/// discrepancy over all 9 entries, or std::nullopt when the configuration is
/// too close to a singularity to difference reliably (|detA| <= 1e-6 scale^3,
/// some |rho| <= 1e-6 scale, or IK fails at a perturbed pose).
std::optional<double> jacobian_fd_check(const RobotDesign& d, const Pose& pose,
                                        const WorkingMode& mode, double step);

struct ProbeResult {
    bool is_family = false;
    std::vector<Pose> family_points; // all converged poses, sorted by phi
};

/// Brute-force self-motion detection at one actuated triple.  Runs numeric_dk
/// with a dense multistart (8 seeds per requested sample) and declares a
/// family when at least `samples` distinct poses emerge whose sorted phi
/// values have no gap larger than 4 * (2 pi / samples), wrap-around included.
/// Throws std::invalid_argument when samples < 8.
ProbeResult selfmotion_probe(const RobotDesign& d, const std::array<double, 3>& theta,
                             int samples);

} // namespace rpr
