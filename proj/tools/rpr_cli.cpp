// Command-line front end for the 3-RPR analysis library.  Angles cross this
// boundary in degrees; everything behind it is radians.  Exit codes: 0 for
// success and domain *results* (unreachable pose, no assembly), 2 for domain
// errors (invalid preconditions), 1 for parse/IO errors.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rpr/design_io.hpp"
#include "rpr/export.hpp"
#include "rpr/geometry.hpp"
#include "rpr/kinematics.hpp"
#include "rpr/oracle.hpp"
#include "rpr/selfmotion.hpp"
#include "rpr/singularity.hpp"

namespace {

constexpr double kDeg = rpr::kPi / 180.0;

double to_deg(double rad) { return rad / kDeg; }

std::vector<double> parse_doubles(const std::string& s, size_t expect, const char* what) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        const std::string tok =
            s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        double v = 0.0;
        const char* b = tok.data();
        const char* e = tok.data() + tok.size();
        auto [p, ec] = std::from_chars(b, e, v);
        if (ec != std::errc() || p != e)
            throw CLI::ValidationError(std::string(what) + ": cannot parse `" + tok + "`");
        out.push_back(v);
        if (comma == std::string::npos)
            break;
        pos = comma + 1;
    }
    if (out.size() != expect)
        throw CLI::ValidationError(std::string(what) + ": expected " + std::to_string(expect) +
                                   " comma-separated values");
    return out;
}

std::string join3(double a, double b, double c) {
    return rpr::format_number(a) + "," + rpr::format_number(b) + "," + rpr::format_number(c);
}

/// Output sink honoring --outdir for relative paths; stdout when name empty.
class Sink {
  public:
    Sink(const std::string& name, const std::string& outdir) {
        if (name.empty())
            return;
        std::string path = name;
        if (!outdir.empty() && name.front() != '/')
            path = outdir + "/" + name;
        file_.open(path, std::ios::binary);
        if (!file_)
            throw std::runtime_error("cannot open output file: " + path);
        named_ = true;
    }
    std::ostream& stream() { return named_ ? file_ : std::cout; }

  private:
    std::ofstream file_;
    bool named_ = false;
};

int run_ik(const rpr::RobotDesign& d, const std::vector<double>& pose_in,
           const std::string& mode_s) {
    const rpr::Pose pose{pose_in[0], pose_in[1], pose_in[2] * kDeg};
    const auto mode = rpr::WorkingMode::from_string(mode_s);
    const auto ik = rpr::inverse_kinematics(d, pose, mode);
    if (!ik.state) {
        std::cout << "UNREACHABLE (leg " << ik.unreachable_leg + 1 << ")\n";
        return 0;
    }
    std::cout << "theta_deg: "
              << join3(to_deg(ik.state->theta[0]), to_deg(ik.state->theta[1]),
                       to_deg(ik.state->theta[2]))
              << "\n";
    std::cout << "rho_m: " << join3(ik.state->rho[0], ik.state->rho[1], ik.state->rho[2])
              << "\n";
    return 0;
}

int run_dk(const rpr::RobotDesign& d, const std::vector<double>& theta_deg) {
    const std::array<double, 3> theta{theta_deg[0] * kDeg, theta_deg[1] * kDeg,
                                      theta_deg[2] * kDeg};
    const auto dk = rpr::direct_kinematics(d, theta);
    switch (dk.kind) {
    case rpr::DkResult::Kind::NoAssembly:
        std::cout << "NO ASSEMBLY\n";
        return 0;
    case rpr::DkResult::Kind::SelfMotionFamily:
        std::cout << "SELF-MOTION ("
                  << (dk.family_reason == rpr::DkResult::FamilyReason::DegenerateEllipse
                          ? "degenerate ellipse"
                          : "parallel legs")
                  << ")\n";
        return 0;
    case rpr::DkResult::Kind::Poses:
        break;
    }
    std::cout << "poses: " << dk.poses.size() << "\n";
    for (const auto& p : dk.poses)
        std::cout << "pose: " << join3(p.pose.x, p.pose.y, to_deg(p.pose.phi)) << "\n";
    if (dk.tangent)
        std::cout << "tangent: true\n";
    return 0;
}

int run_classify(const rpr::RobotDesign& d, const std::vector<double>& pose_in,
                 const std::string& mode_s, double tol) {
    const rpr::Pose pose{pose_in[0], pose_in[1], pose_in[2] * kDeg};
    const auto mode = rpr::WorkingMode::from_string(mode_s);
    const auto ik = rpr::inverse_kinematics(d, pose, mode);
    if (!ik.state)
        throw std::domain_error("pose unreachable in mode " + mode_s +
                                "; nothing to classify");
    const auto v = rpr::classify(d, pose, *ik.state, tol);
    switch (v.kind) {
    case rpr::SingularityVerdict::Kind::Regular:
        std::cout << "classification: REGULAR\n";
        break;
    case rpr::SingularityVerdict::Kind::Type1: {
        std::string legs, ri;
        for (int i = 0; i < 3; ++i) {
            if (v.type1_legs[static_cast<size_t>(i)]) {
                legs += (legs.empty() ? "" : ",") + std::to_string(i + 1);
                if (v.type1_ri[static_cast<size_t>(i)])
                    ri += (ri.empty() ? "" : ",") + std::to_string(i + 1);
            }
        }
        std::cout << "classification: TYPE1 (legs " << legs;
        if (!ri.empty())
            std::cout << "; ri " << ri;
        std::cout << ")\n";
        break;
    }
    case rpr::SingularityVerdict::Kind::Type2: {
        const char* sub = "concurrent rotation";
        if (v.type2 == rpr::SingularityVerdict::Type2Kind::ParallelTranslation)
            sub = "parallel translation";
        else if (v.type2 == rpr::SingularityVerdict::Type2Kind::CardanicSelfMotion)
            sub = "cardanic self-motion";
        std::cout << "classification: TYPE2 (" << sub << ")\n";
        if (v.instant_center)
            std::cout << "W: " << rpr::format_number(v.instant_center->x) << ","
                      << rpr::format_number(v.instant_center->y) << "\n";
        break;
    }
    }
    return 0;
}

int run_selfmotion(const rpr::RobotDesign& d) {
    const auto rep = rpr::classify_self_motions(d);
    const char* cls = "NONE";
    if (rep.classification == rpr::SelfMotionReport::Classification::FiniteSets)
        cls = "FINITE SETS";
    else if (rep.classification == rpr::SelfMotionReport::Classification::InfinitelyMany)
        cls = "INFINITELY MANY";
    std::cout << "classification: " << cls << "\n";
    std::cout << "similar_triangles: " << (rep.similar_triangles ? "true" : "false") << "\n";
    for (size_t i = 0; i < rep.branches.size(); ++i) {
        const auto& br = rep.branches[i];
        std::cout << "branch " << i << ": eps_deg=" << rpr::format_number(to_deg(br.epsilon))
                  << " delta_deg=" << rpr::format_number(to_deg(br.delta))
                  << " d1=" << rpr::format_number(br.d.d1)
                  << " d2=" << rpr::format_number(br.d.d2)
                  << " d3=" << rpr::format_number(br.d.d3)
                  << " offset_residual=" << rpr::format_number(br.offset_residual);
        if (br.d.fitted_override)
            std::cout << " fitted=true";
        std::cout << " roots=";
        if (br.infinitely_many ||
            br.roots.kind == rpr::JointSetResult::Kind::AllConfigurations) {
            std::cout << "all";
        } else if (br.roots.kind == rpr::JointSetResult::Kind::NoRealRoots) {
            std::cout << "none";
        } else {
            for (size_t r = 0; r < br.roots.theta2.size(); ++r)
                std::cout << (r ? "," : "") << rpr::format_number(to_deg(br.roots.theta2[r]));
        }
        std::cout << "\n";
    }
    std::cout << "joint_sets: " << rep.joint_sets.size() << "\n";
    for (const auto& js : rep.joint_sets)
        std::cout << "set: " << join3(to_deg(js[0]), to_deg(js[1]), to_deg(js[2])) << "\n";
    return 0;
}

int run_trace(const rpr::RobotDesign& d, double theta2_deg, int branch, int steps,
              const std::string& out, const std::string& outdir) {
    const auto combos = rpr::branch_angles(d).combos();
    if (branch < 0 || branch >= static_cast<int>(combos.size()))
        throw CLI::ValidationError("--branch must be 0..3");
    if (steps < 2)
        throw CLI::ValidationError("--phi-steps must be at least 2");
    const double theta2 = theta2_deg * kDeg;
    const auto [eps, del] = combos[static_cast<size_t>(branch)];

    std::vector<rpr::CardanicSample> rows;
    rows.reserve(static_cast<size_t>(steps));
    for (int j = 0; j < steps; ++j) {
        const double phi = -rpr::kPi + (j + 1) * 2.0 * rpr::kPi / steps; // ends at +pi
        rows.push_back(rpr::cardanic_path(d, eps, del, theta2, phi));
    }
    Sink sink(out, outdir);
    rpr::write_trace_csv(sink.stream(), rows);
    return 0;
}

int run_locus(const rpr::RobotDesign& d, double phi_deg, const std::vector<double>& bbox,
              const std::vector<double>& grid, const std::string& mode_s,
              const std::string& csv, const std::string& svg, bool triangles, bool allow_empty,
              const std::string& outdir) {
    const rpr::Rect region{bbox[0], bbox[1], bbox[2], bbox[3]};
    const auto mode = rpr::WorkingMode::from_string(mode_s);
    const int nx = static_cast<int>(grid[0]);
    const int ny = static_cast<int>(grid[1]);
    const auto scan = rpr::locus_scan(d, phi_deg * kDeg, region, nx, ny, mode);

    Sink csv_sink(csv, outdir);
    rpr::write_locus_csv(csv_sink.stream(), scan);

    if (!svg.empty()) {
        rpr::SvgOptions opt;
        opt.allow_empty = allow_empty;
        if (triangles) {
            const auto A = rpr::base_anchors(d);
            opt.triangles.push_back(A);
            opt.triangles.push_back(
                rpr::platform_points(d, rpr::Pose{0.0, 0.0, phi_deg * kDeg}));
        }
        Sink svg_sink(svg, outdir);
        rpr::write_svg(svg_sink.stream(), scan.contours, region, opt);
    }
    return 0;
}

int run_paminsa(const rpr::RobotDesign& d, const std::vector<double>& pose_in,
                const std::string& mode_s) {
    const rpr::Pose pose{pose_in[0], pose_in[1], pose_in[2] * kDeg};
    const auto mode = rpr::WorkingMode::from_string(mode_s);
    const auto ik = rpr::inverse_kinematics(d, pose, mode);
    if (!ik.state)
        throw std::domain_error("pose unreachable in mode " + mode_s);
    const auto rep = rpr::paminsa_analysis(d, pose, *ik.state);
    if (rep.phi_s_exists)
        std::cout << "phi_s_deg: " << rpr::format_number(to_deg(rep.phi_s)) << "\n";
    else
        std::cout << "phi_s_deg: none\n";
    if (rep.translational_special)
        std::cout << "translational_special: true\n";
    std::cout << "nu: " << rpr::format_number(rep.nu) << "\n";
    std::cout << "R1: " << rpr::format_number(rep.R1) << "\n";
    std::cout << "circle_radius: " << rpr::format_number(rep.circle_radius) << "\n";
    std::cout << "circle_residual: " << rpr::format_number(rep.circle_residual) << "\n";
    std::cout << "on_self_motion_circle: " << (rep.on_self_motion_circle ? "true" : "false")
              << "\n";
    std::cout << "det_formula: " << rpr::format_number(rep.det_formula) << "\n";
    std::cout << "det_a: " << rpr::format_number(rep.det_a) << "\n";
    return 0;
}

int run_verify(const rpr::RobotDesign& d) {
    std::mt19937_64 rng(7041u);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool ok = true;
    const auto report = [&ok](const std::string& name, bool good, const std::string& detail) {
        std::cout << "check " << name << ": " << (good ? "ok" : "FAIL");
        if (!detail.empty())
            std::cout << " (" << detail << ")";
        std::cout << "\n";
        ok = ok && good;
    };

    // Round trip: IK then DK must reproduce the pose.
    {
        int tried = 0, bad = 0;
        double worst = 0.0;
        while (tried < 25) {
            const double r = (d.Rb + d.Rp) * 0.8 * std::sqrt(u01(rng));
            const double a = 2.0 * rpr::kPi * u01(rng);
            const rpr::Pose pose{r * std::cos(a), r * std::sin(a),
                                 2.0 * rpr::kPi * u01(rng) - rpr::kPi};
            const auto ik = rpr::inverse_kinematics(d, pose, rpr::WorkingMode::all_plus());
            if (!ik.state)
                continue;
            ++tried;
            const auto dk = rpr::direct_kinematics(d, ik.state->theta);
            if (dk.kind != rpr::DkResult::Kind::Poses) {
                continue; // family/no-assembly: nothing to compare against
            }
            double best = 1e300;
            for (const auto& p : dk.poses)
                best = std::min(best,
                                std::max({std::abs(p.pose.x - pose.x), std::abs(p.pose.y - pose.y),
                                          std::abs(rpr::angle_diff(p.pose.phi, pose.phi))}));
            worst = std::max(worst, best);
            if (best > 1e-9)
                ++bad;
        }
        report("ik_dk_round_trip", bad == 0, "worst " + rpr::format_number(worst));
    }

    // Iterative solver agrees with the closed form.
    {
        int checked = 0, bad = 0;
        for (int n = 0; n < 10; ++n) {
            const std::array<double, 3> theta{2.0 * rpr::kPi * u01(rng) - rpr::kPi,
                                              2.0 * rpr::kPi * u01(rng) - rpr::kPi,
                                              2.0 * rpr::kPi * u01(rng) - rpr::kPi};
            const auto dk = rpr::direct_kinematics(d, theta);
            if (dk.kind == rpr::DkResult::Kind::SelfMotionFamily)
                continue;
            const auto num = rpr::numeric_dk(d, theta);
            ++checked;
            if (dk.kind == rpr::DkResult::Kind::NoAssembly) {
                if (!num.empty())
                    ++bad;
                continue;
            }
            if (num.size() != dk.poses.size()) {
                ++bad;
                continue;
            }
            for (const auto& p : dk.poses) {
                double best = 1e300;
                for (const auto& q : num)
                    best = std::min(best, std::max({std::abs(p.pose.x - q.x),
                                                    std::abs(p.pose.y - q.y),
                                                    std::abs(rpr::angle_diff(p.pose.phi, q.phi))}));
                if (best > 1e-7)
                    ++bad;
            }
        }
        report("numeric_dk_equivalence", bad == 0,
               std::to_string(checked) + " joint triples checked");
    }

    // Velocity model against finite differences.
    {
        int tried = 0, bad = 0;
        double worst = 0.0;
        while (tried < 15) {
            const double r = (d.Rb + d.Rp) * 0.8 * std::sqrt(u01(rng));
            const double a = 2.0 * rpr::kPi * u01(rng);
            const rpr::Pose pose{r * std::cos(a), r * std::sin(a),
                                 2.0 * rpr::kPi * u01(rng) - rpr::kPi};
            const auto err =
                rpr::jacobian_fd_check(d, pose, rpr::WorkingMode::all_plus(), 1e-6);
            if (!err)
                continue;
            ++tried;
            worst = std::max(worst, *err);
            if (*err > 1e-4)
                ++bad;
        }
        report("jacobian_fd", bad == 0, "worst " + rpr::format_number(worst));
    }

    // Self-motion census against the brute-force probe.
    {
        const auto rep = rpr::classify_self_motions(d);
        bool good = true;
        std::string detail;
        if (rep.classification == rpr::SelfMotionReport::Classification::InfinitelyMany) {
            for (const auto& br : rep.branches) {
                if (!br.infinitely_many)
                    continue;
                const std::array<double, 3> theta{br.epsilon, 0.0, br.delta};
                good = rpr::selfmotion_probe(d, theta, 16).is_family;
                detail = "family probe at branch triple";
                break;
            }
        } else {
            for (int n = 0; n < 3 && good; ++n) {
                const double r = (d.Rb + d.Rp) * 0.8 * std::sqrt(u01(rng));
                const double a = 2.0 * rpr::kPi * u01(rng);
                const rpr::Pose pose{r * std::cos(a), r * std::sin(a),
                                     2.0 * rpr::kPi * u01(rng) - rpr::kPi};
                const auto ik = rpr::inverse_kinematics(d, pose, rpr::WorkingMode::all_plus());
                if (!ik.state)
                    continue;
                good = !rpr::selfmotion_probe(d, ik.state->theta, 16).is_family;
            }
            detail = "no spurious family at sampled triples";
        }
        report("selfmotion_probe", good, detail);
    }

    std::cout << (ok ? "verify: OK" : "verify: FAILED") << "\n";
    return ok ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"3-RPR planar parallel robot analysis"};
    app.require_subcommand(1);

    std::string design_path, pose_s, mode_s = "+++", theta_s;
    std::string csv_out, svg_out, trace_out, outdir;
    std::string bbox_s = "-0.6,-0.6,0.6,0.6", grid_s = "100,100";
    double phi_deg = 0.0, theta2_deg = 0.0, tol = 1e-8;
    int branch = 0, phi_steps = 64;
    bool triangles = false, allow_empty = false;

    auto add_design = [&](CLI::App* cmd) {
        cmd->add_option("design", design_path, "design file")->required();
    };

    auto* ik = app.add_subcommand("ik", "inverse kinematics at a pose");
    add_design(ik);
    ik->add_option("--pose", pose_s, "x,y,phi_deg")->required();
    ik->add_option("--mode", mode_s, "working mode, e.g. +++");

    auto* dk = app.add_subcommand("dk", "direct kinematics at a joint triple");
    add_design(dk);
    dk->add_option("--theta", theta_s, "theta1,theta2,theta3 in degrees")->required();

    auto* cl = app.add_subcommand("classify", "singularity classification at a pose");
    add_design(cl);
    cl->add_option("--pose", pose_s, "x,y,phi_deg")->required();
    cl->add_option("--mode", mode_s, "working mode");
    cl->add_option("--tol", tol, "relative tolerance");

    auto* sm = app.add_subcommand("selfmotion", "self-motion census of a design");
    add_design(sm);

    auto* tr = app.add_subcommand("trace", "sweep one circular self-motion");
    add_design(tr);
    tr->add_option("--theta2", theta2_deg, "theta2 in degrees")->required();
    tr->add_option("--branch", branch, "branch index 0..3");
    tr->add_option("--phi-steps", phi_steps, "number of phi samples");
    tr->add_option("--out", trace_out, "output CSV file (default stdout)");

    auto* lo = app.add_subcommand("locus", "detA grid scan and zero contours");
    add_design(lo);
    lo->add_option("--phi", phi_deg, "orientation in degrees")->required();
    lo->add_option("--bbox", bbox_s, "x0,y0,x1,y1");
    lo->add_option("--grid", grid_s, "nx,ny");
    lo->add_option("--mode", mode_s, "working mode");
    lo->add_option("--csv", csv_out, "output CSV file (default stdout)");
    lo->add_option("--svg", svg_out, "output SVG file");
    lo->add_flag("--triangles", triangles, "overlay base/platform triangles in the SVG");
    lo->add_flag("--allow-empty", allow_empty, "emit SVG even when no contour exists");

    auto* pa = app.add_subcommand("paminsa", "closed-form analysis of zero-offset designs");
    add_design(pa);
    pa->add_option("--pose", pose_s, "x,y,phi_deg")->required();
    pa->add_option("--mode", mode_s, "working mode");

    auto* ve = app.add_subcommand("verify", "cross-check closed forms against oracles");
    add_design(ve);

    app.add_option("--outdir", outdir, "directory for relative output files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Collapse CLI11's per-kind exit codes onto the documented contract:
        // 0 for --help/--version, 1 for any command-line parse failure.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const rpr::RobotDesign design = rpr::parse_design(design_path);
        if (ik->parsed())
            return run_ik(design, parse_doubles(pose_s, 3, "--pose"), mode_s);
        if (dk->parsed())
            return run_dk(design, parse_doubles(theta_s, 3, "--theta"));
        if (cl->parsed())
            return run_classify(design, parse_doubles(pose_s, 3, "--pose"), mode_s, tol);
        if (sm->parsed())
            return run_selfmotion(design);
        if (tr->parsed())
            return run_trace(design, theta2_deg, branch, phi_steps, trace_out, outdir);
        if (lo->parsed())
            return run_locus(design, phi_deg, parse_doubles(bbox_s, 4, "--bbox"),
                             parse_doubles(grid_s, 2, "--grid"), mode_s, csv_out, svg_out,
                             triangles, allow_empty, outdir);
        if (pa->parsed())
            return run_paminsa(design, parse_doubles(pose_s, 3, "--pose"), mode_s);
        if (ve->parsed())
            return run_verify(design);
    } catch (const rpr::DesignParseError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const CLI::ValidationError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const std::domain_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
