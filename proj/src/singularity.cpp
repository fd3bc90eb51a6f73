#include "rpr/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rpr {

namespace {

constexpr double kConsistencyTol = 1e-8;
constexpr double kParallelCross = 1e-12;

std::array<double, 3> cross3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

} // namespace

std::array<double, 3> null_vector(const Mat3& a) {
    const std::array<std::array<double, 3>, 3> pairs = {
        cross3(a.m[0], a.m[1]), cross3(a.m[1], a.m[2]), cross3(a.m[2], a.m[0])};
    size_t best = 0;
    double best_norm = norm3(pairs[0]);
    for (size_t i = 1; i < 3; ++i) {
        const double n = norm3(pairs[i]);
        if (n > best_norm) {
            best = i;
            best_norm = n;
        }
    }
    return pairs[best];
}

VelocityModel velocity_model(const RobotDesign& d, const Pose& pose, const JointState& state) {
    if (max_closure_residual(d, pose, state) >= kConsistencyTol) {
        throw std::invalid_argument("velocity_model: pose/state are kinematically inconsistent");
    }
    const auto C = platform_points(d, pose);
    const Vec2 P{pose.x, pose.y};
    VelocityModel vm;
    for (int i = 0; i < 3; ++i) {
        const auto iu = static_cast<size_t>(i);
        const Vec2 f = leg_normal(state.theta[iu]);
        const Vec2 g = C[iu] - P;
        // phi-dot coefficient: d/dt [f.(C - A)] picks up f.(quarter-turn g),
        // i.e. cross(g, f); the x/y-dot coefficients are f itself.
        vm.A.m[iu][0] = g.cross(f);
        vm.A.m[iu][1] = f.x;
        vm.A.m[iu][2] = f.y;
        vm.rho[iu] = state.rho[iu];
    }
    vm.det_a = vm.A.det();
    vm.det_b = vm.rho[0] * vm.rho[1] * vm.rho[2];
    return vm;
}

std::array<ForceLine, 3> force_lines(const RobotDesign& d, const Pose& pose,
                                     const JointState& state) {
    const auto C = platform_points(d, pose);
    std::array<ForceLine, 3> lines;
    for (int i = 0; i < 3; ++i) {
        const auto iu = static_cast<size_t>(i);
        lines[iu].point = C[iu];
        lines[iu].dir = leg_normal(state.theta[iu]);
    }
    return lines;
}

std::optional<Vec2> line_intersection(const ForceLine& a, const ForceLine& b) {
    const double denom = a.dir.cross(b.dir);
    if (std::abs(denom) <= kParallelCross) {
        return std::nullopt;
    }
    const double t = (b.point - a.point).cross(b.dir) / denom;
    return a.point + t * a.dir;
}

SingularityVerdict classify(const RobotDesign& d, const Pose& pose, const JointState& state,
                            double tol) {
    if (max_closure_residual(d, pose, state) >= kConsistencyTol) {
        throw std::invalid_argument("classify: pose/state are kinematically inconsistent");
    }
    const double scale = d.full_scale();
    SingularityVerdict v;

    bool any_type1 = false;
    for (int i = 0; i < 3; ++i) {
        const auto iu = static_cast<size_t>(i);
        if (std::abs(state.rho[iu]) < tol * scale) {
            v.type1_legs[iu] = true;
            v.type1_ri[iu] = d.L[iu] <= 1e-12 * scale;
            any_type1 = true;
        }
    }
    if (any_type1) {
        v.kind = SingularityVerdict::Kind::Type1;
        return v;
    }

    const auto vm = velocity_model(d, pose, state);
    if (std::abs(vm.det_a) >= tol * scale * scale * scale) {
        v.kind = SingularityVerdict::Kind::Regular;
        return v;
    }
    v.kind = SingularityVerdict::Kind::Type2;

    const double s01 = std::abs(std::sin(state.theta[1] - state.theta[0]));
    const double s12 = std::abs(std::sin(state.theta[2] - state.theta[1]));
    const double s20 = std::abs(std::sin(state.theta[0] - state.theta[2]));
    if (s01 < tol && s12 < tol && s20 < tol) {
        v.type2 = SingularityVerdict::Type2Kind::ParallelTranslation;
        return v;
    }

    // Common point of the force lines, from the least-parallel pair.
    const auto lines = force_lines(d, pose, state);
    const std::array<std::array<size_t, 2>, 3> pairs = {{{0, 1}, {0, 2}, {1, 2}}};
    size_t best = 0;
    double best_cross = -1.0;
    for (size_t p = 0; p < 3; ++p) {
        const double c = std::abs(lines[pairs[p][0]].dir.cross(lines[pairs[p][1]].dir));
        if (c > best_cross) {
            best = p;
            best_cross = c;
        }
    }
    v.instant_center = line_intersection(lines[pairs[best][0]], lines[pairs[best][1]]);

    // Self-motion sub-case: the detached-joint locus collapses onto the third
    // leg's line for the actual joint angles.
    if (const auto pr = dk_coefficients_best_pair(d, state.theta)) {
        const double max_c = std::max(
            {std::abs(pr->co.c[0]), std::abs(pr->co.c[1]), std::abs(pr->co.c[2])});
        if (std::abs(pr->co.det_b()) < tol * scale * scale && max_c < tol * scale) {
            v.type2 = SingularityVerdict::Type2Kind::CardanicSelfMotion;
            return v;
        }
    }
    v.type2 = SingularityVerdict::Type2Kind::ConcurrentRotation;
    return v;
}

namespace {

struct SegmentSink {
    std::map<long long, Vec2> points;                 // edge key -> crossing point
    std::vector<std::pair<long long, long long>> segs;

    void add(long long ka, const Vec2& pa, long long kb, const Vec2& pb) {
        points.emplace(ka, pa);
        points.emplace(kb, pb);
        segs.emplace_back(ka, kb);
    }
};

std::vector<std::vector<Vec2>> chain_segments(const SegmentSink& sink) {
    const auto& segs = sink.segs;
    std::map<long long, std::vector<size_t>> adj;
    for (size_t s = 0; s < segs.size(); ++s) {
        adj[segs[s].first].push_back(s);
        adj[segs[s].second].push_back(s);
    }
    std::vector<bool> used(segs.size(), false);
    std::vector<std::vector<Vec2>> polylines;

    auto walk = [&](size_t seg, long long start_key) {
        std::vector<Vec2> pts;
        pts.push_back(sink.points.at(start_key));
        long long key = start_key;
        size_t cur = seg;
        while (true) {
            used[cur] = true;
            key = (segs[cur].first == key) ? segs[cur].second : segs[cur].first;
            pts.push_back(sink.points.at(key));
            size_t next = cur;
            for (size_t cand : adj.at(key)) {
                if (!used[cand]) {
                    next = cand;
                    break;
                }
            }
            if (next == cur) {
                break;
            }
            cur = next;
        }
        polylines.push_back(std::move(pts));
    };

    // Open chains first, started from their lowest-keyed loose end.
    for (const auto& [key, ids] : adj) {
        if (ids.size() == 1 && !used[ids[0]]) {
            walk(ids[0], key);
        }
    }
    // Remaining segments belong to closed loops.
    for (size_t s = 0; s < segs.size(); ++s) {
        if (!used[s]) {
            walk(s, segs[s].first);
        }
    }
    return polylines;
}

} // namespace

LocusScan locus_scan(const RobotDesign& d, double phi, const Rect& region, int nx, int ny,
                     const WorkingMode& mode) {
    if (nx < 2 || ny < 2) {
        throw std::invalid_argument("locus_scan: grid must be at least 2x2");
    }
    if (!(region.x1 > region.x0) || !(region.y1 > region.y0)) {
        throw std::invalid_argument("locus_scan: empty rectangle");
    }

    LocusScan scan;
    scan.nx = nx;
    scan.ny = ny;
    scan.phi = normalize_angle(phi);
    scan.xs.resize(static_cast<size_t>(nx));
    scan.ys.resize(static_cast<size_t>(ny));
    for (int i = 0; i < nx; ++i) {
        scan.xs[static_cast<size_t>(i)] =
            region.x0 + (region.x1 - region.x0) * i / static_cast<double>(nx - 1);
    }
    for (int i = 0; i < ny; ++i) {
        scan.ys[static_cast<size_t>(i)] =
            region.y0 + (region.y1 - region.y0) * i / static_cast<double>(ny - 1);
    }

    scan.det_a.assign(static_cast<size_t>(nx) * static_cast<size_t>(ny), std::nullopt);
    bool any_reachable = false;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const Pose pose{scan.xs[static_cast<size_t>(ix)], scan.ys[static_cast<size_t>(iy)],
                            scan.phi};
            const auto ik = inverse_kinematics(d, pose, mode);
            if (!ik.state) {
                continue;
            }
            const auto vm = velocity_model(d, pose, *ik.state);
            scan.det_a[static_cast<size_t>(iy) * static_cast<size_t>(nx) +
                       static_cast<size_t>(ix)] = vm.det_a;
            any_reachable = true;
        }
    }
    if (!any_reachable) {
        throw std::domain_error("locus_scan: no reachable node in region");
    }

    // Marching squares over fully-reachable cells.
    SegmentSink sink;
    const auto value = [&](int ix, int iy) {
        return scan.det_a[static_cast<size_t>(iy) * static_cast<size_t>(nx) +
                          static_cast<size_t>(ix)];
    };
    const auto hkey = [&](int ix, int iy) {
        return 2 * (static_cast<long long>(iy) * nx + ix);
    };
    const auto vkey = [&](int ix, int iy) {
        return 2 * (static_cast<long long>(iy) * nx + ix) + 1;
    };

    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            const auto w0 = value(ix, iy), w1 = value(ix + 1, iy), w2 = value(ix + 1, iy + 1),
                       w3 = value(ix, iy + 1);
            if (!w0 || !w1 || !w2 || !w3) {
                continue;
            }
            const double v0 = *w0, v1 = *w1, v2 = *w2, v3 = *w3;
            const int idx = (v0 > 0.0 ? 1 : 0) | (v1 > 0.0 ? 2 : 0) | (v2 > 0.0 ? 4 : 0) |
                            (v3 > 0.0 ? 8 : 0);
            if (idx == 0 || idx == 15) {
                continue;
            }

            const double xa = scan.xs[static_cast<size_t>(ix)];
            const double xb = scan.xs[static_cast<size_t>(ix) + 1];
            const double ya = scan.ys[static_cast<size_t>(iy)];
            const double yb = scan.ys[static_cast<size_t>(iy) + 1];
            // Local edges 0..3: bottom, right, top, left; each with a global
            // key and an interpolated crossing point.
            const auto edge_point = [&](int e) -> std::pair<long long, Vec2> {
                switch (e) {
                case 0: {
                    const double t = v0 / (v0 - v1);
                    return {hkey(ix, iy), Vec2{xa + t * (xb - xa), ya}};
                }
                case 1: {
                    const double t = v1 / (v1 - v2);
                    return {vkey(ix + 1, iy), Vec2{xb, ya + t * (yb - ya)}};
                }
                case 2: {
                    const double t = v3 / (v3 - v2);
                    return {hkey(ix, iy + 1), Vec2{xa + t * (xb - xa), yb}};
                }
                default: {
                    const double t = v0 / (v0 - v3);
                    return {vkey(ix, iy), Vec2{xa, ya + t * (yb - ya)}};
                }
                }
            };
            const auto emit = [&](int ea, int eb) {
                const auto [ka, pa] = edge_point(ea);
                const auto [kb, pb] = edge_point(eb);
                sink.add(ka, pa, kb, pb);
            };

            switch (idx) {
            case 1:
            case 14:
                emit(3, 0);
                break;
            case 2:
            case 13:
                emit(0, 1);
                break;
            case 3:
            case 12:
                emit(3, 1);
                break;
            case 4:
            case 11:
                emit(1, 2);
                break;
            case 6:
            case 9:
                emit(0, 2);
                break;
            case 7:
            case 8:
                emit(3, 2);
                break;
            case 5:
                if ((v0 + v1 + v2 + v3) * 0.25 > 0.0) {
                    emit(0, 1);
                    emit(2, 3);
                } else {
                    emit(3, 0);
                    emit(1, 2);
                }
                break;
            case 10:
                if ((v0 + v1 + v2 + v3) * 0.25 > 0.0) {
                    emit(3, 0);
                    emit(1, 2);
                } else {
                    emit(0, 1);
                    emit(2, 3);
                }
                break;
            default:
                break;
            }
        }
    }

    scan.contours = chain_segments(sink);
    return scan;
}

} // namespace rpr
