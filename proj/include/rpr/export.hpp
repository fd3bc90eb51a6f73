#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "rpr/selfmotion.hpp"
#include "rpr/singularity.hpp"

namespace rpr {

/// Locale-independent shortest-faithful text for a double, 12 significant
/// digits.  Every exported number goes through this one function.
std::string format_number(double v);

/// Grid dump of a singularity scan.  Header `x,y,phi_deg,detA,reachable`,
/// one row per node in row-major order (y outer, x inner); unreachable nodes
/// carry an empty detA field and reachable=0.
void write_locus_csv(std::ostream& os, const LocusScan& scan);

/// Sweep of a circular self-motion.  Header `phi_deg,x,y,opx,opy,wx,wy`:
/// platform position, moving-circle centre O' and traced diametral point W.
void write_trace_csv(std::ostream& os, const std::vector<CardanicSample>& samples);

struct SvgOptions {
    bool allow_empty = false; // permit a plot with axes but no contours
    bool axes = true;         // draw the x = 0 / y = 0 lines when in range
    std::vector<std::array<Vec2, 3>> triangles; // optional overlays (world coords)
};

/// Deterministic SVG rendering of contour polylines over a rectangular
/// region mapped to a fixed 800x800 viewport (y up).  Coordinates are written
/// with 3 decimals so identical inputs yield byte-identical documents.
/// Throws std::domain_error when contours are empty and allow_empty is unset.
void write_svg(std::ostream& os, const std::vector<std::vector<Vec2>>& contours,
               const Rect& region, const SvgOptions& opt = SvgOptions{});

} // namespace rpr
