#include "rpr/export.hpp"

#include <charconv>
#include <ostream>
#include <stdexcept>

namespace rpr {

namespace {

std::string fixed3(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
    if (ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return std::string(buf, p);
}

} // namespace

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 12);
    if (ec != std::errc())
        throw std::runtime_error("number formatting failed");
    return std::string(buf, p);
}

void write_locus_csv(std::ostream& os, const LocusScan& scan) {
    os << "x,y,phi_deg,detA,reachable\n";
    const std::string phi_deg = format_number(scan.phi * 180.0 / kPi);
    for (int iy = 0; iy < scan.ny; ++iy) {
        for (int ix = 0; ix < scan.nx; ++ix) {
            const auto& det =
                scan.det_a[static_cast<size_t>(iy) * static_cast<size_t>(scan.nx) +
                           static_cast<size_t>(ix)];
            os << format_number(scan.xs[static_cast<size_t>(ix)]) << ','
               << format_number(scan.ys[static_cast<size_t>(iy)]) << ',' << phi_deg << ',';
            if (det)
                os << format_number(*det) << ",1\n";
            else
                os << ",0\n";
        }
    }
}

void write_trace_csv(std::ostream& os, const std::vector<CardanicSample>& samples) {
    os << "phi_deg,x,y,opx,opy,wx,wy\n";
    for (const auto& s : samples) {
        os << format_number(s.pose.phi * 180.0 / kPi) << ',' << format_number(s.pose.x) << ','
           << format_number(s.pose.y) << ',' << format_number(s.circle_center.x) << ','
           << format_number(s.circle_center.y) << ',' << format_number(s.wheel_point.x) << ','
           << format_number(s.wheel_point.y) << '\n';
    }
}

void write_svg(std::ostream& os, const std::vector<std::vector<Vec2>>& contours,
               const Rect& region, const SvgOptions& opt) {
    if (contours.empty() && !opt.allow_empty)
        throw std::domain_error("write_svg: no contours (pass allow_empty to plot anyway)");
    if (!(region.x1 > region.x0) || !(region.y1 > region.y0))
        throw std::invalid_argument("write_svg: empty region");

    const double w = 800.0, h = 800.0;
    const auto mapx = [&](double x) { return (x - region.x0) / (region.x1 - region.x0) * w; };
    const auto mapy = [&](double y) { return h - (y - region.y0) / (region.y1 - region.y0) * h; };

    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
          "viewBox=\"0 0 800 800\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"800\" fill=\"white\" stroke=\"black\" "
          "stroke-width=\"1\"/>\n";

    if (opt.axes) {
        if (region.x0 < 0.0 && region.x1 > 0.0)
            os << "<line x1=\"" << fixed3(mapx(0.0)) << "\" y1=\"0\" x2=\"" << fixed3(mapx(0.0))
               << "\" y2=\"800\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
        if (region.y0 < 0.0 && region.y1 > 0.0)
            os << "<line x1=\"0\" y1=\"" << fixed3(mapy(0.0)) << "\" x2=\"800\" y2=\""
               << fixed3(mapy(0.0)) << "\" stroke=\"#999999\" stroke-width=\"0.5\"/>\n";
    }

    for (const auto& tri : opt.triangles) {
        os << "<polygon points=\"";
        for (size_t i = 0; i < tri.size(); ++i) {
            if (i)
                os << ' ';
            os << fixed3(mapx(tri[i].x)) << ',' << fixed3(mapy(tri[i].y));
        }
        os << "\" fill=\"none\" stroke=\"#3366cc\" stroke-width=\"1\"/>\n";
    }

    for (const auto& line : contours) {
        if (line.size() < 2)
            continue;
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < line.size(); ++i) {
            if (i)
                os << ' ';
            os << fixed3(mapx(line[i].x)) << ',' << fixed3(mapy(line[i].y));
        }
        os << "\"/>\n";
    }
    os << "</svg>\n";
}

} // namespace rpr
