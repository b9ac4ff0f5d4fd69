#include "xppn/render.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xppn/common.hpp"

namespace xppn {

namespace {

struct Mapper {
    double minx = 0, maxy = 0, scale = 1;
    double px(double x) const { return (x - minx) * scale + 20.0; }
    double py(double y) const { return (maxy - y) * scale + 40.0; }
};

std::string fr(double v) { return format_real(v); }

void polygon_node(std::ostringstream& out, const std::vector<Point>& pts, const Mapper& m,
                  const char* style) {
    out << "<polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i)
        out << (i ? " " : "") << fr(m.px(pts[i].x)) << "," << fr(m.py(pts[i].y));
    out << "\" " << style << "/>\n";
}

} // namespace

std::string render_svg(const Instance& inst, const TourSolution& sol) {
    if (static_cast<int>(sol.entry.size()) != inst.size())
        throw ValidationError("solution does not match the instance");

    double minx = 1e300, maxx = -1e300, miny = 1e300, maxy = -1e300;
    auto grow = [&](Point p, double r) {
        minx = std::min(minx, p.x - r);
        maxx = std::max(maxx, p.x + r);
        miny = std::min(miny, p.y - r);
        maxy = std::max(maxy, p.y + r);
    };
    for (const auto& e : inst.elements) {
        EnclosingCircle c = enclosing_circle(e);
        grow(c.center, c.radius);
    }
    minx -= 3;
    maxx += 3;
    miny -= 3;
    maxy += 3;

    Mapper m;
    m.minx = minx;
    m.maxy = maxy;
    m.scale = 760.0 / std::max(maxx - minx, maxy - miny);
    double width = (maxx - minx) * m.scale + 40.0;
    double height = (maxy - miny) * m.scale + 60.0;

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fr(width)
        << "\" height=\"" << fr(height) << "\" viewBox=\"0 0 " << fr(width) << " " << fr(height)
        << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const char* region_style =
        "fill=\"#aecbe8\" fill-opacity=\"0.45\" stroke=\"#31567e\" stroke-width=\"1.2\"";
    for (int v = 0; v < inst.size(); ++v) {
        const Element& e = inst.elements[v];
        std::visit(
            [&](const auto& shape) {
                using T = std::decay_t<decltype(shape)>;
                if constexpr (std::is_same_v<T, Circle>) {
                    out << "<circle cx=\"" << fr(m.px(shape.center.x)) << "\" cy=\""
                        << fr(m.py(shape.center.y)) << "\" r=\"" << fr(shape.radius * m.scale)
                        << "\" " << region_style << "/>\n";
                } else if constexpr (std::is_same_v<T, Ellipse>) {
                    out << "<ellipse cx=\"" << fr(m.px(shape.center.x)) << "\" cy=\""
                        << fr(m.py(shape.center.y)) << "\" rx=\"" << fr(shape.rx * m.scale)
                        << "\" ry=\"" << fr(shape.ry * m.scale) << "\" transform=\"rotate("
                        << fr(-shape.rotation * 180.0 / M_PI) << " " << fr(m.px(shape.center.x))
                        << " " << fr(m.py(shape.center.y)) << ")\" " << region_style << "/>\n";
                } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                    polygon_node(out, shape.vertices, m, region_style);
                } else if constexpr (std::is_same_v<T, UnionSoc>) {
                    for (const auto& member : shape.members) {
                        // draw a sampled outline of any norm row, otherwise
                        // the member's enclosing circle as a dashed hint
                        bool drawn = false;
                        for (const auto& row : member.rows) {
                            double det = row.B[0][0] * row.B[1][1] - row.B[0][1] * row.B[1][0];
                            if (row.c.norm() > 1e-12 || std::abs(det) < 1e-12 || row.d <= 0)
                                continue;
                            std::vector<Point> pts;
                            Point center{(row.B[1][1] * -row.b.x - row.B[0][1] * -row.b.y) / det,
                                         (-row.B[1][0] * -row.b.x + row.B[0][0] * -row.b.y) / det};
                            for (int k = 0; k < 64; ++k) {
                                double th = 2.0 * M_PI * k / 64;
                                Point u{row.d * std::cos(th), row.d * std::sin(th)};
                                Point x{(row.B[1][1] * u.x - row.B[0][1] * u.y) / det,
                                        (-row.B[1][0] * u.x + row.B[0][0] * u.y) / det};
                                pts.push_back(center + x);
                            }
                            polygon_node(out, pts, m, region_style);
                            drawn = true;
                            break;
                        }
                        if (!drawn) {
                            EnclosingCircle c = enclosing_circle(member);
                            out << "<circle cx=\"" << fr(m.px(c.center.x)) << "\" cy=\""
                                << fr(m.py(c.center.y)) << "\" r=\"" << fr(c.radius * m.scale)
                                << "\" fill=\"none\" stroke=\"#31567e\" stroke-width=\"1\" "
                                   "stroke-dasharray=\"3 3\"/>\n";
                        }
                    }
                } else {
                    out << "<polyline points=\"";
                    for (std::size_t i = 0; i < shape.breakpoints.size(); ++i)
                        out << (i ? " " : "") << fr(m.px(shape.breakpoints[i].x)) << ","
                            << fr(m.py(shape.breakpoints[i].y));
                    out << "\" fill=\"none\" stroke=\"#b04a3a\" stroke-width=\"2.2\"/>\n";
                }
            },
            e.shape);
        EnclosingCircle c = enclosing_circle(e);
        out << "<text x=\"" << fr(m.px(c.center.x)) << "\" y=\"" << fr(m.py(c.center.y))
            << "\" font-size=\"11\" fill=\"#333\" text-anchor=\"middle\">v" << v << "</text>\n";
    }

    for (auto [v, w] : sol.tour.edges()) {
        out << "<line x1=\"" << fr(m.px(sol.exit[v].x)) << "\" y1=\"" << fr(m.py(sol.exit[v].y))
            << "\" x2=\"" << fr(m.px(sol.entry[w].x)) << "\" y2=\"" << fr(m.py(sol.entry[w].y))
            << "\" stroke=\"#1f7a33\" stroke-width=\"1.6\"/>\n";
    }
    for (int v = 0; v < inst.size(); ++v) {
        if (dist(sol.entry[v], sol.exit[v]) > 1e-9) {
            out << "<line x1=\"" << fr(m.px(sol.entry[v].x)) << "\" y1=\""
                << fr(m.py(sol.entry[v].y)) << "\" x2=\"" << fr(m.px(sol.exit[v].x))
                << "\" y2=\"" << fr(m.py(sol.exit[v].y))
                << "\" stroke=\"#1f7a33\" stroke-width=\"1.4\" stroke-dasharray=\"5 4\"/>\n";
        }
        out << "<circle cx=\"" << fr(m.px(sol.entry[v].x)) << "\" cy=\""
            << fr(m.py(sol.entry[v].y))
            << "\" r=\"3\" fill=\"#1f7a33\"/>\n";
        out << "<circle cx=\"" << fr(m.px(sol.exit[v].x)) << "\" cy=\""
            << fr(m.py(sol.exit[v].y))
            << "\" r=\"3\" fill=\"none\" stroke=\"#1f7a33\" stroke-width=\"1.4\"/>\n";
    }

    out << "<text x=\"20\" y=\"24\" font-size=\"14\" fill=\"#111\">" << inst.name
        << "  |  total cost " << fr(sol.cost) << (sol.approximate ? "  (approximate)" : "")
        << "</text>\n";
    out << "</svg>\n";
    return out.str();
}

} // namespace xppn
