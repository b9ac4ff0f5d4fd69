#include "xppn/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "xppn/common.hpp"
#include "xppn/rng.hpp"

namespace xppn {

namespace {

std::string element_label(int index) { return "element " + std::to_string(index); }

void validate_element(const Element& e, int index) {
    auto fail = [&](const std::string& msg) {
        throw ValidationError(element_label(index) + ": " + msg);
    };
    if (!(e.discount >= 0.0) || !std::isfinite(e.discount)) fail("discount must be >= 0");
    if (e.is_chain()) {
        if (e.coverage < 0.0 || e.coverage > 1.0) fail("coverage must lie in [0,1]");
    }
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                if (!(shape.radius > 0.0)) fail("circle radius must be positive");
                if (!std::isfinite(shape.center.x) || !std::isfinite(shape.center.y))
                    fail("circle center must be finite");
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                if (!(shape.rx > 0.0) || !(shape.ry > 0.0))
                    fail("ellipse semi-axes must be positive");
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                int n = static_cast<int>(shape.vertices.size());
                if (n < 3) fail("polygon needs >= 3 vertices");
                double area2 = 0.0;
                for (int i = 0; i < n; ++i) {
                    Point a = shape.vertices[i];
                    Point b = shape.vertices[(i + 1) % n];
                    area2 += a.cross(b);
                }
                if (area2 <= 1e-12) fail("polygon vertices must be counter-clockwise and "
                                         "non-collinear");
                for (int i = 0; i < n; ++i) {
                    Point a = shape.vertices[i];
                    Point b = shape.vertices[(i + 1) % n];
                    Point c = shape.vertices[(i + 2) % n];
                    if ((b - a).cross(c - b) < -1e-9 * (1.0 + (b - a).norm() * (c - b).norm()))
                        fail("polygon must be convex");
                }
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                if (shape.members.empty()) fail("union needs >= 1 member");
                for (const auto& member : shape.members) {
                    if (member.rows.empty()) fail("union member needs >= 1 conic row");
                    enclosing_circle(member); // throws when unbounded
                }
            } else {
                if (shape.breakpoints.size() < 2) fail("chain needs >= 2 breakpoints");
                for (std::size_t i = 0; i + 1 < shape.breakpoints.size(); ++i)
                    if (dist(shape.breakpoints[i], shape.breakpoints[i + 1]) <= 1e-12)
                        fail("chain segments must have positive length");
            }
        },
        e.shape);
}

} // namespace

void validate_instance(const Instance& inst) {
    if (inst.size() < 2) throw ValidationError("instance needs >= 2 elements");
    if (inst.radii_class < 1 || inst.radii_class > 4)
        throw ValidationError("radii_class must lie in 1..4");
    if (inst.mode < 1 || inst.mode > 4) throw ValidationError("mode must lie in 1..4");
    for (int i = 0; i < inst.size(); ++i) validate_element(inst.elements[i], i);
}

// ---------------------------------------------------------------------------
// generation
// ---------------------------------------------------------------------------

Instance generate(int size, int radii_class, int mode, std::uint64_t seed) {
    if (size < 2) throw std::invalid_argument("instance size must be >= 2");
    if (radii_class < 1 || radii_class > 4)
        throw std::invalid_argument("radii_class must lie in 1..4");
    if (mode < 1 || mode > 4) throw std::invalid_argument("mode must lie in 1..4");

    const double radius_lo = 5.0 * (radii_class - 1);
    const double radius_hi = radius_lo + 5.0;

    Xoshiro256ss rng(seed);

    // kind codes: 0 circle, 1 polygon, 2 chain
    std::vector<int> kinds(size, mode - 1);
    if (mode == 4) {
        for (int& k : kinds) k = rng.uniform_int(0, 2);
        if (size >= 3) {
            // the mixture must contain every kind: the first three slots
            // carry a random permutation of {circle, polygon, chain}
            int perm[3] = {0, 1, 2};
            for (int i = 2; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
            for (int i = 0; i < 3; ++i) kinds[i] = perm[i];
        }
    }

    Instance inst;
    inst.seed = seed;
    inst.radii_class = radii_class;
    inst.mode = mode;
    inst.name = "xppn-s" + std::to_string(size) + "-r" + std::to_string(radii_class) + "-m" +
                std::to_string(mode) + "-seed" + std::to_string(seed);

    for (int v = 0; v < size; ++v) {
        double r = rng.uniform(radius_lo, radius_hi);
        Element e;
        if (kinds[v] == 0) {
            Point c{rng.uniform(0, 100), rng.uniform(0, 100)};
            e.shape = Circle{c, std::max(r, 1e-9)};
        } else if (kinds[v] == 1) {
            Point c{rng.uniform(0, 100), rng.uniform(0, 100)};
            int k = rng.uniform_int(3, 10);
            double phase = rng.uniform(0, 2.0 * M_PI);
            double circumradius = std::max(r, 1e-9);
            ConvexPolygon poly;
            for (int j = 0; j < k; ++j) {
                double theta = phase + 2.0 * M_PI * j / k;
                poly.vertices.push_back(
                    {c.x + circumradius * std::cos(theta), c.y + circumradius * std::sin(theta)});
            }
            e.shape = std::move(poly);
        } else {
            Chain chain;
            Point p{rng.uniform(0, 100), rng.uniform(0, 100)};
            chain.breakpoints.push_back(p);
            double step = std::max(r, 1e-6);
            for (int s = 0; s < 3; ++s) {
                double theta = rng.uniform(0, 2.0 * M_PI);
                Point q{p.x + step * std::cos(theta), p.y + step * std::sin(theta)};
                q.x = std::clamp(q.x, 0.0, 100.0);
                q.y = std::clamp(q.y, 0.0, 100.0);
                if (dist(q, p) <= 1e-9) {
                    // clipping collapsed the step onto the previous point:
                    // nudge toward the square center to keep segments real
                    Point dir = Point{50, 50} - q;
                    if (dir.norm() <= 1e-9) dir = {1, 0};
                    q = q + dir * (1e-6 / dir.norm());
                    q.x = std::clamp(q.x, 0.0, 100.0);
                    q.y = std::clamp(q.y, 0.0, 100.0);
                }
                chain.breakpoints.push_back(q);
                p = q;
            }
            e.coverage = rng.uniform(0, 1);
            e.shape = std::move(chain);
        }
        inst.elements.push_back(std::move(e));
    }
    validate_instance(inst);
    return inst;
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string point_json(Point p) {
    return "[" + format_real(p.x) + ", " + format_real(p.y) + "]";
}

void write_element(std::ostringstream& out, const Element& e) {
    out << "{\"kind\": \"" << e.kind_name() << "\"";
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                out << ", \"center\": " << point_json(shape.center)
                    << ", \"radius\": " << format_real(shape.radius);
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                out << ", \"center\": " << point_json(shape.center) << ", \"semi_axes\": ["
                    << format_real(shape.rx) << ", " << format_real(shape.ry)
                    << "], \"rotation\": " << format_real(shape.rotation);
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                out << ", \"vertices\": [";
                for (std::size_t i = 0; i < shape.vertices.size(); ++i)
                    out << (i ? ", " : "") << point_json(shape.vertices[i]);
                out << "]";
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                out << ", \"members\": [";
                for (std::size_t m = 0; m < shape.members.size(); ++m) {
                    out << (m ? ", " : "") << "{\"rows\": [";
                    const auto& rows = shape.members[m].rows;
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        const auto& r = rows[i];
                        out << (i ? ", " : "") << "{\"B\": [[" << format_real(r.B[0][0]) << ", "
                            << format_real(r.B[0][1]) << "], [" << format_real(r.B[1][0]) << ", "
                            << format_real(r.B[1][1]) << "]], \"b\": " << point_json(r.b)
                            << ", \"c\": " << point_json(r.c)
                            << ", \"d\": " << format_real(r.d) << "}";
                    }
                    out << "]}";
                }
                out << "]";
            } else {
                out << ", \"breakpoints\": [";
                for (std::size_t i = 0; i < shape.breakpoints.size(); ++i)
                    out << (i ? ", " : "") << point_json(shape.breakpoints[i]);
                out << "]";
            }
        },
        e.shape);
    out << ", \"discount\": " << format_real(e.discount);
    if (e.is_chain()) out << ", \"coverage\": " << format_real(e.coverage);
    out << "}";
}

using nlohmann::json;

Point parse_point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Element parse_element(const json& j, int index) {
    const std::string where = element_label(index);
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    if (!j.contains("kind")) throw ParseError(where + ": missing 'kind' field");
    std::string kind = j.at("kind").get<std::string>();
    Element e;
    auto need = [&](const char* field) -> const json& {
        if (!j.contains(field))
            throw ParseError(where + ": missing '" + std::string(field) + "' field");
        return j.at(field);
    };
    if (kind == "circle") {
        Circle c;
        c.center = parse_point(need("center"), where + ".center");
        c.radius = need("radius").get<double>();
        e.shape = c;
    } else if (kind == "ellipse") {
        Ellipse el;
        el.center = parse_point(need("center"), where + ".center");
        const json& axes = need("semi_axes");
        if (!axes.is_array() || axes.size() != 2)
            throw ParseError(where + ".semi_axes: expected [rx, ry]");
        el.rx = axes[0].get<double>();
        el.ry = axes[1].get<double>();
        el.rotation = j.value("rotation", 0.0);
        e.shape = el;
    } else if (kind == "polygon") {
        ConvexPolygon poly;
        for (const auto& v : need("vertices"))
            poly.vertices.push_back(parse_point(v, where + ".vertices"));
        e.shape = std::move(poly);
    } else if (kind == "union") {
        UnionSoc u;
        for (const auto& m : need("members")) {
            SocSet s;
            if (!m.contains("rows")) throw ParseError(where + ": union member missing 'rows'");
            for (const auto& rj : m.at("rows")) {
                SocRow row;
                const json& B = rj.at("B");
                row.B = {{{B[0][0].get<double>(), B[0][1].get<double>()},
                          {B[1][0].get<double>(), B[1][1].get<double>()}}};
                row.b = parse_point(rj.at("b"), where + ".b");
                row.c = parse_point(rj.at("c"), where + ".c");
                row.d = rj.at("d").get<double>();
                s.rows.push_back(row);
            }
            u.members.push_back(std::move(s));
        }
        e.shape = std::move(u);
    } else if (kind == "chain") {
        Chain chain;
        for (const auto& v : need("breakpoints"))
            chain.breakpoints.push_back(parse_point(v, where + ".breakpoints"));
        e.shape = std::move(chain);
        e.coverage = j.value("coverage", 0.0);
    } else {
        throw ParseError(where + ": unknown kind '" + kind + "'");
    }
    e.discount = j.value("discount", 1.0);
    return e;
}

} // namespace

std::string write_instance(const Instance& inst) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"name\": \"" << json_escape(inst.name) << "\",\n";
    out << "  \"seed\": " << inst.seed << ",\n";
    out << "  \"radii_class\": " << inst.radii_class << ",\n";
    out << "  \"mode\": " << inst.mode << ",\n";
    out << "  \"elements\": [\n";
    for (int i = 0; i < inst.size(); ++i) {
        out << "    ";
        write_element(out, inst.elements[i]);
        out << (i + 1 < inst.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
    return out.str();
}

Instance read_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ParseError(std::string("instance parse error: ") + err.what());
    }
    if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
    Instance inst;
    try {
        inst.name = doc.value("name", "");
        if (doc.contains("seed") && doc.at("seed").is_number_integer() &&
            doc.at("seed").get<long long>() < 0)
            throw ParseError("instance parse error: seed must be non-negative");
        inst.seed = doc.value("seed", 0ULL);
        inst.radii_class = doc.value("radii_class", 1);
        inst.mode = doc.value("mode", 1);
        if (!doc.contains("elements") || !doc.at("elements").is_array())
            throw ParseError("instance document needs an 'elements' array");
        int index = 0;
        for (const auto& ej : doc.at("elements"))
            inst.elements.push_back(parse_element(ej, index++));
    } catch (const json::exception& err) {
        throw ParseError(std::string("instance parse error: ") + err.what());
    }
    validate_instance(inst);
    return inst;
}

} // namespace xppn
