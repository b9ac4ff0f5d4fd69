#include "xppn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "xppn/common.hpp"

namespace xppn {

namespace {

constexpr double kTiny = 1e-15;

Point rotate(Point p, double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    return {c * p.x - s * p.y, s * p.x + c * p.y};
}

Point ellipse_to_frame(const Ellipse& e, Point p) {
    return rotate(p - e.center, -e.rotation);
}

Point ellipse_from_frame(const Ellipse& e, Point u) {
    return e.center + rotate(u, e.rotation);
}

Point polygon_centroid(const ConvexPolygon& poly) {
    Point c{0, 0};
    for (const auto& v : poly.vertices) c = c + v;
    return c / static_cast<double>(poly.vertices.size());
}

} // namespace

double Chain::length() const {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        total += dist(breakpoints[i], breakpoints[i + 1]);
    return total;
}

const char* Element::kind_name() const {
    switch (shape.index()) {
        case 0: return "circle";
        case 1: return "ellipse";
        case 2: return "polygon";
        case 3: return "union";
        default: return "chain";
    }
}

// ---------------------------------------------------------------------------
// segment primitives
// ---------------------------------------------------------------------------

Point closest_point_on_segment(Point a, Point b, Point p) {
    Point d = b - a;
    double len2 = d.norm2();
    if (len2 <= kTiny) return a;
    double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
    return a + d * t;
}

namespace {

int orientation_sign(Point a, Point b, Point c) {
    double v = (b - a).cross(c - a);
    double scale = (b - a).norm() * (c - a).norm();
    if (std::abs(v) <= 1e-14 * (1.0 + scale)) return 0;
    return v > 0 ? 1 : -1;
}

// Proper crossing test; writes the crossing point when segments intersect
// transversally.
bool segments_cross(Point a1, Point a2, Point b1, Point b2, Point* where) {
    int o1 = orientation_sign(a1, a2, b1);
    int o2 = orientation_sign(a1, a2, b2);
    int o3 = orientation_sign(b1, b2, a1);
    int o4 = orientation_sign(b1, b2, a2);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
        Point r = a2 - a1, s = b2 - b1;
        double denom = r.cross(s);
        double t = (b1 - a1).cross(s) / denom;
        *where = a1 + r * t;
        return true;
    }
    return false;
}

} // namespace

MinDistResult segment_segment_distance(Point a1, Point a2, Point b1, Point b2) {
    Point where;
    if (segments_cross(a1, a2, b1, b2, &where)) return {0.0, where, where};

    MinDistResult best{std::numeric_limits<double>::infinity(), {}, {}};
    auto consider = [&](Point pa, Point pb) {
        double d = dist(pa, pb);
        if (d < best.dist) best = {d, pa, pb};
    };
    consider(a1, closest_point_on_segment(b1, b2, a1));
    consider(a2, closest_point_on_segment(b1, b2, a2));
    consider(closest_point_on_segment(a1, a2, b1), b1);
    consider(closest_point_on_segment(a1, a2, b2), b2);
    return best;
}

// ---------------------------------------------------------------------------
// polygon primitives
// ---------------------------------------------------------------------------

bool point_in_convex_polygon(const ConvexPolygon& poly, Point p, double tol) {
    const auto& vs = poly.vertices;
    int n = static_cast<int>(vs.size());
    for (int i = 0; i < n; ++i) {
        Point a = vs[i], b = vs[(i + 1) % n];
        Point e = b - a;
        double len = e.norm();
        if (len <= kTiny) continue;
        // signed distance of p to edge line, positive on the interior side
        double sd = e.cross(p - a) / len;
        if (sd < -tol) return false;
    }
    return true;
}

Point project_polygon(const ConvexPolygon& poly, Point p) {
    if (point_in_convex_polygon(poly, p, 0.0)) return p;
    const auto& vs = poly.vertices;
    int n = static_cast<int>(vs.size());
    Point best;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        Point q = closest_point_on_segment(vs[i], vs[(i + 1) % n], p);
        double d = dist(q, p);
        if (d < best_d) {
            best_d = d;
            best = q;
        }
    }
    return best;
}

namespace {

double polygon_boundary_distance(const ConvexPolygon& poly, Point p) {
    const auto& vs = poly.vertices;
    int n = static_cast<int>(vs.size());
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        Point q = closest_point_on_segment(vs[i], vs[(i + 1) % n], p);
        best = std::min(best, dist(q, p));
    }
    return best;
}

} // namespace

// ---------------------------------------------------------------------------
// ellipse projection (Newton on the 1-D KKT parameter with a guaranteed
// bracket; falls back to bisection steps whenever Newton leaves it)
// ---------------------------------------------------------------------------

namespace {

// Closest boundary point for query (u,v) in the first quadrant of an
// axis-aligned ellipse with a >= b > 0.
Point ellipse_quadrant_closest(double a, double b, double u, double v) {
    if (v > kTiny) {
        if (u > kTiny) {
            double t_lo = -b * b + b * v;
            double t_hi = -b * b + std::hypot(a * u, b * v);
            auto F = [&](double t) {
                double fa = a * u / (t + a * a);
                double fb = b * v / (t + b * b);
                return fa * fa + fb * fb - 1.0;
            };
            double t = 0.5 * (t_lo + t_hi);
            for (int it = 0; it < 200; ++it) {
                double f = F(t);
                if (std::abs(f) < 1e-14) break;
                if (f > 0)
                    t_lo = t;
                else
                    t_hi = t;
                double da = t + a * a, db = t + b * b;
                double fp = -2.0 * (a * a * u * u / (da * da * da) + b * b * v * v / (db * db * db));
                double tn = t - f / fp;
                t = (tn > t_lo && tn < t_hi) ? tn : 0.5 * (t_lo + t_hi);
                if (t_hi - t_lo < 1e-16 * (1.0 + std::abs(t_hi))) break;
            }
            double x = a * a * u / (t + a * a);
            double y = b * b * v / (t + b * b);
            return {std::min(x, a), std::min(y, b)};
        }
        return {0.0, b};
    }
    // v == 0: the closest point leaves the axis when u is inside the evolute
    double denom = a * a - b * b;
    if (denom > kTiny && a * u < denom) {
        double x = a * a * u / denom;
        double s = 1.0 - (x / a) * (x / a);
        return {x, b * std::sqrt(std::max(0.0, s))};
    }
    return {a, 0.0};
}

} // namespace

Point ellipse_boundary_project(const Ellipse& e, Point p) {
    Point u = ellipse_to_frame(e, p);
    double sx = u.x < 0 ? -1.0 : 1.0;
    double sy = u.y < 0 ? -1.0 : 1.0;
    double a = e.rx, b = e.ry;
    double qu = std::abs(u.x), qv = std::abs(u.y);
    Point q;
    if (a >= b) {
        q = ellipse_quadrant_closest(a, b, qu, qv);
    } else {
        Point r = ellipse_quadrant_closest(b, a, qv, qu);
        q = {r.y, r.x};
    }
    return ellipse_from_frame(e, {sx * q.x, sy * q.y});
}

Point project_ellipse(const Ellipse& e, Point p) {
    Point u = ellipse_to_frame(e, p);
    double m = (u.x / e.rx) * (u.x / e.rx) + (u.y / e.ry) * (u.y / e.ry);
    if (m <= 1.0) return p;
    return ellipse_boundary_project(e, p);
}

// ---------------------------------------------------------------------------
// conic set membership / projection
// ---------------------------------------------------------------------------

namespace {

Point apply_B(const SocRow& r, Point x) {
    return {r.B[0][0] * x.x + r.B[0][1] * x.y, r.B[1][0] * x.x + r.B[1][1] * x.y};
}

Point apply_Bt(const SocRow& r, Point y) {
    return {r.B[0][0] * y.x + r.B[1][0] * y.y, r.B[0][1] * y.x + r.B[1][1] * y.y};
}

double row_slack(const SocRow& r, Point x) {
    Point bx = apply_B(r, x) + r.b;
    return (r.c.dot(x) + r.d) - bx.norm();
}

// Projection onto the 3-d second-order cone {(w, t): ||w|| <= t}.
void soc_cone_project(double wx, double wy, double t, double* ox, double* oy, double* ot) {
    double n = std::hypot(wx, wy);
    if (n <= t) {
        *ox = wx;
        *oy = wy;
        *ot = t;
    } else if (n <= -t) {
        *ox = 0;
        *oy = 0;
        *ot = 0;
    } else {
        double alpha = 0.5 * (n + t);
        double scale = n > kTiny ? alpha / n : 0.0;
        *ox = wx * scale;
        *oy = wy * scale;
        *ot = alpha;
    }
}

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;
    Point solve(Point r) const {
        double det = a * d - b * c;
        return {(d * r.x - b * r.y) / det, (-c * r.x + a * r.y) / det};
    }
};

} // namespace

bool socset_contains(const SocSet& s, Point p, double tol) {
    for (const auto& row : s.rows)
        if (row_slack(row, p) < -tol) return false;
    return true;
}

// ADMM splitting: minimize 1/2||x-p||^2 with (B_i x + b_i, c_i.x + d_i) in
// the second-order cone for every row. The x-update is a fixed 2x2 solve,
// the splitting variable update is a closed-form cone projection.
Point project_socset(const SocSet& s, Point p) {
    if (socset_contains(s, p, 1e-13)) return p;
    const int n = static_cast<int>(s.rows.size());
    double rho = 1.0;

    auto build = [&](double r) {
        Mat2 m{1, 0, 0, 1};
        for (const auto& row : s.rows) {
            // B^T B + c c^T
            double b00 = row.B[0][0] * row.B[0][0] + row.B[1][0] * row.B[1][0];
            double b01 = row.B[0][0] * row.B[0][1] + row.B[1][0] * row.B[1][1];
            double b11 = row.B[0][1] * row.B[0][1] + row.B[1][1] * row.B[1][1];
            m.a += r * (b00 + row.c.x * row.c.x);
            m.b += r * (b01 + row.c.x * row.c.y);
            m.c += r * (b01 + row.c.x * row.c.y);
            m.d += r * (b11 + row.c.y * row.c.y);
        }
        return m;
    };
    Mat2 M = build(rho);

    std::vector<std::array<double, 3>> sv(n), uv(n, {0, 0, 0});
    Point x = p;
    for (int i = 0; i < n; ++i) {
        Point bx = apply_B(s.rows[i], x) + s.rows[i].b;
        soc_cone_project(bx.x, bx.y, s.rows[i].c.dot(x) + s.rows[i].d, &sv[i][0], &sv[i][1],
                         &sv[i][2]);
    }

    for (int iter = 0; iter < 20000; ++iter) {
        Point rhs = p;
        for (int i = 0; i < n; ++i) {
            const auto& row = s.rows[i];
            Point w{sv[i][0] - row.b.x - uv[i][0], sv[i][1] - row.b.y - uv[i][1]};
            rhs = rhs + (apply_Bt(row, w) + row.c * (sv[i][2] - row.d - uv[i][2])) * rho;
        }
        x = M.solve(rhs);

        double pri = 0.0, dual = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto& row = s.rows[i];
            Point bx = apply_B(row, x) + row.b;
            double t = row.c.dot(x) + row.d;
            double w0 = bx.x + uv[i][0], w1 = bx.y + uv[i][1], w2 = t + uv[i][2];
            double s0, s1, s2;
            soc_cone_project(w0, w1, w2, &s0, &s1, &s2);
            dual = std::max({dual, rho * std::abs(s0 - sv[i][0]), rho * std::abs(s1 - sv[i][1]),
                             rho * std::abs(s2 - sv[i][2])});
            sv[i] = {s0, s1, s2};
            uv[i][0] = w0 - s0;
            uv[i][1] = w1 - s1;
            uv[i][2] = w2 - s2;
            pri = std::max({pri, std::abs(bx.x - s0), std::abs(bx.y - s1), std::abs(t - s2)});
        }
        const double eps = 1e-11 * (1.0 + x.norm());
        if (pri < eps && dual < eps) break;
        if ((iter + 1) % 64 == 0) {
            if (pri > 10 * dual) {
                rho *= 2;
                for (auto& u : uv)
                    for (auto& c : u) c *= 0.5;
                M = build(rho);
            } else if (dual > 10 * pri) {
                rho *= 0.5;
                for (auto& u : uv)
                    for (auto& c : u) c *= 2.0;
                M = build(rho);
            }
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// element-level membership / projection
// ---------------------------------------------------------------------------

Point project(const Element& e, Point p) {
    return std::visit(
        [&](const auto& shape) -> Point {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                Point d = p - shape.center;
                double n = d.norm();
                if (n <= shape.radius) return p;
                return shape.center + d * (shape.radius / n);
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return project_ellipse(shape, p);
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                return project_polygon(shape, p);
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                Point best;
                double best_d = std::numeric_limits<double>::infinity();
                for (const auto& member : shape.members) {
                    Point q = project_socset(member, p);
                    double d = dist(q, p);
                    // ties (within projection accuracy) keep the lowest member
                    if (d < best_d - 1e-9) {
                        best_d = d;
                        best = q;
                    }
                }
                return best;
            } else {
                Point best;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i + 1 < shape.breakpoints.size(); ++i) {
                    Point q = closest_point_on_segment(shape.breakpoints[i],
                                                       shape.breakpoints[i + 1], p);
                    double d = dist(q, p);
                    if (d < best_d) {
                        best_d = d;
                        best = q;
                    }
                }
                return best;
            }
        },
        e.shape);
}

double distance_to(const Element& e, Point p) { return dist(p, project(e, p)); }

bool contains(const Element& e, Point p, double tol) {
    return distance_to(e, p) <= tol + 1e-12;
}

Point chain_point_at(const Chain& chain, double lambda) {
    int n = chain.segments();
    if (lambda < 0.0 || lambda > static_cast<double>(n))
        throw std::domain_error("chain parameter out of range [0, n]");
    int j = std::min(static_cast<int>(std::floor(lambda)) + 1, n);
    double gamma = lambda - static_cast<double>(j - 1);
    return chain.breakpoints[j - 1] * (1.0 - gamma) + chain.breakpoints[j] * gamma;
}

double chain_lambda_of(const Chain& chain, Point p) {
    double best_d = std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    for (int s = 0; s + 1 < static_cast<int>(chain.breakpoints.size()); ++s) {
        Point a = chain.breakpoints[s], b = chain.breakpoints[s + 1];
        Point q = closest_point_on_segment(a, b, p);
        double d = dist(q, p);
        if (d < best_d) {
            best_d = d;
            double len2 = (b - a).norm2();
            double t = len2 > kTiny ? std::clamp((q - a).dot(b - a) / len2, 0.0, 1.0) : 0.0;
            best_lambda = static_cast<double>(s) + t;
        }
    }
    return best_lambda;
}

double distance_to_boundary(const Element& e, Point p) {
    return std::visit(
        [&](const auto& shape) -> double {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return std::abs(dist(p, shape.center) - shape.radius);
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return dist(p, ellipse_boundary_project(shape, p));
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                return polygon_boundary_distance(shape, p);
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                throw ValidationError("boundary distance is not defined for union elements");
            } else {
                return distance_to(e, p);
            }
        },
        e.shape);
}

// ---------------------------------------------------------------------------
// conversions and enclosing circles
// ---------------------------------------------------------------------------

SocSet to_soc(const Element& e) {
    return std::visit(
        [&](const auto& shape) -> SocSet {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                SocRow row;
                row.B = {{{1, 0}, {0, 1}}};
                row.b = Point{0, 0} - shape.center;
                row.c = {0, 0};
                row.d = shape.radius;
                return SocSet{{row}};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                double c = std::cos(shape.rotation), s = std::sin(shape.rotation);
                SocRow row;
                // rows of diag(1/rx, 1/ry) * R(-rotation)
                row.B = {{{c / shape.rx, s / shape.rx}, {-s / shape.ry, c / shape.ry}}};
                row.b = Point{0, 0} - apply_B(row, shape.center);
                row.c = {0, 0};
                row.d = 1.0;
                return SocSet{{row}};
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                SocSet out;
                const auto& vs = shape.vertices;
                int n = static_cast<int>(vs.size());
                for (int i = 0; i < n; ++i) {
                    Point a = vs[i], b = vs[(i + 1) % n];
                    Point edge = b - a;
                    double len = edge.norm();
                    Point normal{edge.y / len, -edge.x / len}; // outward for CCW
                    SocRow row;
                    row.c = Point{0, 0} - normal;
                    row.d = normal.dot(a);
                    out.rows.push_back(row);
                }
                return out;
            } else {
                throw ValidationError("only circles, ellipses and convex polygons have a "
                                      "conic representation");
            }
        },
        e.shape);
}

namespace {

double frobenius(const SocRow& r) {
    return std::sqrt(r.B[0][0] * r.B[0][0] + r.B[0][1] * r.B[0][1] + r.B[1][0] * r.B[1][0] +
                     r.B[1][1] * r.B[1][1]);
}

double smallest_singular_value(const SocRow& r) {
    // 2x2 singular values from the eigenvalues of B^T B
    double a = r.B[0][0] * r.B[0][0] + r.B[1][0] * r.B[1][0];
    double b = r.B[0][0] * r.B[0][1] + r.B[1][0] * r.B[1][1];
    double d = r.B[0][1] * r.B[0][1] + r.B[1][1] * r.B[1][1];
    double tr = a + d;
    double det = a * d - b * b;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return std::sqrt(std::max(0.0, tr / 2.0 - disc));
}

} // namespace

EnclosingCircle enclosing_circle(const SocSet& s) {
    EnclosingCircle best;
    best.radius = std::numeric_limits<double>::infinity();
    bool found = false;

    std::vector<SocRow> halfplanes;
    for (const auto& row : s.rows) {
        if (frobenius(row) <= 1e-12) {
            if (row.c.norm() > 1e-12) halfplanes.push_back(row);
            continue;
        }
        if (row.c.norm() <= 1e-12) {
            // ||Bx + b|| <= d: affine image of a disk
            double sigma = smallest_singular_value(row);
            if (sigma <= 1e-14 || row.d <= 0) continue;
            double det = row.B[0][0] * row.B[1][1] - row.B[0][1] * row.B[1][0];
            if (std::abs(det) <= 1e-14) continue;
            // center solves B x = -b
            Point center{(row.B[1][1] * (-row.b.x) - row.B[0][1] * (-row.b.y)) / det,
                         (-row.B[1][0] * (-row.b.x) + row.B[0][0] * (-row.b.y)) / det};
            double radius = row.d / sigma;
            if (radius < best.radius) {
                best = {center, radius};
                found = true;
            }
        }
    }

    // half-plane rows alone bound the set when their normals positively span
    // the plane; the vertex hull of the induced polytope then encloses it
    if (halfplanes.size() >= 3) {
        std::vector<double> angles;
        for (const auto& hp : halfplanes) angles.push_back(std::atan2(hp.c.y, hp.c.x));
        std::sort(angles.begin(), angles.end());
        double max_gap = 0.0;
        for (std::size_t i = 0; i < angles.size(); ++i) {
            double next = (i + 1 < angles.size()) ? angles[i + 1]
                                                  : angles[0] + 2.0 * M_PI;
            max_gap = std::max(max_gap, next - angles[i]);
        }
        if (max_gap < M_PI - 1e-9) {
            std::vector<Point> verts;
            int m = static_cast<int>(halfplanes.size());
            for (int i = 0; i < m; ++i) {
                for (int j = i + 1; j < m; ++j) {
                    const auto& hi = halfplanes[i];
                    const auto& hj = halfplanes[j];
                    double det = hi.c.x * hj.c.y - hi.c.y * hj.c.x;
                    if (std::abs(det) <= 1e-12) continue;
                    // vertex solves c_i.v = -d_i, c_j.v = -d_j
                    Point v{((-hi.d) * hj.c.y - (-hj.d) * hi.c.y) / det,
                            (hi.c.x * (-hj.d) - hj.c.x * (-hi.d)) / det};
                    bool ok = true;
                    for (const auto& hk : halfplanes)
                        if (hk.c.dot(v) + hk.d < -1e-7 * (1.0 + v.norm())) ok = false;
                    if (ok) verts.push_back(v);
                }
            }
            if (!verts.empty()) {
                Point c{0, 0};
                for (const auto& v : verts) c = c + v;
                c = c / static_cast<double>(verts.size());
                double r = 0.0;
                for (const auto& v : verts) r = std::max(r, dist(c, v));
                if (r < best.radius) {
                    best = {c, r};
                    found = true;
                }
            }
        }
    }

    if (!found)
        throw ValidationError("conic set has no recognizable bounding structure (need a norm "
                              "row or bounding half-planes)");
    return best;
}

EnclosingCircle enclosing_circle(const Element& e) {
    return std::visit(
        [&](const auto& shape) -> EnclosingCircle {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return {shape.center, shape.radius};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return {shape.center, std::max(shape.rx, shape.ry)};
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                Point c = polygon_centroid(shape);
                double r = 0.0;
                for (const auto& v : shape.vertices) r = std::max(r, dist(c, v));
                return {c, r};
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                std::vector<EnclosingCircle> circles;
                for (const auto& member : shape.members)
                    circles.push_back(enclosing_circle(member));
                Point c{0, 0};
                for (const auto& ec : circles) c = c + ec.center;
                c = c / static_cast<double>(circles.size());
                double r = 0.0;
                for (const auto& ec : circles)
                    r = std::max(r, dist(c, ec.center) + ec.radius);
                return {c, r};
            } else {
                Point c{0, 0};
                for (const auto& v : shape.breakpoints) c = c + v;
                c = c / static_cast<double>(shape.breakpoints.size());
                double r = 0.0;
                for (const auto& v : shape.breakpoints) r = std::max(r, dist(c, v));
                return {c, r};
            }
        },
        e.shape);
}

// ---------------------------------------------------------------------------
// pairwise minimum distance
// ---------------------------------------------------------------------------

namespace {

// Convex fragment of an element: circles, ellipses and polygons stand alone,
// unions split into members, chains into segments.
struct Piece {
    enum Kind { kCircle, kEllipse, kPolygon, kSegment, kSoc } kind;
    Circle circle{};
    Ellipse ellipse{};
    const ConvexPolygon* poly = nullptr;
    Point s1, s2;
    const SocSet* soc = nullptr;

    Point anchor() const {
        switch (kind) {
            case kCircle: return circle.center;
            case kEllipse: return ellipse.center;
            case kPolygon: return polygon_centroid(*poly);
            case kSegment: return (s1 + s2) * 0.5;
            case kSoc: return project_socset(*soc, enclosing_circle(*soc).center);
        }
        return {};
    }

    Point project(Point p) const {
        switch (kind) {
            case kCircle: {
                Point d = p - circle.center;
                double n = d.norm();
                if (n <= circle.radius) return p;
                return circle.center + d * (circle.radius / n);
            }
            case kEllipse: return project_ellipse(ellipse, p);
            case kPolygon: return project_polygon(*poly, p);
            case kSegment: return closest_point_on_segment(s1, s2, p);
            case kSoc: return project_socset(*soc, p);
        }
        return p;
    }
};

std::vector<Piece> decompose(const Element& e) {
    std::vector<Piece> out;
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                Piece p;
                p.kind = Piece::kCircle;
                p.circle = shape;
                out.push_back(p);
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                Piece p;
                p.kind = Piece::kEllipse;
                p.ellipse = shape;
                out.push_back(p);
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                Piece p;
                p.kind = Piece::kPolygon;
                p.poly = &shape;
                out.push_back(p);
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                for (const auto& member : shape.members) {
                    Piece p;
                    p.kind = Piece::kSoc;
                    p.soc = &member;
                    out.push_back(p);
                }
            } else {
                for (std::size_t i = 0; i + 1 < shape.breakpoints.size(); ++i) {
                    Piece p;
                    p.kind = Piece::kSegment;
                    p.s1 = shape.breakpoints[i];
                    p.s2 = shape.breakpoints[i + 1];
                    out.push_back(p);
                }
            }
        },
        e.shape);
    return out;
}

MinDistResult circle_circle_distance(const Circle& a, const Circle& b) {
    Point delta = b.center - a.center;
    double d = delta.norm();
    if (d <= a.radius + b.radius) {
        if (d <= kTiny) return {0.0, a.center, a.center};
        Point dir = delta / d;
        double lo = std::max(d - b.radius, 0.0);
        double hi = std::min(a.radius, d + b.radius);
        Point q = a.center + dir * (0.5 * (lo + hi));
        return {0.0, q, q};
    }
    Point dir = delta / d;
    return {d - a.radius - b.radius, a.center + dir * a.radius, b.center - dir * b.radius};
}

// distance from circle a to any piece via the center's projection onto b
MinDistResult circle_piece_distance(const Circle& a, const Piece& b) {
    Point q = b.project(a.center);
    double t = dist(q, a.center);
    if (t <= a.radius) return {0.0, q, q};
    Point pa = a.center + (q - a.center) * (a.radius / t);
    return {t - a.radius, pa, q};
}

MinDistResult polygon_polygon_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
    for (const auto& v : a.vertices)
        if (point_in_convex_polygon(b, v, 0.0)) return {0.0, v, v};
    for (const auto& v : b.vertices)
        if (point_in_convex_polygon(a, v, 0.0)) return {0.0, v, v};
    MinDistResult best{std::numeric_limits<double>::infinity(), {}, {}};
    int na = static_cast<int>(a.vertices.size());
    int nb = static_cast<int>(b.vertices.size());
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nb; ++j) {
            auto r = segment_segment_distance(a.vertices[i], a.vertices[(i + 1) % na],
                                              b.vertices[j], b.vertices[(j + 1) % nb]);
            if (r.dist < best.dist) best = r;
        }
    return best;
}

MinDistResult polygon_segment_distance(const ConvexPolygon& a, Point s1, Point s2) {
    if (point_in_convex_polygon(a, s1, 0.0)) return {0.0, s1, s1};
    if (point_in_convex_polygon(a, s2, 0.0)) return {0.0, s2, s2};
    MinDistResult best{std::numeric_limits<double>::infinity(), {}, {}};
    int na = static_cast<int>(a.vertices.size());
    for (int i = 0; i < na; ++i) {
        auto r = segment_segment_distance(a.vertices[i], a.vertices[(i + 1) % na], s1, s2);
        if (r.dist < best.dist) best = r;
    }
    return best;
}

MinDistResult swap_result(MinDistResult r) { return {r.dist, r.pb, r.pa}; }

MinDistResult alternating_projection(const Piece& a, const Piece& b, double tol) {
    Point y = b.anchor();
    Point x = a.project(y);
    y = b.project(x);
    double move_tol = tol / 10.0;
    for (int iter = 0; iter < 20000; ++iter) {
        Point x2 = a.project(y);
        Point y2 = b.project(x2);
        double move = std::max(dist(x2, x), dist(y2, y));
        x = x2;
        y = y2;
        if (move <= move_tol) break;
    }
    return {dist(x, y), x, y};
}

MinDistResult piece_distance(const Piece& a, const Piece& b, double tol) {
    using K = Piece::Kind;
    if (a.kind == K::kCircle && b.kind == K::kCircle)
        return circle_circle_distance(a.circle, b.circle);
    if (a.kind == K::kCircle) return circle_piece_distance(a.circle, b);
    if (b.kind == K::kCircle) return swap_result(circle_piece_distance(b.circle, a));
    if (a.kind == K::kPolygon && b.kind == K::kPolygon)
        return polygon_polygon_distance(*a.poly, *b.poly);
    if (a.kind == K::kPolygon && b.kind == K::kSegment)
        return polygon_segment_distance(*a.poly, b.s1, b.s2);
    if (a.kind == K::kSegment && b.kind == K::kPolygon)
        return swap_result(polygon_segment_distance(*b.poly, a.s1, a.s2));
    if (a.kind == K::kSegment && b.kind == K::kSegment)
        return segment_segment_distance(a.s1, a.s2, b.s1, b.s2);
    return alternating_projection(a, b, tol);
}

} // namespace

MinDistResult min_distance(const Element& a, const Element& b, double tol) {
    auto pa = decompose(a);
    auto pb = decompose(b);
    MinDistResult best{std::numeric_limits<double>::infinity(), {}, {}};
    for (const auto& x : pa) {
        for (const auto& y : pb) {
            auto r = piece_distance(x, y, tol);
            if (r.dist < best.dist) best = r;
            if (best.dist == 0.0) return best;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// maximum-distance and diameter bounds
// ---------------------------------------------------------------------------

namespace {

// For bound purposes every element is either a vertex cloud (polygons,
// chains: the bound over vertices is exact) or a collection of enclosing
// circles (round and generic conic shapes).
struct BoundShape {
    std::vector<Point> verts;               // nonempty for polygon/chain
    std::vector<EnclosingCircle> circles;   // nonempty otherwise
};

BoundShape bound_shape(const Element& e) {
    BoundShape out;
    std::visit(
        [&](const auto& shape) {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, ConvexPolygon>) {
                out.verts = shape.vertices;
            } else if constexpr (std::is_same_v<T, Chain>) {
                out.verts = shape.breakpoints;
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                for (const auto& member : shape.members)
                    out.circles.push_back(enclosing_circle(member));
            } else {
                out.circles.push_back(enclosing_circle(e));
            }
        },
        e.shape);
    return out;
}

} // namespace

double max_distance_bound(const Element& a, const Element& b) {
    BoundShape sa = bound_shape(a);
    BoundShape sb = bound_shape(b);
    double best = 0.0;
    if (!sa.verts.empty() && !sb.verts.empty()) {
        for (const auto& u : sa.verts)
            for (const auto& v : sb.verts) best = std::max(best, dist(u, v));
        return best;
    }
    if (!sa.verts.empty()) {
        for (const auto& u : sa.verts)
            for (const auto& c : sb.circles) best = std::max(best, dist(u, c.center) + c.radius);
        return best;
    }
    if (!sb.verts.empty()) {
        for (const auto& v : sb.verts)
            for (const auto& c : sa.circles) best = std::max(best, dist(v, c.center) + c.radius);
        return best;
    }
    for (const auto& ca : sa.circles)
        for (const auto& cb : sb.circles)
            best = std::max(best, dist(ca.center, cb.center) + ca.radius + cb.radius);
    return best;
}

double diameter_bound(const Element& e) {
    return std::visit(
        [&](const auto& shape) -> double {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return 2.0 * shape.radius;
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                return 2.0 * std::max(shape.rx, shape.ry);
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                double best = 0.0;
                for (std::size_t i = 0; i < shape.vertices.size(); ++i)
                    for (std::size_t j = i + 1; j < shape.vertices.size(); ++j)
                        best = std::max(best, dist(shape.vertices[i], shape.vertices[j]));
                return best;
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                std::vector<EnclosingCircle> circles;
                for (const auto& member : shape.members)
                    circles.push_back(enclosing_circle(member));
                double best = 0.0;
                for (std::size_t i = 0; i < circles.size(); ++i)
                    for (std::size_t j = i; j < circles.size(); ++j)
                        best = std::max(best, dist(circles[i].center, circles[j].center) +
                                                  circles[i].radius + circles[j].radius);
                return best;
            } else {
                return shape.length();
            }
        },
        e.shape);
}

// ---------------------------------------------------------------------------
// containment
// ---------------------------------------------------------------------------

namespace {

// max over theta of f(theta): coarse scan plus golden-section refinement
// around the best samples. f must be smooth and 2*pi periodic.
template <typename F>
double periodic_max(F f, int samples) {
    double best = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    double step = 2.0 * M_PI / samples;
    std::vector<double> vals(samples);
    for (int i = 0; i < samples; ++i) {
        vals[i] = f(i * step);
        if (vals[i] > best) {
            best = vals[i];
            best_i = i;
        }
    }
    // refine around every local max to avoid missing a nearby basin
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int i = 0; i < samples; ++i) {
        double prev = vals[(i + samples - 1) % samples];
        double next = vals[(i + 1) % samples];
        if (vals[i] < prev || vals[i] < next) continue;
        if (vals[i] < best - 1e-3 * (1.0 + std::abs(best)) && i != best_i) continue;
        double lo = (i - 1) * step, hi = (i + 1) * step;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f(x1);
            }
        }
        best = std::max({best, f1, f2});
    }
    return best;
}

Point ellipse_boundary_point(const Ellipse& e, double theta) {
    return ellipse_from_frame(e, {e.rx * std::cos(theta), e.ry * std::sin(theta)});
}

double ellipse_support(const Ellipse& e, Point dir) {
    Point d = rotate(dir, -e.rotation);
    return dir.dot(e.center) + std::hypot(e.rx * d.x, e.ry * d.y);
}

} // namespace

bool element_contains_element(const Element& outer, const Element& inner, double tol) {
    if (!outer.is_convex() || !inner.is_convex()) return false;

    const Circle* oc = std::get_if<Circle>(&outer.shape);
    const ConvexPolygon* op = std::get_if<ConvexPolygon>(&outer.shape);
    const Circle* ic = std::get_if<Circle>(&inner.shape);
    const Ellipse* ie = std::get_if<Ellipse>(&inner.shape);
    const ConvexPolygon* ip = std::get_if<ConvexPolygon>(&inner.shape);

    if (oc && ic) return dist(oc->center, ic->center) + ic->radius <= oc->radius + tol;

    if (op) { // exact via support functions against each half-plane
        SocSet rows = to_soc(outer);
        for (const auto& row : rows.rows) {
            Point n = Point{0, 0} - row.c; // outward unit normal, offset row.d = n.a
            double h = row.d;
            double support;
            if (ic)
                support = n.dot(ic->center) + ic->radius;
            else if (ie)
                support = ellipse_support(*ie, n);
            else {
                support = -std::numeric_limits<double>::infinity();
                for (const auto& v : ip->vertices) support = std::max(support, n.dot(v));
            }
            if (support > h + tol) return false;
        }
        return true;
    }

    if (ip) { // vertices of a convex polygon certify containment
        for (const auto& v : ip->vertices)
            if (distance_to(outer, v) > tol) return false;
        return true;
    }

    // round inner shape against a round outer shape: scan the inner boundary
    auto boundary_excess = [&](double theta) {
        Point p = ic ? ic->center + Point{ic->radius * std::cos(theta),
                                          ic->radius * std::sin(theta)}
                     : ellipse_boundary_point(*ie, theta);
        return distance_to(outer, p);
    };
    return periodic_max(boundary_excess, 720) <= tol;
}

} // namespace xppn
