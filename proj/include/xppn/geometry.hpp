#pragma once

#include <array>
#include <cmath>
#include <variant>
#include <vector>

namespace xppn {

struct Point {
    double x = 0.0;
    double y = 0.0;

    Point() = default;
    Point(double px, double py) : x(px), y(py) {}

    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
    Point operator/(double s) const { return {x / s, y / s}; }
    bool operator==(const Point& o) const { return x == o.x && y == o.y; }

    double dot(const Point& o) const { return x * o.x + y * o.y; }
    double cross(const Point& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm2() const { return x * x + y * y; }
};

inline Point operator*(double s, const Point& p) { return p * s; }
inline double dist(const Point& a, const Point& b) { return (a - b).norm(); }

// One conic row  ||B x + b|| <= c.x + d.  B == 0 gives a half-plane,
// c == 0 a norm ball (disk / ellipse region).
struct SocRow {
    std::array<std::array<double, 2>, 2> B{{{0, 0}, {0, 0}}};
    Point b{0, 0};
    Point c{0, 0};
    double d = 0.0;
};

// Intersection of conic rows; must describe a bounded set with nonempty
// interior.
struct SocSet {
    std::vector<SocRow> rows;
};

struct Circle {
    Point center;
    double radius = 0.0;
};

struct Ellipse {
    Point center;
    double rx = 0.0; // semi-axis along the rotated x direction
    double ry = 0.0;
    double rotation = 0.0; // radians, counter-clockwise
};

struct ConvexPolygon {
    std::vector<Point> vertices; // counter-clockwise
};

struct UnionSoc {
    std::vector<SocSet> members;
};

struct Chain {
    std::vector<Point> breakpoints; // A^1 .. A^{n+1}

    int segments() const { return static_cast<int>(breakpoints.size()) - 1; }
    double length() const;
};

using Shape = std::variant<Circle, Ellipse, ConvexPolygon, UnionSoc, Chain>;

// A visitable element of the problem: a convex region (or union of convex
// regions) or a polygonal chain, plus the inner-travel discount factor and,
// for chains, the required coverage fraction.
struct Element {
    Shape shape;
    double discount = 1.0; // f_v >= 0
    double coverage = 0.0; // alpha_v in [0,1], chains only

    bool is_chain() const { return std::holds_alternative<Chain>(shape); }
    bool is_union() const { return std::holds_alternative<UnionSoc>(shape); }
    bool is_convex() const { return !is_chain() && !is_union(); }
    const char* kind_name() const;
};

struct MinDistResult {
    double dist = 0.0;
    Point pa;
    Point pb;
};

struct EnclosingCircle {
    Point center;
    double radius = 0.0;
};

// --- membership / projection -------------------------------------------

// Euclidean distance from p to the element's point set (0 inside).
double distance_to(const Element& e, Point p);

// True iff p lies within Euclidean distance tol of the element.
bool contains(const Element& e, Point p, double tol);

// Closest point of the element to p (p itself when inside). Ties across
// union members or chain segments break toward the lowest index.
Point project(const Element& e, Point p);

// Point at parameter lambda in [0, n] along the chain; lambda = (j-1)+gamma
// addresses fraction gamma of segment j.
Point chain_point_at(const Chain& chain, double lambda);

// Parameter of the closest chain point to p (lowest segment on ties).
double chain_lambda_of(const Chain& chain, Point p);

// Distance from p to the boundary of the element (chains are their own
// boundary).
double distance_to_boundary(const Element& e, Point p);

// --- pairwise distances ---------------------------------------------------

// Minimum distance between two elements with points attaining it.
// Closed-form for circle/polygon/segment combinations; alternating
// projections otherwise. Overlapping sets return 0 with a common point.
MinDistResult min_distance(const Element& a, const Element& b, double tol);

// Upper bound on the maximum distance between points of a and b. Exact for
// circle pairs and for polygon/chain pairs; enclosing-circle based otherwise.
double max_distance_bound(const Element& a, const Element& b);

// Upper bound on the distance between two points of the same element.
// Exact for circles, polygons and chains.
double diameter_bound(const Element& e);

// True iff inner lies entirely within outer (tol slack). Only convex
// elements participate; chains and unions yield false.
bool element_contains_element(const Element& outer, const Element& inner, double tol);

// --- conversions ------------------------------------------------------------

// Conic representation of a circle / ellipse / convex polygon.
// Throws ValidationError for chains and unions.
SocSet to_soc(const Element& e);

// A circle certified to contain the set.
EnclosingCircle enclosing_circle(const SocSet& s);
EnclosingCircle enclosing_circle(const Element& e);

// --- low-level primitives (shared with the solvers and tests) -------------

Point closest_point_on_segment(Point a, Point b, Point p);
MinDistResult segment_segment_distance(Point a1, Point a2, Point b1, Point b2);
bool point_in_convex_polygon(const ConvexPolygon& poly, Point p, double tol);
Point project_polygon(const ConvexPolygon& poly, Point p);
Point project_ellipse(const Ellipse& e, Point p);
// Closest point on the ellipse boundary (valid for interior points too).
Point ellipse_boundary_project(const Ellipse& e, Point p);
bool socset_contains(const SocSet& s, Point p, double tol);
Point project_socset(const SocSet& s, Point p);

} // namespace xppn
