#include "xppn/touring.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "xppn/bounds.hpp"
#include "xppn/common.hpp"
#include "xppn/rng.hpp"

namespace xppn {

namespace {

constexpr double kSmooth2 = 1e-18; // epsilon^2 under the root, regularizes ||.|| at 0

double snorm(Point d) { return std::sqrt(d.norm2() + kSmooth2); }

// ---------------------------------------------------------------------------
// small projected-gradient solver with Armijo backtracking
// (blocks have one or two coupled 2-d variables)
// ---------------------------------------------------------------------------

template <typename Obj, typename Grad, typename Proj>
void pg_minimize(std::vector<Point>& vars, Obj obj, Grad grad, Proj proj, int max_iters,
                 double move_tol) {
    double t = 0.01; // grows on acceptance; small start spares backtracking
    double fx = obj(vars);
    std::vector<Point> cand(vars.size());
    for (int it = 0; it < max_iters; ++it) {
        auto g = grad(vars);
        bool accepted = false;
        double fc = fx;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t i = 0; i < vars.size(); ++i) cand[i] = vars[i] - g[i] * t;
            proj(cand);
            fc = obj(cand);
            double decr = 0.0;
            for (std::size_t i = 0; i < vars.size(); ++i) decr += g[i].dot(vars[i] - cand[i]);
            if (fc <= fx - 1e-4 * decr && fc <= fx + 1e-15) {
                accepted = true;
                break;
            }
            t *= 0.5;
            if (t < 1e-14) break;
        }
        if (!accepted) break;
        double move = 0.0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            move = std::max(move, dist(cand[i], vars[i]));
        vars = cand;
        fx = fc;
        t = std::min(t * 2.0, 256.0);
        if (move <= move_tol) break;
    }
}

// ---------------------------------------------------------------------------
// restriction regions for chains, in (lambda_entry, lambda_exit) space
// ---------------------------------------------------------------------------

std::vector<Point> clip_by_halfplane(const std::vector<Point>& poly, double sx, double sy,
                                     double rhs) {
    // keep points with sx*x + sy*y >= rhs
    std::vector<Point> out;
    int n = static_cast<int>(poly.size());
    for (int i = 0; i < n; ++i) {
        Point a = poly[i], b = poly[(i + 1) % n];
        double ga = sx * a.x + sy * a.y - rhs;
        double gb = sx * b.x + sy * b.y - rhs;
        if (ga >= 0) out.push_back(a);
        if ((ga > 0 && gb < 0) || (ga < 0 && gb > 0)) {
            double t = ga / (ga - gb);
            out.push_back(a + (b - a) * t);
        }
    }
    std::vector<Point> dedup;
    for (const auto& p : out) {
        bool dup = false;
        for (const auto& q : dedup)
            if (dist(p, q) < 1e-12) dup = true;
        if (!dup) dedup.push_back(p);
    }
    return dedup;
}

Point project_region(const std::vector<Point>& region, Point p) {
    if (region.size() == 1) return region[0];
    if (region.size() == 2) return closest_point_on_segment(region[0], region[1], p);
    double area2 = 0.0;
    int n = static_cast<int>(region.size());
    for (int i = 0; i < n; ++i) area2 += region[i].cross(region[(i + 1) % n]);
    if (std::abs(area2) < 1e-15) {
        Point best = region[0];
        double best_d = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            Point q = closest_point_on_segment(region[i], region[(i + 1) % n], p);
            double d = dist(q, p);
            if (d < best_d) {
                best_d = d;
                best = q;
            }
        }
        return best;
    }
    ConvexPolygon poly{region};
    return project_polygon(poly, p);
}

// ---------------------------------------------------------------------------
// combinatorial restrictions: a chain chooses (entry segment, exit segment,
// coverage direction); a union chooses (entry member, exit member). Fixing
// one option per element makes the whole fixed-tour problem convex.
// ---------------------------------------------------------------------------

struct Option {
    int a = 0;      // entry segment (1-based) or member (0-based)
    int b = 0;      // exit segment or member
    int branch = 0; // chains: +1 keeps le - lx >= alpha*n, -1 the opposite, 0 free
    std::vector<Point> region; // chains only
};

struct ComboBlock {
    int elem = -1;
    bool is_chain = false;
    const Chain* chain = nullptr;
    double alpha_n = 0.0;
    const UnionSoc* uni = nullptr;
    std::vector<Option> options;
    std::vector<Element> pieces; // per-segment / per-member sub-elements
};

ComboBlock make_chain_block(int elem, const Element& e) {
    ComboBlock blk;
    blk.elem = elem;
    blk.is_chain = true;
    blk.chain = &std::get<Chain>(e.shape);
    int n = blk.chain->segments();
    blk.alpha_n = e.coverage * n;
    bool free_branch = blk.alpha_n <= 1e-12;
    for (int ie = 1; ie <= n; ++ie) {
        for (int ix = 1; ix <= n; ++ix) {
            std::vector<Point> box = {
                {double(ie - 1), double(ix - 1)},
                {double(ie), double(ix - 1)},
                {double(ie), double(ix)},
                {double(ie - 1), double(ix)},
            };
            if (free_branch) {
                blk.options.push_back({ie, ix, 0, box});
                continue;
            }
            for (int branch : {+1, -1}) {
                auto region = branch > 0 ? clip_by_halfplane(box, 1, -1, blk.alpha_n)
                                         : clip_by_halfplane(box, -1, 1, blk.alpha_n);
                if (!region.empty()) blk.options.push_back({ie, ix, branch, region});
            }
        }
    }
    for (int s = 0; s < n; ++s) {
        Element piece;
        piece.shape = Chain{{blk.chain->breakpoints[s], blk.chain->breakpoints[s + 1]}};
        blk.pieces.push_back(std::move(piece));
    }
    return blk;
}

ComboBlock make_union_block(int elem, const Element& e) {
    ComboBlock blk;
    blk.elem = elem;
    blk.uni = &std::get<UnionSoc>(e.shape);
    int m = static_cast<int>(blk.uni->members.size());
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) blk.options.push_back({a, b, 0, {}});
    for (int j = 0; j < m; ++j) {
        Element piece;
        piece.shape = UnionSoc{{blk.uni->members[j]}};
        blk.pieces.push_back(std::move(piece));
    }
    return blk;
}

// ---------------------------------------------------------------------------
// solver state
// ---------------------------------------------------------------------------

struct State {
    std::vector<Point> entry, exit;
    std::vector<std::array<double, 2>> lambda;
    std::vector<int> option; // chosen option per element (-1 elsewhere)
};

struct Context {
    const Instance* inst = nullptr;
    Tour tour;
    std::vector<int> order;
    std::vector<bool> collapsed;
    std::vector<const ComboBlock*> block_of;
    SubproblemConfig cfg;
};

double true_cost(const Context& ctx, const State& s) {
    double total = 0.0;
    const int n = static_cast<int>(ctx.order.size());
    if (n >= 2)
        for (int k = 0; k < n; ++k)
            total += dist(s.exit[ctx.order[k]], s.entry[ctx.order[(k + 1) % n]]);
    for (int v = 0; v < ctx.inst->size(); ++v)
        total += ctx.inst->elements[v].discount * dist(s.entry[v], s.exit[v]);
    return total;
}

Point chain_point(const Chain& c, int seg, double lam) {
    double g = lam - double(seg - 1);
    return c.breakpoints[seg - 1] * (1.0 - g) + c.breakpoints[seg] * g;
}

// per-element minimization with fixed neighbors A (previous exit) and B
// (next entry); the element's option stays as selected in the state
void solve_block(const Context& ctx, State& s, int v, Point A, Point B) {
    const Element& e = ctx.inst->elements[v];
    const double f = e.discount;
    const double move_tol = 1e-9 * (1.0 + A.norm() + B.norm());

    if (ctx.block_of[v] == nullptr) {
        if (ctx.collapsed[v]) {
            std::vector<Point> vars = {s.entry[v]};
            pg_minimize(
                vars,
                [&](const std::vector<Point>& x) { return snorm(x[0] - A) + snorm(B - x[0]); },
                [&](const std::vector<Point>& x) {
                    Point g = (x[0] - A) / snorm(x[0] - A) + (x[0] - B) / snorm(B - x[0]);
                    return std::vector<Point>{g};
                },
                [&](std::vector<Point>& x) { x[0] = project(e, x[0]); }, 150, move_tol);
            s.entry[v] = s.exit[v] = vars[0];
        } else {
            std::vector<Point> vars = {s.entry[v], s.exit[v]};
            pg_minimize(
                vars,
                [&](const std::vector<Point>& x) {
                    return snorm(x[0] - A) + f * snorm(x[1] - x[0]) + snorm(B - x[1]);
                },
                [&](const std::vector<Point>& x) {
                    Point inner = (x[1] - x[0]) / snorm(x[1] - x[0]);
                    return std::vector<Point>{(x[0] - A) / snorm(x[0] - A) - inner * f,
                                              inner * f + (x[1] - B) / snorm(B - x[1])};
                },
                [&](std::vector<Point>& x) {
                    x[0] = project(e, x[0]);
                    x[1] = project(e, x[1]);
                },
                150, move_tol);
            s.entry[v] = vars[0];
            s.exit[v] = vars[1];
        }
        return;
    }

    const ComboBlock& blk = *ctx.block_of[v];
    const Option& opt = blk.options[s.option[v]];
    if (blk.is_chain) {
        const Chain& c = *blk.chain;
        std::vector<Point> vars = {
            project_region(opt.region, Point{s.lambda[v][0], s.lambda[v][1]})};
        Point de = c.breakpoints[opt.a] - c.breakpoints[opt.a - 1];
        Point dx = c.breakpoints[opt.b] - c.breakpoints[opt.b - 1];
        auto pe = [&](Point lam) { return chain_point(c, opt.a, lam.x); };
        auto px = [&](Point lam) { return chain_point(c, opt.b, lam.y); };
        pg_minimize(
            vars,
            [&](const std::vector<Point>& x) {
                Point E = pe(x[0]), X = px(x[0]);
                return snorm(E - A) + f * snorm(X - E) + snorm(B - X);
            },
            [&](const std::vector<Point>& x) {
                Point E = pe(x[0]), X = px(x[0]);
                Point gE = (E - A) / snorm(E - A) - (X - E) / snorm(X - E) * f;
                Point gX = (X - E) / snorm(X - E) * f + (X - B) / snorm(B - X);
                return std::vector<Point>{{de.dot(gE), dx.dot(gX)}};
            },
            [&](std::vector<Point>& x) { x[0] = project_region(opt.region, x[0]); }, 100,
            1e-9 * (1.0 + c.length()));
        s.lambda[v] = {vars[0].x, vars[0].y};
        s.entry[v] = pe(vars[0]);
        s.exit[v] = px(vars[0]);
    } else {
        const SocSet& ma = blk.uni->members[opt.a];
        const SocSet& mb = blk.uni->members[opt.b];
        if (opt.a == opt.b && f >= 1.0) {
            std::vector<Point> vars = {project_socset(ma, s.entry[v])};
            pg_minimize(
                vars,
                [&](const std::vector<Point>& x) { return snorm(x[0] - A) + snorm(B - x[0]); },
                [&](const std::vector<Point>& x) {
                    Point g = (x[0] - A) / snorm(x[0] - A) + (x[0] - B) / snorm(B - x[0]);
                    return std::vector<Point>{g};
                },
                [&](std::vector<Point>& x) { x[0] = project_socset(ma, x[0]); }, 80, move_tol);
            s.entry[v] = s.exit[v] = vars[0];
        } else {
            std::vector<Point> vars = {project_socset(ma, s.entry[v]),
                                       project_socset(mb, s.exit[v])};
            pg_minimize(
                vars,
                [&](const std::vector<Point>& x) {
                    return snorm(x[0] - A) + f * snorm(x[1] - x[0]) + snorm(B - x[1]);
                },
                [&](const std::vector<Point>& x) {
                    Point inner = (x[1] - x[0]) / snorm(x[1] - x[0]);
                    return std::vector<Point>{(x[0] - A) / snorm(x[0] - A) - inner * f,
                                              inner * f + (x[1] - B) / snorm(B - x[1])};
                },
                [&](std::vector<Point>& x) {
                    x[0] = project_socset(ma, x[0]);
                    x[1] = project_socset(mb, x[1]);
                },
                80, move_tol);
            s.entry[v] = vars[0];
            s.exit[v] = vars[1];
        }
    }
}

// exact block step for a restricted element: solve every option, keep the
// best; never worse than the incoming assignment
void solve_block_free(const Context& ctx, State& s, int v, Point A, Point B) {
    const ComboBlock& blk = *ctx.block_of[v];
    const double f = ctx.inst->elements[v].discount;
    State trial = s;
    double best = std::numeric_limits<double>::infinity();
    State best_state = s;
    for (int o = 0; o < static_cast<int>(blk.options.size()); ++o) {
        trial.entry[v] = s.entry[v];
        trial.exit[v] = s.exit[v];
        trial.lambda[v] = s.lambda[v];
        trial.option[v] = o;
        solve_block(ctx, trial, v, A, B);
        double val = snorm(trial.entry[v] - A) + f * snorm(trial.exit[v] - trial.entry[v]) +
                     snorm(B - trial.exit[v]);
        if (val < best - 1e-15) {
            best = val;
            best_state = trial;
        }
    }
    s.entry[v] = best_state.entry[v];
    s.exit[v] = best_state.exit[v];
    s.lambda[v] = best_state.lambda[v];
    s.option[v] = best_state.option[v];
}

void sweep(const Context& ctx, State& s, bool free_options) {
    const int n = static_cast<int>(ctx.order.size());
    for (int k = 0; k < n; ++k) {
        int v = ctx.order[k];
        Point A = s.exit[ctx.order[(k - 1 + n) % n]];
        Point B = s.entry[ctx.order[(k + 1) % n]];
        if (ctx.block_of[v] && free_options)
            solve_block_free(ctx, s, v, A, B);
        else
            solve_block(ctx, s, v, A, B);
    }
}

std::vector<double> descend(const Context& ctx, State& s, bool free_options,
                            double tol = -1.0) {
    if (tol < 0.0) tol = ctx.cfg.tol;
    std::vector<double> history;
    double prev = true_cost(ctx, s);
    history.push_back(prev);
    for (int it = 0; it < ctx.cfg.max_sweeps; ++it) {
        sweep(ctx, s, free_options);
        double cost = true_cost(ctx, s);
        if (cost > prev + 1e-9 * (1.0 + std::abs(prev)))
            throw std::logic_error("tour refinement increased the cost within a sweep");
        history.push_back(cost);
        if (prev - cost < tol * (1.0 + std::abs(cost))) break;
        prev = cost;
    }
    return history;
}

// ---------------------------------------------------------------------------
// starts
// ---------------------------------------------------------------------------

Point random_point_in(const Element& e, Xoshiro256ss& rng) {
    return std::visit(
        [&](const auto& shape) -> Point {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, Circle>) {
                double r = shape.radius * std::sqrt(rng.next_double());
                double t = rng.uniform(0, 2.0 * M_PI);
                return shape.center + Point{r * std::cos(t), r * std::sin(t)};
            } else if constexpr (std::is_same_v<T, Ellipse>) {
                double r = std::sqrt(rng.next_double());
                double t = rng.uniform(0, 2.0 * M_PI);
                Point u{shape.rx * r * std::cos(t), shape.ry * r * std::sin(t)};
                double cs = std::cos(shape.rotation), sn = std::sin(shape.rotation);
                return shape.center + Point{cs * u.x - sn * u.y, sn * u.x + cs * u.y};
            } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
                for (const auto& v : shape.vertices) {
                    xmin = std::min(xmin, v.x);
                    xmax = std::max(xmax, v.x);
                    ymin = std::min(ymin, v.y);
                    ymax = std::max(ymax, v.y);
                }
                for (int t = 0; t < 64; ++t) {
                    Point p{rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
                    if (point_in_convex_polygon(shape, p, 0.0)) return p;
                }
                return project_polygon(shape, {rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)});
            } else if constexpr (std::is_same_v<T, UnionSoc>) {
                int m = rng.uniform_int(0, static_cast<int>(shape.members.size()) - 1);
                auto circ = enclosing_circle(shape.members[m]);
                for (int t = 0; t < 64; ++t) {
                    double r = circ.radius * std::sqrt(rng.next_double());
                    double th = rng.uniform(0, 2.0 * M_PI);
                    Point p = circ.center + Point{r * std::cos(th), r * std::sin(th)};
                    if (socset_contains(shape.members[m], p, 0.0)) return p;
                }
                return project_socset(shape.members[m], circ.center);
            } else {
                double lam = rng.uniform(0, static_cast<double>(shape.segments()));
                return chain_point_at(shape, lam);
            }
        },
        e.shape);
}

State make_state(const Context& ctx) {
    State s;
    const int n = ctx.inst->size();
    s.entry.resize(n);
    s.exit.resize(n);
    s.lambda.assign(n, {0.0, 0.0});
    s.option.assign(n, -1);
    return s;
}

// align the chosen option with the current lambdas / points
void sync_options(const Context& ctx, State& s) {
    for (int v = 0; v < ctx.inst->size(); ++v) {
        const ComboBlock* blk = ctx.block_of[v];
        if (!blk) continue;
        if (blk->is_chain) {
            Point lam{s.lambda[v][0], s.lambda[v][1]};
            double best = std::numeric_limits<double>::infinity();
            for (int o = 0; o < static_cast<int>(blk->options.size()); ++o) {
                Point q = project_region(blk->options[o].region, lam);
                double d = dist(q, lam);
                if (d < best - 1e-15) {
                    best = d;
                    s.option[v] = o;
                }
            }
        } else {
            double best_e = std::numeric_limits<double>::infinity();
            double best_x = std::numeric_limits<double>::infinity();
            int me = 0, mx = 0;
            for (int j = 0; j < static_cast<int>(blk->uni->members.size()); ++j) {
                double de = dist(project_socset(blk->uni->members[j], s.entry[v]), s.entry[v]);
                double dx = dist(project_socset(blk->uni->members[j], s.exit[v]), s.exit[v]);
                if (de < best_e - 1e-15) {
                    best_e = de;
                    me = j;
                }
                if (dx < best_x - 1e-15) {
                    best_x = dx;
                    mx = j;
                }
            }
            for (int o = 0; o < static_cast<int>(blk->options.size()); ++o)
                if (blk->options[o].a == me && blk->options[o].b == mx) s.option[v] = o;
        }
    }
}

// deterministic start: set anchors for convex elements, a coverage-feasible
// endpoint pair for chains
void informed_start(const Context& ctx, State& s) {
    for (int v = 0; v < ctx.inst->size(); ++v) {
        const Element& e = ctx.inst->elements[v];
        if (const Chain* c = std::get_if<Chain>(&e.shape)) {
            double an = e.coverage * c->segments();
            s.lambda[v] = {0.0, an};
            s.entry[v] = chain_point_at(*c, 0.0);
            s.exit[v] = chain_point_at(*c, an);
        } else {
            Point anchor = project(e, enclosing_circle(e).center);
            s.entry[v] = s.exit[v] = anchor;
        }
    }
    sync_options(ctx, s);
}

void random_start(const Context& ctx, State& s, Xoshiro256ss& rng) {
    for (int v = 0; v < ctx.inst->size(); ++v) {
        const Element& e = ctx.inst->elements[v];
        if (const Chain* c = std::get_if<Chain>(&e.shape)) {
            int nseg = c->segments();
            double an = e.coverage * nseg;
            double le = rng.uniform(0, nseg);
            // an entry parameter admits an exit partner only when one side
            // leaves at least alpha*n of parameter room
            if (le > nseg - an && le < an)
                le = (le - (nseg - an) < an - le) ? std::max(0.0, nseg - an)
                                                  : std::min(an, double(nseg));
            double lx = (le + an <= nseg) ? rng.uniform(le + an, nseg)
                                          : rng.uniform(0, le - an);
            le = std::clamp(le, 0.0, double(nseg));
            lx = std::clamp(lx, 0.0, double(nseg));
            s.lambda[v] = {le, lx};
            s.entry[v] = chain_point_at(*c, le);
            s.exit[v] = chain_point_at(*c, lx);
        } else {
            s.entry[v] = random_point_in(e, rng);
            s.exit[v] = ctx.collapsed[v] ? s.entry[v] : random_point_in(e, rng);
        }
    }
    sync_options(ctx, s);
}

TourSolution state_to_solution(const Context& ctx, const State& s, std::vector<double> history,
                               bool approximate) {
    TourSolution sol;
    sol.tour = ctx.tour;
    sol.entry = s.entry;
    sol.exit = s.exit;
    sol.lambda = s.lambda;
    sol.approximate = approximate;
    sol.sweep_costs = std::move(history);
    sol.in_costs.resize(ctx.inst->size());
    double total = 0.0;
    for (int v = 0; v < ctx.inst->size(); ++v) {
        sol.in_costs[v] = ctx.inst->elements[v].discount * dist(s.entry[v], s.exit[v]);
        total += sol.in_costs[v];
    }
    for (auto [v, w] : ctx.tour.edges()) {
        double d = dist(s.exit[v], s.entry[w]);
        sol.out_costs.push_back(d);
        total += d;
    }
    sol.cost = total;
    return sol;
}

bool state_less(const State& a, const State& b) {
    for (std::size_t i = 0; i < a.entry.size(); ++i) {
        if (a.entry[i].x != b.entry[i].x) return a.entry[i].x < b.entry[i].x;
        if (a.entry[i].y != b.entry[i].y) return a.entry[i].y < b.entry[i].y;
        if (a.exit[i].x != b.exit[i].x) return a.exit[i].x < b.exit[i].x;
        if (a.exit[i].y != b.exit[i].y) return a.exit[i].y < b.exit[i].y;
    }
    return false;
}

// cost-neutral move of an interior collapsed point to the element boundary:
// when the point sits on the straight segment between its neighbors, the
// boundary crossing of that segment costs the same
void slide_to_boundary(const Context& ctx, State& s) {
    const int n = static_cast<int>(ctx.order.size());
    if (n < 2) return;
    for (int k = 0; k < n; ++k) {
        int v = ctx.order[k];
        if (!ctx.collapsed[v]) continue;
        const Element& e = ctx.inst->elements[v];
        Point p = s.entry[v];
        if (distance_to_boundary(e, p) <= 1e-9) continue;
        Point A = s.exit[ctx.order[(k - 1 + n) % n]];
        Point B = s.entry[ctx.order[(k + 1) % n]];
        double ab = dist(A, B);
        if (ab <= 1e-12) continue;
        if (std::abs(dist(A, p) + dist(p, B) - ab) > 1e-7 * (1.0 + ab)) continue;
        auto inside = [&](double t) { return distance_to(e, A + (B - A) * t) <= 1e-12; };
        double tp = std::clamp((p - A).dot(B - A) / (B - A).norm2(), 0.0, 1.0);
        double lo, hi;
        if (!inside(0.0)) {
            lo = 0.0;
            hi = tp;
        } else if (!inside(1.0)) {
            lo = 1.0;
            hi = tp;
        } else {
            continue; // both neighbors inside: no cost-free boundary point exists
        }
        for (int it = 0; it < 60; ++it) {
            double mid = 0.5 * (lo + hi);
            (inside(mid) ? hi : lo) = mid;
        }
        Point q = A + (B - A) * (0.5 * (lo + hi));
        s.entry[v] = s.exit[v] = project(e, q);
    }
}

} // namespace

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

TourSolution evaluate(const Instance& inst, const Tour& tour, const std::vector<Point>& entry,
                      const std::vector<Point>& exit) {
    const int n = inst.size();
    if (static_cast<int>(entry.size()) != n || static_cast<int>(exit.size()) != n)
        throw std::invalid_argument("point vectors must match the instance size");
    if (tour.size() != n) throw std::invalid_argument("tour must cover all elements");
    for (int v = 0; v < n; ++v) {
        if (distance_to(inst.elements[v], entry[v]) > 1e-6)
            throw ValidationError("entry point of element " + std::to_string(v) +
                                  " lies outside its element");
        if (distance_to(inst.elements[v], exit[v]) > 1e-6)
            throw ValidationError("exit point of element " + std::to_string(v) +
                                  " lies outside its element");
    }
    TourSolution sol;
    sol.tour = tour;
    sol.entry = entry;
    sol.exit = exit;
    sol.lambda.assign(n, {0.0, 0.0});
    sol.in_costs.resize(n);
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
        if (const Chain* c = std::get_if<Chain>(&inst.elements[v].shape))
            sol.lambda[v] = {chain_lambda_of(*c, entry[v]), chain_lambda_of(*c, exit[v])};
        sol.in_costs[v] = inst.elements[v].discount * dist(entry[v], exit[v]);
        total += sol.in_costs[v];
    }
    for (auto [v, w] : tour.edges()) {
        double d = dist(exit[v], entry[w]);
        sol.out_costs.push_back(d);
        total += d;
    }
    sol.cost = total;
    return sol;
}

TourSolution solve_fixed_tour(const Instance& inst, const Tour& tour,
                              const SubproblemConfig& cfg) {
    const int n = inst.size();
    if (tour.size() != n) throw std::invalid_argument("tour must cover all elements");

    Context ctx;
    ctx.inst = &inst;
    ctx.tour = tour;
    ctx.order = tour.order();
    ctx.cfg = cfg;
    auto hints = collapse_entry_exit(inst);
    ctx.collapsed.assign(hints.begin(), hints.end());

    std::vector<ComboBlock> blocks;
    blocks.reserve(n);
    ctx.block_of.assign(n, nullptr);
    for (int v = 0; v < n; ++v) {
        if (inst.elements[v].is_chain())
            blocks.push_back(make_chain_block(v, inst.elements[v]));
        else if (inst.elements[v].is_union())
            blocks.push_back(make_union_block(v, inst.elements[v]));
    }
    for (const auto& blk : blocks) ctx.block_of[blk.elem] = &blk;

    if (n == 1) {
        State s = make_state(ctx);
        informed_start(ctx, s);
        if (ctx.block_of[0] && ctx.block_of[0]->is_chain) {
            // only the discounted inner leg matters; minimize it per option
            const ComboBlock& blk = *ctx.block_of[0];
            const Chain& c = *blk.chain;
            double f = inst.elements[0].discount;
            double best = std::numeric_limits<double>::infinity();
            State best_s = s;
            for (int o = 0; o < static_cast<int>(blk.options.size()); ++o) {
                const Option& opt = blk.options[o];
                std::vector<Point> vars = {
                    project_region(opt.region, {s.lambda[0][0], s.lambda[0][1]})};
                Point de = c.breakpoints[opt.a] - c.breakpoints[opt.a - 1];
                Point dx = c.breakpoints[opt.b] - c.breakpoints[opt.b - 1];
                pg_minimize(
                    vars,
                    [&](const std::vector<Point>& x) {
                        return f * snorm(chain_point(c, opt.b, x[0].y) -
                                         chain_point(c, opt.a, x[0].x));
                    },
                    [&](const std::vector<Point>& x) {
                        Point E = chain_point(c, opt.a, x[0].x);
                        Point X = chain_point(c, opt.b, x[0].y);
                        Point inner = (X - E) / snorm(X - E);
                        return std::vector<Point>{
                            {de.dot(Point{0, 0} - inner * f), dx.dot(inner * f)}};
                    },
                    [&](std::vector<Point>& x) { x[0] = project_region(opt.region, x[0]); }, 100,
                    1e-9 * (1.0 + c.length()));
                double val = f * dist(chain_point(c, opt.a, vars[0].x),
                                      chain_point(c, opt.b, vars[0].y));
                if (val < best - 1e-15) {
                    best = val;
                    best_s.lambda[0] = {vars[0].x, vars[0].y};
                    best_s.entry[0] = chain_point(c, opt.a, vars[0].x);
                    best_s.exit[0] = chain_point(c, opt.b, vars[0].y);
                    best_s.option[0] = o;
                }
            }
            s = best_s;
        }
        return state_to_solution(ctx, s, {true_cost(ctx, s)}, false);
    }

    // blockwise-exact descent from several starts; for purely convex
    // instances this already solves the (convex) joint problem
    State best = make_state(ctx);
    informed_start(ctx, best);
    std::vector<double> best_hist = descend(ctx, best, true);
    double best_cost = true_cost(ctx, best);
    for (int m = 1; m < std::max(1, cfg.multistarts); ++m) {
        Xoshiro256ss rng(cfg.seed + 1000003ULL * static_cast<std::uint64_t>(m));
        State s = make_state(ctx);
        random_start(ctx, s, rng);
        auto hist = descend(ctx, s, true);
        double c = true_cost(ctx, s);
        if (c < best_cost - 1e-12 || (std::abs(c - best_cost) <= 1e-12 && state_less(s, best))) {
            best = s;
            best_cost = c;
            best_hist = hist;
        }
    }

    bool approximate = false;
    if (!blocks.empty()) {
        // exact pass over the restriction choices: depth-first over the
        // restricted elements in tour order. Bounds condition every edge
        // term on the pieces fixed so far (row/column minima when only one
        // endpoint is decided); each surviving assignment is a convex
        // problem warm-started from the incumbent.
        const int total = n;
        std::vector<int> level_of(total, 0);
        std::vector<int> seq; // restricted element ids in tour order
        for (int k = 0; k < total; ++k)
            if (ctx.block_of[ctx.order[k]]) {
                seq.push_back(ctx.order[k]);
                level_of[ctx.order[k]] = static_cast<int>(seq.size());
            }
        const int levels = static_cast<int>(seq.size());

        struct EdgeTerm {
            int from = 0, to = 0;
            std::vector<std::vector<double>> table;
            std::vector<double> row_min, col_min;
            double minimum = 0.0;
        };
        std::vector<EdgeTerm> edge_terms;
        double const_base = 0.0;
        for (int k = 0; k < total; ++k) {
            int a = ctx.order[k], b = ctx.order[(k + 1) % total];
            const ComboBlock* ba = ctx.block_of[a];
            const ComboBlock* bb = ctx.block_of[b];
            if (!ba && !bb) {
                const_base += min_distance(inst.elements[a], inst.elements[b], 1e-7).dist;
                continue;
            }
            EdgeTerm term;
            term.from = a;
            term.to = b;
            std::size_t na = ba ? ba->pieces.size() : 1;
            std::size_t nb = bb ? bb->pieces.size() : 1;
            term.table.assign(na, std::vector<double>(nb, 0.0));
            term.row_min.assign(na, std::numeric_limits<double>::infinity());
            term.col_min.assign(nb, std::numeric_limits<double>::infinity());
            double mn = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < na; ++i)
                for (std::size_t j = 0; j < nb; ++j) {
                    const Element& ea = ba ? ba->pieces[i] : inst.elements[a];
                    const Element& eb = bb ? bb->pieces[j] : inst.elements[b];
                    double d = min_distance(ea, eb, 1e-7).dist;
                    term.table[i][j] = d;
                    term.row_min[i] = std::min(term.row_min[i], d);
                    term.col_min[j] = std::min(term.col_min[j], d);
                    mn = std::min(mn, d);
                }
            term.minimum = mn;
            edge_terms.push_back(std::move(term));
        }

        std::vector<std::size_t> block_index_of(total, 0);
        for (std::size_t bi = 0; bi < blocks.size(); ++bi)
            block_index_of[blocks[bi].elem] = bi;

        std::vector<std::vector<double>> inner_lb(blocks.size());
        std::vector<double> inner_min(blocks.size(), 0.0);
        for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
            const auto& blk = blocks[bi];
            double f = inst.elements[blk.elem].discount;
            double mn = std::numeric_limits<double>::infinity();
            for (const auto& opt : blk.options) {
                double d = 0.0;
                if (opt.a != opt.b) {
                    int ia = opt.a - (blk.is_chain ? 1 : 0);
                    int ib = opt.b - (blk.is_chain ? 1 : 0);
                    d = f * min_distance(blk.pieces[ia], blk.pieces[ib], 1e-7).dist;
                }
                inner_lb[bi].push_back(d);
                mn = std::min(mn, d);
            }
            inner_min[bi] = mn;
        }

        long long leaves = 0;
        bool budget_hit = false;
        std::vector<int> assign(levels, 0);

        auto entry_piece = [&](int elem) {
            const ComboBlock* blk = ctx.block_of[elem];
            const Option& o = blk->options[assign[level_of[elem] - 1]];
            return blk->is_chain ? o.a - 1 : o.a;
        };
        auto exit_piece = [&](int elem) {
            const ComboBlock* blk = ctx.block_of[elem];
            const Option& o = blk->options[assign[level_of[elem] - 1]];
            return blk->is_chain ? o.b - 1 : o.b;
        };

        // lower bound with levels 1..L assigned
        auto bound_at = [&](int L) {
            double b = const_base;
            for (const EdgeTerm& term : edge_terms) {
                bool from_known = !ctx.block_of[term.from] || level_of[term.from] <= L;
                bool to_known = !ctx.block_of[term.to] || level_of[term.to] <= L;
                int pi = (ctx.block_of[term.from] && from_known) ? exit_piece(term.from) : 0;
                int pj = (ctx.block_of[term.to] && to_known) ? entry_piece(term.to) : 0;
                if (from_known && to_known) b += term.table[pi][pj];
                else if (from_known) b += term.row_min[pi];
                else if (to_known) b += term.col_min[pj];
                else b += term.minimum;
            }
            for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
                int lv = level_of[blocks[bi].elem];
                b += (lv <= L) ? inner_lb[bi][assign[lv - 1]] : inner_min[bi];
            }
            return b;
        };

        // visit each chain's options in optimistic order: cheap inner leg and
        // cheap conditioned edge minima first
        std::vector<std::vector<int>> option_order(levels);
        for (int L = 1; L <= levels; ++L) {
            int v = seq[L - 1];
            std::size_t bi = block_index_of[v];
            const ComboBlock& blk = blocks[bi];
            std::vector<std::pair<double, int>> scored;
            for (int o = 0; o < static_cast<int>(blk.options.size()); ++o) {
                double score = inner_lb[bi][o];
                int pe = blk.is_chain ? blk.options[o].a - 1 : blk.options[o].a;
                int px = blk.is_chain ? blk.options[o].b - 1 : blk.options[o].b;
                for (const EdgeTerm& term : edge_terms) {
                    if (term.to == v) score += term.col_min[pe];
                    if (term.from == v) score += term.row_min[px];
                }
                scored.push_back({score, o});
            }
            std::sort(scored.begin(), scored.end());
            for (const auto& [score, o] : scored) option_order[L - 1].push_back(o);
        }

        State scratch = best;
        std::function<void(int)> dfs = [&](int L) {
            if (budget_hit) return;
            if (L > levels) {
                if (++leaves > cfg.combo_cap) {
                    budget_hit = true;
                    return;
                }
                scratch = best;
                for (int i = 0; i < levels; ++i) {
                    int v = seq[i];
                    scratch.option[v] = assign[i];
                    const ComboBlock& blk = *ctx.block_of[v];
                    const Option& o = blk.options[assign[i]];
                    if (blk.is_chain) {
                        Point lam = project_region(
                            o.region, {scratch.lambda[v][0], scratch.lambda[v][1]});
                        scratch.lambda[v] = {lam.x, lam.y};
                        scratch.entry[v] = chain_point(*blk.chain, o.a, lam.x);
                        scratch.exit[v] = chain_point(*blk.chain, o.b, lam.y);
                    } else {
                        scratch.entry[v] = project_socset(blk.uni->members[o.a], scratch.entry[v]);
                        scratch.exit[v] = project_socset(blk.uni->members[o.b], scratch.exit[v]);
                    }
                }
                // coarse convergence suffices to rank assignments; the
                // winner is polished afterwards
                auto hist = descend(ctx, scratch, false, std::max(ctx.cfg.tol, 1e-5));
                double c = true_cost(ctx, scratch);
                if (c < best_cost - 1e-12) {
                    best = scratch;
                    best_cost = c;
                    best_hist = hist;
                }
                return;
            }
            for (int o : option_order[L - 1]) {
                assign[L - 1] = o;
                double lb = bound_at(L);
                if (lb >= best_cost - 1e-12 * (1.0 + std::abs(best_cost))) continue;
                dfs(L + 1);
                if (budget_hit) return;
            }
        };

        dfs(1);
        auto polish = descend(ctx, best, false);
        for (std::size_t i = 1; i < polish.size(); ++i) best_hist.push_back(polish[i]);
        best_cost = true_cost(ctx, best);
        approximate = budget_hit;
    }

    slide_to_boundary(ctx, best);
    double final_cost = true_cost(ctx, best);
    if (best_hist.empty() || final_cost < best_hist.back() - 1e-12)
        best_hist.push_back(final_cost);
    return state_to_solution(ctx, best, std::move(best_hist), approximate);
}

// ---------------------------------------------------------------------------
// solution files
// ---------------------------------------------------------------------------

std::string write_solution(const TourSolution& sol, const Instance& inst) {
    std::ostringstream out;
    out << "{\n  \"tour\": [";
    const auto& order = sol.tour.order();
    for (std::size_t i = 0; i < order.size(); ++i) out << (i ? ", " : "") << order[i];
    out << "],\n  \"cost\": " << format_real(sol.cost) << ",\n";
    out << "  \"status\": \"" << (sol.approximate ? "approximate" : "exact") << "\",\n";
    out << "  \"elements\": [\n";
    for (int v = 0; v < inst.size(); ++v) {
        out << "    {\"entry\": [" << format_real(sol.entry[v].x) << ", "
            << format_real(sol.entry[v].y) << "], \"exit\": [" << format_real(sol.exit[v].x)
            << ", " << format_real(sol.exit[v].y) << "], \"lambda\": ["
            << format_real(sol.lambda[v][0]) << ", " << format_real(sol.lambda[v][1])
            << "], \"in_cost\": " << format_real(sol.in_costs[v]) << "}"
            << (v + 1 < inst.size() ? ",\n" : "\n");
    }
    out << "  ],\n  \"out_costs\": [";
    for (std::size_t i = 0; i < sol.out_costs.size(); ++i)
        out << (i ? ", " : "") << format_real(sol.out_costs[i]);
    out << "]\n}\n";
    return out.str();
}

TourSolution read_solution(const std::string& text, const Instance& inst) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(std::string("solution parse error: ") + err.what());
    }
    TourSolution sol;
    try {
        std::vector<int> order;
        for (const auto& v : doc.at("tour")) order.push_back(v.get<int>());
        if (static_cast<int>(order.size()) != inst.size())
            throw ValidationError("solution tour does not match the instance size");
        sol.tour = Tour(order);
        sol.cost = doc.at("cost").get<double>();
        sol.approximate = doc.value("status", "exact") == std::string("approximate");
        const auto& els = doc.at("elements");
        if (static_cast<int>(els.size()) != inst.size())
            throw ValidationError("solution element list does not match the instance size");
        for (const auto& ej : els) {
            sol.entry.push_back(
                {ej.at("entry")[0].get<double>(), ej.at("entry")[1].get<double>()});
            sol.exit.push_back({ej.at("exit")[0].get<double>(), ej.at("exit")[1].get<double>()});
            sol.lambda.push_back(
                {ej.at("lambda")[0].get<double>(), ej.at("lambda")[1].get<double>()});
            sol.in_costs.push_back(ej.at("in_cost").get<double>());
        }
        for (const auto& c : doc.at("out_costs")) sol.out_costs.push_back(c.get<double>());
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(std::string("solution parse error: ") + err.what());
    }
    return sol;
}

} // namespace xppn
