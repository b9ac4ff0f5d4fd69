#include "xppn/heuristic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "xppn/rng.hpp"

namespace xppn {

namespace {

// geometric median by Weiszfeld iteration; points coinciding with the
// iterate are handled with the Vardi-Zhang correction step
Point geometric_median(const std::vector<Point>& pts, Point start, double tol) {
    Point y = start;
    for (int it = 0; it < 500; ++it) {
        double sum_inv = 0.0;
        Point t{0, 0};
        Point r{0, 0};
        int eta = 0;
        for (const auto& p : pts) {
            double d = dist(p, y);
            if (d <= 1e-12) {
                ++eta;
                continue;
            }
            sum_inv += 1.0 / d;
            t = t + p / d;
            r = r + (p - y) / d;
        }
        Point next;
        if (eta == 0) {
            next = t / sum_inv;
        } else {
            double rn = r.norm();
            if (rn <= static_cast<double>(eta)) return y; // y is the median
            Point tt = t / sum_inv;
            double beta = static_cast<double>(eta) / rn;
            next = tt * (1.0 - beta) + y * beta;
        }
        if (dist(next, y) < tol * 0.1) return next;
        y = next;
    }
    return y;
}

} // namespace

WeberResult weber_cluster(const Instance& inst, const HeuristicConfig& cfg) {
    const int n = inst.size();
    WeberResult res;
    res.reps.resize(n);

    Point c{0, 0};
    for (const auto& e : inst.elements) c = c + enclosing_circle(e).center;
    c = c / static_cast<double>(n);

    double prev_obj = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.weber_max_iters; ++it) {
        for (int v = 0; v < n; ++v) res.reps[v] = project(inst.elements[v], c);
        Point next;
        if (n == 2)
            next = (res.reps[0] + res.reps[1]) * 0.5; // any point between the two is a median
        else
            next = geometric_median(res.reps, c, cfg.weber_tol);
        double obj = 0.0;
        for (const auto& r : res.reps) obj += dist(r, next);
        if (obj <= prev_obj) {
            res.outer_history.push_back(obj);
            prev_obj = obj;
        } else {
            break; // numerically stalled
        }
        double moved = dist(next, c);
        c = next;
        if (moved < cfg.weber_tol) break;
    }
    res.center = c;
    for (int v = 0; v < n; ++v) res.reps[v] = project(inst.elements[v], c);
    res.objective = 0.0;
    for (const auto& r : res.reps) res.objective += dist(r, c);
    return res;
}

double tour_length(const std::vector<Point>& points, const Tour& tour) {
    double total = 0.0;
    for (auto [v, w] : tour.edges()) total += dist(points[v], points[w]);
    return total;
}

namespace {

double order_length(const std::vector<Point>& pts, const std::vector<int>& order) {
    double total = 0.0;
    int n = static_cast<int>(order.size());
    for (int k = 0; k < n; ++k) total += dist(pts[order[k]], pts[order[(k + 1) % n]]);
    return total;
}

std::vector<int> nearest_neighbor_order(const std::vector<Point>& pts) {
    int n = static_cast<int>(pts.size());
    std::vector<int> order = {0};
    std::vector<char> used(n, 0);
    used[0] = 1;
    for (int step = 1; step < n; ++step) {
        int last = order.back();
        int pick = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int v = 0; v < n; ++v) {
            if (used[v]) continue;
            double d = dist(pts[last], pts[v]);
            if (d < best - 1e-15) {
                best = d;
                pick = v;
            }
        }
        used[pick] = 1;
        order.push_back(pick);
    }
    return order;
}

// full 2-opt to a local optimum (best improvement per pass)
void two_opt(const std::vector<Point>& pts, std::vector<int>& order) {
    int n = static_cast<int>(order.size());
    bool improved = true;
    while (improved) {
        improved = false;
        double best_delta = -1e-12;
        int best_i = -1, best_j = -1;
        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                int a = order[(i - 1 + n) % n], b = order[i];
                int c = order[j], d = order[(j + 1) % n];
                double delta = dist(pts[a], pts[c]) + dist(pts[b], pts[d]) -
                               dist(pts[a], pts[b]) - dist(pts[c], pts[d]);
                if (delta < best_delta) {
                    best_delta = delta;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (best_i >= 0) {
            std::reverse(order.begin() + best_i, order.begin() + best_j + 1);
            improved = true;
        }
    }
}

} // namespace

Tour vns_tour(const std::vector<Point>& points, const HeuristicConfig& cfg) {
    const int n = static_cast<int>(points.size());
    if (n < 3) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        return Tour(order);
    }

    Xoshiro256ss rng(cfg.seed);
    std::vector<int> best = nearest_neighbor_order(points);
    two_opt(points, best);
    double best_len = order_length(points, best);

    int attempts = 0;
    for (int iter = 0; iter < cfg.vns_iterations && attempts < cfg.vns_attempts; ++iter) {
        int k = 1;
        while (k <= cfg.vns_neighborhood_size && attempts < cfg.vns_attempts) {
            std::vector<int> cand = best;
            for (int rev = 0; rev < k; ++rev) {
                int a = rng.uniform_int(0, n - 1);
                int b = rng.uniform_int(0, n - 1);
                if (a > b) std::swap(a, b);
                if (a < b) std::reverse(cand.begin() + a, cand.begin() + b + 1);
            }
            two_opt(points, cand);
            ++attempts;
            double len = order_length(points, cand);
            if (len < best_len - 1e-12) {
                best = cand;
                best_len = len;
                k = 1;
            } else {
                ++k;
            }
        }
    }
    return Tour(best);
}

TourSolution heuristic_solve(const Instance& inst, const HeuristicConfig& cfg) {
    WeberResult weber = weber_cluster(inst, cfg);
    Tour tour = vns_tour(weber.reps, cfg);

    SubproblemConfig sub = cfg.subproblem;
    sub.seed = cfg.seed;
    TourSolution refined = solve_fixed_tour(inst, tour, sub);

    // feasible completion of the representative points (chains must honor
    // their coverage requirement); refinement should never lose to it
    std::vector<Point> entry(inst.size()), exit(inst.size());
    for (int v = 0; v < inst.size(); ++v) {
        const Element& e = inst.elements[v];
        entry[v] = weber.reps[v];
        exit[v] = weber.reps[v];
        if (const Chain* c = std::get_if<Chain>(&e.shape)) {
            double nseg = c->segments();
            double an = e.coverage * nseg;
            double l1 = chain_lambda_of(*c, weber.reps[v]);
            if (l1 > nseg - an && l1 < an)
                l1 = (l1 - (nseg - an) < an - l1) ? std::max(0.0, nseg - an)
                                                  : std::min(an, nseg);
            double l2 = (l1 + an <= nseg) ? l1 + an : l1 - an;
            l1 = std::clamp(l1, 0.0, nseg);
            l2 = std::clamp(l2, 0.0, nseg);
            entry[v] = chain_point_at(*c, l1);
            exit[v] = chain_point_at(*c, l2);
        }
    }
    TourSolution assembled = evaluate(inst, tour, entry, exit);
    if (assembled.cost < refined.cost) return assembled;
    return refined;
}

} // namespace xppn
