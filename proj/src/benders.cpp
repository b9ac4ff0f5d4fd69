#include "xppn/benders.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "xppn/common.hpp"
#include "xppn/touring.hpp"

namespace xppn {

double cut_value(const BendersCut& cut, const Tour& tour) {
    double total = cut.base;
    for (auto [v, w] : tour.edges()) total += cut.edge(v, w);
    return total;
}

namespace {

BendersCut make_cut(const BoundsTable& bounds, const Tour& tour, double subproblem_cost) {
    const int n = bounds.n;
    BendersCut cut;
    cut.n = n;
    cut.coef.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (v != w) cut.coef[edge_index(n, v, w)] = bounds.m(v, w);
    double on_tour = 0.0;
    for (auto [v, w] : tour.edges()) {
        cut.coef[edge_index(n, v, w)] = bounds.M(v, w);
        cut.coef[edge_index(n, w, v)] = bounds.M(v, w);
        on_tour += bounds.M(v, w);
    }
    cut.base = subproblem_cost - on_tour;
    cut.has_source = true;
    cut.source = tour;
    cut.source_cost = subproblem_cost;
    return cut;
}

BendersCut make_base_cut(const BoundsTable& bounds) {
    const int n = bounds.n;
    BendersCut cut;
    cut.n = n;
    cut.coef.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (v != w) cut.coef[edge_index(n, v, w)] = bounds.m(v, w);
    cut.base = 0.0;
    cut.has_source = false;
    return cut;
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

MasterResult master_solve(const std::vector<BendersCut>& cuts, const Instance& inst,
                          const BoundsTable& bounds, const BendersConfig& cfg) {
    (void)bounds;
    const int n = inst.size();
    if (cuts.empty()) throw std::invalid_argument("master needs at least one cut");
    if (n > cfg.size_cap)
        throw std::invalid_argument("instance size exceeds the master search cap (" +
                                    std::to_string(cfg.size_cap) + ")");
    if (n == 1) {
        Tour t = Tour::identity(1);
        double val = 0.0;
        for (const auto& c : cuts) val = std::max(val, c.base);
        return {t, val};
    }

    const int nc = static_cast<int>(cuts.size());
    std::vector<double> min_coef(nc, std::numeric_limits<double>::infinity());
    for (int c = 0; c < nc; ++c)
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w)
                if (v != w) min_coef[c] = std::min(min_coef[c], cuts[c].edge(v, w));

    std::vector<int> order = {0};
    std::vector<char> used(n, 0);
    used[0] = 1;
    std::vector<double> partial(nc);
    for (int c = 0; c < nc; ++c) partial[c] = cuts[c].base;

    double best_val = std::numeric_limits<double>::infinity();
    std::vector<int> best_order;

    // depth-first over partial paths; per-cut partial value plus an
    // optimistic completion (remaining edge count times the cut's cheapest
    // edge) bounds the final max from below
    auto dfs = [&](auto&& self, int depth) -> void {
        if (depth == n) {
            if (n >= 3 && order[1] > order[n - 1]) return; // canonical direction only
            double val = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < nc; ++c)
                val = std::max(val, partial[c] + cuts[c].edge(order[n - 1], 0));
            if (val < best_val - 1e-15) {
                best_val = val;
                best_order = order;
            }
            return;
        }
        int last = order.back();
        for (int v = 1; v < n; ++v) {
            if (used[v]) continue;
            int remaining = n - depth; // edges still to add, closing one included
            double bound = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < nc; ++c)
                bound = std::max(bound, partial[c] + cuts[c].edge(last, v) +
                                            (remaining - 1) * min_coef[c]);
            if (bound >= best_val - 1e-15) continue;
            used[v] = 1;
            order.push_back(v);
            for (int c = 0; c < nc; ++c) partial[c] += cuts[c].edge(last, v);
            self(self, depth + 1);
            for (int c = 0; c < nc; ++c) partial[c] -= cuts[c].edge(last, v);
            order.pop_back();
            used[v] = 0;
        }
    };
    dfs(dfs, 1);

    return {Tour(best_order), best_val};
}

BendersResult benders_solve(const Instance& inst, double eps, const BendersConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const int n = inst.size();
    if (n > cfg.size_cap)
        throw std::invalid_argument("instance size exceeds the master search cap (" +
                                    std::to_string(cfg.size_cap) + ")");

    BendersResult res;

    if (n == 1) {
        SubproblemConfig sub = cfg.heuristic.subproblem;
        sub.seed = cfg.heuristic.seed;
        res.best = solve_fixed_tour(inst, Tour::identity(1), sub);
        res.lower_bound = res.upper_bound = res.best.cost;
        res.status = SolveStatus::optimal;
        res.wall_time_s = elapsed_seconds(t0);
        return res;
    }

    BoundsTable bounds = compute_bounds(inst);

    // warm start: heuristic solution seeds the incumbent, its tour the first cut
    TourSolution heur = heuristic_solve(inst, cfg.heuristic);
    SubproblemConfig sub = cfg.heuristic.subproblem;
    sub.seed = cfg.heuristic.seed;
    TourSolution first = solve_fixed_tour(inst, heur.tour, sub);
    res.best = (heur.cost < first.cost) ? heur : first;
    double ub = res.best.cost;
    double lb = 0.0;
    if (eps < 0.0) eps = 1e-4 * (1.0 + ub);

    res.cuts.push_back(make_base_cut(bounds));
    double first_cost = first.cost;
    if (first.approximate) {
        res.heuristic_cuts = true;
        first_cost -= cfg.safety_rel * (1.0 + std::abs(first_cost));
    }
    res.cuts.push_back(make_cut(bounds, heur.tour, first_cost));

    std::set<std::vector<int>> seen;
    seen.insert(heur.tour.order());

    res.status = SolveStatus::gap_limit;
    for (int iter = 1; iter <= cfg.max_iterations; ++iter) {
        if (elapsed_seconds(t0) > cfg.time_limit_s) {
            res.status = SolveStatus::time_limit;
            break;
        }
        MasterResult master = master_solve(res.cuts, inst, bounds, cfg);
        if (master.value > lb) lb = master.value;
        lb = std::min(lb, ub); // the master is a relaxation; float noise only
        res.iterations = iter;
        res.log.push_back({iter, lb, ub, ub - lb, master.tour,
                           static_cast<int>(res.cuts.size()), elapsed_seconds(t0)});
        if (ub - lb <= eps) {
            res.status = SolveStatus::optimal;
            break;
        }
        if (seen.count(master.tour.order())) {
            // the cut for this tour did not close the gap (margin cuts);
            // continuing would repeat the same master solution
            res.status = SolveStatus::gap_limit;
            break;
        }
        TourSolution sol = solve_fixed_tour(inst, master.tour, sub);
        if (sol.cost < ub) {
            ub = sol.cost;
            res.best = sol;
        }
        double cost = sol.cost;
        if (sol.approximate) {
            res.heuristic_cuts = true;
            cost -= cfg.safety_rel * (1.0 + std::abs(cost));
        }
        res.cuts.push_back(make_cut(bounds, master.tour, cost));
        seen.insert(master.tour.order());
    }

    res.lower_bound = lb;
    res.upper_bound = ub;
    res.wall_time_s = elapsed_seconds(t0);
    return res;
}

std::string format_run_log(const BendersResult& result) {
    std::ostringstream out;
    for (const auto& row : result.log) {
        out << row.iter << ", " << format_real(row.lb) << ", " << format_real(row.ub) << ", "
            << format_real(row.gap) << ", ";
        const auto& order = row.tour.order();
        for (std::size_t i = 0; i < order.size(); ++i) out << (i ? "-" : "") << order[i];
        out << ", " << row.cut_count << ", " << format_real(row.elapsed_s) << "\n";
    }
    return out.str();
}

} // namespace xppn
