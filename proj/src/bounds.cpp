#include "xppn/bounds.hpp"

#include <algorithm>

#include "xppn/common.hpp"

namespace xppn {

BoundsTable compute_bounds(const Instance& inst, double tol) {
    const int n = inst.size();
    BoundsTable t;
    t.n = n;
    t.m_out.assign(static_cast<std::size_t>(n) * n, 0.0);
    t.M_out.assign(static_cast<std::size_t>(n) * n, 0.0);
    t.M_in.resize(n);
    for (int v = 0; v < n; ++v) t.M_in[v] = diameter_bound(inst.elements[v]);
    for (int v = 0; v < n; ++v) {
        for (int w = v + 1; w < n; ++w) {
            double m = min_distance(inst.elements[v], inst.elements[w], tol).dist;
            double M = max_distance_bound(inst.elements[v], inst.elements[w]);
            t.m_out[edge_index(n, v, w)] = t.m_out[edge_index(n, w, v)] = m;
            t.M_out[edge_index(n, v, w)] = t.M_out[edge_index(n, w, v)] = M;
        }
    }
    auto hints = collapse_entry_exit(inst);
    t.collapse.assign(n, 0);
    for (int v = 0; v < n; ++v) t.collapse[v] = hints[v] ? 1 : 0;
    return t;
}

std::vector<bool> collapse_entry_exit(const Instance& inst) {
    std::vector<bool> out(inst.size());
    for (int v = 0; v < inst.size(); ++v)
        out[v] = inst.elements[v].discount >= 1.0 && inst.elements[v].is_convex();
    return out;
}

std::pair<Instance, Reduction> preprocess(const Instance& inst) {
    const int n = inst.size();
    const double tol = 1e-9;
    std::vector<char> alive(n, 1);
    Reduction red;

    while (true) {
        int del = -1, wit = -1;
        for (int i = 0; i < n && del < 0; ++i) {
            if (!alive[i]) continue;
            for (int j = 0; j < n && del < 0; ++j) {
                if (i == j || !alive[j]) continue;
                if (!element_contains_element(inst.elements[i], inst.elements[j], tol)) continue;
                if (element_contains_element(inst.elements[j], inst.elements[i], tol)) {
                    // equal sets: drop the higher index
                    del = std::max(i, j);
                    wit = std::min(i, j);
                } else {
                    del = i; // the container is redundant
                    wit = j;
                }
            }
        }
        if (del < 0) break;
        alive[del] = 0;
        red.deleted.emplace_back(del, wit);
    }

    Instance out;
    out.name = inst.name;
    out.seed = inst.seed;
    out.radii_class = inst.radii_class;
    out.mode = inst.mode;
    for (int i = 0; i < n; ++i) {
        if (alive[i]) {
            red.kept.push_back(i);
            out.elements.push_back(inst.elements[i]);
        }
    }
    return {std::move(out), std::move(red)};
}

TourSolution extend_solution(const Instance& original, const Reduction& red,
                             const TourSolution& reduced) {
    const int n = original.size();
    TourSolution out;
    out.entry.resize(n);
    out.exit.resize(n);
    out.lambda.assign(n, {0.0, 0.0});
    out.in_costs.assign(n, 0.0);
    out.approximate = reduced.approximate;
    out.sweep_costs = reduced.sweep_costs;

    std::vector<int> order;
    for (int k : reduced.tour.order()) order.push_back(red.kept[k]);
    for (std::size_t k = 0; k < red.kept.size(); ++k) {
        int orig = red.kept[k];
        out.entry[orig] = reduced.entry[k];
        out.exit[orig] = reduced.exit[k];
        out.lambda[orig] = reduced.lambda[k];
        out.in_costs[orig] = reduced.in_costs[k];
    }

    // re-insert deleted elements next to their witness, most recent first,
    // sharing the witness's exit point (zero added cost: each deleted
    // element contains its witness)
    for (auto it = red.deleted.rbegin(); it != red.deleted.rend(); ++it) {
        int del = it->first, wit = it->second;
        auto pos = std::find(order.begin(), order.end(), wit);
        Point p = out.exit[wit];
        out.entry[del] = p;
        out.exit[del] = p;
        out.in_costs[del] = 0.0;
        order.insert(pos + 1, del);
    }

    out.tour = Tour(order);
    out.out_costs.clear();
    double total = 0.0;
    for (auto [v, w] : out.tour.edges()) {
        double d = dist(out.exit[v], out.entry[w]);
        out.out_costs.push_back(d);
        total += d;
    }
    for (double c : out.in_costs) total += c;
    out.cost = total;
    return out;
}

} // namespace xppn
