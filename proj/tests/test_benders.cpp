#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "xppn/benders.hpp"
#include "xppn/rng.hpp"
#include "xppn/touring.hpp"

using namespace xppn;

namespace {

Instance circles(std::vector<Circle> cs) {
    Instance inst;
    inst.name = "test";
    for (const auto& c : cs) {
        Element e;
        e.shape = c;
        inst.elements.push_back(e);
    }
    return inst;
}

std::vector<Tour> all_canonical_tours(int n) {
    std::vector<int> rest;
    for (int v = 1; v < n; ++v) rest.push_back(v);
    std::vector<Tour> out;
    do {
        if (n >= 3 && rest.front() > rest.back()) continue;
        std::vector<int> order = {0};
        order.insert(order.end(), rest.begin(), rest.end());
        out.push_back(Tour(order));
    } while (std::next_permutation(rest.begin(), rest.end()));
    return out;
}

} // namespace

TEST_CASE("cuts evaluate to their source cost on their own tour") {
    Instance inst = generate(6, 2, 1, 3);
    BendersResult res = benders_solve(inst, 1e-4);
    for (const auto& cut : res.cuts) {
        if (!cut.has_source) continue;
        CHECK(cut_value(cut, cut.source) == doctest::Approx(cut.source_cost).epsilon(1e-9));
    }
}

TEST_CASE("cut value expands to the formula on disjoint tours") {
    Instance inst = circles({{{0, 0}, 1}, {{30, 0}, 1}, {{30, 30}, 1}, {{0, 30}, 1}});
    BoundsTable bounds = compute_bounds(inst);
    Tour source = Tour(std::vector<int>{0, 1, 2, 3});
    TourSolution sub = solve_fixed_tour(inst, source);
    BendersResult res = benders_solve(inst, 1e-4);
    // rebuild the formula by hand for an alternative tour
    Tour other = Tour(std::vector<int>{0, 2, 1, 3});
    for (const auto& cut : res.cuts) {
        if (!cut.has_source || !(cut.source == source)) continue;
        double expected = cut.source_cost;
        auto edge_set = [&](const Tour& t, int v, int w) {
            for (auto [a, b] : t.edges())
                if ((a == v && b == w) || (a == w && b == v)) return true;
            return false;
        };
        for (auto [v, w] : source.edges())
            if (!edge_set(other, v, w)) expected -= bounds.M(v, w);
        for (auto [v, w] : other.edges())
            if (!edge_set(source, v, w)) expected += bounds.m(v, w);
        CHECK(cut_value(cut, other) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("every cut underestimates the true subproblem cost") {
    for (std::uint64_t seed : {1, 2}) {
        Instance inst = generate(6, 2, 1, seed);
        BendersResult res = benders_solve(inst, 1e-4);
        auto tours = all_canonical_tours(6);
        // 100 deterministic sample tours
        Xoshiro256ss rng(seed);
        for (int s = 0; s < 100; ++s) {
            const Tour& t = tours[rng.uniform_int(0, static_cast<int>(tours.size()) - 1)];
            double true_cost = solve_fixed_tour(inst, t).cost;
            for (const auto& cut : res.cuts)
                CHECK(cut_value(cut, t) <= true_cost + 1e-6);
        }
    }
}

TEST_CASE("master with only the base cut solves a TSP over the set distances") {
    Instance inst = generate(6, 1, 1, 11);
    BoundsTable bounds = compute_bounds(inst);
    std::vector<BendersCut> cuts;
    BendersCut base;
    base.n = 6;
    base.coef.assign(36, 0.0);
    for (int v = 0; v < 6; ++v)
        for (int w = 0; w < 6; ++w)
            if (v != w) base.coef[edge_index(6, v, w)] = bounds.m(v, w);
    cuts.push_back(base);
    BendersConfig cfg;
    MasterResult master = master_solve(cuts, inst, bounds, cfg);

    double best = 1e300;
    Tour best_tour = Tour::identity(6);
    for (const auto& t : all_canonical_tours(6)) {
        double val = 0.0;
        for (auto [v, w] : t.edges()) val += bounds.m(v, w);
        if (val < best - 1e-15) {
            best = val;
            best_tour = t;
        }
    }
    CHECK(master.value == doctest::Approx(best).epsilon(1e-12));
    CHECK(master.tour == best_tour);
}

TEST_CASE("master min-max agrees with explicit enumeration") {
    Instance inst = generate(6, 2, 1, 19);
    BoundsTable bounds = compute_bounds(inst);
    // six synthetic cuts from random tours
    auto tours = all_canonical_tours(6);
    Xoshiro256ss rng(4);
    std::vector<BendersCut> cuts;
    for (int k = 0; k < 6; ++k) {
        const Tour& t = tours[rng.uniform_int(0, static_cast<int>(tours.size()) - 1)];
        TourSolution sub = solve_fixed_tour(inst, t);
        BendersCut cut;
        cut.n = 6;
        cut.coef.assign(36, 0.0);
        for (int v = 0; v < 6; ++v)
            for (int w = 0; w < 6; ++w)
                if (v != w) cut.coef[edge_index(6, v, w)] = bounds.m(v, w);
        double on = 0.0;
        for (auto [v, w] : t.edges()) {
            cut.coef[edge_index(6, v, w)] = bounds.M(v, w);
            cut.coef[edge_index(6, w, v)] = bounds.M(v, w);
            on += bounds.M(v, w);
        }
        cut.base = sub.cost - on;
        cut.has_source = true;
        cut.source = t;
        cut.source_cost = sub.cost;
        cuts.push_back(cut);
    }
    BendersConfig cfg;
    MasterResult master = master_solve(cuts, inst, bounds, cfg);

    double best = 1e300;
    for (const auto& t : all_canonical_tours(6)) {
        double val = -1e300;
        for (const auto& cut : cuts) val = std::max(val, cut_value(cut, t));
        best = std::min(best, val);
    }
    CHECK(master.value == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("three distant circles solve to the shrunk triangle") {
    std::vector<Circle> cs = {{{0, 0}, 1}, {{40, 0}, 2}, {{20, 35}, 1.5}};
    Instance inst = circles(cs);
    BendersResult res = benders_solve(inst, 1e-4);
    CHECK(res.status == SolveStatus::optimal);
    double ref = oracle::three_circle_exhaustive(cs, 720);
    CHECK(res.upper_bound == doctest::Approx(ref).epsilon(1e-3));
}

TEST_CASE("common intersection closes immediately at zero") {
    Instance inst =
        circles({{{0, 0}, 5}, {{1, 0}, 5}, {{0, 1}, 5}, {{1, 1}, 5}, {{0.5, 0.5}, 5}});
    BendersResult res = benders_solve(inst, 1e-4);
    CHECK(res.status == SolveStatus::optimal);
    CHECK(res.upper_bound <= 1e-4);
    CHECK(res.iterations <= 2);
}

TEST_CASE("point-degenerate circles reproduce the exact TSP value") {
    Xoshiro256ss rng(31);
    std::vector<Point> pts;
    std::vector<Circle> cs;
    for (int i = 0; i < 8; ++i) {
        Point p{rng.uniform(0, 100), rng.uniform(0, 100)};
        pts.push_back(p);
        cs.push_back({p, 1e-12});
    }
    BendersResult res = benders_solve(circles(cs), 1e-6);
    CHECK(res.upper_bound == doctest::Approx(oracle::held_karp(pts)).epsilon(1e-9));
    CHECK(std::abs(res.upper_bound - oracle::held_karp(pts)) < 1e-6);
}

TEST_CASE("bound traces are monotone and the gap closes") {
    for (std::uint64_t seed : {2, 3, 4}) {
        Instance inst = generate(6, 2, 1, seed);
        BendersResult res = benders_solve(inst, 1e-4);
        CHECK(res.status == SolveStatus::optimal);
        CHECK(res.lower_bound <= res.upper_bound + 1e-9);
        for (std::size_t i = 1; i < res.log.size(); ++i) {
            CHECK(res.log[i].lb >= res.log[i - 1].lb - 1e-12);
            CHECK(res.log[i].ub <= res.log[i - 1].ub + 1e-12);
        }
        CHECK(res.best.cost == res.upper_bound);
        // one cut per distinct tour, plus the base cut
        std::size_t canonical = all_canonical_tours(6).size();
        CHECK(res.cuts.size() <= canonical + 1);
    }
}

TEST_CASE("time limit returns the warm-started incumbent") {
    Instance inst = generate(8, 3, 1, 5);
    BendersConfig cfg;
    cfg.time_limit_s = 0.0;
    BendersResult res = benders_solve(inst, 1e-4, cfg);
    CHECK(res.status == SolveStatus::time_limit);
    CHECK(res.best.cost < 1e300);
    HeuristicConfig hcfg;
    hcfg.seed = cfg.heuristic.seed;
    CHECK(res.upper_bound == doctest::Approx(heuristic_solve(inst, hcfg).cost));
}

TEST_CASE("the size cap is enforced") {
    Instance inst = generate(17, 1, 1, 1);
    CHECK_THROWS_AS(benders_solve(inst, 1e-4), std::invalid_argument);
}

TEST_CASE("run log formatting") {
    Instance inst = generate(5, 1, 1, 2);
    BendersResult res = benders_solve(inst, 1e-4);
    std::string log = format_run_log(res);
    CHECK(log.find(", ") != std::string::npos);
    int lines = 0;
    for (char ch : log)
        if (ch == '\n') ++lines;
    CHECK(lines == static_cast<int>(res.log.size()));
}

TEST_CASE("approximate subproblems flag the run and keep bounds honest") {
    Instance inst = generate(5, 2, 3, 6); // all chains
    BendersConfig cfg;
    cfg.heuristic.subproblem.combo_cap = 2; // force the blockwise fallback
    cfg.max_iterations = 30;
    BendersResult res = benders_solve(inst, 1e-4, cfg);
    CHECK(res.heuristic_cuts);
    CHECK(res.lower_bound <= res.upper_bound + 1e-9);
    // the incumbent is still a feasible solution
    for (int v = 0; v < inst.size(); ++v) {
        CHECK(distance_to(inst.elements[v], res.best.entry[v]) <= 1e-6);
        CHECK(distance_to(inst.elements[v], res.best.exit[v]) <= 1e-6);
    }
    // exact run can only match or improve the approximate incumbent
    BendersResult exact = benders_solve(inst, 1e-4);
    CHECK_FALSE(exact.heuristic_cuts);
    CHECK(exact.upper_bound <= res.upper_bound + 1e-6);
}

TEST_CASE("two elements solve through the single canonical tour") {
    Instance inst = circles({{{0, 0}, 1}, {{9, 0}, 2}});
    BendersResult res = benders_solve(inst, 1e-6);
    CHECK(res.status == SolveStatus::optimal);
    CHECK(res.upper_bound == doctest::Approx(12.0).epsilon(1e-6)); // 2 * (9 - 1 - 2)
    CHECK(res.best.tour.order() == std::vector<int>{0, 1});
}
