#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "xppn/heuristic.hpp"
#include "xppn/rng.hpp"

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

} // namespace

TEST_CASE("weber on a symmetric cross") {
    Instance inst = circles({{{10, 0}, 1}, {{-10, 0}, 1}, {{0, 10}, 1}, {{0, -10}, 1}});
    WeberResult res = weber_cluster(inst);
    CHECK(dist(res.center, {0, 0}) < 1e-5);
    CHECK(dist(res.reps[0], {9, 0}) < 1e-4);
    CHECK(dist(res.reps[1], {-9, 0}) < 1e-4);
    CHECK(dist(res.reps[2], {0, 9}) < 1e-4);
    CHECK(dist(res.reps[3], {0, -9}) < 1e-4);
    CHECK(res.objective == doctest::Approx(36.0).epsilon(1e-6));
}

TEST_CASE("weber degenerates gracefully on a single element") {
    Instance inst;
    Element e;
    e.shape = Circle{{5, 5}, 2};
    inst.elements.push_back(e);
    WeberResult res = weber_cluster(inst);
    CHECK(res.objective <= 1e-9);
    CHECK(distance_to(inst.elements[0], res.center) <= 1e-9);
}

TEST_CASE("weber with two elements lands between them") {
    Instance inst = circles({{{0, 0}, 1}, {{10, 0}, 1}});
    WeberResult res = weber_cluster(inst);
    CHECK(res.objective == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(std::abs(res.center.y) < 1e-9);
}

TEST_CASE("weber objective matches a grid search") {
    for (std::uint64_t seed : {1, 2, 3}) {
        Xoshiro256ss rng(seed);
        std::vector<Circle> cs;
        for (int i = 0; i < 3; ++i)
            cs.push_back({{rng.uniform(10, 90), rng.uniform(10, 90)}, rng.uniform(1, 6)});
        Instance inst = circles(cs);
        WeberResult res = weber_cluster(inst);
        double ref = oracle::weber_grid(cs, 0.05);
        CHECK(res.objective <= ref + 1e-3);
        CHECK(res.objective == doctest::Approx(ref).epsilon(1e-3));
    }
}

TEST_CASE("weber outer objective never increases") {
    Instance inst = generate(7, 3, 4, 17);
    WeberResult res = weber_cluster(inst);
    for (std::size_t i = 1; i < res.outer_history.size(); ++i)
        CHECK(res.outer_history[i] <= res.outer_history[i - 1] + 1e-9);
}

TEST_CASE("vns finds the square perimeter") {
    std::vector<Point> pts = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    Tour t = vns_tour(pts);
    CHECK(tour_length(pts, t) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("vns with fewer than four points is immediate") {
    std::vector<Point> two = {{0, 0}, {3, 4}};
    CHECK(tour_length(two, vns_tour(two)) == doctest::Approx(10.0));
    std::vector<Point> three = {{0, 0}, {3, 0}, {0, 4}};
    CHECK(tour_length(three, vns_tour(three)) == doctest::Approx(12.0));
}

TEST_CASE("vns stays within 5% of the exact tour") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Xoshiro256ss rng(seed);
        std::vector<Point> pts;
        for (int i = 0; i < 8; ++i) pts.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
        HeuristicConfig cfg;
        cfg.seed = seed;
        Tour t = vns_tour(pts, cfg);
        double exact = oracle::held_karp(pts);
        CHECK(tour_length(pts, t) <= 1.05 * exact + 1e-9);
    }
}

TEST_CASE("vns never loses to its nearest-neighbor start") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Xoshiro256ss rng(seed * 31);
        std::vector<Point> pts;
        for (int i = 0; i < 12; ++i) pts.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
        // greedy nearest-neighbor reference, written out independently
        std::vector<char> used(pts.size(), 0);
        std::vector<int> order = {0};
        used[0] = 1;
        while (order.size() < pts.size()) {
            int best = -1;
            double bd = 1e300;
            for (int v = 0; v < static_cast<int>(pts.size()); ++v)
                if (!used[v] && dist(pts[order.back()], pts[v]) < bd) {
                    bd = dist(pts[order.back()], pts[v]);
                    best = v;
                }
            used[best] = 1;
            order.push_back(best);
        }
        HeuristicConfig cfg;
        cfg.seed = seed;
        CHECK(tour_length(pts, vns_tour(pts, cfg)) <= tour_length(pts, Tour(order)) + 1e-9);
    }
}

TEST_CASE("heuristic solves overlapping instances to zero") {
    Instance inst = circles({{{0, 0}, 3}, {{1, 0}, 3}, {{0, 1}, 3}, {{1, 1}, 3}});
    TourSolution sol = heuristic_solve(inst);
    CHECK(sol.cost <= 1e-4);
}

TEST_CASE("point-degenerate elements reduce to the point TSP") {
    Xoshiro256ss rng(9);
    std::vector<Point> pts;
    std::vector<Circle> cs;
    for (int i = 0; i < 7; ++i) {
        Point p{rng.uniform(0, 100), rng.uniform(0, 100)};
        pts.push_back(p);
        cs.push_back({p, 1e-12});
    }
    Instance inst = circles(cs);
    HeuristicConfig cfg;
    TourSolution sol = heuristic_solve(inst, cfg);
    Tour plain = vns_tour(pts, cfg);
    CHECK(sol.cost == doctest::Approx(tour_length(pts, plain)).epsilon(1e-6));
}

TEST_CASE("refinement does not lose to the assembled representative solution") {
    for (std::uint64_t seed : {5, 6, 7}) {
        Instance inst = generate(6, 2, 4, seed);
        HeuristicConfig cfg;
        cfg.seed = seed;
        WeberResult weber = weber_cluster(inst, cfg);
        Tour tour = vns_tour(weber.reps, cfg);
        TourSolution sol = heuristic_solve(inst, cfg);
        CHECK(sol.tour.size() == inst.size());
        for (int v = 0; v < inst.size(); ++v) {
            CHECK(distance_to(inst.elements[v], sol.entry[v]) <= 1e-6);
            CHECK(distance_to(inst.elements[v], sol.exit[v]) <= 1e-6);
        }
        // convex elements admit the representatives directly; the refined
        // cost can only improve on any feasible completion of them
        SubproblemConfig sub = cfg.subproblem;
        sub.seed = cfg.seed;
        TourSolution refined = solve_fixed_tour(inst, tour, sub);
        CHECK(sol.cost <= refined.cost + 1e-9);
    }
}

TEST_CASE("heuristic is deterministic per seed") {
    Instance inst = generate(7, 2, 4, 3);
    HeuristicConfig cfg;
    cfg.seed = 123;
    TourSolution a = heuristic_solve(inst, cfg);
    TourSolution b = heuristic_solve(inst, cfg);
    CHECK(a.cost == b.cost);
    CHECK(a.tour == b.tour);
}
