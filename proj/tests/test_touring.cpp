#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "xppn/bounds.hpp"
#include "xppn/common.hpp"
#include "xppn/rng.hpp"
#include "xppn/touring.hpp"

using namespace xppn;

namespace {

Instance circles(std::vector<Circle> cs, double f = 1.0) {
    Instance inst;
    inst.name = "test";
    for (const auto& c : cs) {
        Element e;
        e.shape = c;
        e.discount = f;
        inst.elements.push_back(e);
    }
    return inst;
}

} // namespace

TEST_CASE("evaluate assembles the cost formula") {
    Instance inst = circles({{{0, 0}, 1}, {{5, 0}, 1}});
    Tour t = Tour::identity(2);

    TourSolution a = evaluate(inst, t, {{1, 0}, {4, 0}}, {{1, 0}, {4, 0}});
    CHECK(a.cost == doctest::Approx(6.0).epsilon(1e-12)); // 3 out + 3 back

    TourSolution b = evaluate(inst, t, {{-1, 0}, {4, 0}}, {{1, 0}, {4, 0}});
    // inner leg of 2 plus the two outside legs of 3 and 5
    double expected = 2.0 + dist({1, 0}, {4, 0}) + dist({4, 0}, {-1, 0});
    CHECK(b.cost == doctest::Approx(expected).epsilon(1e-12));
    CHECK(b.in_costs[0] == doctest::Approx(2.0));
}

TEST_CASE("evaluate on three collinear circles") {
    Instance inst = circles({{{0, 0}, 1}, {{5, 0}, 1}, {{10, 0}, 1}});
    Tour t = Tour::identity(3);
    std::vector<Point> entry = {{1, 0}, {4, 0}, {9, 0}};
    std::vector<Point> exit = {{1, 0}, {6, 0}, {9, 0}};
    TourSolution sol = evaluate(inst, t, entry, exit);
    // independent hand assembly: legs 1->4, 6->9, 9->1 plus inner 4->6
    double expected = dist({1, 0}, {4, 0}) + dist({6, 0}, {9, 0}) + dist({9, 0}, {1, 0}) +
                      dist({4, 0}, {6, 0});
    CHECK(sol.cost == doctest::Approx(expected).epsilon(1e-12));
    CHECK(sol.out_costs.size() == 3);
}

TEST_CASE("evaluate rejects points outside their elements") {
    Instance inst = circles({{{0, 0}, 1}, {{5, 0}, 1}});
    CHECK_THROWS_AS(
        evaluate(inst, Tour::identity(2), {{2.5, 0}, {4, 0}}, {{1, 0}, {4, 0}}),
        ValidationError);
}

TEST_CASE("two circles solve to the doubled set distance") {
    Instance inst = circles({{{0, 0}, 1}, {{5, 0}, 1}});
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(2));
    CHECK(sol.cost == doctest::Approx(6.0).epsilon(1e-7));
    CHECK(dist(sol.entry[0], {1, 0}) < 1e-5);
    CHECK(dist(sol.entry[1], {4, 0}) < 1e-5);
    CHECK(dist(sol.entry[0], sol.exit[0]) < 1e-9);
}

TEST_CASE("a common point collapses the tour to zero cost") {
    Instance inst = circles({{{0, 0}, 2}, {{1, 0}, 2}, {{0, 1}, 2}});
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(3));
    CHECK(sol.cost <= 1e-6);
}

TEST_CASE("four random circles match the angular grid oracle") {
    for (std::uint64_t seed : {3, 4, 5}) {
        Xoshiro256ss rng(seed);
        std::vector<Circle> cs;
        for (int i = 0; i < 4; ++i)
            cs.push_back({{rng.uniform(0, 100), rng.uniform(0, 100)}, rng.uniform(1, 8)});
        Instance inst = circles(cs);
        Tour t = Tour::identity(4);
        TourSolution sol = solve_fixed_tour(inst, t);
        double ref = oracle::circle_tour_grid(cs, t.order(), 720);
        CHECK(sol.cost == doctest::Approx(ref).epsilon(5e-3));
        CHECK(sol.cost <= ref + 1e-6); // the solver may only be better
    }
}

TEST_CASE("membership and coverage always hold") {
    for (std::uint64_t seed : {1, 2, 3}) {
        Instance inst = generate(5, 2, 4, seed);
        TourSolution sol = solve_fixed_tour(inst, Tour::identity(5));
        for (int v = 0; v < inst.size(); ++v) {
            CHECK(distance_to(inst.elements[v], sol.entry[v]) <= 1e-6);
            CHECK(distance_to(inst.elements[v], sol.exit[v]) <= 1e-6);
            if (const Chain* c = std::get_if<Chain>(&inst.elements[v].shape)) {
                double need = inst.elements[v].coverage * c->segments();
                CHECK(std::abs(sol.lambda[v][0] - sol.lambda[v][1]) >= need - 1e-6);
            }
        }
        // per-sweep cost trace is monotone
        for (std::size_t i = 1; i < sol.sweep_costs.size(); ++i)
            CHECK(sol.sweep_costs[i] <= sol.sweep_costs[i - 1] + 1e-9);
    }
}

TEST_CASE("discount >= 1 merges entry and exit on the boundary") {
    for (std::uint64_t seed : {10, 11}) {
        Instance inst = generate(5, 1, 1, seed); // small disjoint circles
        TourSolution sol = solve_fixed_tour(inst, Tour::identity(5));
        for (int v = 0; v < inst.size(); ++v) {
            CHECK(dist(sol.entry[v], sol.exit[v]) <= 1e-5);
            CHECK(distance_to_boundary(inst.elements[v], sol.entry[v]) <= 1e-4);
        }
    }
}

TEST_CASE("tour reversal yields the same cost") {
    Instance inst = generate(6, 2, 1, 8);
    std::vector<int> fwd = {0, 2, 4, 1, 5, 3};
    std::vector<int> rev(fwd.rbegin(), fwd.rend());
    TourSolution a = solve_fixed_tour(inst, Tour(fwd));
    TourSolution b = solve_fixed_tour(inst, Tour(rev));
    CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-7));
    CHECK(Tour(fwd) == Tour(rev)); // canonical form identifies directions
}

TEST_CASE("objective is convex along feasible segments") {
    Instance inst = circles({{{0, 0}, 2}, {{20, 5}, 3}, {{8, 18}, 1}});
    Tour t = Tour::identity(3);
    Xoshiro256ss rng(6);
    for (int it = 0; it < 50; ++it) {
        std::vector<Point> e1, x1, e2, x2, em, xm;
        for (int v = 0; v < 3; ++v) {
            Point a = oracle::sample_point(inst.elements[v], rng);
            Point b = oracle::sample_point(inst.elements[v], rng);
            Point c = oracle::sample_point(inst.elements[v], rng);
            Point d = oracle::sample_point(inst.elements[v], rng);
            e1.push_back(a);
            x1.push_back(b);
            e2.push_back(c);
            x2.push_back(d);
            em.push_back((a + c) * 0.5);
            xm.push_back((b + d) * 0.5);
        }
        double f1 = evaluate(inst, t, e1, x1).cost;
        double f2 = evaluate(inst, t, e2, x2).cost;
        double fm = evaluate(inst, t, em, xm).cost;
        CHECK(fm <= 0.5 * (f1 + f2) + 1e-9);
    }
}

TEST_CASE("chain restrictions match a dense parameter grid") {
    // one circle and one chain with a coverage requirement; reference by
    // scanning the chain parameters and circle boundary angles densely
    Instance inst;
    Element c;
    c.shape = Circle{{0, 0}, 1.0};
    inst.elements.push_back(c);
    Element ch;
    ch.shape = Chain{{{6, -2}, {8, 1}, {6, 4}, {9, 6}}};
    ch.coverage = 0.6;
    inst.elements.push_back(ch);

    TourSolution sol = solve_fixed_tour(inst, Tour::identity(2));

    const Chain& chain = std::get<Chain>(inst.elements[1].shape);
    double need = 0.6 * chain.segments();
    double best = 1e300;
    const int steps = 240;
    for (int i = 0; i <= steps; ++i) {
        for (int j = 0; j <= steps; ++j) {
            double l1 = 3.0 * i / steps, l2 = 3.0 * j / steps;
            if (std::abs(l1 - l2) < need) continue;
            Point pe = chain_point_at(chain, l1);
            Point px = chain_point_at(chain, l2);
            double inner = dist(pe, px); // discounted leg, f = 1
            for (int a = 0; a < 360; ++a) {
                double th = 2.0 * M_PI * a / 360;
                Point q{std::cos(th), std::sin(th)};
                double val = dist(q, pe) + inner + dist(px, q);
                if (val < best) best = val;
            }
        }
    }
    CHECK(sol.cost <= best + 1e-6);
    CHECK(sol.cost == doctest::Approx(best).epsilon(2e-2));
    CHECK(std::abs(sol.lambda[1][0] - sol.lambda[1][1]) >= need - 1e-6);
}

TEST_CASE("restriction budget exhaustion degrades gracefully") {
    Instance inst = generate(5, 2, 3, 2); // five 3-segment chains
    SubproblemConfig cfg;
    cfg.combo_cap = 3;
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(5), cfg);
    CHECK(sol.approximate);
    SubproblemConfig full;
    TourSolution exact = solve_fixed_tour(inst, Tour::identity(5), full);
    CHECK_FALSE(exact.approximate);
    CHECK(exact.cost <= sol.cost + 1e-9);
}

TEST_CASE("union elements choose the right members") {
    Instance inst;
    Element u;
    Element m1, m2;
    m1.shape = Circle{{0, 0}, 1};
    m2.shape = Circle{{40, 0}, 1};
    u.shape = UnionSoc{{to_soc(m1), to_soc(m2)}};
    inst.elements.push_back(u);
    Element c;
    c.shape = Circle{{46, 0}, 1};
    inst.elements.push_back(c);
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(2));
    // the near member (at x=40) serves both entry and exit
    CHECK(sol.cost == doctest::Approx(8.0).epsilon(1e-6));
    CHECK(dist(sol.entry[0], {41, 0}) < 1e-5);
}

TEST_CASE("solution files round trip") {
    Instance inst = generate(5, 2, 4, 14);
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(5));
    std::string text = write_solution(sol, inst);
    TourSolution back = read_solution(text, inst);
    CHECK(back.cost == sol.cost);
    CHECK(back.tour == sol.tour);
    CHECK(write_solution(back, inst) == text);
    CHECK_THROWS_AS(read_solution("{ not json", inst), ParseError);
}

TEST_CASE("multistart merging is deterministic") {
    Instance inst = generate(6, 3, 4, 4);
    TourSolution a = solve_fixed_tour(inst, Tour::identity(6));
    TourSolution b = solve_fixed_tour(inst, Tour::identity(6));
    CHECK(a.cost == b.cost);
    for (int v = 0; v < inst.size(); ++v) {
        CHECK(a.entry[v] == b.entry[v]);
        CHECK(a.exit[v] == b.exit[v]);
    }
}
