#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "oracles.hpp"
#include "xppn/benders.hpp"
#include "xppn/heuristic.hpp"
#include "xppn/model_ir.hpp"

using namespace xppn;

namespace {

Instance point_circles(std::vector<Point> pts) {
    Instance inst;
    inst.name = "points";
    for (const auto& p : pts) {
        Element e;
        e.shape = Circle{p, 1e-9};
        inst.elements.push_back(e);
    }
    return inst;
}

int count_vars_with_prefix(const Model& m, const std::string& prefix) {
    int count = 0;
    for (const auto& v : m.vars)
        if (v.name.rfind(prefix, 0) == 0) ++count;
    return count;
}

int count_tag(const std::vector<std::string>& tags, const std::string& tag) {
    return static_cast<int>(std::count(tags.begin(), tags.end(), tag));
}

} // namespace

TEST_CASE("mtz variable counts for three point-circles") {
    Instance inst = point_circles({{0, 0}, {10, 0}, {0, 10}});
    BoundsTable bounds = compute_bounds(inst);
    Model m = build_mtz(inst, bounds);
    CHECK(count_vars_with_prefix(m, "z_") == 6);
    CHECK(count_vars_with_prefix(m, "s_") == 3);
    // the first vertex's order variable is pinned to 1
    bool found = false;
    for (std::size_t i = 0; i < m.linear.size(); ++i) {
        if (m.linear_tags[i] != "MTZ2") continue;
        found = true;
        REQUIRE(m.linear[i].coefs.size() == 1);
        CHECK(m.linear[i].coefs[0].first == "s_0");
        CHECK(m.linear[i].rhs == 1.0);
        CHECK(m.linear[i].sense == Sense::eq);
    }
    CHECK(found);
}

TEST_CASE("chain rows come in two sets with unit segment-choice sums") {
    Instance inst;
    Element ch;
    ch.shape = Chain{{{0, 0}, {5, 0}, {5, 5}, {10, 5}}}; // n_v = 3
    ch.coverage = 0.5;
    inst.elements.push_back(ch);
    Element c;
    c.shape = Circle{{20, 20}, 1};
    inst.elements.push_back(c);
    BoundsTable bounds = compute_bounds(inst);
    Model m = build_mtz(inst, bounds);

    CHECK(count_tag(m.linear_tags, "P-C-mu-sum") == 2);
    CHECK(count_tag(m.linear_tags, "P-C-gamma-sum") == 2);
    CHECK(count_tag(m.linear_tags, "P-C-link") == 2 * 2 * 3);
    CHECK(count_vars_with_prefix(m, "mu1_0_") == 3);
    CHECK(count_vars_with_prefix(m, "mu2_0_") == 3);
    CHECK(count_vars_with_prefix(m, "gam1_0_") == 4);
    for (std::size_t i = 0; i < m.linear.size(); ++i) {
        if (m.linear_tags[i] != "P-C-mu-sum") continue;
        CHECK(m.linear[i].coefs.size() == 3);
        CHECK(m.linear[i].rhs == 1.0);
    }
}

TEST_CASE("heuristic solutions satisfy the mtz model with matching objective") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        Instance inst = generate(5, 2, 4, seed);
        BoundsTable bounds = compute_bounds(inst);
        Model m = build_mtz(inst, bounds);
        HeuristicConfig cfg;
        cfg.seed = seed;
        TourSolution sol = heuristic_solve(inst, cfg);
        auto assignment = assignment_from_solution(inst, bounds, sol, m);
        CheckReport report = check_assignment(m, assignment, 1e-5);
        for (const auto& v : report.violations)
            MESSAGE(v.constraint, " [", v.tag, "] ", v.detail);
        CHECK(report.violations.empty());
        CHECK(report.objective == doctest::Approx(sol.cost).epsilon(1e-6));
    }
}

TEST_CASE("sec builder variable counts and degree rows") {
    Instance inst = generate(4, 1, 1, 9);
    BoundsTable bounds = compute_bounds(inst);

    SecModel sym = build_sec(inst, bounds, true);
    CHECK(count_vars_with_prefix(sym.model, "z_") == 6);
    CHECK(count_tag(sym.model.linear_tags, "sSEC-degree") == 4);
    CHECK(sym.note.find("separate_sec") != std::string::npos);

    SecModel asym = build_sec(inst, bounds, false);
    CHECK(count_vars_with_prefix(asym.model, "z_") == 12);
    CHECK(count_tag(asym.model.linear_tags, "C1") == 4);
    CHECK(count_tag(asym.model.linear_tags, "C2") == 4);
}

TEST_CASE("two 2-cycles pass the degree rows but fail separation") {
    Instance inst = generate(4, 1, 1, 13);
    BoundsTable bounds = compute_bounds(inst);
    SecModel asym = build_sec(inst, bounds, false);

    TourSolution sol = solve_fixed_tour(inst, Tour::identity(4));
    auto assignment = assignment_from_solution(inst, bounds, sol, asym.model);
    // rewire into two 2-cycles 0<->1 and 2<->3
    for (int v = 0; v < 4; ++v)
        for (int w = 0; w < 4; ++w)
            if (v != w) assignment["z_" + std::to_string(v) + "_" + std::to_string(w)] = 0.0;
    assignment["z_0_1"] = assignment["z_1_0"] = 1.0;
    assignment["z_2_3"] = assignment["z_3_2"] = 1.0;
    // keep the product variables consistent with the rewired edges
    for (int v = 0; v < 4; ++v)
        for (int w = 0; w < 4; ++w)
            if (v != w) {
                double z = assignment["z_" + std::to_string(v) + "_" + std::to_string(w)];
                assignment["p_" + std::to_string(v) + "_" + std::to_string(w)] =
                    z * assignment["d_out_" + std::to_string(v) + "_" + std::to_string(w)];
            }

    CheckReport report = check_assignment(asym.model, assignment, 1e-5);
    CHECK(report.violations.empty()); // degree-feasible, subtours undetected here

    std::vector<std::tuple<int, int, double>> edges;
    for (int v = 0; v < 4; ++v)
        for (int w = 0; w < 4; ++w)
            if (v != w)
                edges.push_back({v, w,
                                 assignment["z_" + std::to_string(v) + "_" + std::to_string(w)]});
    auto subtours = separate_sec(4, edges);
    REQUIRE(subtours.size() == 2);
    CHECK(subtours[0] == std::vector<int>{0, 1});
    CHECK(subtours[1] == std::vector<int>{2, 3});
}

TEST_CASE("separation returns nothing for a spanning cycle and shortest first") {
    std::vector<std::tuple<int, int, double>> cycle5 = {
        {0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {3, 4, 1}, {4, 0, 1}};
    CHECK(separate_sec(5, cycle5).empty());

    std::vector<std::tuple<int, int, double>> mixed = {
        {0, 1, 1}, {1, 0, 1}, {2, 3, 1}, {3, 4, 1}, {4, 5, 1}, {5, 2, 1}};
    auto subtours = separate_sec(6, mixed);
    REQUIRE(subtours.size() == 2);
    CHECK(subtours[0].size() == 2);
    CHECK(subtours[1].size() == 4);

    std::vector<std::tuple<int, int, double>> fractional = {{0, 1, 0.5}};
    CHECK_THROWS_AS(separate_sec(2, fractional), std::domain_error);
}

TEST_CASE("check_assignment flags integrality and conic violations") {
    Instance inst = point_circles({{0, 0}, {10, 0}, {0, 10}});
    inst.elements[0].shape = Circle{{0, 0}, 1.0};
    BoundsTable bounds = compute_bounds(inst);
    Model m = build_mtz(inst, bounds);
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(3));
    auto assignment = assignment_from_solution(inst, bounds, sol, m);

    auto broken = assignment;
    broken["z_0_1"] = 0.5;
    CheckReport r1 = check_assignment(m, broken, 1e-6);
    bool named = false;
    for (const auto& v : r1.violations)
        if (v.constraint == "int:z_0_1") named = true;
    CHECK(named);

    auto outside = assignment;
    outside["x1_0_x"] = assignment.at("x1_0_x") + 1.1; // leaves the unit circle
    CheckReport r2 = check_assignment(m, outside, 1e-6);
    bool conic = false;
    for (const auto& v : r2.violations)
        if (v.tag == "C-C") conic = true;
    CHECK(conic);

    auto missing = assignment;
    missing.erase("s_1");
    CHECK_THROWS_AS(check_assignment(m, missing, 1e-6), std::domain_error);
}

TEST_CASE("time-dependent model counts and cross evaluation") {
    Instance inst = point_circles({{0, 0}, {10, 0}, {0, 10}});
    inst.elements[0].shape = Circle{{0, 0}, 2.0};
    inst.elements[1].shape = Circle{{10, 0}, 1.0};
    inst.elements[2].shape = Circle{{0, 10}, 1.5};
    BoundsTable bounds = compute_bounds(inst);
    Model td = build_time_dependent(inst, bounds, TimeParams::constant(inst));
    CHECK(count_vars_with_prefix(td, "y_") == 9);
    CHECK(count_tag(td.linear_tags, "TD-stage") == 3);
    CHECK(count_tag(td.linear_tags, "TD-link-wrap") == 6);

    TourSolution sol = solve_fixed_tour(inst, Tour::identity(3));
    auto assignment = assignment_from_solution(inst, bounds, sol, td);
    CheckReport report = check_assignment(td, assignment, 1e-5);
    for (const auto& v : report.violations)
        MESSAGE(v.constraint, " [", v.tag, "] ", v.detail);
    CHECK(report.violations.empty());

    Model mtz = build_mtz(inst, bounds);
    auto plain = assignment_from_solution(inst, bounds, sol, mtz);
    CheckReport base = check_assignment(mtz, plain, 1e-5);
    CHECK(report.objective == doctest::Approx(base.objective).epsilon(1e-9));
    CHECK(report.objective == doctest::Approx(sol.cost).epsilon(1e-6));
}

TEST_CASE("stage rotation keeps the time-dependent objective unchanged") {
    Instance inst = point_circles({{0, 0}, {10, 0}, {0, 10}, {10, 10}});
    BoundsTable bounds = compute_bounds(inst);
    Model td = build_time_dependent(inst, bounds, TimeParams::constant(inst));
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(4));
    auto assignment = assignment_from_solution(inst, bounds, sol, td);

    const int n = 4;
    std::map<std::string, double> rotated = assignment;
    auto rot = [&](int t) { return t % n + 1; };
    for (int v = 0; v < n; ++v)
        for (int t = 1; t <= n; ++t) {
            rotated["y_" + std::to_string(v) + "_" + std::to_string(rot(t))] =
                assignment.at("y_" + std::to_string(v) + "_" + std::to_string(t));
            rotated["d_in_" + std::to_string(v) + "_" + std::to_string(rot(t))] =
                assignment.at("d_in_" + std::to_string(v) + "_" + std::to_string(t));
            for (int w = 0; w < n; ++w) {
                if (v == w) continue;
                std::string base =
                    "_" + std::to_string(v) + "_" + std::to_string(w) + "_";
                rotated["z" + base + std::to_string(rot(t))] =
                    assignment.at("z" + base + std::to_string(t));
                rotated["p" + base + std::to_string(rot(t))] =
                    assignment.at("p" + base + std::to_string(t));
                rotated["d_out" + base + std::to_string(rot(t))] =
                    assignment.at("d_out" + base + std::to_string(t));
            }
        }
    CheckReport a = check_assignment(td, assignment, 1e-5);
    CheckReport b = check_assignment(td, rotated, 1e-5);
    CHECK(b.violations.empty());
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-12));
}

TEST_CASE("model export round-trips byte-identically") {
    Instance inst = generate(3, 1, 4, 6);
    BoundsTable bounds = compute_bounds(inst);
    Model m = build_mtz(inst, bounds);
    std::string text = export_model(m);
    Model back = import_model(text);
    CHECK(export_model(back) == text);

    // declared section counts match the body
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == "XPPN-MODEL v1");
    std::getline(in, line);
    CHECK(line == "VARS " + std::to_string(m.vars.size()));
}

TEST_CASE("an empty model exports header and sections only") {
    Model m;
    m.add_var("x", VarKind::continuous, 0, 1);
    std::string text = export_model(m);
    CHECK(text.find("LINEAR 0") != std::string::npos);
    CHECK(text.find("SOC 0") != std::string::npos);
    Model back = import_model(text);
    CHECK(back.vars.size() == 1);
    CHECK(back.linear.empty());
}

TEST_CASE("import rejects malformed documents with line numbers") {
    CHECK_THROWS_AS(import_model("bogus\n"), ParseError);
    try {
        import_model("XPPN-MODEL v1\nVARS 1\nx continuous zero 1\n");
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
}

TEST_CASE("every constraint of every builder carries an annotation") {
    Instance inst = generate(4, 2, 4, 10);
    BoundsTable bounds = compute_bounds(inst);
    for (const Model& m : {build_mtz(inst, bounds), build_sec(inst, bounds, true).model,
                           build_sec(inst, bounds, false).model,
                           build_time_dependent(inst, bounds, TimeParams::constant(inst))}) {
        CHECK(m.linear_tags.size() == m.linear.size());
        CHECK(m.soc_tags.size() == m.soc.size());
        for (const auto& tag : m.linear_tags) CHECK_FALSE(tag.empty());
        for (const auto& tag : m.soc_tags) CHECK_FALSE(tag.empty());
    }
}

TEST_CASE("union membership rows accept both member choices") {
    Instance inst;
    Element u;
    Element m1, m2;
    m1.shape = Circle{{0, 0}, 1};
    m2.shape = Circle{{8, 0}, 1};
    u.shape = UnionSoc{{to_soc(m1), to_soc(m2)}};
    inst.elements.push_back(u);
    Element c;
    c.shape = Circle{{4, 10}, 1};
    inst.elements.push_back(c);
    BoundsTable bounds = compute_bounds(inst);
    Model m = build_mtz(inst, bounds);
    TourSolution sol = solve_fixed_tour(inst, Tour::identity(2));
    auto assignment = assignment_from_solution(inst, bounds, sol, m);
    CheckReport report = check_assignment(m, assignment, 1e-5);
    for (const auto& v : report.violations)
        MESSAGE(v.constraint, " [", v.tag, "] ", v.detail);
    CHECK(report.violations.empty());
    CHECK(report.objective == doctest::Approx(sol.cost).epsilon(1e-6));
}
