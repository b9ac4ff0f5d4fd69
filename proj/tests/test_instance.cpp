#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "xppn/common.hpp"
#include "xppn/instance.hpp"

using namespace xppn;

TEST_CASE("generation follows the protocol parameters") {
    Instance inst = generate(10, 1, 1, 123);
    CHECK(inst.size() == 10);
    for (const auto& e : inst.elements) {
        const Circle* c = std::get_if<Circle>(&e.shape);
        REQUIRE(c != nullptr);
        CHECK(c->radius >= 0.0);
        CHECK(c->radius <= 5.0);
        CHECK(c->center.x >= 0.0);
        CHECK(c->center.x <= 100.0);
        CHECK(c->center.y >= 0.0);
        CHECK(c->center.y <= 100.0);
        CHECK(e.discount == 1.0);
    }
}

TEST_CASE("chain spacing follows the radius class") {
    Instance inst = generate(5, 4, 3, 77);
    for (const auto& e : inst.elements) {
        const Chain* chain = std::get_if<Chain>(&e.shape);
        REQUIRE(chain != nullptr);
        CHECK(chain->breakpoints.size() == 4);
        CHECK(e.coverage >= 0.0);
        CHECK(e.coverage <= 1.0);
        for (std::size_t i = 0; i + 1 < chain->breakpoints.size(); ++i) {
            Point a = chain->breakpoints[i], b = chain->breakpoints[i + 1];
            CHECK(a.x >= 0.0);
            CHECK(a.x <= 100.0);
            CHECK(a.y >= 0.0);
            CHECK(a.y <= 100.0);
            double d = dist(a, b);
            CHECK(d <= 20.0 + 1e-9);
            // spacing is exactly the drawn radius unless the square clipped it
            bool interior = b.x > 0.0 && b.x < 100.0 && b.y > 0.0 && b.y < 100.0;
            if (interior) CHECK(d >= 15.0 - 1e-9);
        }
    }
}

TEST_CASE("polygon mode draws regular polygons with 3..10 vertices") {
    Instance inst = generate(12, 2, 2, 5);
    for (const auto& e : inst.elements) {
        const ConvexPolygon* poly = std::get_if<ConvexPolygon>(&e.shape);
        REQUIRE(poly != nullptr);
        CHECK(poly->vertices.size() >= 3);
        CHECK(poly->vertices.size() <= 10);
        // all vertices equidistant from the centroid (regularity)
        Point c{0, 0};
        for (const auto& v : poly->vertices) c = c + v;
        c = c / static_cast<double>(poly->vertices.size());
        double r0 = dist(poly->vertices[0], c);
        CHECK(r0 >= 5.0 - 1e-9);
        CHECK(r0 <= 10.0 + 1e-9);
        for (const auto& v : poly->vertices) CHECK(dist(v, c) == doctest::Approx(r0));
    }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
    std::string a = write_instance(generate(8, 2, 4, 42));
    std::string b = write_instance(generate(8, 2, 4, 42));
    std::string c = write_instance(generate(8, 2, 4, 43));
    CHECK(a == b);
    CHECK(a != c);
}

TEST_CASE("mode 4 mixes all three kinds from size 3 on") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5, 6, 7, 8}) {
        Instance inst = generate(3, 1, 4, seed);
        std::set<std::string> kinds;
        for (const auto& e : inst.elements) kinds.insert(e.kind_name());
        CHECK(kinds == std::set<std::string>{"circle", "polygon", "chain"});
    }
}

TEST_CASE("write/read round trip") {
    Instance inst = generate(5, 1, 1, 7);
    std::string text = write_instance(inst);
    Instance back = read_instance(text);
    CHECK(write_instance(back) == text);

    Instance mixed = generate(6, 3, 4, 9);
    CHECK(write_instance(read_instance(write_instance(mixed))) == write_instance(mixed));
}

TEST_CASE("union elements round trip through the file format") {
    Instance inst = generate(2, 1, 1, 3);
    Element u;
    SocRow row;
    row.B = {{{1, 0}, {0, 1}}};
    row.b = {-5, -5};
    row.c = {0, 0};
    row.d = 2.0;
    u.shape = UnionSoc{{SocSet{{row}}}};
    inst.elements.push_back(u);
    std::string text = write_instance(inst);
    Instance back = read_instance(text);
    CHECK(write_instance(back) == text);
    CHECK(back.elements[2].is_union());
}

TEST_CASE("parse errors name the offending element") {
    std::string text = R"({"name":"x","seed":1,"radii_class":1,"mode":1,
        "elements":[{"kind":"circle","center":[0,0],"radius":1,"discount":1},
                    {"center":[1,1],"radius":1}]})";
    CHECK_THROWS_WITH_AS(read_instance(text), "element 1: missing 'kind' field", ParseError);
}

TEST_CASE("validation rejects degenerate shapes") {
    std::string one_breakpoint = R"({"name":"x","seed":1,"radii_class":1,"mode":3,
        "elements":[{"kind":"chain","breakpoints":[[0,0]],"discount":1,"coverage":0},
                    {"kind":"circle","center":[1,1],"radius":1,"discount":1}]})";
    CHECK_THROWS_WITH_AS(read_instance(one_breakpoint),
                         "element 0: chain needs >= 2 breakpoints", ValidationError);

    std::string bad_radius = R"({"name":"x","seed":1,"radii_class":1,"mode":1,
        "elements":[{"kind":"circle","center":[0,0],"radius":-2,"discount":1},
                    {"kind":"circle","center":[1,1],"radius":1,"discount":1}]})";
    CHECK_THROWS_AS(read_instance(bad_radius), ValidationError);

    std::string clockwise = R"({"name":"x","seed":1,"radii_class":1,"mode":2,
        "elements":[{"kind":"polygon","vertices":[[0,0],[0,1],[1,1],[1,0]],"discount":1},
                    {"kind":"circle","center":[1,1],"radius":1,"discount":1}]})";
    CHECK_THROWS_AS(read_instance(clockwise), ValidationError);

    CHECK_THROWS_AS(generate(1, 1, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate(5, 5, 1, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate(5, 1, 0, 1), std::invalid_argument);
}

TEST_CASE("all generated coordinates stay in the unit square of size 100") {
    for (int mode = 1; mode <= 4; ++mode) {
        for (int radii = 1; radii <= 4; ++radii) {
            Instance inst = generate(6, radii, mode, 1000 + mode * 10 + radii);
            for (const auto& e : inst.elements) {
                std::visit(
                    [&](const auto& shape) {
                        using T = std::decay_t<decltype(shape)>;
                        if constexpr (std::is_same_v<T, Circle>) {
                            CHECK(shape.center.x >= 0.0);
                            CHECK(shape.center.x <= 100.0);
                            CHECK(shape.center.y >= 0.0);
                            CHECK(shape.center.y <= 100.0);
                        } else if constexpr (std::is_same_v<T, ConvexPolygon>) {
                            Point c{0, 0};
                            for (const auto& v : shape.vertices) c = c + v;
                            c = c / static_cast<double>(shape.vertices.size());
                            CHECK(c.x >= -1e-9);
                            CHECK(c.x <= 100.0 + 1e-9);
                        } else if constexpr (std::is_same_v<T, Chain>) {
                            for (const auto& p : shape.breakpoints) {
                                CHECK(p.x >= 0.0);
                                CHECK(p.x <= 100.0);
                                CHECK(p.y >= 0.0);
                                CHECK(p.y <= 100.0);
                            }
                        }
                    },
                    e.shape);
            }
        }
    }
}

TEST_CASE("type mismatches surface as parse errors") {
    std::string bad_seed = R"({"name":"x","seed":-3,"radii_class":1,"mode":1,
        "elements":[{"kind":"circle","center":[0,0],"radius":1,"discount":1},
                    {"kind":"circle","center":[1,1],"radius":1,"discount":1}]})";
    CHECK_THROWS_AS(read_instance(bad_seed), ParseError);
    std::string string_radius = R"({"name":"x","seed":1,"radii_class":1,"mode":1,
        "elements":[{"kind":"circle","center":[0,0],"radius":"one","discount":1},
                    {"kind":"circle","center":[1,1],"radius":1,"discount":1}]})";
    CHECK_THROWS_AS(read_instance(string_radius), ParseError);
}
