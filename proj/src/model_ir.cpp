#include "xppn/model_ir.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "xppn/common.hpp"

namespace xppn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string zname(int v, int w) { return "z_" + std::to_string(v) + "_" + std::to_string(w); }
std::string dout(int v, int w) {
    return "d_out_" + std::to_string(v) + "_" + std::to_string(w);
}
std::string pname(int v, int w) { return "p_" + std::to_string(v) + "_" + std::to_string(w); }
std::string din(int v) { return "d_in_" + std::to_string(v); }
std::string sname(int v) { return "s_" + std::to_string(v); }
std::string xcoord(int i, int v, char axis) {
    return "x" + std::to_string(i) + "_" + std::to_string(v) + "_" + axis;
}
std::string lam(int i, int v) { return "lam" + std::to_string(i) + "_" + std::to_string(v); }
std::string gam(int i, int v, int j) {
    return "gam" + std::to_string(i) + "_" + std::to_string(v) + "_" + std::to_string(j);
}
std::string mu(int i, int v, int j) {
    return "mu" + std::to_string(i) + "_" + std::to_string(v) + "_" + std::to_string(j);
}
std::string chi(int i, int v, int j) {
    return "chi" + std::to_string(i) + "_" + std::to_string(v) + "_" + std::to_string(j);
}
std::string uname(int v) { return "u_" + std::to_string(v); }
std::string lammax(int v) { return "lammax_" + std::to_string(v); }
std::string lammin(int v) { return "lammin_" + std::to_string(v); }
std::string tsuffix(const std::string& base, int t) { return base + "_" + std::to_string(t); }

double sigma_max(const std::array<std::array<double, 2>, 2>& B) {
    double a = B[0][0] * B[0][0] + B[1][0] * B[1][0];
    double b = B[0][0] * B[0][1] + B[1][0] * B[1][1];
    double d = B[0][1] * B[0][1] + B[1][1] * B[1][1];
    double tr = a + d, det = a * d - b * b;
    double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return std::sqrt(std::max(0.0, tr / 2.0 + disc));
}

bool is_zero_matrix(const std::array<std::array<double, 2>, 2>& B) {
    return std::abs(B[0][0]) < 1e-14 && std::abs(B[0][1]) < 1e-14 &&
           std::abs(B[1][0]) < 1e-14 && std::abs(B[1][1]) < 1e-14;
}

} // namespace

void Model::add_var(const std::string& name, VarKind kind, double lb, double ub) {
    if (index_.count(name)) throw ValidationError("duplicate variable " + name);
    index_[name] = static_cast<int>(vars.size());
    vars.push_back({name, kind, lb, ub});
}

void Model::add_linear(LinearRow row, const std::string& tag) {
    for (const auto& [name, coef] : row.coefs) {
        (void)coef;
        if (!index_.count(name))
            throw ValidationError("linear row references undeclared variable " + name);
    }
    linear.push_back(std::move(row));
    linear_tags.push_back(tag);
}

void Model::add_soc(SocConstraint row, const std::string& tag) {
    for (const AffineExpr* e : {&row.u1, &row.u2, &row.rhs})
        for (const auto& [name, coef] : e->coefs) {
            (void)coef;
            if (!index_.count(name))
                throw ValidationError("conic row references undeclared variable " + name);
        }
    soc.push_back(std::move(row));
    soc_tags.push_back(tag);
}

int Model::var_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------
// shared domain rows: point variables plus the membership system of every
// element (conic rows for convex sets, the segment-selection system for
// chains with the coverage requirement, the disjunctive rows for unions)
// ---------------------------------------------------------------------------

namespace {

void add_domain(Model& m, const Instance& inst) {
    const int n = inst.size();
    for (int v = 0; v < n; ++v) {
        for (int i : {1, 2}) {
            m.add_var(xcoord(i, v, 'x'), VarKind::continuous, -kInf, kInf);
            m.add_var(xcoord(i, v, 'y'), VarKind::continuous, -kInf, kInf);
        }
    }
    for (int v = 0; v < n; ++v) {
        const Element& e = inst.elements[v];
        if (e.is_convex()) {
            SocSet rows = to_soc(e);
            for (int i : {1, 2}) {
                for (const auto& row : rows.rows) {
                    if (is_zero_matrix(row.B) && row.b.norm() < 1e-14) {
                        // degenerate cone: plain half-plane c.x + d >= 0
                        m.add_linear({{{xcoord(i, v, 'x'), row.c.x}, {xcoord(i, v, 'y'), row.c.y}},
                                      Sense::ge,
                                      -row.d},
                                     "C-C");
                        continue;
                    }
                    SocConstraint sc;
                    sc.u1 = {{{xcoord(i, v, 'x'), row.B[0][0]}, {xcoord(i, v, 'y'), row.B[0][1]}},
                             row.b.x};
                    sc.u2 = {{{xcoord(i, v, 'x'), row.B[1][0]}, {xcoord(i, v, 'y'), row.B[1][1]}},
                             row.b.y};
                    sc.rhs = {{{xcoord(i, v, 'x'), row.c.x}, {xcoord(i, v, 'y'), row.c.y}}, row.d};
                    m.add_soc(std::move(sc), "C-C");
                }
            }
        } else if (const UnionSoc* uni = std::get_if<UnionSoc>(&e.shape)) {
            const int members = static_cast<int>(uni->members.size());
            EnclosingCircle circ = enclosing_circle(e);
            for (int i : {1, 2})
                for (int j = 0; j < members; ++j)
                    m.add_var(chi(i, v, j), VarKind::binary, 0, 1);
            for (int i : {1, 2}) {
                LinearRow pick;
                for (int j = 0; j < members; ++j) pick.coefs.push_back({chi(i, v, j), 1.0});
                pick.sense = Sense::eq;
                pick.rhs = 1.0;
                m.add_linear(std::move(pick), "U-C-choice");
                for (int j = 0; j < members; ++j) {
                    for (const auto& row : uni->members[j].rows) {
                        // big-M deactivation: any point of the union satisfies
                        // the row once M covers the worst violation over the
                        // union's enclosing circle
                        Point bq = {row.B[0][0] * circ.center.x + row.B[0][1] * circ.center.y +
                                        row.b.x,
                                    row.B[1][0] * circ.center.x + row.B[1][1] * circ.center.y +
                                        row.b.y};
                        double big = bq.norm() + sigma_max(row.B) * circ.radius -
                                     (row.c.dot(circ.center) + row.d) +
                                     row.c.norm() * circ.radius;
                        big = std::max(0.0, big);
                        SocConstraint sc;
                        sc.u1 = {{{xcoord(i, v, 'x'), row.B[0][0]},
                                  {xcoord(i, v, 'y'), row.B[0][1]}},
                                 row.b.x};
                        sc.u2 = {{{xcoord(i, v, 'x'), row.B[1][0]},
                                  {xcoord(i, v, 'y'), row.B[1][1]}},
                                 row.b.y};
                        sc.rhs = {{{xcoord(i, v, 'x'), row.c.x},
                                   {xcoord(i, v, 'y'), row.c.y},
                                   {chi(i, v, j), -big}},
                                  row.d + big};
                        m.add_soc(std::move(sc), "U-C");
                    }
                }
            }
        } else {
            const Chain& chain = std::get<Chain>(e.shape);
            const int ns = chain.segments();
            const double bigm = static_cast<double>(ns + 1);
            for (int i : {1, 2}) {
                m.add_var(lam(i, v), VarKind::continuous, 0, ns);
                for (int j = 1; j <= ns + 1; ++j)
                    m.add_var(gam(i, v, j), VarKind::continuous, 0, 1);
                for (int j = 1; j <= ns; ++j) m.add_var(mu(i, v, j), VarKind::binary, 0, 1);
            }
            m.add_var(uname(v), VarKind::binary, 0, 1);
            m.add_var(lammax(v), VarKind::continuous, 0, ns);
            m.add_var(lammin(v), VarKind::continuous, 0, ns);

            for (int i : {1, 2}) {
                for (int s = 1; s <= ns; ++s) {
                    // active segment pins lam to (s-1) + gamma of breakpoint s+1
                    m.add_linear({{{lam(i, v), 1.0},
                                   {gam(i, v, s + 1), -1.0},
                                   {mu(i, v, s), -bigm}},
                                  Sense::ge,
                                  double(s - 1) - bigm},
                                 "P-C-link");
                    m.add_linear({{{lam(i, v), 1.0},
                                   {gam(i, v, s + 1), -1.0},
                                   {mu(i, v, s), bigm}},
                                  Sense::le,
                                  double(s - 1) + bigm},
                                 "P-C-link");
                }
                m.add_linear({{{gam(i, v, 1), 1.0}, {mu(i, v, 1), -1.0}}, Sense::le, 0.0},
                             "P-C-support");
                for (int j = 2; j <= ns; ++j)
                    m.add_linear({{{gam(i, v, j), 1.0},
                                   {mu(i, v, j - 1), -1.0},
                                   {mu(i, v, j), -1.0}},
                                  Sense::le,
                                  0.0},
                                 "P-C-support");
                m.add_linear({{{gam(i, v, ns + 1), 1.0}, {mu(i, v, ns), -1.0}}, Sense::le, 0.0},
                             "P-C-support");
                LinearRow musum;
                for (int j = 1; j <= ns; ++j) musum.coefs.push_back({mu(i, v, j), 1.0});
                musum.sense = Sense::eq;
                musum.rhs = 1.0;
                m.add_linear(std::move(musum), "P-C-mu-sum");
                LinearRow gamsum;
                for (int j = 1; j <= ns + 1; ++j) gamsum.coefs.push_back({gam(i, v, j), 1.0});
                gamsum.sense = Sense::eq;
                gamsum.rhs = 1.0;
                m.add_linear(std::move(gamsum), "P-C-gamma-sum");
                LinearRow px, py;
                px.coefs.push_back({xcoord(i, v, 'x'), 1.0});
                py.coefs.push_back({xcoord(i, v, 'y'), 1.0});
                for (int j = 1; j <= ns + 1; ++j) {
                    px.coefs.push_back({gam(i, v, j), -chain.breakpoints[j - 1].x});
                    py.coefs.push_back({gam(i, v, j), -chain.breakpoints[j - 1].y});
                }
                px.sense = py.sense = Sense::eq;
                px.rhs = py.rhs = 0.0;
                m.add_linear(std::move(px), "P-C-x");
                m.add_linear(std::move(py), "P-C-x");
            }

            // coverage: |lam1 - lam2| >= alpha * n via positive/negative parts
            m.add_linear({{{lam(1, v), 1.0},
                           {lam(2, v), -1.0},
                           {lammax(v), -1.0},
                           {lammin(v), 1.0}},
                          Sense::eq,
                          0.0},
                         "alpha-C-abs");
            m.add_linear({{{lammax(v), 1.0}, {lammin(v), 1.0}}, Sense::ge, e.coverage * ns},
                         "alpha-C-cover");
            m.add_linear({{{lammax(v), 1.0}, {uname(v), double(ns)}}, Sense::le, double(ns)},
                         "alpha-C-dir-max");
            m.add_linear({{{lammin(v), 1.0}, {uname(v), -double(ns)}}, Sense::le, 0.0},
                         "alpha-C-dir-min");
        }
    }
}

// distance variables, the conic distance definitions and the McCormick rows
// shared by the non-time formulations; directed == false merges z and the
// distance/product variables over unordered pairs
void add_distance_system(Model& m, const Instance& inst, const BoundsTable& bounds,
                         bool directed) {
    const int n = inst.size();
    auto each_pair = [&](auto&& fn) {
        if (directed) {
            for (int v = 0; v < n; ++v)
                for (int w = 0; w < n; ++w)
                    if (v != w) fn(v, w);
        } else {
            for (int v = 0; v < n; ++v)
                for (int w = v + 1; w < n; ++w) fn(v, w);
        }
    };

    each_pair([&](int v, int w) {
        m.add_var(zname(v, w), VarKind::binary, 0, 1);
        m.add_var(dout(v, w), VarKind::continuous, 0, bounds.M(v, w));
        m.add_var(pname(v, w), VarKind::continuous, 0, kInf);
    });
    for (int v = 0; v < n; ++v) m.add_var(din(v), VarKind::continuous, 0, kInf);

    each_pair([&](int v, int w) {
        SocConstraint sc;
        sc.u1 = {{{xcoord(1, v, 'x'), 1.0}, {xcoord(2, w, 'x'), -1.0}}, 0.0};
        sc.u2 = {{{xcoord(1, v, 'y'), 1.0}, {xcoord(2, w, 'y'), -1.0}}, 0.0};
        sc.rhs = {{{dout(v, w), 1.0}}, 0.0};
        m.add_soc(std::move(sc), "D1");
        if (!directed) {
            // symmetric variant shares one distance variable per pair, so it
            // must cover both orientations
            SocConstraint rc;
            rc.u1 = {{{xcoord(1, w, 'x'), 1.0}, {xcoord(2, v, 'x'), -1.0}}, 0.0};
            rc.u2 = {{{xcoord(1, w, 'y'), 1.0}, {xcoord(2, v, 'y'), -1.0}}, 0.0};
            rc.rhs = {{{dout(v, w), 1.0}}, 0.0};
            m.add_soc(std::move(rc), "D1");
        }
    });
    for (int v = 0; v < n; ++v) {
        SocConstraint sc;
        sc.u1 = {{{xcoord(1, v, 'x'), 1.0}, {xcoord(2, v, 'x'), -1.0}}, 0.0};
        sc.u2 = {{{xcoord(1, v, 'y'), 1.0}, {xcoord(2, v, 'y'), -1.0}}, 0.0};
        sc.rhs = {{{din(v), 1.0}}, 0.0};
        m.add_soc(std::move(sc), "D2");
    }

    each_pair([&](int v, int w) {
        double M = bounds.M(v, w);
        m.add_linear({{{pname(v, w), 1.0}, {dout(v, w), -1.0}, {zname(v, w), -M}},
                      Sense::ge,
                      -M},
                     "LIN-Mc");
        m.add_linear({{{pname(v, w), 1.0}, {zname(v, w), -bounds.m(v, w)}}, Sense::ge, 0.0},
                     "LIN-Mc-lb");
    });
    for (int v = 0; v < n; ++v)
        m.add_linear({{{din(v), 1.0}}, Sense::le, bounds.M_in[v]}, "Mv-bound");

    std::vector<std::pair<std::string, double>> obj;
    each_pair([&](int v, int w) { obj.push_back({pname(v, w), 1.0}); });
    for (int v = 0; v < n; ++v) obj.push_back({din(v), inst.elements[v].discount});
    m.objective = std::move(obj);
}

} // namespace

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

Model build_mtz(const Instance& inst, const BoundsTable& bounds) {
    const int n = inst.size();
    Model m;
    add_domain(m, inst);
    add_distance_system(m, inst, bounds, /*directed=*/true);

    m.add_var(sname(0), VarKind::integer, 1, 1);
    for (int v = 1; v < n; ++v) m.add_var(sname(v), VarKind::integer, 2, n);

    for (int v = 0; v < n; ++v) {
        LinearRow out, in;
        for (int w = 0; w < n; ++w) {
            if (v == w) continue;
            out.coefs.push_back({zname(v, w), 1.0});
            in.coefs.push_back({zname(w, v), 1.0});
        }
        out.sense = in.sense = Sense::eq;
        out.rhs = in.rhs = 1.0;
        m.add_linear(std::move(out), "C1");
        m.add_linear(std::move(in), "C2");
    }

    // ordering constraints; the closing vertex is exempt as usual
    for (int v = 0; v < n; ++v) {
        for (int w = 1; w < n; ++w) {
            if (v == w) continue;
            m.add_linear({{{sname(v), 1.0}, {sname(w), -1.0}, {zname(v, w), double(n)}},
                          Sense::le,
                          double(n - 1)},
                         "MTZ1");
        }
    }
    m.add_linear({{{sname(0), 1.0}}, Sense::eq, 1.0}, "MTZ2");
    for (int v = 1; v < n; ++v) {
        m.add_linear({{{sname(v), 1.0}}, Sense::ge, 2.0}, "MTZ3");
        m.add_linear({{{sname(v), 1.0}}, Sense::le, double(n)}, "MTZ3");
    }
    // lifted ordering rows (two-directional strengthening)
    for (int v = 0; v < n; ++v) {
        for (int w = 1; w < n; ++w) {
            if (v == w) continue;
            m.add_linear({{{sname(v), 1.0},
                           {sname(w), -1.0},
                           {zname(v, w), double(n)},
                           {zname(w, v), double(n - 2)}},
                          Sense::le,
                          double(n - 1)},
                         "MTZ4");
        }
    }
    for (int v = 1; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
            if (v == w) continue;
            m.add_linear({{{sname(v), 1.0}, {sname(w), -1.0}, {zname(w, v), double(n - 2)}},
                          Sense::le,
                          double(n - 1)},
                         "MTZ5");
        }
    }
    return m;
}

SecModel build_sec(const Instance& inst, const BoundsTable& bounds, bool symmetric) {
    const int n = inst.size();
    SecModel out;
    Model& m = out.model;
    add_domain(m, inst);
    add_distance_system(m, inst, bounds, /*directed=*/!symmetric);

    if (symmetric) {
        for (int v = 0; v < n; ++v) {
            LinearRow deg;
            for (int w = 0; w < n; ++w) {
                if (v == w) continue;
                deg.coefs.push_back({zname(std::min(v, w), std::max(v, w)), 1.0});
            }
            deg.sense = Sense::eq;
            deg.rhs = 2.0;
            m.add_linear(std::move(deg), "sSEC-degree");
        }
        out.note = "subtour elimination rows are generated lazily: call separate_sec on an "
                   "integral support to find violated subsets; shared edge variables assume "
                   "symmetric leg costs";
    } else {
        for (int v = 0; v < n; ++v) {
            LinearRow outr, inr;
            for (int w = 0; w < n; ++w) {
                if (v == w) continue;
                outr.coefs.push_back({zname(v, w), 1.0});
                inr.coefs.push_back({zname(w, v), 1.0});
            }
            outr.sense = inr.sense = Sense::eq;
            outr.rhs = inr.rhs = 1.0;
            m.add_linear(std::move(outr), "C1");
            m.add_linear(std::move(inr), "C2");
        }
        out.note = "subtour elimination rows are generated lazily: call separate_sec on an "
                   "integral support to find violated subsets";
    }
    return out;
}

TimeParams TimeParams::constant(const Instance& inst) {
    const int n = inst.size();
    TimeParams p;
    p.beta.assign(n, std::vector<std::vector<double>>(n, std::vector<double>(n, 1.0)));
    p.discount.assign(n, std::vector<double>(n));
    for (int t = 0; t < n; ++t)
        for (int v = 0; v < n; ++v) p.discount[t][v] = inst.elements[v].discount;
    return p;
}

Model build_time_dependent(const Instance& inst, const BoundsTable& bounds,
                           const TimeParams& params) {
    const int n = inst.size();
    if (static_cast<int>(params.beta.size()) != n ||
        static_cast<int>(params.discount.size()) != n)
        throw ValidationError("time-dependent parameters must cover exactly |V| stages");

    Model m;
    add_domain(m, inst);

    for (int v = 0; v < n; ++v)
        for (int t = 1; t <= n; ++t) m.add_var(tsuffix("y_" + std::to_string(v), t),
                                               VarKind::binary, 0, 1);
    for (int t = 1; t <= n; ++t)
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w) {
                if (v == w) continue;
                m.add_var(tsuffix(zname(v, w), t), VarKind::binary, 0, 1);
                double beta = params.beta[t - 1][v][w];
                m.add_var(tsuffix(dout(v, w), t), VarKind::continuous, 0,
                          beta * bounds.M(v, w));
                m.add_var(tsuffix(pname(v, w), t), VarKind::continuous, 0, kInf);
            }
    for (int t = 1; t <= n; ++t)
        for (int v = 0; v < n; ++v)
            m.add_var(tsuffix(din(v), t), VarKind::continuous, 0, kInf);

    for (int t = 1; t <= n; ++t) {
        LinearRow stage;
        for (int v = 0; v < n; ++v) stage.coefs.push_back({tsuffix("y_" + std::to_string(v), t), 1.0});
        stage.sense = Sense::eq;
        stage.rhs = 1.0;
        m.add_linear(std::move(stage), "TD-stage");
    }
    for (int v = 0; v < n; ++v) {
        LinearRow visit;
        for (int t = 1; t <= n; ++t) visit.coefs.push_back({tsuffix("y_" + std::to_string(v), t), 1.0});
        visit.sense = Sense::eq;
        visit.rhs = 1.0;
        m.add_linear(std::move(visit), "TD-visit");
    }
    for (int t = 1; t <= n; ++t) {
        int tn = (t < n) ? t + 1 : 1; // the last stage wraps to close the route
        const char* tag = (t < n) ? "TD-link" : "TD-link-wrap";
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w) {
                if (v == w) continue;
                m.add_linear({{{tsuffix("y_" + std::to_string(v), t), 1.0},
                               {tsuffix("y_" + std::to_string(w), tn), 1.0},
                               {tsuffix(zname(v, w), t), -1.0}},
                              Sense::le,
                              1.0},
                             tag);
            }
    }

    for (int t = 1; t <= n; ++t) {
        for (int v = 0; v < n; ++v) {
            for (int w = 0; w < n; ++w) {
                if (v == w) continue;
                double beta = params.beta[t - 1][v][w];
                SocConstraint sc;
                sc.u1 = {{{xcoord(1, v, 'x'), beta}, {xcoord(2, w, 'x'), -beta}}, 0.0};
                sc.u2 = {{{xcoord(1, v, 'y'), beta}, {xcoord(2, w, 'y'), -beta}}, 0.0};
                sc.rhs = {{{tsuffix(dout(v, w), t), 1.0}}, 0.0};
                m.add_soc(std::move(sc), "TD-D1");
                double M = beta * bounds.M(v, w);
                m.add_linear({{{tsuffix(pname(v, w), t), 1.0},
                               {tsuffix(dout(v, w), t), -1.0},
                               {tsuffix(zname(v, w), t), -M}},
                              Sense::ge,
                              -M},
                             "TD-LIN-Mc");
                m.add_linear({{{tsuffix(pname(v, w), t), 1.0},
                               {tsuffix(zname(v, w), t), -beta * bounds.m(v, w)}},
                              Sense::ge,
                              0.0},
                             "TD-LIN-Mc-lb");
            }
            // inner leg charged only at the visiting stage (big-M gate)
            double betav = params.beta[t - 1][v][v];
            double Mv = betav * bounds.M_in[v];
            SocConstraint sc;
            sc.u1 = {{{xcoord(1, v, 'x'), betav}, {xcoord(2, v, 'x'), -betav}}, 0.0};
            sc.u2 = {{{xcoord(1, v, 'y'), betav}, {xcoord(2, v, 'y'), -betav}}, 0.0};
            sc.rhs = {{{tsuffix(din(v), t), 1.0},
                       {tsuffix("y_" + std::to_string(v), t), -Mv}},
                      Mv};
            m.add_soc(std::move(sc), "TD-D2-gated");
        }
    }

    std::vector<std::pair<std::string, double>> obj;
    for (int t = 1; t <= n; ++t)
        for (int v = 0; v < n; ++v)
            for (int w = 0; w < n; ++w)
                if (v != w) obj.push_back({tsuffix(pname(v, w), t), 1.0});
    for (int t = 1; t <= n; ++t)
        for (int v = 0; v < n; ++v)
            obj.push_back({tsuffix(din(v), t), params.discount[t - 1][v]});
    m.objective = std::move(obj);
    return m;
}

// ---------------------------------------------------------------------------
// SEC separation
// ---------------------------------------------------------------------------

std::vector<std::vector<int>> separate_sec(
    int n, const std::vector<std::tuple<int, int, double>>& edges) {
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [v, w, val] : edges) {
        if (std::abs(val - std::round(val)) > 1e-6)
            throw std::domain_error("separation needs an integral support");
        if (std::round(val) < 0.5) continue;
        parent[find(v)] = find(w);
    }
    std::map<int, std::vector<int>> comps;
    for (int v = 0; v < n; ++v) comps[find(v)].push_back(v);
    if (comps.size() <= 1) return {};
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : comps) out.push_back(std::move(members));
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    return out;
}

// ---------------------------------------------------------------------------
// assignment checking
// ---------------------------------------------------------------------------

namespace {

double eval_affine(const AffineExpr& e, const std::map<std::string, double>& x) {
    double total = e.constant;
    for (const auto& [name, coef] : e.coefs) total += coef * x.at(name);
    return total;
}

} // namespace

CheckReport check_assignment(const Model& model, const std::map<std::string, double>& assignment,
                             double tol) {
    CheckReport report;
    for (const auto& var : model.vars) {
        auto it = assignment.find(var.name);
        if (it == assignment.end())
            throw std::domain_error("assignment is missing variable " + var.name);
        double x = it->second;
        if (x < var.lb - tol)
            report.violations.push_back(
                {"bound:" + var.name, "bound", var.lb - x, var.name + " below lower bound"});
        if (x > var.ub + tol)
            report.violations.push_back(
                {"bound:" + var.name, "bound", x - var.ub, var.name + " above upper bound"});
        if (var.kind != VarKind::continuous && std::abs(x - std::round(x)) > tol)
            report.violations.push_back({"int:" + var.name, "integrality",
                                         std::abs(x - std::round(x)),
                                         var.name + " is not integral"});
    }
    for (std::size_t i = 0; i < model.linear.size(); ++i) {
        const auto& row = model.linear[i];
        double lhs = 0.0;
        for (const auto& [name, coef] : row.coefs) lhs += coef * assignment.at(name);
        double viol = 0.0;
        if (row.sense == Sense::le) viol = lhs - row.rhs;
        else if (row.sense == Sense::ge) viol = row.rhs - lhs;
        else viol = std::abs(lhs - row.rhs);
        if (viol > tol)
            report.violations.push_back({"L" + std::to_string(i), model.linear_tags[i], viol,
                                         "linear row violated by " + format_real(viol)});
    }
    for (std::size_t i = 0; i < model.soc.size(); ++i) {
        const auto& row = model.soc[i];
        double u1 = eval_affine(row.u1, assignment);
        double u2 = eval_affine(row.u2, assignment);
        double rhs = eval_affine(row.rhs, assignment);
        double viol = std::hypot(u1, u2) - rhs;
        if (viol > tol)
            report.violations.push_back({"S" + std::to_string(i), model.soc_tags[i], viol,
                                         "conic row violated by " + format_real(viol)});
    }
    for (const auto& [name, coef] : model.objective)
        report.objective += coef * assignment.at(name);
    return report;
}

// ---------------------------------------------------------------------------
// canonical text format
// ---------------------------------------------------------------------------

namespace {

std::string bound_str(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return format_real(v);
}

double parse_bound(const std::string& s, int line) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    try {
        return std::stod(s);
    } catch (...) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" + s + "'");
    }
}

void write_pairs(std::ostringstream& out, std::vector<std::pair<std::string, double>> coefs) {
    std::sort(coefs.begin(), coefs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [name, coef] : coefs) out << " " << name << ":" << format_real(coef);
}

std::vector<std::pair<std::string, double>> parse_pairs(std::istringstream& in, int line) {
    std::vector<std::pair<std::string, double>> out;
    std::string token;
    while (in >> token) {
        auto colon = token.rfind(':');
        if (colon == std::string::npos)
            throw ParseError("line " + std::to_string(line) + ": expected name:coef, got '" +
                             token + "'");
        out.push_back({token.substr(0, colon), parse_bound(token.substr(colon + 1), line)});
    }
    return out;
}

} // namespace

std::string export_model(const Model& model) {
    std::ostringstream out;
    out << "XPPN-MODEL v1\n";
    out << "VARS " << model.vars.size() << "\n";
    for (const auto& v : model.vars) {
        const char* kind = v.kind == VarKind::continuous ? "continuous"
                           : v.kind == VarKind::binary   ? "binary"
                                                         : "integer";
        out << v.name << " " << kind << " " << bound_str(v.lb) << " " << bound_str(v.ub) << "\n";
    }
    out << "LINEAR " << model.linear.size() << "\n";
    for (const auto& row : model.linear) {
        const char* sense = row.sense == Sense::le ? "<=" : row.sense == Sense::eq ? "=" : ">=";
        out << sense << " " << format_real(row.rhs);
        write_pairs(out, row.coefs);
        out << "\n";
    }
    out << "SOC " << model.soc.size() << "\n";
    for (const auto& row : model.soc) {
        out << "U1 " << format_real(row.u1.constant);
        write_pairs(out, row.u1.coefs);
        out << "\nU2 " << format_real(row.u2.constant);
        write_pairs(out, row.u2.coefs);
        out << "\nRHS " << format_real(row.rhs.constant);
        write_pairs(out, row.rhs.coefs);
        out << "\n";
    }
    out << "OBJ\n";
    {
        std::ostringstream line;
        write_pairs(line, model.objective);
        std::string s = line.str();
        if (!s.empty() && s[0] == ' ') s = s.substr(1);
        out << s << "\n";
    }
    out << "ANNOT " << model.linear_tags.size() + model.soc_tags.size() << "\n";
    for (std::size_t i = 0; i < model.linear_tags.size(); ++i)
        out << "L" << i << " " << model.linear_tags[i] << "\n";
    for (std::size_t i = 0; i < model.soc_tags.size(); ++i)
        out << "S" << i << " " << model.soc_tags[i] << "\n";
    return out.str();
}

Model import_model(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto next_line = [&]() -> std::string {
        if (!std::getline(in, line)) throw ParseError("unexpected end of model document");
        ++lineno;
        return line;
    };

    if (next_line() != "XPPN-MODEL v1") throw ParseError("line 1: expected 'XPPN-MODEL v1'");

    Model m;
    std::istringstream header(next_line());
    std::string word;
    std::size_t count = 0;
    header >> word >> count;
    if (word != "VARS") throw ParseError("line " + std::to_string(lineno) + ": expected VARS");
    for (std::size_t i = 0; i < count; ++i) {
        std::istringstream row(next_line());
        std::string name, kind, lb, ub;
        if (!(row >> name >> kind >> lb >> ub))
            throw ParseError("line " + std::to_string(lineno) + ": malformed variable");
        VarKind k = kind == "continuous" ? VarKind::continuous
                    : kind == "binary"   ? VarKind::binary
                    : kind == "integer"  ? VarKind::integer
                                         : throw ParseError("line " + std::to_string(lineno) +
                                                            ": unknown kind '" + kind + "'");
        m.add_var(name, k, parse_bound(lb, lineno), parse_bound(ub, lineno));
    }

    header = std::istringstream(next_line());
    header >> word >> count;
    if (word != "LINEAR") throw ParseError("line " + std::to_string(lineno) + ": expected LINEAR");
    std::vector<LinearRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        std::istringstream row(next_line());
        std::string sense, rhs;
        if (!(row >> sense >> rhs))
            throw ParseError("line " + std::to_string(lineno) + ": malformed linear row");
        LinearRow r;
        r.sense = sense == "<=" ? Sense::le
                  : sense == "=" ? Sense::eq
                  : sense == ">=" ? Sense::ge
                                  : throw ParseError("line " + std::to_string(lineno) +
                                                     ": unknown sense '" + sense + "'");
        r.rhs = parse_bound(rhs, lineno);
        r.coefs = parse_pairs(row, lineno);
        rows.push_back(std::move(r));
    }

    header = std::istringstream(next_line());
    header >> word >> count;
    if (word != "SOC") throw ParseError("line " + std::to_string(lineno) + ": expected SOC");
    std::vector<SocConstraint> socs;
    for (std::size_t i = 0; i < count; ++i) {
        SocConstraint sc;
        // three labeled affine lines per constraint
        auto read_expr = [&](const char* label) {
            std::istringstream row(next_line());
            std::string tag, c;
            if (!(row >> tag >> c) || tag != label)
                throw ParseError("line " + std::to_string(lineno) + ": expected " +
                                 std::string(label));
            AffineExpr e;
            e.constant = parse_bound(c, lineno);
            e.coefs = parse_pairs(row, lineno);
            return e;
        };
        sc.u1 = read_expr("U1");
        sc.u2 = read_expr("U2");
        sc.rhs = read_expr("RHS");
        socs.push_back(std::move(sc));
    }

    if (next_line() != "OBJ") throw ParseError("line " + std::to_string(lineno) + ": expected OBJ");
    {
        std::istringstream row(next_line());
        m.objective = parse_pairs(row, lineno);
    }

    header = std::istringstream(next_line());
    header >> word >> count;
    if (word != "ANNOT") throw ParseError("line " + std::to_string(lineno) + ": expected ANNOT");
    if (count != rows.size() + socs.size())
        throw ParseError("line " + std::to_string(lineno) +
                         ": annotation count does not match the constraint count");
    std::vector<std::string> ltags(rows.size()), stags(socs.size());
    for (std::size_t i = 0; i < count; ++i) {
        std::istringstream row(next_line());
        std::string id, tag;
        if (!(row >> id >> tag))
            throw ParseError("line " + std::to_string(lineno) + ": malformed annotation");
        std::size_t idx = std::stoul(id.substr(1));
        if (id[0] == 'L' && idx < ltags.size()) ltags[idx] = tag;
        else if (id[0] == 'S' && idx < stags.size()) stags[idx] = tag;
        else throw ParseError("line " + std::to_string(lineno) + ": unknown annotation id " + id);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) m.add_linear(std::move(rows[i]), ltags[i]);
    for (std::size_t i = 0; i < socs.size(); ++i) m.add_soc(std::move(socs[i]), stags[i]);
    return m;
}

// ---------------------------------------------------------------------------
// assignments induced by tour solutions
// ---------------------------------------------------------------------------

std::map<std::string, double> assignment_from_solution(const Instance& inst,
                                                       const BoundsTable& bounds,
                                                       const TourSolution& sol,
                                                       const Model& model) {
    (void)bounds;
    const int n = inst.size();
    std::map<std::string, double> a;

    std::vector<int> pos(n, 0);
    const auto& order = sol.tour.order();
    for (int k = 0; k < n; ++k) pos[order[k]] = k;
    std::vector<std::vector<char>> edge(n, std::vector<char>(n, 0));
    for (auto [v, w] : sol.tour.edges()) edge[v][w] = 1;

    auto put = [&](const std::string& name, double value) {
        if (model.has_var(name)) a[name] = value;
    };

    for (int v = 0; v < n; ++v) {
        put(xcoord(1, v, 'x'), sol.exit[v].x);
        put(xcoord(1, v, 'y'), sol.exit[v].y);
        put(xcoord(2, v, 'x'), sol.entry[v].x);
        put(xcoord(2, v, 'y'), sol.entry[v].y);
        put(sname(v), double(pos[v] + 1));
        put(din(v), dist(sol.entry[v], sol.exit[v]));
    }

    std::vector<std::vector<double>> ddist(n, std::vector<double>(n, 0.0));
    for (int v = 0; v < n; ++v)
        for (int w = 0; w < n; ++w)
            if (v != w) ddist[v][w] = dist(sol.exit[v], sol.entry[w]);

    const bool timed = model.has_var(tsuffix("y_0", 1));
    for (int v = 0; v < n; ++v) {
        for (int w = 0; w < n; ++w) {
            if (v == w) continue;
            if (model.has_var(zname(v, w)) && !timed) {
                if (v < w && !model.has_var(zname(w, v))) {
                    // symmetric variables: shared over the unordered pair
                    bool on = edge[v][w] || edge[w][v];
                    double d = std::max(ddist[v][w], ddist[w][v]);
                    put(zname(v, w), on ? 1.0 : 0.0);
                    put(dout(v, w), d);
                    put(pname(v, w), on ? d : 0.0);
                } else if (model.has_var(zname(w, v))) {
                    put(zname(v, w), edge[v][w] ? 1.0 : 0.0);
                    put(dout(v, w), ddist[v][w]);
                    put(pname(v, w), edge[v][w] ? ddist[v][w] : 0.0);
                }
            }
        }
    }

    for (int v = 0; v < n; ++v) {
        const Element& e = inst.elements[v];
        if (const Chain* chain = std::get_if<Chain>(&e.shape)) {
            int ns = chain->segments();
            double l1 = sol.lambda[v][1]; // exit parameter pairs with x1
            double l2 = sol.lambda[v][0];
            for (int i : {1, 2}) {
                double l = (i == 1) ? l1 : l2;
                put(lam(i, v), l);
                int seg = std::min(static_cast<int>(std::floor(l)) + 1, ns);
                double g = l - double(seg - 1);
                for (int j = 1; j <= ns + 1; ++j) put(gam(i, v, j), 0.0);
                put(gam(i, v, seg), 1.0 - g);
                if (g != 0.0) put(gam(i, v, seg + 1), g);
                for (int j = 1; j <= ns; ++j) put(mu(i, v, j), j == seg ? 1.0 : 0.0);
            }
            double diff = l1 - l2;
            put(uname(v), diff >= 0 ? 0.0 : 1.0);
            put(lammax(v), diff >= 0 ? diff : 0.0);
            put(lammin(v), diff >= 0 ? 0.0 : -diff);
        } else if (const UnionSoc* uni = std::get_if<UnionSoc>(&e.shape)) {
            for (int i : {1, 2}) {
                Point p = (i == 1) ? sol.exit[v] : sol.entry[v];
                int best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (int j = 0; j < static_cast<int>(uni->members.size()); ++j) {
                    double d = dist(project_socset(uni->members[j], p), p);
                    if (d < best_d - 1e-15) {
                        best_d = d;
                        best = j;
                    }
                }
                for (int j = 0; j < static_cast<int>(uni->members.size()); ++j)
                    put(chi(i, v, j), j == best ? 1.0 : 0.0);
            }
        }
    }

    if (timed) {
        // stage-indexed assignment assuming the constant parameter set
        for (int v = 0; v < n; ++v)
            for (int t = 1; t <= n; ++t)
                put(tsuffix("y_" + std::to_string(v), t), pos[v] + 1 == t ? 1.0 : 0.0);
        for (int t = 1; t <= n; ++t) {
            int tn = (t < n) ? t + 1 : 1;
            for (int v = 0; v < n; ++v) {
                for (int w = 0; w < n; ++w) {
                    if (v == w) continue;
                    bool on = (pos[v] + 1 == t) && (pos[w] + 1 == tn);
                    put(tsuffix(zname(v, w), t), on ? 1.0 : 0.0);
                    put(tsuffix(dout(v, w), t), ddist[v][w]);
                    put(tsuffix(pname(v, w), t), on ? ddist[v][w] : 0.0);
                }
                bool here = pos[v] + 1 == t;
                put(tsuffix(din(v), t), here ? dist(sol.entry[v], sol.exit[v]) : 0.0);
            }
        }
    }

    return a;
}

} // namespace xppn
