#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "xppn/bounds.hpp"
#include "xppn/instance.hpp"
#include "xppn/tour.hpp"

namespace xppn {

enum class VarKind { continuous, binary, integer };
enum class Sense { le, eq, ge };

struct Variable {
    std::string name;
    VarKind kind = VarKind::continuous;
    double lb = 0.0;
    double ub = 0.0;
};

struct LinearRow {
    std::vector<std::pair<std::string, double>> coefs;
    Sense sense = Sense::le;
    double rhs = 0.0;
};

struct AffineExpr {
    std::vector<std::pair<std::string, double>> coefs;
    double constant = 0.0;
};

// ||(u1, u2)|| <= rhs, all three affine
struct SocConstraint {
    AffineExpr u1, u2, rhs;
};

// Solver-agnostic mixed-integer conic model. Every constraint carries an
// annotation naming the constraint family it implements.
struct Model {
    std::vector<Variable> vars;
    std::vector<LinearRow> linear;
    std::vector<std::string> linear_tags;
    std::vector<SocConstraint> soc;
    std::vector<std::string> soc_tags;
    std::vector<std::pair<std::string, double>> objective; // minimize

    void add_var(const std::string& name, VarKind kind, double lb, double ub);
    void add_linear(LinearRow row, const std::string& tag);
    void add_soc(SocConstraint row, const std::string& tag);
    int var_index(const std::string& name) const; // -1 when absent
    bool has_var(const std::string& name) const { return var_index(name) >= 0; }

private:
    std::map<std::string, int> index_;
};

// Compact order-variable formulation (Miller-Tucker-Zemlin connectivity).
Model build_mtz(const Instance& inst, const BoundsTable& bounds);

// Degree-constrained formulation whose subtour elimination rows are not
// materialized (exponential family); the note records that subtour
// feasibility is delegated to separate_sec.
struct SecModel {
    Model model;
    std::string note;
};
SecModel build_sec(const Instance& inst, const BoundsTable& bounds, bool symmetric);

// Stage-indexed travel scaling: beta[t][v][w] scales the outside leg from v
// to w at stage t (1-based t stored at index t-1), beta[t][v][v] scales the
// inner leg of v, discount[t][v] is the stage-dependent inner cost factor.
struct TimeParams {
    std::vector<std::vector<std::vector<double>>> beta;
    std::vector<std::vector<double>> discount;

    static TimeParams constant(const Instance& inst);
};
Model build_time_dependent(const Instance& inst, const BoundsTable& bounds,
                           const TimeParams& params);

// Connected components of the integral support graph; empty when the
// support is a single spanning component, otherwise every subtour sorted by
// size (shortest first). Throws std::domain_error on fractional input.
std::vector<std::vector<int>> separate_sec(
    int n, const std::vector<std::tuple<int, int, double>>& edges);

struct Violation {
    std::string constraint; // "L<i>", "S<i>", "bound:<var>", "int:<var>"
    std::string tag;
    double amount = 0.0;
    std::string detail;
};

struct CheckReport {
    std::vector<Violation> violations;
    double objective = 0.0;
};

// Verifies an assignment against all bounds, integrality, linear and conic
// rows. Throws std::domain_error when a declared variable is missing.
CheckReport check_assignment(const Model& model, const std::map<std::string, double>& assignment,
                             double tol);

// Canonical text form (see README); export-then-import is the identity and
// the output is byte-stable.
std::string export_model(const Model& model);
Model import_model(const std::string& text);

// Variable assignment induced by a tour solution, covering every variable of
// the given model (works for the MTZ, SEC and time-dependent builders).
std::map<std::string, double> assignment_from_solution(const Instance& inst,
                                                       const BoundsTable& bounds,
                                                       const TourSolution& sol,
                                                       const Model& model);

} // namespace xppn
