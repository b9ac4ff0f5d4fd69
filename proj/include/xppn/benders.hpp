#pragma once

#include <string>
#include <vector>

#include "xppn/bounds.hpp"
#include "xppn/common.hpp"
#include "xppn/heuristic.hpp"
#include "xppn/instance.hpp"
#include "xppn/tour.hpp"

namespace xppn {

// One optimality cut generated from a solved fixed-tour subproblem:
//   P >= d(source) + sum_{e in source} M_e (z_e - 1) + sum_{e not in source} m_e z_e
// stored as base + per-edge coefficients so it can be evaluated on any tour.
// The initial cut P >= sum_e m_e z_e has no source.
struct BendersCut {
    double base = 0.0;
    int n = 0;
    std::vector<double> coef; // n*n symmetric
    bool has_source = false;
    Tour source;
    double source_cost = 0.0;

    double edge(int v, int w) const { return coef[edge_index(n, v, w)]; }
};

double cut_value(const BendersCut& cut, const Tour& tour);

enum class SolveStatus { optimal, gap_limit, time_limit };

struct BendersConfig {
    double time_limit_s = 7200.0;
    int enum_threshold = 10; // exhaustive canonical enumeration up to here
    int size_cap = 16;
    int max_iterations = 100000;
    double safety_rel = 1e-2; // margin subtracted from approximate subproblem costs
    HeuristicConfig heuristic;
};

struct MasterResult {
    Tour tour;
    double value = 0.0;
};

// Minimizes max over cuts of cut_value over all canonical tours.
// Depth-first search over partial paths with per-cut partial lower bounds;
// an exhaustive scan below cfg.enum_threshold.
MasterResult master_solve(const std::vector<BendersCut>& cuts, const Instance& inst,
                          const BoundsTable& bounds, const BendersConfig& cfg);

struct BendersIterationLog {
    int iter = 0;
    double lb = 0.0, ub = 0.0, gap = 0.0;
    Tour tour;
    int cut_count = 0;
    double elapsed_s = 0.0;
};

struct BendersResult {
    TourSolution best;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    int iterations = 0;
    std::vector<BendersCut> cuts;
    SolveStatus status = SolveStatus::optimal;
    double wall_time_s = 0.0;
    bool heuristic_cuts = false; // some cut came from an approximate subproblem
    std::vector<BendersIterationLog> log;
};

// Iterates master tour selection against fixed-tour subproblems until the
// bound gap closes below eps (eps < 0 selects the scale-free default
// 1e-4 * (1 + initial upper bound)). Warm-started from the two-phase
// heuristic.
BendersResult benders_solve(const Instance& inst, double eps, const BendersConfig& cfg = {});

// One line per iteration: iter, LB, UB, gap, tour, cut_count, elapsed.
std::string format_run_log(const BendersResult& result);

} // namespace xppn
