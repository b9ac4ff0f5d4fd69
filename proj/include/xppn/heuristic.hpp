#pragma once

#include <cstdint>
#include <vector>

#include "xppn/instance.hpp"
#include "xppn/tour.hpp"
#include "xppn/touring.hpp"

namespace xppn {

struct HeuristicConfig {
    int vns_attempts = 25;
    int vns_neighborhood_size = 5;
    int vns_iterations = 10;
    double weber_tol = 1e-7;
    int weber_max_iters = 1000;
    std::uint64_t seed = 0;
    SubproblemConfig subproblem;
};

struct WeberResult {
    Point center;
    std::vector<Point> reps; // one representative per element
    double objective = 0.0;  // sum of distances reps -> center
    std::vector<double> outer_history; // non-increasing
};

// Clustering phase: a single-facility median problem over the elements,
// solved by alternating projection of the representatives with Weiszfeld
// steps for the center.
WeberResult weber_cluster(const Instance& inst, const HeuristicConfig& cfg = {});

// Ordering phase: nearest-neighbor start, full 2-opt local search, shaking
// by k random segment reversals with k cycling up to the neighborhood size.
Tour vns_tour(const std::vector<Point>& points, const HeuristicConfig& cfg = {});

// Both phases followed by fixed-tour refinement; always returns a feasible
// solution.
TourSolution heuristic_solve(const Instance& inst, const HeuristicConfig& cfg = {});

double tour_length(const std::vector<Point>& points, const Tour& tour);

} // namespace xppn
