#pragma once

#include <cstdint>
#include <string>

#include "xppn/instance.hpp"
#include "xppn/tour.hpp"

namespace xppn {

struct SubproblemConfig {
    double tol = 1e-7;          // relative sweep-improvement stop
    int max_sweeps = 500;
    int multistarts = 5;
    std::uint64_t seed = 0;
    long long combo_cap = 100000; // chain/union restriction budget
};

// Assembles the cost of a given point assignment along the tour. Points must
// lie in their elements (membership tolerance 1e-6); chain parameters are
// recovered by projection. Coverage is not enforced here.
TourSolution evaluate(const Instance& inst, const Tour& tour,
                      const std::vector<Point>& entry, const std::vector<Point>& exit);

// Minimizes the tour cost over the entry/exit points of every element for a
// fixed visiting order: block-coordinate projected descent over convex
// elements, exact enumeration of segment/member restrictions for chains and
// unions (bound-pruned; falls back to the blockwise solution flagged
// `approximate` when the budget is exhausted).
TourSolution solve_fixed_tour(const Instance& inst, const Tour& tour,
                              const SubproblemConfig& cfg = {});

std::string write_solution(const TourSolution& sol, const Instance& inst);
TourSolution read_solution(const std::string& text, const Instance& inst);

} // namespace xppn
