#pragma once

#include <utility>
#include <vector>

#include "xppn/common.hpp"
#include "xppn/instance.hpp"
#include "xppn/tour.hpp"

namespace xppn {

// Precomputed distance bounds: for every unordered element pair (v,w) the
// exact set distance m_out and an upper bound M_out on the point-to-point
// distance, plus a per-element diameter bound M_in. Symmetric by
// construction.
struct BoundsTable {
    int n = 0;
    std::vector<double> m_out; // n*n, m_out[v*n+w]
    std::vector<double> M_out; // n*n
    std::vector<double> M_in;  // n
    std::vector<char> collapse; // entry/exit may be merged (f_v >= 1, convex)

    double m(int v, int w) const { return m_out[edge_index(n, v, w)]; }
    double M(int v, int w) const { return M_out[edge_index(n, v, w)]; }
};

BoundsTable compute_bounds(const Instance& inst, double tol = 1e-7);

// Per-element hint: with discount >= 1 on a convex element the entry and
// exit points of an optimal solution coincide, so the solvers may use a
// single point.
std::vector<bool> collapse_entry_exit(const Instance& inst);

// Containment reduction: a convex element strictly containing another
// remaining element is redundant and can be dropped without changing the
// optimal value.
struct Reduction {
    std::vector<int> kept;                      // original indices, in order
    std::vector<std::pair<int, int>> deleted;   // (deleted index, witness index)
};

std::pair<Instance, Reduction> preprocess(const Instance& inst);

// Lifts a solution of the reduced instance back to the original index space:
// deleted elements are re-inserted next to their witness at zero extra cost.
TourSolution extend_solution(const Instance& original, const Reduction& red,
                             const TourSolution& reduced);

} // namespace xppn
