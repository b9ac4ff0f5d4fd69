#pragma once

#include <array>
#include <utility>
#include <vector>

#include "xppn/geometry.hpp"

namespace xppn {

// A cyclic visiting order over element indices, kept in canonical form:
// rotated so the smallest index comes first, direction chosen so the second
// entry is smaller than the last. Equal tours therefore compare equal.
class Tour {
public:
    Tour() = default;
    explicit Tour(std::vector<int> order);

    const std::vector<int>& order() const { return order_; }
    int size() const { return static_cast<int>(order_.size()); }

    // Consecutive pairs in tour direction, including the closing edge.
    std::vector<std::pair<int, int>> edges() const;

    static Tour identity(int n);

    bool operator==(const Tour& o) const { return order_ == o.order_; }
    bool operator!=(const Tour& o) const { return order_ != o.order_; }
    bool operator<(const Tour& o) const { return order_ < o.order_; }

private:
    std::vector<int> order_;
};

// A fully evaluated tour: chosen entry (arrival) and exit (departure) point
// per element, chain parameters, and the cost split into outside edges and
// discounted inner legs. Outside edge k connects exit[order[k]] to
// entry[order[k+1]].
struct TourSolution {
    Tour tour;
    std::vector<Point> entry;                 // indexed by element
    std::vector<Point> exit;                  // indexed by element
    std::vector<std::array<double, 2>> lambda; // chain (entry, exit) parameters
    double cost = 0.0;
    std::vector<double> out_costs; // per tour position
    std::vector<double> in_costs;  // per element, already discounted
    bool approximate = false;
    std::vector<double> sweep_costs; // solver trace, non-increasing
};

} // namespace xppn
