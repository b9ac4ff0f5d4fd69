#pragma once

#include <string>

#include "xppn/instance.hpp"
#include "xppn/tour.hpp"

namespace xppn {

// Deterministic SVG picture of an instance and a solution: filled elements
// with index labels, entry/exit markers, solid outside edges, dashed inner
// legs and a total-cost caption.
std::string render_svg(const Instance& inst, const TourSolution& sol);

} // namespace xppn
