#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xppn/geometry.hpp"

namespace xppn {

// A problem instance: an ordered list of elements plus the generation
// metadata needed to reproduce it.
struct Instance {
    std::string name;
    std::uint64_t seed = 0;
    int radii_class = 1; // 1..4
    int mode = 1;        // 1..4
    std::vector<Element> elements;

    int size() const { return static_cast<int>(elements.size()); }
};

// Throws ValidationError when a structural invariant fails; messages name
// the offending element index.
void validate_instance(const Instance& inst);

// Random instance following the benchmark protocol: centers and breakpoints
// uniform in [0,100]^2, radii uniform in the class range ([0,5], [5,10],
// [10,15], [15,20]), element kinds per mode (1 circles, 2 regular polygons,
// 3 chains, 4 mixture). Deterministic for fixed arguments; the exact draw
// order is documented in the README.
Instance generate(int size, int radii_class, int mode, std::uint64_t seed);

// Canonical UTF-8 text form (JSON). write_instance output is byte-stable;
// read_instance accepts any JSON with the documented schema.
std::string write_instance(const Instance& inst);
Instance read_instance(const std::string& text);

} // namespace xppn
