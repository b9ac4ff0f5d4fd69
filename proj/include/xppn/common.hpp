#pragma once

#include <stdexcept>
#include <string>

namespace xppn {

// Thrown when a text document (instance, solution, model) cannot be parsed.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when parsed or constructed data violates a structural invariant.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Canonical text form of a real number: up to 17 significant digits,
// locale-independent, round-trips any double exactly. All file formats
// in this project use it so exports are byte-stable across platforms.
std::string format_real(double v);

// Index of the unordered pair (v,w) in a dense n*n symmetric table.
inline int edge_index(int n, int v, int w) { return v * n + w; }

} // namespace xppn
