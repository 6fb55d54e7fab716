#pragma once

#include <stdexcept>
#include <string>

namespace pgc {

// Breakdown of a numerical procedure (Newton divergence, degenerate slit
// geometry, conformal-map failure). Distinct from invalid input.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pgc
