#pragma once

#include <stdexcept>
#include <string>

namespace fuzzygeom {

// Numerical failure at runtime (singular gamma, inadmissible hbar,
// eigensolver breakdown, ...). CLI maps this to exit code 1.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A stated precondition refuses the requested computation (e.g. Gauss-Bonnet
// quadrature on a non-periodic chart). CLI maps this to exit code 3.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fuzzygeom
