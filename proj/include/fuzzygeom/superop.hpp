#pragma once

#include <functional>

#include "fuzzygeom/cmatrix.hpp"

namespace fuzzygeom {

// Matrix form M of a linear map L on dim x dim matrices: M vec(X) = vec(L(X))
// with column-major vectorization, vec index r = i + j*dim.
// L is spot-checked for linearity on random pairs (fixed seed) to 1e-10.
CMatrix superoperator(const std::function<CMatrix(const CMatrix&)>& L, int dim);

}  // namespace fuzzygeom
