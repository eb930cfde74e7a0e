#pragma once

#include <functional>
#include <vector>

#include "fuzzygeom/cmatrix.hpp"

namespace fuzzygeom {

struct HermitianSpectrum {
    std::vector<double> eigenvalues;  // ascending
    CMatrix eigenvectors;             // columns, unitary
};

// Cyclic complex Jacobi diagonalization. Input must be Hermitian to
// 1e-10 relative (Frobenius scale); it is symmetrized before iterating.
HermitianSpectrum hermitian_eig(const CMatrix& a);

// Largest singular value, via the spectrum of a†a.
double operator_norm(const CMatrix& a);

// V diag(phi(lambda)) V† by spectral calculus; phi must be finite at every
// eigenvalue (NumericalError otherwise, reporting the offending eigenvalue).
CMatrix apply_function(const CMatrix& a, const std::function<double(double)>& phi);

}  // namespace fuzzygeom
