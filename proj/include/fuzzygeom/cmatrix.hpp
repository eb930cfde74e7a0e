#pragma once

#include <complex>
#include <vector>

#include "fuzzygeom/errors.hpp"

namespace fuzzygeom {

using cplx = std::complex<double>;

// Dense square complex matrix, row-major. Immutable-by-convention value type:
// every operation returns a new matrix.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {}

    static CMatrix identity(int dim);
    static CMatrix diag(const std::vector<double>& d);
    static CMatrix diag(const std::vector<cplx>& d);

    int dim() const { return dim_; }
    bool empty() const { return dim_ == 0; }

    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

    const std::vector<cplx>& data() const { return a_; }
    std::vector<cplx>& data() { return a_; }

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    CMatrix adjoint() const;
    CMatrix transpose() const;
    cplx trace() const;
    double frobenius_norm() const;
    double max_abs() const;
    // max_ij |a_ij - conj(a_ji)|
    double hermiticity_defect() const;
    bool is_finite() const;
    bool is_diagonal() const;  // exact (zero off-diagonal entries)

private:
    int dim_ = 0;
    std::vector<cplx> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);
CMatrix operator-(CMatrix a);

// ab - ba
CMatrix commutator(const CMatrix& a, const CMatrix& b);

// Tr(g a b)
cplx weighted_trace_pairing(const CMatrix& g, const CMatrix& a, const CMatrix& b);

void check_same_dim(const CMatrix& a, const CMatrix& b, const char* op);

}  // namespace fuzzygeom
