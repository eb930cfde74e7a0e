#include "fuzzygeom/cmatrix.hpp"

#include <cmath>
#include <string>

namespace fuzzygeom {

void check_same_dim(const CMatrix& a, const CMatrix& b, const char* op) {
    if (a.dim() != b.dim())
        throw std::invalid_argument(std::string(op) + ": dimension mismatch (" +
                                    std::to_string(a.dim()) + " vs " + std::to_string(b.dim()) + ")");
}

CMatrix CMatrix::identity(int dim) {
    CMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const std::vector<double>& d) {
    CMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::diag(const std::vector<cplx>& d) {
    CMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.dim_; ++i) m(i, i) = d[i];
    return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    check_same_dim(*this, o, "operator+");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    check_same_dim(*this, o, "operator-");
    for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(dim_);
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) m(j, i) = (*this)(i, j);
    return m;
}

cplx CMatrix::trace() const {
    cplx t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& v : a_) s += std::norm(v);
    return std::sqrt(s);
}

double CMatrix::max_abs() const {
    double s = 0.0;
    for (const auto& v : a_) s = std::max(s, std::abs(v));
    return s;
}

double CMatrix::hermiticity_defect() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
        for (int j = i; j < dim_; ++j)
            s = std::max(s, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
    return s;
}

bool CMatrix::is_finite() const {
    for (const auto& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

bool CMatrix::is_diagonal() const {
    for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j)
            if (i != j && (*this)(i, j) != 0.0) return false;
    return true;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
CMatrix operator-(CMatrix a) { return a *= -1.0; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    check_same_dim(a, b, "operator*");
    const int n = a.dim();
    CMatrix c(n);
    // Diagonal fast paths keep large (bi)diagonal axial matrices cheap.
    if (a.is_diagonal()) {
        for (int i = 0; i < n; ++i) {
            const cplx d = a(i, i);
            if (d == 0.0) continue;
            for (int j = 0; j < n; ++j) c(i, j) = d * b(i, j);
        }
        return c;
    }
    if (b.is_diagonal()) {
        for (int j = 0; j < n; ++j) {
            const cplx d = b(j, j);
            if (d == 0.0) continue;
            for (int i = 0; i < n; ++i) c(i, j) = a(i, j) * d;
        }
        return c;
    }
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const cplx aik = a(i, k);
            if (aik == 0.0) continue;
            const cplx* brow = &b.data()[static_cast<size_t>(k) * n];
            cplx* crow = &c.data()[static_cast<size_t>(i) * n];
            for (int j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
    check_same_dim(a, b, "commutator");
    return a * b - b * a;
}

cplx weighted_trace_pairing(const CMatrix& g, const CMatrix& a, const CMatrix& b) {
    check_same_dim(g, a, "weighted_trace_pairing");
    check_same_dim(a, b, "weighted_trace_pairing");
    // Tr(g a b) = sum_{i,k,j} g_ik a_kj b_ji without forming products.
    const int n = g.dim();
    cplx t = 0.0;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            cplx gab = 0.0;
            for (int i = 0; i < n; ++i) gab += b(j, i) * g(i, k);
            t += gab * a(k, j);
        }
    return t;
}

}  // namespace fuzzygeom
