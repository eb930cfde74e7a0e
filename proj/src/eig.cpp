#include "fuzzygeom/eig.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fuzzygeom {

namespace {

double offdiagonal_mass(const CMatrix& b) {
    double s = 0.0;
    const int n = b.dim();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) s += std::norm(b(i, j));
    return std::sqrt(s);
}

void check_hermitian(const CMatrix& a, const char* who) {
    if (!a.is_finite()) throw std::invalid_argument(std::string(who) + ": non-finite entries");
    const double scale = a.frobenius_norm();
    if (a.hermiticity_defect() > 1e-10 * std::max(scale, 1e-300))
        throw std::invalid_argument(std::string(who) + ": input is not Hermitian within tolerance");
}

}  // namespace

HermitianSpectrum hermitian_eig(const CMatrix& a) {
    check_hermitian(a, "hermitian_eig");
    const int n = a.dim();

    // Work on the Hermitian part; rounding-level asymmetry is tolerated above.
    CMatrix b(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) b(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(b.frobenius_norm(), 1e-300);
    const double target = 1e-12 * scale;  // off-diagonal mass tolerance
    const int max_sweeps = 80;

    int sweep = 0;
    while (offdiagonal_mass(b) > target) {
        if (++sweep > max_sweeps)
            throw NumericalError("hermitian_eig: Jacobi iteration failed to converge");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx beta = b(p, q);
                const double rho = std::abs(beta);
                if (rho <= 1e-2 * target / n) continue;
                const double phi = std::arg(beta);
                const double tau = (b(q, q).real() - b(p, p).real()) / (2.0 * rho);
                const double sgn = (tau >= 0.0) ? 1.0 : -1.0;
                const double t = sgn / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const cplx eip(std::cos(phi), std::sin(phi));
                const cplx sp = s * eip;             // s e^{i phi}
                const cplx sm = std::conj(sp);       // s e^{-i phi}
                // B <- U† B U with U = [[c, sp], [-sm, c]] on the (p,q) plane.
                for (int i = 0; i < n; ++i) {        // B <- B U (columns p,q)
                    const cplx bip = b(i, p), biq = b(i, q);
                    b(i, p) = c * bip - sm * biq;
                    b(i, q) = sp * bip + c * biq;
                }
                for (int j = 0; j < n; ++j) {        // B <- U† B (rows p,q)
                    const cplx bpj = b(p, j), bqj = b(q, j);
                    b(p, j) = c * bpj - sp * bqj;
                    b(q, j) = sm * bpj + c * bqj;
                }
                b(p, q) = 0.0;
                b(q, p) = 0.0;
                b(p, p) = cplx(b(p, p).real(), 0.0);
                b(q, q) = cplx(b(q, q).real(), 0.0);
                for (int i = 0; i < n; ++i) {        // V <- V U
                    const cplx vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - sm * viq;
                    v(i, q) = sp * vip + c * viq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return b(i, i).real() < b(j, j).real(); });

    HermitianSpectrum out;
    out.eigenvalues.resize(n);
    out.eigenvectors = CMatrix(n);
    for (int k = 0; k < n; ++k) {
        out.eigenvalues[k] = b(order[k], order[k]).real();
        for (int i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
    }
    return out;
}

double operator_norm(const CMatrix& a) {
    if (a.dim() == 0) return 0.0;
    if (!a.is_finite()) throw std::invalid_argument("operator_norm: non-finite entries");
    if (a.is_diagonal()) return a.max_abs();
    const auto spec = hermitian_eig(a.adjoint() * a);
    return std::sqrt(std::max(0.0, spec.eigenvalues.back()));
}

CMatrix apply_function(const CMatrix& a, const std::function<double(double)>& phi) {
    check_hermitian(a, "apply_function");
    const int n = a.dim();
    auto eval = [&](double lam) {
        const double y = phi(lam);
        if (!std::isfinite(y))
            throw NumericalError("apply_function: function singular at eigenvalue " +
                                 std::to_string(lam));
        return y;
    };
    if (a.is_diagonal()) {
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = eval(a(i, i).real());
        return CMatrix::diag(d);
    }
    const auto spec = hermitian_eig(a);
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) d[i] = eval(spec.eigenvalues[i]);
    const CMatrix& v = spec.eigenvectors;
    return v * CMatrix::diag(d) * v.adjoint();
}

}  // namespace fuzzygeom
