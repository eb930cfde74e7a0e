#include "fuzzygeom/superop.hpp"

#include <random>

namespace fuzzygeom {

namespace {

CMatrix random_matrix(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix m(dim);
    for (auto& v : m.data()) v = cplx(g(rng), g(rng));
    return m;
}

}  // namespace

CMatrix superoperator(const std::function<CMatrix(const CMatrix&)>& L, int dim) {
    if (dim < 1) throw std::invalid_argument("superoperator: dim must be positive");

    // Linearity spot check on random pairs with fixed seed (deterministic).
    std::mt19937_64 rng(0x5eed5eedULL);
    for (int trial = 0; trial < 2; ++trial) {
        const CMatrix a = random_matrix(dim, rng);
        const CMatrix b = random_matrix(dim, rng);
        const cplx alpha(0.7, -0.3), beta(-1.1, 0.5);
        const CMatrix lhs = L(alpha * a + beta * b);
        const CMatrix rhs = alpha * L(a) + beta * L(b);
        const double scale = std::max(1.0, lhs.frobenius_norm());
        if ((lhs - rhs).frobenius_norm() > 1e-10 * scale)
            throw NumericalError("superoperator: map failed linearity spot check");
    }

    const int d2 = dim * dim;
    CMatrix m(d2);
    CMatrix basis(dim);
    for (int c = 0; c < d2; ++c) {
        const int i0 = c % dim, j0 = c / dim;
        basis(i0, j0) = 1.0;
        const CMatrix img = L(basis);
        basis(i0, j0) = 0.0;
        if (img.dim() != dim) throw std::invalid_argument("superoperator: map changes dimension");
        for (int j = 0; j < dim; ++j)
            for (int i = 0; i < dim; ++i) m(i + j * dim, c) = img(i, j);
    }
    return m;
}

}  // namespace fuzzygeom
