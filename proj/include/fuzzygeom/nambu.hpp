#pragma once

#include <array>
#include <string>
#include <vector>

#include "fuzzygeom/manifold.hpp"

namespace fuzzygeom {

// Grid of m x m real matrices, components stored row-major.
struct MatrixField {
    int m = 0;
    std::vector<GridField> comp;  // m*m fields
    const GridField& at(int i, int j) const { return comp[static_cast<std::size_t>(i) * m + j]; }
    GridField& at(int i, int j) { return comp[static_cast<std::size_t>(i) * m + j]; }
};

using AmbientVectorField = std::vector<GridField>;  // m component fields

struct NormalFrame {
    int p = 0;
    std::vector<AmbientVectorField> z_raw;        // q = m^(p-1) raw normal candidates
    std::vector<AmbientVectorField> orthonormal;  // p continuity-aligned unit normals
    double gram_eigen_defect = 0.0;               // max distance of Gram eigenvalues from {0,1}
    double count_check = 0.0;                     // max |Tr(Gram) - p|
};

// {f_1, ..., f_n} = (1/rho) det(d f_a / d u^b).
GridField nambu_bracket(const EmbeddedManifold& mf, const std::vector<GridField>& fields);

// gamma = sqrt(g)/rho, computed through the bracket sum and cross-checked
// against the metric route; throws NumericalError on disagreement.
GridField gamma_field(const EmbeddedManifold& mf);

// Pointwise orthogonal projection onto the tangent space.
MatrixField tangent_projection(const EmbeddedManifold& mf);

NormalFrame normal_frame(const EmbeddedManifold& mf);

// Gaussian curvature of a surface (n = 2) via nested brackets.
GridField gauss_curvature_poisson(const EmbeddedManifold& mf);

// Mean curvature vector (flat ambient).
AmbientVectorField mean_curvature_poisson(const EmbeddedManifold& mf);

// Scalar curvature (flat ambient); for n = 2 cross-checks R = 2K internally.
GridField ricci_scalar_flat(const EmbeddedManifold& mf, const NormalFrame& frame);

// k-th elementary symmetric function of the principal curvatures of a
// hypersurface (p = 1); k = n gives det W.
GridField hypersurface_weingarten(const EmbeddedManifold& mf, const NormalFrame& frame, int k);

struct CodazziReport {
    GridField residual;      // max_i |sum_k {gamma^-2 (P^2)^{ik}, n^k}|
    GridField residual_raw;  // max_i |sum_jk {gamma^-2 {x^i,x^j}{x^j,n^k}, x^k}|
    double max_residual = 0.0;
    double max_raw = 0.0;
};

CodazziReport codazzi_residual(const EmbeddedManifold& mf, const NormalFrame& frame);

// Pure Poisson-algebra probe: arbitrary fields x^1..x^3 and density on a 2-d
// grid, normal replaced by its bracket expression; returns max residual.
double codazzi_poisson_residual(const Grid& grid, const std::array<GridField, 3>& x,
                                const GridField& rho);

struct ComplexStructureReport {
    double j_defect = 0.0;       // max ||J^2 + Pi_T||
    double normal_defect = 0.0;  // max |J(N)| over the normal frame
};

ComplexStructureReport complex_structure_check(const EmbeddedManifold& mf);

struct BracketLaplacianResult {
    GridField laplacian;
    GridField grad_sq;
    GridField hess_sq;
};

BracketLaplacianResult bracket_laplacian(const EmbeddedManifold& mf, const GridField& u);

// Symmetrized covariantized second derivative tensor.
MatrixField hessian_tensor(const EmbeddedManifold& mf, const GridField& u);

// Max interior residual of the covariant-derivative commutation identity
// (curvature term uses the Gauss curvature; n = 2 only).
double curvature_commutation_check(const EmbeddedManifold& mf, const GridField& u);

// (1/2pi) sum K sqrt(g) du^1 du^2 on a fully periodic surface grid.
double gauss_bonnet_quadrature(const EmbeddedManifold& mf, const GridField& k_field);

}  // namespace fuzzygeom
