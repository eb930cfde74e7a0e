#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fuzzygeom/cmatrix.hpp"

namespace fuzzygeom {

// One fixed-N matrix regularization snapshot.
struct FuzzySurface {
    int n_mat = 0;
    double hbar = 0.0;
    std::vector<CMatrix> coords;                 // X^i, Hermitian
    std::vector<std::vector<CMatrix>> normals;   // p frames of m Hermitian matrices
    CMatrix gamma_hat;                           // positive
    std::string label;

    // Axial extras (empty for sphere/torus): enable the closed-form curvature.
    bool axial = false;
    CMatrix axial_w;         // upper bidiagonal W
    CMatrix axial_ffp;       // diag(ff'(z_k))
    CMatrix gamma_hat_sq;    // gamma_hat^2 as built (identity when not axial)
};

struct AxialProfile {
    std::function<double(double)> f_squared;  // f^2(z)
    std::function<double(double)> ff_prime;   // ff'(z) = (f^2)'(z)/2
    std::string label;
    // Ascending coefficients of f^2(z) when polynomial; enables the
    // Casimir-correspondence quantization of hbar. Empty for callables.
    std::vector<double> f2_coeffs;
};

struct DeformationFixture {
    FuzzySurface base;
    double s = 0.0;
    CMatrix theta_hat;  // diag(hbar^s, 0, ..., 0)
};

struct TorusMode {
    int m1 = 0;
    int m2 = 0;
    cplx coeff;
};

FuzzySurface build_fuzzy_sphere(int N);
FuzzySurface build_fuzzy_torus(int N);

CMatrix clock_matrix(int N);  // g = diag(1, w, ..., w^{N-1}), w = exp(2 pi i / N)
CMatrix shift_matrix(int N);  // h: cyclic shift, h g = w g h

// sum coeff * w^{m1 m2 / 2} g^{m1} h^{m2}. Sets *aliased when some |m| >= N.
CMatrix torus_quantization_map(int N, const std::vector<TorusMode>& modes,
                               bool* aliased = nullptr);

AxialProfile axial_profile_sphere();             // f^2 = 1 - z^2
AxialProfile axial_profile_quartic();            // f^2 = 1 - z^4
AxialProfile axial_profile_poly(const std::vector<double>& f2_coeffs);

FuzzySurface build_axial(int N, const AxialProfile& profile, double hbar);

// Closed-form w_k^2 for the build above (k = 1..N), exposed for diagnostics.
std::vector<double> axial_w_squared(int N, const AxialProfile& profile, double hbar);

// Scalar quantization defect d(hbar). For polynomial profiles this is the
// quantum-Casimir correspondence defect: mean_k Q_kk - 1 where
// Q = X^2 + Y^2 + V(Z) + c(Z), V = 1 - f^2, and c is the discrete
// antiderivative solving c(z + hbar) - c(z) = -[V(z+hbar) - V(z)
// - (hbar/2)(V'(z+hbar) + V'(z))], which makes Q commute with W.
// For callable-only profiles it falls back to the recursion closure
// defect sum_l Q_l = w_N^2 (identically zero for symmetric profiles).
double axial_quantization_defect(int N, const AxialProfile& profile, double hbar);

// Bisection root of axial_quantization_defect on [lo, hi].
double solve_axial_hbar(int N, const AxialProfile& profile, double lo, double hi);

// All sign-change brackets of d(hbar) on a uniform scan of [lo, hi].
std::vector<std::pair<double, double>> axial_hbar_scan(int N, const AxialProfile& profile,
                                                       double lo, double hi, int points);

DeformationFixture make_deformation_fixture(const FuzzySurface& base, double s);

}  // namespace fuzzygeom
