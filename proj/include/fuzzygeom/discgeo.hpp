#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fuzzygeom/fuzzy.hpp"

namespace fuzzygeom {

enum class CurvatureFormulation { EpsilonR3, BracketsRm, Normals, AxialClosedForm };

const char* formulation_name(CurvatureFormulation f);
CurvatureFormulation formulation_from_name(const std::string& name);

struct CurvatureResult {
    CMatrix k_hat;
    CurvatureFormulation formulation;
    double hermiticity_defect = 0.0;  // ||K - K+|| / max(1, ||K||)
};

struct SpectrumReport {
    std::vector<double> eigenvalues;  // paper convention: lambda with Delta(u) = -lambda u
    double kappa = 0.0;               // min eigenvalue of Hermitized K_hat
    double lambda_min_nonzero = 0.0;
    double zero_tolerance = 0.0;
    bool bound_satisfied = false;
};

struct DefectReport {
    int n_mat = 0;
    double product_defect = 0.0;
    double commutator_defect = 0.0;
    double trace_defect = 0.0;
    std::vector<std::string> probe_labels;
};

// One registered probe: everything is produced at a given N so the defect
// measurements can sweep a surface family.
struct RegularizationProbe {
    std::string label;
    std::function<CMatrix(const FuzzySurface&)> t_f;        // T(f)
    std::function<CMatrix(const FuzzySurface&)> t_h;        // T(h)
    std::function<CMatrix(const FuzzySurface&)> t_fh;       // T(f h), empty() to skip
    std::function<CMatrix(const FuzzySurface&)> t_bracket;  // T({f,h}), empty() to skip
    bool has_integral = false;
    double integral_f = 0.0;  // integral of f against the volume form, for trace defect
};

// P^i_j = (1/i hbar)[X^i, X^j] (Euclidean ambient metric).
std::vector<std::vector<CMatrix>> p_hat(const FuzzySurface& s);

CurvatureResult discrete_curvature(const FuzzySurface& s, CurvatureFormulation f);

// Real part of hbar Tr(gamma K); throws if the imaginary part exceeds 1e-8.
double euler_characteristic_hat(const FuzzySurface& s, const CMatrix& k_hat);

// D^i(X) = (1/i hbar) gamma^{-1} [X, X^i]
CMatrix discrete_derivation(const FuzzySurface& s, int i, const CMatrix& x);

// Delta(X) = sum_j D^j D^j (X)
CMatrix discrete_laplacian(const FuzzySurface& s, const CMatrix& x);

SpectrumReport laplacian_spectrum(const FuzzySurface& s, int cap = 4096);

std::vector<DefectReport> regularization_defects(
    const std::function<FuzzySurface(int)>& family, const std::vector<int>& n_values,
    const std::vector<RegularizationProbe>& probes);

// Shipped probe families.
std::vector<RegularizationProbe> torus_probes();
std::vector<RegularizationProbe> sphere_probes();

}  // namespace fuzzygeom
