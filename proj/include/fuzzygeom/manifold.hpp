#pragma once

#include <string>
#include <vector>

#include "fuzzygeom/grid.hpp"
#include "fuzzygeom/matrix_io.hpp"

namespace fuzzygeom {

// Parametrized embedded manifold: x : U -> R^m sampled on a grid, together
// with a chosen bracket density rho (omega = rho du^1 ^ ... ^ du^n).
struct EmbeddedManifold {
    std::string label;
    int n = 0;  // intrinsic dimension
    int m = 0;  // ambient dimension
    Grid grid;
    std::vector<GridField> embedding;  // m component fields x^i(u)
    GridField rho;
    std::string rho_mode;  // "sqrt_g" or "one"
};

// Presets. rho_mode is "sqrt_g" (gamma = 1) or "one" (flat density).
EmbeddedManifold make_sphere(int n_theta, int n_phi, const std::string& rho_mode);
EmbeddedManifold make_torus_rev(int n_theta, int n_phi, double big_r, double small_r,
                                const std::string& rho_mode);
EmbeddedManifold make_clifford(int n1, int n2, const std::string& rho_mode);
EmbeddedManifold make_ellipsoid(int n_theta, int n_phi, double a, double b, double c,
                                const std::string& rho_mode);
EmbeddedManifold make_s3(int n1, int n2, int n3, const std::string& rho_mode);

// {"preset": "...", "params": {...}, "grid": [{"size","periodic","range"}...],
// "rho": "sqrt_g"|"one"}.  Preset "custom" takes params.n, params.m,
// params.embedding (m row-major value arrays) and optionally params.rho_values.
EmbeddedManifold manifold_from_json(const ordered_json& spec);

// Checks axis sizes >= 8, rho > 0, finite embedding, and positive-definite
// induced metric on the evaluation region; throws PreconditionError.
void validate_manifold(const EmbeddedManifold& mf);

// Induced metric determinant det(g_ab) from 4th-order finite differences.
GridField metric_determinant(const EmbeddedManifold& mf);

// Flat binary dump (8-byte little-endian reals, row-major) + JSON sidecar
// describing the shape; written to path.bin and path.json.
void dump_field(const Grid& g, const GridField& f, const std::string& path_base);
GridField load_field(const Grid& g, const std::string& path_base);

}  // namespace fuzzygeom
