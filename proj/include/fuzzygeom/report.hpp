#pragma once

#include <string>
#include <vector>

#include "fuzzygeom/matrix_io.hpp"

namespace fuzzygeom {

// One surface-level result bundle, serialized with a fixed field order.
struct GeometryReport {
    std::string surface;
    int n_mat = 0;
    double hbar = 0.0;
    double chi_hat = 0.0;
    double kappa = 0.0;
    double lambda_min_nonzero = 0.0;
    bool bound_satisfied = false;
    ordered_json defects = ordered_json::object();
    std::string formulation;
};

ordered_json report_to_json(const GeometryReport& r);

struct SweepRow {
    int n = 0;
    double hbar = 0.0;
    double chi_hat = 0.0;
    double chi_err = 0.0;
    double kappa = 0.0;
    double lambda_min = 0.0;
    double runtime_ms = 0.0;
};

// Shortest round-trip decimal, up to 17 significant digits.
std::string format_g17(double v);

// Header + rows, comma-separated, LF line endings.
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Generic CSV: header columns + rows of doubles (17 significant digits).
std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows);

}  // namespace fuzzygeom
