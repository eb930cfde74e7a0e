#include "fuzzygeom/report.hpp"

#include <cstdio>

namespace fuzzygeom {

ordered_json report_to_json(const GeometryReport& r) {
    ordered_json j;
    j["surface"] = r.surface;
    j["N"] = r.n_mat;
    j["hbar"] = r.hbar;
    j["chi_hat"] = r.chi_hat;
    j["kappa"] = r.kappa;
    j["lambda_min_nonzero"] = r.lambda_min_nonzero;
    j["bound_satisfied"] = r.bound_satisfied;
    j["defects"] = r.defects;
    j["formulation"] = r.formulation;
    return j;
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "N,hbar,chi_hat,chi_err,kappa,lambda_min,runtime_ms\n";
    for (const auto& r : rows) {
        out += std::to_string(r.n) + "," + format_g17(r.hbar) + "," + format_g17(r.chi_hat) +
               "," + format_g17(r.chi_err) + "," + format_g17(r.kappa) + "," +
               format_g17(r.lambda_min) + "," + format_g17(r.runtime_ms) + "\n";
    }
    return out;
}

std::string table_csv(const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c)
        out += (c ? "," : "") + header[c];
    out += "\n";
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            out += (c ? "," : "") + format_g17(row[c]);
        out += "\n";
    }
    return out;
}

}  // namespace fuzzygeom
