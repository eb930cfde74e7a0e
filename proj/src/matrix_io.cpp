#include "fuzzygeom/matrix_io.hpp"

namespace fuzzygeom {

ordered_json matrix_to_json(const CMatrix& m) {
    ordered_json j;
    j["dim"] = m.dim();
    ordered_json entries = ordered_json::array();
    for (const auto& v : m.data()) entries.push_back({v.real(), v.imag()});
    j["entries"] = std::move(entries);
    return j;
}

CMatrix matrix_from_json(const ordered_json& j) {
    const int n = j.at("dim").get<int>();
    const auto& entries = j.at("entries");
    if (static_cast<int>(entries.size()) != n * n)
        throw std::invalid_argument("matrix_from_json: entries length != dim^2");
    CMatrix m(n);
    size_t k = 0;
    for (auto& v : m.data()) {
        const auto& e = entries[k++];
        v = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
    if (!m.is_finite()) throw std::invalid_argument("matrix_from_json: non-finite entries");
    return m;
}

}  // namespace fuzzygeom
