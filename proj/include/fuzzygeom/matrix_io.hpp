#pragma once

#include <json.hpp>

#include "fuzzygeom/cmatrix.hpp"

namespace fuzzygeom {

using ordered_json = nlohmann::ordered_json;

// {"dim": n, "entries": [[re, im], ...]} row-major, interleaved (re, im).
ordered_json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const ordered_json& j);

}  // namespace fuzzygeom
