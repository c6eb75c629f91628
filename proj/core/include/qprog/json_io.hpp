#pragma once

#include "qprog/linalg.hpp"
#include "qprog/quantum.hpp"

#include "json.hpp"

namespace qprog {

// {"rows": n, "cols": m, "data": [[re, im], ...]} in row-major order.
nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

// {"d_in": .., "d_out": .., "kraus": [matrix, ...]}
nlohmann::json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const nlohmann::json& j);

}  // namespace qprog
