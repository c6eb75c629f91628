#include "qprog/json_io.hpp"

#include "qprog/error.hpp"

#include <cmath>

namespace qprog {

nlohmann::json matrix_to_json(const CMatrix& m) {
    nlohmann::json data = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r)
        for (Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data"))
        throw Error("invalid_json", "matrix needs rows, cols and data");
    const auto rows = j.at("rows").get<Index>();
    const auto cols = j.at("cols").get<Index>();
    const auto& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() || static_cast<Index>(data.size()) != rows * cols)
        throw Error("invalid_json", "matrix data length does not match rows * cols");
    CMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) {
            const auto& e = data[static_cast<std::size_t>(r * cols + c)];
            if (e.is_number()) {
                m(r, c) = e.get<double>();
            } else if (e.is_array() && e.size() == 2) {
                m(r, c) = cplx(e[0].get<double>(), e[1].get<double>());
            } else {
                throw Error("invalid_json", "matrix entry must be [re, im]");
            }
            if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag()))
                throw Error("invalid_json", "matrix entry is not finite");
        }
    return m;
}

nlohmann::json channel_to_json(const KrausChannel& ch) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto& k : ch.ops()) ops.push_back(matrix_to_json(k));
    return {{"d_in", ch.d_in()}, {"d_out", ch.d_out()}, {"kraus", std::move(ops)}};
}

KrausChannel channel_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("d_in") || !j.contains("d_out") || !j.contains("kraus"))
        throw Error("invalid_json", "channel needs d_in, d_out and kraus");
    std::vector<CMatrix> ops;
    for (const auto& k : j.at("kraus")) ops.push_back(matrix_from_json(k));
    return KrausChannel(j.at("d_in").get<Index>(), j.at("d_out").get<Index>(), std::move(ops));
}

}  // namespace qprog
