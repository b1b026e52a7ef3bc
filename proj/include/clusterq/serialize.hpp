#pragma once

// JSON dumps of superoperators and Kraus decompositions. Complex entries are [re, im].

#include "clusterq/choi.hpp"
#include "clusterq/logical.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace clusterq {

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix JSON must be a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols) throw std::invalid_argument("ragged matrix JSON");
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& z = row.at(static_cast<std::size_t>(c));
            m(i, c) = {z.at(0).get<double>(), z.at(1).get<double>()};
        }
    }
    return m;
}

inline nlohmann::json to_json(const Superoperator& s) {
    return {
        {"kind", s.channel ? to_string(*s.channel) : "ideal"},
        {"p", s.p},
        {"theta", {s.rotation.theta1(), s.rotation.theta2(), s.rotation.theta3()}},
        {"convention", s.convention},
        {"source", s.source},
        {"matrix", matrix_to_json(s.matrix)},
    };
}

inline nlohmann::json to_json(const ChoiDecomposition& d) {
    nlohmann::json kraus = nlohmann::json::array();
    for (const auto& k : d.kraus) kraus.push_back(matrix_to_json(k));
    return {
        {"eigenvalues", d.eigenvalues},
        {"amplitudes", d.amplitudes},
        {"kraus", std::move(kraus)},
    };
}

}  // namespace clusterq
