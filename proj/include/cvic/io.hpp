// Copyright 2026 The cvic Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * JSON forms of POVM sets, rank reports, measurement data and
 * reconstruction results. Doubles are written with 17 significant digits,
 * so a dump/parse cycle reproduces every value bit for bit.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvic/completeness.hpp"
#include "cvic/fock.hpp"
#include "cvic/povm.hpp"
#include "cvic/tomo.hpp"

namespace cvic {

using json = nlohmann::json;

/// Row-major list of [re, im] pairs.
inline json matrix_to_json(const CMatrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out.push_back({m(r, c).real(), m(r, c).imag()});
        }
    }
    return out;
}

inline CMatrix matrix_from_json(const json& j, int dim) {
    if (!j.is_array() || j.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
        throw std::invalid_argument("matrix JSON: expected " + std::to_string(dim * dim) +
                                    " [re, im] entries");
    }
    CMatrix m(dim, dim);
    std::size_t at = 0;
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const auto& e = j.at(at++);
            m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

inline json povm_to_json(const PovmSet& set) {
    json elements = json::array();
    for (const auto& e : set.elements) {
        elements.push_back(matrix_to_json(e));
    }
    return {{"dim", set.dim}, {"label", set.label}, {"deficit", set.deficit}, {"elements", elements}};
}

inline PovmSet povm_from_json(const json& j) {
    PovmSet set;
    set.dim = j.at("dim").get<int>();
    if (set.dim < 1) {
        throw std::invalid_argument("PovmSet JSON: dim must be positive");
    }
    set.label = j.at("label").get<std::string>();
    set.deficit = j.at("deficit").get<double>();
    for (const auto& e : j.at("elements")) {
        set.elements.push_back(matrix_from_json(e, set.dim));
    }
    return set;
}

/// `gap` is null when infinite; `predicted` is null when absent.
inline json rank_report_to_json(const RankReport& r) {
    json j{{"rank", r.numerical_rank},
           {"tolerance", r.tolerance_used},
           {"singular_values", r.singular_values}};
    j["predicted"] = r.predicted_rank ? json(*r.predicted_rank) : json(nullptr);
    j["gap"] = std::isinf(r.gap) ? json(nullptr) : json(r.gap);
    return j;
}

inline RankReport rank_report_from_json(const json& j) {
    RankReport r;
    r.numerical_rank = j.at("rank").get<int>();
    r.tolerance_used = j.at("tolerance").get<double>();
    r.singular_values = j.at("singular_values").get<std::vector<double>>();
    if (!j.at("predicted").is_null()) {
        r.predicted_rank = j.at("predicted").get<long>();
    }
    r.gap = j.at("gap").is_null() ? std::numeric_limits<double>::infinity()
                                  : j.at("gap").get<double>();
    return r;
}

inline json layout_to_json(const BinLayout& l) {
    return {{"x_max", l.x_max}, {"n_bins", l.n_bins}, {"include_overflow", l.include_overflow}};
}

inline BinLayout layout_from_json(const json& j) {
    BinLayout l{j.at("x_max").get<double>(), j.at("n_bins").get<int>(),
                j.at("include_overflow").get<bool>()};
    l.validate();
    return l;
}

inline json measurement_data_to_json(const MeasurementData& d) {
    json layouts = json::array();
    for (const auto& l : d.layouts) {
        layouts.push_back(layout_to_json(l));
    }
    return {{"settings", d.phases},
            {"layouts", layouts},
            {"counts", d.counts},
            {"seed", d.seed},
            {"totals", d.totals}};
}

inline MeasurementData measurement_data_from_json(const json& j) {
    MeasurementData d;
    d.phases = j.at("settings").get<std::vector<double>>();
    for (const auto& l : j.at("layouts")) {
        d.layouts.push_back(layout_from_json(l));
    }
    d.counts = j.at("counts").get<std::vector<std::vector<std::uint64_t>>>();
    d.seed = j.at("seed").get<std::uint64_t>();
    d.totals = j.at("totals").get<std::vector<std::uint64_t>>();
    d.validate();
    return d;
}

inline json reconstruction_to_json(const ReconstructionResult& r) {
    return {{"dim", r.estimate.dim()},
            {"estimate", matrix_to_json(r.estimate.matrix())},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"singular_likelihood", r.singular_likelihood},
            {"final_loglik", r.final_loglik()},
            {"log_likelihood_trace", r.log_likelihood_trace}};
}

inline ReconstructionResult reconstruction_from_json(const json& j) {
    const int dim = j.at("dim").get<int>();
    ReconstructionResult r{DensityMatrix(matrix_from_json(j.at("estimate"), dim)),
                           j.at("log_likelihood_trace").get<std::vector<double>>(),
                           j.at("iterations").get<int>(),
                           j.at("converged").get<bool>(),
                           j.value("singular_likelihood", false)};
    if (r.log_likelihood_trace.empty()) {
        r.log_likelihood_trace.push_back(j.at("final_loglik").get<double>());
    }
    return r;
}

}  // namespace cvic
