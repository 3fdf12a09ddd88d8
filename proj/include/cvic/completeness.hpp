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
 * Counting linearly independent POVM elements.
 *
 * A measurement on a support S (|S| = s) is turned into a design matrix whose
 * rows are the real coordinates (hermitian_to_real_vector) of its POVM
 * elements restricted to S. Its numerical rank is the number of independent
 * elements; the measurement is informationally complete when the rank is s^2.
 * For the contiguous support {0..d-1} with m distinct phases the rank is
 * m(2d - m) for m < d and d^2 otherwise.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <future>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "cvic/fock.hpp"
#include "cvic/povm.hpp"
#include "cvic/quadrature.hpp"

namespace cvic {

/// Reports with a gap below this are flagged as ill-conditioned.
inline constexpr double kIllConditionedGap = 1e3;
inline constexpr double kPhaseDistinctTol = 1e-9;

/// Independent elements from m phase settings on a d-dimensional Fock block.
constexpr long predicted_rank(long d, long m) {
    if (d < 1 || m < 1) {
        throw std::invalid_argument("predicted_rank: d and m must be positive");
    }
    return m < d ? m * (2 * d - m) : d * d;
}

/// New independent elements contributed by the k-th phase (k = 1, 2, ...):
/// each phase removes one dimension from the unknown block, giving 2(d-k+1)-1.
constexpr long incremental_rank(long d, long k) { return k <= d ? 2 * (d - k + 1) - 1 : 0; }

/// sum_{k=1}^{m} incremental_rank(d, k)
constexpr long accumulated_rank(long d, long m) {
    long total = 0;
    for (long k = 1; k <= m; ++k) {
        total += incremental_rank(d, k);
    }
    return total;
}

struct RankReport {
    int numerical_rank = 0;
    std::optional<long> predicted_rank;
    std::vector<double> singular_values;  ///< descending
    double gap = std::numeric_limits<double>::infinity();  ///< sigma_rank / sigma_{rank+1}
    double tolerance_used = 0.0;

    [[nodiscard]] bool ill_conditioned() const { return gap < kIllConditionedGap; }
    [[nodiscard]] bool agrees() const {
        return !predicted_rank || *predicted_rank == numerical_rank;
    }
};

/**
 * Rank as the number of singular values above tau, where tau is the given
 * tolerance or max(rows, cols) * sigma_max * 1e-12. The gap is
 * sigma_rank / sigma_{rank+1} (+inf when nothing sits below the threshold or
 * the next value is exactly zero).
 */
inline RankReport numerical_rank(const RMatrix& matrix, std::optional<double> tolerance = {}) {
    if (matrix.size() == 0) {
        throw std::invalid_argument("numerical_rank: empty matrix");
    }
    Eigen::BDCSVD<RMatrix> svd(matrix);
    const RVector& sv = svd.singularValues();

    RankReport report;
    report.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double sigma_max = sv.size() > 0 ? sv(0) : 0.0;
    const double longest = static_cast<double>(std::max(matrix.rows(), matrix.cols()));
    report.tolerance_used = tolerance ? *tolerance : longest * sigma_max * 1e-12;

    int rank = 0;
    while (rank < sv.size() && sv(rank) > report.tolerance_used) {
        ++rank;
    }
    report.numerical_rank = rank;
    if (rank > 0 && rank < sv.size() && sv(rank) > 0.0) {
        report.gap = sv(rank - 1) / sv(rank);
    } else if (rank == 0 && sigma_max > 0.0) {
        report.gap = 0.0;
    }
    return report;
}

enum class MeasurementMode { ContinuousFunctional, BinnedPovm };

/// Gauss-Hermite order used per phase by default: 2 max(S) + 2.
inline int default_x_nodes(const SupportSet& support) { return 2 * support.max_index() + 2; }

/// True when no two phases coincide modulo pi (within 1e-9).
inline bool phases_distinct(const std::vector<double>& phases) {
    for (std::size_t i = 0; i < phases.size(); ++i) {
        for (std::size_t j = i + 1; j < phases.size(); ++j) {
            if (std::abs(std::remainder(phases[i] - phases[j], std::numbers::pi)) <
                kPhaseDistinctTol) {
                return false;
            }
        }
    }
    return true;
}

/**
 * Default phases for m settings. Contiguous supports {0..d-1} use
 * theta_j = j pi / m. Any other support uses the golden-ratio sequence
 * theta_j = pi frac(j (sqrt5 - 1)/2): equispaced settings are degenerate
 * there (for {0,4,8}, theta and theta + pi/4 induce the same span).
 */
inline std::vector<double> default_phases(const SupportSet& support, int m) {
    if (m < 1) {
        throw std::invalid_argument("default_phases: m must be positive");
    }
    std::vector<double> phases(static_cast<std::size_t>(m));
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int j = 0; j < m; ++j) {
        if (support.is_contiguous()) {
            phases[static_cast<std::size_t>(j)] = j * std::numbers::pi / m;
        } else {
            const double t = j * golden;
            phases[static_cast<std::size_t>(j)] = std::numbers::pi * (t - std::floor(t));
        }
    }
    return phases;
}

struct MeasurementSpec {
    SupportSet support;
    std::vector<double> phases;
    int x_nodes_per_phase = 0;
    MeasurementMode mode = MeasurementMode::ContinuousFunctional;
    BinLayout layout;  ///< used in binned mode only

    static MeasurementSpec continuous(SupportSet support, std::vector<double> phases) {
        const int nodes = default_x_nodes(support);
        return {std::move(support), std::move(phases), nodes, MeasurementMode::ContinuousFunctional,
                BinLayout{}};
    }

    static MeasurementSpec binned(SupportSet support, std::vector<double> phases,
                                  BinLayout layout) {
        const int nodes = default_x_nodes(support);
        return {std::move(support), std::move(phases), nodes, MeasurementMode::BinnedPovm,
                layout};
    }

    void validate() const {
        if (phases.empty()) {
            throw std::invalid_argument("MeasurementSpec: no phases");
        }
        if (!phases_distinct(phases)) {
            throw std::invalid_argument("MeasurementSpec: phases must be distinct modulo pi");
        }
        if (mode == MeasurementMode::ContinuousFunctional &&
            x_nodes_per_phase < 2 * support.max_index() + 1) {
            throw std::invalid_argument("MeasurementSpec: need at least " +
                                        std::to_string(2 * support.max_index() + 1) +
                                        " x nodes per phase");
        }
        if (mode == MeasurementMode::BinnedPovm) {
            layout.validate();
        }
    }
};

/**
 * Design matrix of a measurement: one row per functional rho -> p, columns
 * the s^2 real coordinates of rho on the support.
 *
 * Continuous mode evaluates the projector density at the Gauss-Hermite nodes
 * of each phase and scales row i by sqrt(lambda_i) exp(x_i^2), lambda_i the
 * classical weight. That makes each phase block's Gram matrix the exact L2
 * Gram of the products H_k H_l, so the spectrum does not depend on how many
 * nodes are used. Row scaling leaves the rank unchanged.
 *
 * Binned mode uses the bin operators of the layout (built on max(S)+1 Fock
 * states, then restricted to S).
 */
inline RMatrix design_matrix(const MeasurementSpec& spec) {
    spec.validate();
    const int s = spec.support.size();
    std::vector<RVector> rows;

    if (spec.mode == MeasurementMode::ContinuousFunctional) {
        const QuadratureRule gh = gauss_hermite_scaled(spec.x_nodes_per_phase);
        rows.reserve(spec.phases.size() * gh.size());
        for (double theta : spec.phases) {
            for (std::size_t i = 0; i < gh.size(); ++i) {
                const double x = gh.nodes[i];
                const double scale = std::sqrt(gh.weights[i]) * std::exp(0.5 * x * x);
                const CMatrix e = quadrature_projector(spec.support, QuadraturePoint(x, theta));
                rows.push_back(scale * hermitian_to_real_vector(e));
            }
        }
    } else {
        const int dim = spec.support.max_index() + 1;
        std::vector<RMatrix> overlaps;
        for (const auto& [a, b] : spec.layout.intervals()) {
            overlaps.push_back(quadrature_bin_overlaps(a, b, dim));
        }
        for (double theta : spec.phases) {
            for (const auto& o : overlaps) {
                const CMatrix e = restrict_to_support(apply_quadrature_phase(o, theta), spec.support);
                rows.push_back(hermitian_to_real_vector(e));
            }
        }
    }

    RMatrix out(static_cast<Eigen::Index>(rows.size()), s * s);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    }
    return out;
}

/// Rank for explicit phases (continuous functionals at the default node count).
inline RankReport rank_for_phases(const SupportSet& support, const std::vector<double>& phases,
                                  std::optional<double> tolerance = {}) {
    RankReport report =
        numerical_rank(design_matrix(MeasurementSpec::continuous(support, phases)), tolerance);
    if (support.is_contiguous()) {
        report.predicted_rank =
            predicted_rank(support.size(), static_cast<long>(phases.size()));
    }
    return report;
}

/// Rank induced by m default phases (see default_phases()). The closed-form
/// prediction is attached for contiguous supports.
inline RankReport rank_for(const SupportSet& support, int m, std::optional<double> tolerance = {}) {
    return rank_for_phases(support, default_phases(support, m), tolerance);
}

/// Smallest m <= m_max with rank s^2, if any.
inline std::optional<int> min_phases_for_completeness(const SupportSet& support, int m_max) {
    if (m_max < 1) {
        throw std::invalid_argument("min_phases_for_completeness: m_max must be positive");
    }
    const int full = support.size() * support.size();
    for (int m = 1; m <= m_max; ++m) {
        if (rank_for(support, m).numerical_rank == full) {
            return m;
        }
    }
    return std::nullopt;
}

/// Ranks for contiguous supports over a (d, m) grid, rows by d, columns by m.
struct RankTable {
    std::vector<int> ds;
    std::vector<int> ms;
    std::vector<std::vector<RankReport>> cells;  ///< cells[i][j] for ds[i], ms[j]

    [[nodiscard]] bool is_ic(std::size_t i, std::size_t j) const {
        return cells[i][j].numerical_rank == ds[i] * ds[i];
    }

    [[nodiscard]] bool all_agree() const {
        for (const auto& row : cells) {
            for (const auto& c : row) {
                if (!c.agrees()) {
                    return false;
                }
            }
        }
        return true;
    }

    /// One line per cell whose numerical rank differs from the prediction.
    [[nodiscard]] std::vector<std::string> disagreements() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            for (std::size_t j = 0; j < ms.size(); ++j) {
                const auto& c = cells[i][j];
                if (!c.agrees()) {
                    std::ostringstream os;
                    os << "d=" << ds[i] << " m=" << ms[j] << ": numerical " << c.numerical_rank
                       << " predicted " << *c.predicted_rank;
                    out.push_back(os.str());
                }
            }
        }
        return out;
    }

    /// Header `d,m=1,...,m=M`; integer cells, IC cells suffixed with `*`.
    [[nodiscard]] std::string to_csv() const {
        std::ostringstream os;
        os << "d";
        for (int m : ms) {
            os << ",m=" << m;
        }
        os << "\n";
        for (std::size_t i = 0; i < ds.size(); ++i) {
            os << ds[i];
            for (std::size_t j = 0; j < ms.size(); ++j) {
                os << "," << cells[i][j].numerical_rank << (is_ic(i, j) ? "*" : "");
            }
            os << "\n";
        }
        return os.str();
    }
};

/**
 * Fill a RankTable for d in [d_min, d_max], m in [m_min, m_max]. Cells are
 * computed by up to `workers` threads (0 = hardware concurrency), each owning
 * a fixed stride of cell indices, so the result does not depend on the
 * number of workers.
 */
inline RankTable sweep_table(int d_min, int d_max, int m_min, int m_max, unsigned workers = 0) {
    if (d_min < 1 || m_min < 1 || d_max < d_min || m_max < m_min) {
        throw std::invalid_argument("sweep_table: invalid range");
    }
    RankTable table;
    for (int d = d_min; d <= d_max; ++d) {
        table.ds.push_back(d);
    }
    for (int m = m_min; m <= m_max; ++m) {
        table.ms.push_back(m);
    }
    const std::size_t n_rows = table.ds.size();
    const std::size_t n_cols = table.ms.size();
    table.cells.assign(n_rows, std::vector<RankReport>(n_cols));

    const std::size_t n_cells = n_rows * n_cols;
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_cells));
    auto work = [&](unsigned w) {
        for (std::size_t c = w; c < n_cells; c += workers) {
            const std::size_t i = c / n_cols;
            const std::size_t j = c % n_cols;
            table.cells[i][j] = rank_for(SupportSet::contiguous(table.ds[i]), table.ms[j]);
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::future<void>> jobs;
        for (unsigned w = 0; w < workers; ++w) {
            jobs.push_back(std::async(std::launch::async, work, w));
        }
        for (auto& j : jobs) {
            j.get();
        }
    }
    return table;
}

/// Rank of the real span of all elements of the given sets.
inline RankReport povm_span_rank(const std::vector<PovmSet>& sets,
                                 std::optional<double> tolerance = {}) {
    if (sets.empty()) {
        throw std::invalid_argument("povm_span_rank: no sets");
    }
    const int dim = sets.front().dim;
    std::size_t n_rows = 0;
    for (const auto& set : sets) {
        if (set.dim != dim) {
            throw std::invalid_argument("povm_span_rank: sets have different dimensions");
        }
        n_rows += set.elements.size();
    }
    RMatrix rows(static_cast<Eigen::Index>(n_rows), dim * dim);
    Eigen::Index r = 0;
    for (const auto& set : sets) {
        for (const auto& e : set.elements) {
            rows.row(r++) = hermitian_to_real_vector(e).transpose();
        }
    }
    return numerical_rank(rows, tolerance);
}

/**
 * Rank of span{ D(beta)|n><n|D(beta)^dag restricted to dim states :
 * beta in betas, n < n_detect }.
 */
inline RankReport displaced_counting_rank(const std::vector<Complex>& betas, int n_detect, int dim,
                                          std::optional<double> tolerance = {}) {
    if (betas.empty()) {
        throw std::invalid_argument("displaced_counting_rank: no displacements");
    }
    if (n_detect < dim) {
        throw std::invalid_argument("displaced_counting_rank: n_detect must be >= dim");
    }
    std::vector<PovmSet> sets;
    for (const Complex beta : betas) {
        PovmSet set;
        set.dim = dim;
        set.elements =
            displaced_number_family(beta, n_detect, dim, min_work_dim(dim, beta) + n_detect);
        sets.push_back(std::move(set));
    }
    return povm_span_rank(sets, tolerance);
}

/// {0, step, 2 step, ..., (d-1) step}
inline SupportSet arithmetic_support(int d, int step) {
    if (d < 1 || step < 1) {
        throw std::invalid_argument("arithmetic_support: d and step must be positive");
    }
    std::vector<int> idx;
    for (int k = 0; k < d; ++k) {
        idx.push_back(k * step);
    }
    return SupportSet(std::move(idx));
}

}  // namespace cvic
