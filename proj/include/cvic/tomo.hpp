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
 * Simulated homodyne data and maximum-likelihood state reconstruction.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvic/fock.hpp"
#include "cvic/povm.hpp"

namespace cvic {

inline constexpr int kSamplingGridPoints = 4096;
inline constexpr double kProbabilityFloor = 1e-300;

/**
 * Draw n_samples i.i.d. quadrature outcomes from p(x | theta).
 *
 * The density is tabulated on 4096 equally spaced points over
 * [-x_max, x_max] (x_max defaults to default_x_max(dim)), integrated with the
 * trapezoid rule and inverted piecewise linearly. Output depends only on the
 * arguments: the generator is std::mt19937_64 seeded with `seed`.
 */
inline std::vector<double> sample_homodyne(const DensityMatrix& rho, double theta,
                                           std::size_t n_samples, std::uint64_t seed,
                                           std::optional<double> x_max = {}) {
    const double half_width = x_max.value_or(default_x_max(rho.dim()));
    if (!(half_width > 0.0)) {
        throw std::invalid_argument("sample_homodyne: x_max must be positive");
    }
    constexpr int n = kSamplingGridPoints;
    const double h = 2.0 * half_width / (n - 1);
    std::vector<double> cdf(n, 0.0);
    double prev = std::max(0.0, homodyne_pdf(rho, QuadraturePoint(-half_width, theta)));
    for (int i = 1; i < n; ++i) {
        const double x = -half_width + i * h;
        const double cur = std::max(0.0, homodyne_pdf(rho, QuadraturePoint(x, theta)));
        cdf[static_cast<std::size_t>(i)] = cdf[static_cast<std::size_t>(i - 1)] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    const double total = cdf.back();

    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    std::vector<double> out(n_samples);
    for (auto& x : out) {
        const double target = uniform(gen) * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
        const auto hi = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1, n - 1));
        const std::size_t lo = hi - 1;
        const double span = cdf[hi] - cdf[lo];
        const double frac = span > 0.0 ? (target - cdf[lo]) / span : 0.0;
        x = -half_width + (static_cast<double>(lo) + frac) * h;
    }
    return out;
}

/// Histogram of samples over the layout's elements. Without overflow bins,
/// outcomes beyond +-x_max are not counted.
inline std::vector<std::uint64_t> bin_samples(const std::vector<double>& samples,
                                              const BinLayout& layout) {
    layout.validate();
    std::vector<std::uint64_t> counts(static_cast<std::size_t>(layout.element_count()), 0);
    for (double x : samples) {
        if (const auto idx = layout.element_index(x)) {
            ++counts[static_cast<std::size_t>(*idx)];
        }
    }
    return counts;
}

/// Binned homodyne counts for a list of phase settings.
struct MeasurementData {
    std::vector<double> phases;
    std::vector<BinLayout> layouts;
    std::vector<std::vector<std::uint64_t>> counts;
    std::vector<std::uint64_t> totals;  ///< per setting, equal to the sum of its counts
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t settings() const { return phases.size(); }

    void validate() const {
        const std::size_t n = phases.size();
        if (layouts.size() != n || counts.size() != n || totals.size() != n) {
            throw std::invalid_argument("MeasurementData: per-setting lists differ in length");
        }
        for (std::size_t j = 0; j < n; ++j) {
            layouts[j].validate();
            if (counts[j].size() != static_cast<std::size_t>(layouts[j].element_count())) {
                throw std::invalid_argument("MeasurementData: counts do not match layout of setting " +
                                            std::to_string(j));
            }
            std::uint64_t sum = 0;
            for (auto c : counts[j]) {
                sum += c;
            }
            if (sum != totals[j]) {
                throw std::invalid_argument("MeasurementData: counts of setting " +
                                            std::to_string(j) + " do not sum to its total");
            }
        }
    }
};

/**
 * Sample and bin n_samples outcomes per phase. Setting j is seeded with
 * seed ^ j, so each setting's data is independent of how many settings
 * there are and of the order they are generated in.
 */
inline MeasurementData simulate_measurement(const DensityMatrix& rho,
                                            const std::vector<double>& phases,
                                            const BinLayout& layout, std::size_t n_samples,
                                            std::uint64_t seed) {
    MeasurementData data;
    data.seed = seed;
    for (std::size_t j = 0; j < phases.size(); ++j) {
        const auto samples =
            sample_homodyne(rho, phases[j], n_samples, seed ^ static_cast<std::uint64_t>(j),
                            layout.x_max);
        auto counts = bin_samples(samples, layout);
        std::uint64_t total = 0;
        for (auto c : counts) {
            total += c;
        }
        data.phases.push_back(phases[j]);
        data.layouts.push_back(layout);
        data.counts.push_back(std::move(counts));
        data.totals.push_back(total);
    }
    return data;
}

/// Binned quadrature POVMs matching each setting of the data.
inline std::vector<PovmSet> povms_for(const MeasurementData& data, int dim) {
    std::vector<PovmSet> out;
    out.reserve(data.settings());
    for (std::size_t j = 0; j < data.settings(); ++j) {
        out.push_back(build_binned_quadrature_povm(data.phases[j], data.layouts[j], dim));
    }
    return out;
}

/// Born-rule probabilities Tr(rho E) of every element.
inline std::vector<double> outcome_probabilities(const CMatrix& rho, const PovmSet& set) {
    std::vector<double> p;
    p.reserve(set.elements.size());
    for (const auto& e : set.elements) {
        // Tr(rho E) = sum_kl rho_kl E_lk
        p.push_back(rho.cwiseProduct(e.transpose()).sum().real());
    }
    return p;
}

/**
 * Log-likelihood per event, sum_j f_j log p_j(rho) with f_j the weights
 * normalized to unit total across all settings. Probabilities are floored
 * at 1e-300.
 */
inline double log_likelihood(const std::vector<std::vector<double>>& weights,
                             const std::vector<PovmSet>& povms, const CMatrix& rho) {
    double total = 0.0;
    for (const auto& w : weights) {
        for (double v : w) {
            total += v;
        }
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("log_likelihood: no data");
    }
    double ll = 0.0;
    for (std::size_t j = 0; j < povms.size(); ++j) {
        const auto p = outcome_probabilities(rho, povms[j]);
        for (std::size_t k = 0; k < p.size(); ++k) {
            if (weights[j][k] > 0.0) {
                ll += weights[j][k] / total * std::log(std::max(p[k], kProbabilityFloor));
            }
        }
    }
    return ll;
}

inline std::vector<std::vector<double>> count_weights(const MeasurementData& data) {
    std::vector<std::vector<double>> w;
    for (const auto& c : data.counts) {
        w.emplace_back(c.begin(), c.end());
    }
    return w;
}

struct MlOptions {
    int max_iters = 5000;
    double epsilon = 0.5;           ///< dilution of the R operator
    double gain_tolerance = 1e-10;  ///< stop once a step gains less than this
};

struct ReconstructionResult {
    DensityMatrix estimate;
    std::vector<double> log_likelihood_trace;  ///< starts with the initial state
    int iterations = 0;
    bool converged = false;
    /// Some outcome with a nonzero count had probability at or below the floor.
    bool singular_likelihood = false;

    [[nodiscard]] double final_loglik() const { return log_likelihood_trace.back(); }
};

/**
 * Diluted R-rho-R maximum likelihood on weighted outcomes.
 *
 * Starting from 1/dim, each step forms R = sum_j (f_j / p_j) E_j and updates
 * rho <- N[(1 - e + e R) rho (1 - e + e R)]. If a step would lower the
 * likelihood, e is halved for that step (at most 40 times); a step that
 * cannot gain at all ends the run as converged. The run also stops when the
 * per-event gain drops below gain_tolerance.
 */
inline ReconstructionResult ml_reconstruct_weighted(const std::vector<std::vector<double>>& weights,
                                                    const std::vector<PovmSet>& povms, int dim,
                                                    const MlOptions& options = {}) {
    if (weights.size() != povms.size()) {
        throw std::invalid_argument("ml_reconstruct: data and POVM lists differ in length");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < povms.size(); ++j) {
        if (povms[j].dim != dim) {
            throw std::invalid_argument("ml_reconstruct: POVM dimension mismatch");
        }
        if (weights[j].size() != povms[j].elements.size()) {
            throw std::invalid_argument("ml_reconstruct: counts do not match POVM of setting " +
                                        std::to_string(j));
        }
        for (double w : weights[j]) {
            if (w < 0.0) {
                throw std::invalid_argument("ml_reconstruct: negative count");
            }
            total += w;
        }
    }
    if (!(total > 0.0)) {
        throw std::invalid_argument("ml_reconstruct: no data");
    }
    if (!(options.epsilon > 0.0 && options.epsilon <= 1.0)) {
        throw std::invalid_argument("ml_reconstruct: epsilon must lie in (0, 1]");
    }

    const CMatrix identity = CMatrix::Identity(dim, dim);
    CMatrix rho = identity / static_cast<double>(dim);
    double ll = log_likelihood(weights, povms, rho);

    ReconstructionResult result{DensityMatrix::maximally_mixed(dim), {ll}, 0, false, false};

    for (int it = 0; it < options.max_iters; ++it) {
        CMatrix r = CMatrix::Zero(dim, dim);
        for (std::size_t j = 0; j < povms.size(); ++j) {
            const auto p = outcome_probabilities(rho, povms[j]);
            for (std::size_t k = 0; k < p.size(); ++k) {
                if (weights[j][k] <= 0.0) {
                    continue;
                }
                if (p[k] <= kProbabilityFloor) {
                    result.singular_likelihood = true;
                }
                r += (weights[j][k] / total / std::max(p[k], kProbabilityFloor)) * povms[j].elements[k];
            }
        }

        double eps = options.epsilon;
        bool accepted = false;
        CMatrix next;
        double next_ll = ll;
        for (int halving = 0; halving <= 40; ++halving, eps *= 0.5) {
            const CMatrix a = (1.0 - eps) * identity + eps * r;
            next = a * rho * a.adjoint();
            next = 0.5 * (next + next.adjoint()).eval();
            next /= next.trace().real();
            next_ll = log_likelihood(weights, povms, next);
            if (next_ll >= ll) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            result.converged = true;
            break;
        }
        const double gain = next_ll - ll;
        rho = std::move(next);
        ll = next_ll;
        result.log_likelihood_trace.push_back(ll);
        result.iterations = it + 1;
        if (gain < options.gain_tolerance) {
            result.converged = true;
            break;
        }
    }
    result.estimate = DensityMatrix(rho);
    return result;
}

/// ML reconstruction from binned counts; povms[j] must describe setting j.
inline ReconstructionResult ml_reconstruct(const MeasurementData& data,
                                           const std::vector<PovmSet>& povms, int dim,
                                           int max_iters = 5000, double epsilon = 0.5) {
    data.validate();
    return ml_reconstruct_weighted(count_weights(data), povms, dim,
                                   MlOptions{max_iters, epsilon, 1e-10});
}

/// Principal square root of a PSD Hermitian matrix (negative eigenvalues clipped).
inline CMatrix psd_sqrt(const CMatrix& m) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (m + m.adjoint()));
    const RVector roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * roots.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, computed as the squared trace norm
/// of sqrt(rho) sqrt(sigma).
inline double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const CMatrix prod = psd_sqrt(rho.matrix()) * psd_sqrt(sigma.matrix());
    Eigen::JacobiSVD<CMatrix> svd(prod);
    const double nuclear = svd.singularValues().sum();
    return nuclear * nuclear;
}

inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    const CMatrix diff = rho.matrix() - sigma.matrix();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

/**
 * Largest spread max_s p - min_s p of a bin probability across the states,
 * over all phases and bins of the layout. Zero means the measurement cannot
 * tell the states apart.
 */
inline double ambiguity_witness(const std::vector<DensityMatrix>& states,
                                const std::vector<double>& phases, const BinLayout& layout) {
    if (states.empty()) {
        return 0.0;
    }
    const int dim = states.front().dim();
    for (const auto& s : states) {
        if (s.dim() != dim) {
            throw std::invalid_argument("ambiguity_witness: states differ in dimension");
        }
    }
    double witness = 0.0;
    for (double theta : phases) {
        const PovmSet set = build_binned_quadrature_povm(theta, layout, dim);
        std::vector<std::vector<double>> probs;
        for (const auto& s : states) {
            probs.push_back(outcome_probabilities(s.matrix(), set));
        }
        for (std::size_t k = 0; k < set.elements.size(); ++k) {
            double lo = probs[0][k];
            double hi = probs[0][k];
            for (const auto& p : probs) {
                lo = std::min(lo, p[k]);
                hi = std::max(hi, p[k]);
            }
            witness = std::max(witness, hi - lo);
        }
    }
    return witness;
}

}  // namespace cvic
