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
 * Finite POVMs on truncated Fock subspaces: binned quadrature projectors and
 * displaced photon-number detectors.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvic/fock.hpp"
#include "cvic/hermite.hpp"
#include "cvic/quadrature.hpp"

namespace cvic {

inline constexpr double kPovmElementTol = 1e-10;
inline constexpr double kCompleteDeficitTol = 1e-8;

/// Default quadrature window: past the turning point of psi_{dim-1} with margin.
inline double default_x_max(int dim) { return std::sqrt(4.0 * dim + 8.0); }

/**
 * Equal-width bins over [-x_max, x_max], optionally flanked by the two
 * half-infinite overflow bins. Elements are ordered left to right, so with
 * overflow the first and last elements are the tails.
 */
struct BinLayout {
    double x_max = 1.0;
    int n_bins = 1;
    bool include_overflow = true;

    /// 2*dim - 1 bins over the default window, overflow on.
    static BinLayout default_for(int dim) {
        return BinLayout{default_x_max(dim), 2 * dim - 1, true};
    }

    void validate() const {
        if (!(x_max > 0.0) || !std::isfinite(x_max)) {
            throw std::invalid_argument("BinLayout: x_max must be positive and finite");
        }
        if (n_bins < 1) {
            throw std::invalid_argument("BinLayout: n_bins must be positive");
        }
    }

    [[nodiscard]] int element_count() const { return n_bins + (include_overflow ? 2 : 0); }

    [[nodiscard]] double edge(int i) const {
        if (i == n_bins) {
            return x_max;
        }
        return -x_max + (2.0 * x_max) * i / n_bins;
    }

    /// Integration limits of every element, in element order.
    [[nodiscard]] std::vector<std::pair<double, double>> intervals() const {
        constexpr double inf = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, double>> out;
        out.reserve(static_cast<std::size_t>(element_count()));
        if (include_overflow) {
            out.emplace_back(-inf, -x_max);
        }
        for (int i = 0; i < n_bins; ++i) {
            out.emplace_back(edge(i), edge(i + 1));
        }
        if (include_overflow) {
            out.emplace_back(x_max, inf);
        }
        return out;
    }

    /// Element receiving an outcome x; empty when x falls outside and there are no overflow bins.
    [[nodiscard]] std::optional<int> element_index(double x) const {
        const int shift = include_overflow ? 1 : 0;
        if (x < -x_max) {
            return include_overflow ? std::optional<int>(0) : std::nullopt;
        }
        if (x >= x_max) {
            return include_overflow ? std::optional<int>(n_bins + 1) : std::nullopt;
        }
        int bin = static_cast<int>(std::floor((x + x_max) / (2.0 * x_max) * n_bins));
        bin = std::clamp(bin, 0, n_bins - 1);
        return bin + shift;
    }

    friend bool operator==(const BinLayout&, const BinLayout&) = default;
};

struct PovmSet {
    int dim = 0;
    std::vector<CMatrix> elements;
    double deficit = 0.0;  ///< spectral norm of 1 - sum(elements)
    std::string label;
};

/// Spectral norm of (identity - sum of elements).
inline double povm_deficit(const PovmSet& set) {
    CMatrix rest = CMatrix::Identity(set.dim, set.dim);
    for (const auto& e : set.elements) {
        rest -= e;
    }
    rest = 0.5 * (rest + rest.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(rest, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Throws unless every element is a dim x dim PSD Hermitian matrix (tolerance 1e-10).
inline void validate_povm_elements(const PovmSet& set) {
    for (std::size_t i = 0; i < set.elements.size(); ++i) {
        const auto& e = set.elements[i];
        if (e.rows() != set.dim || e.cols() != set.dim) {
            throw std::invalid_argument("PovmSet: element " + std::to_string(i) +
                                        " has the wrong shape");
        }
        if (hermiticity_defect(e) > kPovmElementTol) {
            throw std::invalid_argument("PovmSet: element " + std::to_string(i) +
                                        " is not Hermitian");
        }
        if (min_eigenvalue(e) < -kPovmElementTol) {
            throw std::invalid_argument("PovmSet: element " + std::to_string(i) +
                                        " is not positive semidefinite");
        }
    }
}

namespace detail {

inline const QuadratureRule& legendre32() {
    static const QuadratureRule rule = gauss_legendre(32);
    return rule;
}

// integral_a^b psi_k psi_l dx with one 32-point Gauss-Legendre panel
inline RMatrix product_panel(double a, double b, int dim) {
    const auto& gl = legendre32();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    RMatrix out = RMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < gl.size(); ++i) {
        const auto psi = hermite_functions(dim - 1, mid + half * gl.nodes[i]);
        const Eigen::Map<const RVector> v(psi.data(), dim);
        out.noalias() += (gl.weights[i] * half) * (v * v.transpose());
    }
    return out;
}

inline RMatrix product_adaptive(double a, double b, int dim, const RMatrix& whole, int depth) {
    const double m = 0.5 * (a + b);
    RMatrix left = product_panel(a, m, dim);
    RMatrix right = product_panel(m, b, dim);
    RMatrix sum = left + right;
    if (depth >= 40 || (sum - whole).cwiseAbs().maxCoeff() < 1e-12) {
        return sum;
    }
    return product_adaptive(a, m, dim, left, depth + 1) +
           product_adaptive(m, b, dim, right, depth + 1);
}

inline RMatrix product_integral_finite(double a, double b, int dim) {
    return product_adaptive(a, b, dim, product_panel(a, b, dim), 0);
}

}  // namespace detail

/**
 * Real symmetric matrix of overlaps integral_a^b psi_k(x) psi_l(x) dx,
 * k, l < dim. Infinite limits are allowed. The full line uses Gauss-Hermite
 * (exact); a half-infinite interval is cut 12 units beyond both the finite
 * end and the turning point of psi_{dim-1}, where the integrand is below
 * exp(-144).
 */
inline RMatrix quadrature_bin_overlaps(double a, double b, int dim) {
    if (dim < 1) {
        throw std::invalid_argument("quadrature_bin_overlaps: dim must be positive");
    }
    if (std::isnan(a) || std::isnan(b) || !(a < b)) {
        throw std::invalid_argument("quadrature_bin_overlaps: need a < b");
    }
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (lo_inf && hi_inf) {
        const QuadratureRule gh = gauss_hermite_scaled(dim + 1);
        RMatrix out = RMatrix::Zero(dim, dim);
        for (std::size_t i = 0; i < gh.size(); ++i) {
            const auto psi = hermite_functions(dim - 1, gh.nodes[i]);
            const Eigen::Map<const RVector> v(psi.data(), dim);
            out.noalias() += gh.weights[i] * (v * v.transpose());
        }
        return out;
    }
    const double turning = std::sqrt(2.0 * dim + 1.0);
    if (lo_inf) {
        const double cut = std::max(std::abs(b), turning) + 12.0;
        return detail::product_integral_finite(std::min(-cut, b - 1.0), b, dim);
    }
    if (hi_inf) {
        const double cut = std::max(std::abs(a), turning) + 12.0;
        return detail::product_integral_finite(a, std::max(cut, a + 1.0), dim);
    }
    return detail::product_integral_finite(a, b, dim);
}

/// Attach the quadrature phase: M_kl = overlaps_kl exp(i (k - l) theta).
inline CMatrix apply_quadrature_phase(const RMatrix& overlaps, double theta) {
    const auto dim = overlaps.rows();
    CMatrix m(dim, dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index l = 0; l < dim; ++l) {
            m(k, l) = overlaps(k, l) * std::polar(1.0, static_cast<double>(k - l) * theta);
        }
    }
    return m;
}

/// POVM element integral_a^b |x_theta><x_theta| dx on the first dim Fock states.
inline CMatrix quadrature_bin_operator(double theta, double a, double b, int dim) {
    return apply_quadrature_phase(quadrature_bin_overlaps(a, b, dim), theta);
}

/// Sub-block of a Fock-space operator on the listed support indices.
inline CMatrix restrict_to_support(const CMatrix& op, const SupportSet& support) {
    const int s = support.size();
    CMatrix out(s, s);
    for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
            out(i, j) = op(support[i], support[j]);
        }
    }
    return out;
}

inline std::string describe_quadrature(double theta, const BinLayout& layout) {
    std::ostringstream os;
    os.precision(17);
    os << "quadrature theta=" << theta << " bins=" << layout.n_bins << " x_max=" << layout.x_max
       << (layout.include_overflow ? " overflow" : "");
    return os.str();
}

/// One element per bin of the layout at quadrature phase theta.
inline PovmSet build_binned_quadrature_povm(double theta, const BinLayout& layout, int dim) {
    layout.validate();
    if (dim < 1) {
        throw std::invalid_argument("build_binned_quadrature_povm: dim must be positive");
    }
    PovmSet set;
    set.dim = dim;
    set.label = describe_quadrature(theta, layout);
    for (const auto& [a, b] : layout.intervals()) {
        set.elements.push_back(quadrature_bin_operator(theta, a, b, dim));
    }
    set.deficit = povm_deficit(set);
    return set;
}

/// Merge each overflow element into its neighbouring finite bin.
inline PovmSet fold_overflow_bins(PovmSet set) {
    const auto n = set.elements.size();
    if (n < 3) {
        throw std::invalid_argument("fold_overflow_bins: need at least three elements");
    }
    set.elements[1] += set.elements[0];
    set.elements[n - 2] += set.elements[n - 1];
    set.elements.pop_back();
    set.elements.erase(set.elements.begin());
    set.label += " folded";
    set.deficit = povm_deficit(set);
    return set;
}

/// Smallest Fock cutoff accepted for displacing by beta while keeping dim states.
inline int min_work_dim(int dim, Complex beta) {
    return dim + 4 * static_cast<int>(std::ceil(std::norm(beta))) + 20;
}

/**
 * D(beta) = exp(beta a^dag - conj(beta) a) with ladder operators truncated to
 * work_dim levels. The generator is anti-Hermitian, so the exponential is
 * taken through the eigenbasis of i*(generator) and is exactly unitary.
 */
inline CMatrix displacement_operator(Complex beta, int work_dim) {
    if (work_dim < 1) {
        throw std::invalid_argument("displacement_operator: work_dim must be positive");
    }
    CMatrix gen = CMatrix::Zero(work_dim, work_dim);
    for (int n = 1; n < work_dim; ++n) {
        const double s = std::sqrt(static_cast<double>(n));
        gen(n, n - 1) = beta * s;              // beta a^dag
        gen(n - 1, n) = -std::conj(beta) * s;  // -conj(beta) a
    }
    const CMatrix herm = Complex(0.0, 1.0) * gen;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (herm + herm.adjoint()));
    CVector phases(work_dim);
    for (int k = 0; k < work_dim; ++k) {
        phases(k) = std::polar(1.0, -eig.eigenvalues()(k));
    }
    return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

/**
 * Top-left dim x dim blocks of D(beta)|n><n|D(beta)^dag for n < n_count.
 * Throws when work_dim is below min_work_dim(dim, beta) or n_count > work_dim.
 */
inline std::vector<CMatrix> displaced_number_family(Complex beta, int n_count, int dim,
                                                    int work_dim) {
    if (dim < 1 || n_count < 1) {
        throw std::invalid_argument("displaced_number_family: dim and n_count must be positive");
    }
    if (work_dim < min_work_dim(dim, beta)) {
        throw std::invalid_argument("displaced_number_operator: work_dim " +
                                    std::to_string(work_dim) + " below truncation guard " +
                                    std::to_string(min_work_dim(dim, beta)));
    }
    if (n_count > work_dim) {
        throw std::invalid_argument("displaced_number_operator: photon number outside work_dim");
    }
    const CMatrix d = displacement_operator(beta, work_dim);
    std::vector<CMatrix> out;
    out.reserve(static_cast<std::size_t>(n_count));
    for (int n = 0; n < n_count; ++n) {
        const CVector v = d.col(n).head(dim);
        CMatrix op = v * v.adjoint();
        out.push_back(0.5 * (op + op.adjoint()));
    }
    return out;
}

inline CMatrix displaced_number_operator(Complex beta, int n, int dim, int work_dim) {
    if (n < 0) {
        throw std::invalid_argument("displaced_number_operator: negative photon number");
    }
    return displaced_number_family(beta, n + 1, dim, work_dim).back();
}

/// Displaced photon counting on dim states: elements for n < n_count plus the
/// residual 1 - sum so that the set resolves the identity.
inline PovmSet build_displaced_counting_povm(Complex beta, int n_count, int dim) {
    PovmSet set;
    set.dim = dim;
    set.elements = displaced_number_family(beta, n_count, dim, min_work_dim(dim, beta) + n_count);
    std::ostringstream os;
    os.precision(17);
    os << "displaced counting beta=" << beta.real() << (beta.imag() < 0 ? "" : "+")
       << beta.imag() << "i n<" << n_count;
    set.label = os.str();
    CMatrix residual = CMatrix::Identity(dim, dim);
    for (const auto& e : set.elements) {
        residual -= e;
    }
    set.elements.push_back(0.5 * (residual + residual.adjoint()));
    set.deficit = povm_deficit(set);
    return set;
}

}  // namespace cvic
