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
 * Fock-basis numerics: states, quadrature eigenstate overlaps, homodyne
 * densities, coherent amplitudes and the real parametrization of Hermitian
 * operators.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cvic/hermite.hpp"
#include "cvic/quadrature.hpp"

namespace cvic {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kNormTol = 1e-12;

/// max_{k,l} |A_kl - conj(A_lk)|
inline double hermiticity_defect(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline double min_eigenvalue(const CMatrix& hermitian) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitian, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

/// R_phi = diag(exp(i n phi)), n = 0..dim-1.
inline CMatrix phase_rotation(double phi, int dim) {
    CVector diag(dim);
    for (int n = 0; n < dim; ++n) {
        diag(n) = std::polar(1.0, n * phi);
    }
    return diag.asDiagonal();
}

struct FockVector {
    CVector amplitudes;

    [[nodiscard]] int dim() const { return static_cast<int>(amplitudes.size()); }
    [[nodiscard]] double norm_squared() const { return amplitudes.squaredNorm(); }
    [[nodiscard]] bool is_state() const {
        return std::abs(norm_squared() - 1.0) <= kNormTol;
    }
    void normalize() {
        const double n = amplitudes.norm();
        if (n == 0.0) {
            throw std::invalid_argument("FockVector: cannot normalize a zero vector");
        }
        amplitudes /= n;
    }
};

/**
 * Validated signal state: Hermitian and unit trace within 1e-12, smallest
 * eigenvalue at least -1e-10. Construction is the only validation point;
 * every function taking a DensityMatrix may assume these hold.
 */
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {
        if (m_.rows() == 0 || m_.rows() != m_.cols()) {
            throw std::invalid_argument("DensityMatrix: expected a non-empty square matrix");
        }
        if (const double h = hermiticity_defect(m_); h > kHermitianTol) {
            throw std::invalid_argument("DensityMatrix: not Hermitian (defect " +
                                        std::to_string(h) + ")");
        }
        if (const double t = std::abs(m_.trace() - Complex(1.0)); t > kTraceTol) {
            throw std::invalid_argument("DensityMatrix: trace differs from 1 by " +
                                        std::to_string(t));
        }
        if (const double e = min_eigenvalue(m_); e < kEigenvalueFloor) {
            throw std::invalid_argument("DensityMatrix: negative eigenvalue " +
                                        std::to_string(e));
        }
    }

    /// |psi><psi| after normalizing psi.
    static DensityMatrix pure(FockVector psi) {
        psi.normalize();
        CMatrix m = psi.amplitudes * psi.amplitudes.adjoint();
        m = 0.5 * (m + m.adjoint()).eval();
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix number_state(int n, int dim) {
        if (n < 0 || n >= dim) {
            throw std::invalid_argument("DensityMatrix::number_state: index outside dimension");
        }
        CMatrix m = CMatrix::Zero(dim, dim);
        m(n, n) = 1.0;
        return DensityMatrix(std::move(m));
    }

    static DensityMatrix maximally_mixed(int dim) {
        if (dim < 1) {
            throw std::invalid_argument("DensityMatrix::maximally_mixed: dim must be positive");
        }
        return DensityMatrix(CMatrix::Identity(dim, dim) / static_cast<double>(dim));
    }

    [[nodiscard]] int dim() const { return static_cast<int>(m_.rows()); }
    [[nodiscard]] const CMatrix& matrix() const { return m_; }
    [[nodiscard]] Complex operator()(int k, int l) const { return m_(k, l); }

private:
    CMatrix m_;
};

/**
 * A point (x, theta) of the rotated quadrature. theta is kept in [0, pi);
 * removing an odd multiple of pi flips the sign of x, since
 * |x_{theta+pi}> = |(-x)_theta>.
 */
struct QuadraturePoint {
    double x = 0.0;
    double theta = 0.0;

    QuadraturePoint() = default;
    QuadraturePoint(double x_in, double theta_in) : x(x_in), theta(theta_in) {
        const double turns = std::floor(theta / std::numbers::pi);
        if (turns != 0.0) {
            theta -= turns * std::numbers::pi;
            if (theta >= std::numbers::pi) {
                theta -= std::numbers::pi;
            }
            if (std::fmod(std::abs(turns), 2.0) == 1.0) {
                x = -x;
            }
        }
    }
};

/// Sorted, duplicate-free set of Fock indices spanning the signal subspace.
class SupportSet {
public:
    explicit SupportSet(std::vector<int> indices) : indices_(std::move(indices)) {
        if (indices_.empty()) {
            throw std::invalid_argument("SupportSet: empty");
        }
        if (indices_.front() < 0) {
            throw std::invalid_argument("SupportSet: negative index");
        }
        for (std::size_t i = 1; i < indices_.size(); ++i) {
            if (indices_[i] <= indices_[i - 1]) {
                throw std::invalid_argument("SupportSet: indices must be strictly increasing");
            }
        }
    }

    /// {0, 1, ..., d-1}
    static SupportSet contiguous(int d) {
        if (d < 1) {
            throw std::invalid_argument("SupportSet::contiguous: d must be positive");
        }
        std::vector<int> idx(static_cast<std::size_t>(d));
        std::iota(idx.begin(), idx.end(), 0);
        return SupportSet(std::move(idx));
    }

    [[nodiscard]] const std::vector<int>& indices() const { return indices_; }
    [[nodiscard]] int size() const { return static_cast<int>(indices_.size()); }
    [[nodiscard]] int max_index() const { return indices_.back(); }
    [[nodiscard]] int operator[](int i) const { return indices_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] bool is_contiguous() const {
        return indices_.front() == 0 && max_index() + 1 == size();
    }
    /// gcd of all index differences; 0 for a single index.
    [[nodiscard]] int spacing_gcd() const {
        int g = 0;
        for (std::size_t i = 1; i < indices_.size(); ++i) {
            g = std::gcd(g, indices_[i] - indices_[0]);
        }
        return g;
    }

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    std::vector<int> indices_;
};

/// <n|x_theta> = psi_n(x) exp(i n theta)
inline Complex quadrature_amplitude(int n, const QuadraturePoint& point) {
    return hermite_function(n, point.x) * std::polar(1.0, n * point.theta);
}

/// Overlaps <n|x_theta> for every n in the support.
inline CVector quadrature_amplitudes(const SupportSet& support, const QuadraturePoint& point) {
    const auto psi = hermite_functions(support.max_index(), point.x);
    CVector u(support.size());
    for (int i = 0; i < support.size(); ++i) {
        const int n = support[i];
        u(i) = psi[static_cast<std::size_t>(n)] * std::polar(1.0, n * point.theta);
    }
    return u;
}

/// Projector |x_theta><x_theta| restricted to the support.
inline CMatrix quadrature_projector(const SupportSet& support, const QuadraturePoint& point) {
    const CVector u = quadrature_amplitudes(support, point);
    return u * u.adjoint();
}

/**
 * Homodyne density p(x, theta) = <x_theta| rho |x_theta> with normalized
 * overlaps, so that it integrates to one over x for every theta.
 */
inline double homodyne_pdf(const DensityMatrix& rho, const QuadraturePoint& point) {
    const CVector u = quadrature_amplitudes(SupportSet::contiguous(rho.dim()), point);
    return (u.adjoint() * rho.matrix() * u)(0, 0).real();
}

struct CoherentTruncation {
    FockVector state;   ///< first n_cut amplitudes, not renormalized
    double tail_mass;   ///< probability carried by n >= n_cut
};

/// Poisson weight exp(-|alpha|^2) |alpha|^{2n} / n!; depends on alpha only through |alpha|.
inline double photon_number_probability(Complex alpha, int n) {
    if (n < 0) {
        throw std::invalid_argument("photon_number_probability: negative photon number");
    }
    const double r = std::abs(alpha);
    if (r == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return std::exp(-r * r + 2.0 * n * std::log(r) - std::lgamma(n + 1.0));
}

/// c_n = exp(-|alpha|^2/2) alpha^n / sqrt(n!), n < n_cut, plus the neglected tail mass.
inline CoherentTruncation coherent_amplitudes(Complex alpha, int n_cut) {
    if (n_cut < 1) {
        throw std::invalid_argument("coherent_amplitudes: n_cut must be positive");
    }
    const double r = std::abs(alpha);
    CVector c(n_cut);
    c(0) = std::exp(-0.5 * r * r);
    for (int n = 1; n < n_cut; ++n) {
        c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
    }

    // Sum the tail directly instead of 1 - sum |c_n|^2.
    double tail = 0.0;
    if (r > 0.0) {
        double term = photon_number_probability(alpha, n_cut);
        for (int n = n_cut; term > 0.0; ++n) {
            tail += term;
            term *= r * r / (n + 1.0);
            if (n > n_cut && term < 1e-300 * tail && n > r * r) {
                break;
            }
        }
    }
    return {FockVector{std::move(c)}, tail};
}

/**
 * Isometric real coordinates of a Hermitian s x s operator, in the basis
 * { E_kk ; (E_kl + E_lk)/sqrt2 ; i(E_kl - E_lk)/sqrt2 , k < l }:
 * diagonal entries first, then for each k < l the pair
 * sqrt2 Re A_kl, sqrt2 Im A_kl. dot(v(A), v(B)) = Tr(AB).
 */
inline RVector hermitian_to_real_vector(const CMatrix& op) {
    if (const double h = hermiticity_defect(op); h > 1e-10) {
        throw std::invalid_argument("hermitian_to_real_vector: operator not Hermitian (defect " +
                                    std::to_string(h) + ")");
    }
    const auto s = op.rows();
    RVector v(s * s);
    Eigen::Index at = 0;
    for (Eigen::Index k = 0; k < s; ++k) {
        v(at++) = op(k, k).real();
    }
    for (Eigen::Index k = 0; k < s; ++k) {
        for (Eigen::Index l = k + 1; l < s; ++l) {
            v(at++) = std::numbers::sqrt2 * op(k, l).real();
            v(at++) = std::numbers::sqrt2 * op(k, l).imag();
        }
    }
    return v;
}

}  // namespace cvic
