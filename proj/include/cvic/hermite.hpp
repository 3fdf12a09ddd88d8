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
 * Hermite polynomials and normalized harmonic-oscillator wavefunctions.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvic {

/// Largest degree accepted by hermite_poly. Coefficients of H_n leave the
/// range of double shortly after this.
inline constexpr int kMaxRawHermiteDegree = 40;

/**
 * Physicists' Hermite polynomial H_n(x) by three-term recurrence.
 *
 * Only meant for small n and for cross-checks; everything numerical in the
 * library goes through hermite_function().
 */
inline double hermite_poly(int n, double x) {
    if (n < 0) {
        throw std::invalid_argument("hermite_poly: negative degree");
    }
    if (n > kMaxRawHermiteDegree) {
        throw std::domain_error("hermite_poly: degree " + std::to_string(n) +
                                " exceeds " +
                                std::to_string(kMaxRawHermiteDegree) +
                                " (overflow risk); use hermite_function");
    }
    double prev = 1.0;
    if (n == 0) {
        return prev;
    }
    double cur = 2.0 * x;
    for (int k = 1; k < n; ++k) {
        const double next = 2.0 * x * cur - 2.0 * k * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/**
 * Values psi_0(x) ... psi_n_max(x) of the normalized oscillator
 * eigenfunctions psi_n(x) = pi^{-1/4} (2^n n!)^{-1/2} H_n(x) exp(-x^2/2).
 *
 * Uses the normalized recurrence with a running exponent so that the
 * Gaussian prefactor cannot underflow before the polynomial part has grown;
 * this keeps large n (thousands) accurate far from the origin.
 */
inline std::vector<double> hermite_functions(int n_max, double x) {
    if (n_max < 0) {
        throw std::invalid_argument("hermite_functions: negative degree");
    }
    constexpr double kRescale = 1e200;
    const double log_rescale = std::log(kRescale);
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);

    double log_scale = -0.5 * x * x;
    double prev = 0.0;
    double cur = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
    out[0] = cur * std::exp(log_scale);
    for (int k = 0; k < n_max; ++k) {
        const double next = x * std::sqrt(2.0 / (k + 1)) * cur -
                            std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
        if (std::abs(cur) > kRescale) {
            cur /= kRescale;
            prev /= kRescale;
            log_scale += log_rescale;
        }
        out[static_cast<std::size_t>(k) + 1] = cur * std::exp(log_scale);
    }
    return out;
}

/// Single normalized wavefunction psi_n(x); see hermite_functions().
inline double hermite_function(int n, double x) {
    return hermite_functions(n, x).back();
}

}  // namespace cvic
