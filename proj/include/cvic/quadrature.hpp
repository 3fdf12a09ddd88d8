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
 * Gauss-Hermite and Gauss-Legendre rules.
 */
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cvic/hermite.hpp"

namespace cvic {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    [[nodiscard]] std::size_t size() const { return nodes.size(); }
};

/**
 * Gauss-Hermite rule of the given order with "scaled" weights: for g(x) that
 * behaves like exp(-x^2) times a polynomial,
 *
 *     integral g(x) dx  ~=  sum_i weights[i] * g(nodes[i])
 *
 * which is exact when g = exp(-x^2) p(x) and deg p <= 2*order - 1. The scaled
 * weight is 1 / sum_{k<order} psi_k(x_i)^2, so nothing overflows even for a
 * few hundred nodes. Nodes come from the Golub-Welsch eigenproblem and are
 * polished by Newton steps on psi_order.
 */
inline QuadratureRule gauss_hermite_scaled(int order) {
    if (order < 1) {
        throw std::invalid_argument("gauss_hermite_scaled: order must be >= 1");
    }
    const auto n = static_cast<Eigen::Index>(order);
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 1; k < n; ++k) {
        jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(0.5 * static_cast<double>(k));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);

    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double x = eig.eigenvalues()(i);
        for (int it = 0; it < 3; ++it) {
            const auto psi = hermite_functions(order, x);
            // psi_n' = sqrt(2n) psi_{n-1} - x psi_n
            const double deriv = std::sqrt(2.0 * order) * psi[order - 1] - x * psi[order];
            if (deriv == 0.0) {
                break;
            }
            x -= psi[order] / deriv;
        }
        const auto psi = hermite_functions(order - 1, x);
        double norm = 0.0;
        for (double v : psi) {
            norm += v * v;
        }
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 1.0 / norm;
    }
    return rule;
}

/// Classical Gauss-Hermite weights for integral exp(-x^2) p(x) dx.
inline QuadratureRule gauss_hermite(int order) {
    QuadratureRule rule = gauss_hermite_scaled(order);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule.weights[i] *= std::exp(-rule.nodes[i] * rule.nodes[i]);
    }
    return rule;
}

/// Gauss-Legendre rule on [-1, 1], Newton iteration on P_n.
inline QuadratureRule gauss_legendre(int order) {
    if (order < 1) {
        throw std::invalid_argument("gauss_legendre: order must be >= 1");
    }
    QuadratureRule rule;
    rule.nodes.resize(static_cast<std::size_t>(order));
    rule.weights.resize(static_cast<std::size_t>(order));
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(order - 1 - i);
        rule.nodes[lo] = -x;
        rule.nodes[hi] = x;
        rule.weights[lo] = rule.weights[hi] = w;
    }
    return rule;
}

}  // namespace cvic
