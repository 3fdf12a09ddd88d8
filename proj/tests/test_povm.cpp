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

#include <cmath>
#include <limits>
#include <numbers>

#include <gtest/gtest.h>

#include "cvic/fock.hpp"
#include "cvic/povm.hpp"
#include "oracles.hpp"

namespace cvic {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

TEST(QuadratureBinOperator, FullLineIsIdentity) {
    for (int d : {1, 3, 8, 15}) {
        for (double theta : {0.0, 1.2}) {
            const CMatrix m = quadrature_bin_operator(theta, -kInf, kInf, d);
            EXPECT_LT(max_abs(m - CMatrix::Identity(d, d)), 1e-10) << d;
        }
    }
}

TEST(QuadratureBinOperator, HalfLineAgainstSimpsonOracle) {
    const CMatrix m = quadrature_bin_operator(0.0, 0.0, kInf, 2);
    const double m01 = oracle::overlap_simpson(0, 1, 0.0, 40.0);
    EXPECT_NEAR(m01, 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12);
    EXPECT_NEAR(m(0, 1).real(), m01, 1e-12);
    EXPECT_NEAR(m(0, 1).imag(), 0.0, 1e-15);
    EXPECT_NEAR(m(0, 0).real(), 0.5, 1e-12);
    EXPECT_NEAR(m(1, 1).real(), 0.5, 1e-12);
}

TEST(QuadratureBinOperator, FiniteBinsAgainstSimpsonOracle) {
    const CMatrix m = quadrature_bin_operator(0.0, -0.4, 1.3, 5);
    for (int k = 0; k < 5; ++k) {
        for (int l = 0; l < 5; ++l) {
            EXPECT_NEAR(m(k, l).real(), oracle::overlap_simpson(k, l, -0.4, 1.3, 20000), 1e-12);
        }
    }
}

TEST(QuadratureBinOperator, SymmetricBinParity) {
    const CMatrix m = quadrature_bin_operator(0.9, -1.7, 1.7, 7);
    for (int k = 0; k < 7; ++k) {
        for (int l = 0; l < 7; ++l) {
            if ((k + l) % 2 == 1) {
                EXPECT_LT(std::abs(m(k, l)), 1e-14) << k << "," << l;
            }
        }
    }
}

TEST(QuadratureBinOperator, RejectsEmptyInterval) {
    EXPECT_THROW(quadrature_bin_operator(0.0, 1.0, 1.0, 2), std::invalid_argument);
    EXPECT_THROW(quadrature_bin_operator(0.0, 2.0, 1.0, 2), std::invalid_argument);
    EXPECT_THROW(quadrature_bin_operator(0.0, kInf, kInf, 2), std::invalid_argument);
}

TEST(QuadratureBinOperator, Additivity) {
    const double cuts[] = {-kInf, -2.5, -0.3, 0.8, 3.1, kInf};
    for (double theta : {0.0, 0.7, 2.5}) {
        for (int i = 0; i + 2 < 6; ++i) {
            const CMatrix whole = quadrature_bin_operator(theta, cuts[i], cuts[i + 2], 6);
            const CMatrix parts = quadrature_bin_operator(theta, cuts[i], cuts[i + 1], 6) +
                                  quadrature_bin_operator(theta, cuts[i + 1], cuts[i + 2], 6);
            EXPECT_LT(max_abs(whole - parts), 1e-10) << i;
        }
    }
}

TEST(QuadratureBinOperator, PhaseCovariance) {
    for (double phi : {0.3, 1.9, 4.0}) {
        const CMatrix r = phase_rotation(phi, 5);
        const CMatrix base = quadrature_bin_operator(0.4, -0.5, 1.5, 5);
        const CMatrix shifted = quadrature_bin_operator(0.4 + phi, -0.5, 1.5, 5);
        EXPECT_LT(max_abs(shifted - r * base * r.adjoint()), 1e-10);
    }
}

TEST(BinnedPovm, SevenElementsResolveIdentity) {
    const PovmSet set = build_binned_quadrature_povm(0.0, BinLayout{5.0, 5, true}, 3);
    EXPECT_EQ(set.elements.size(), 7u);
    EXPECT_LT(set.deficit, 1e-8);
    EXPECT_NO_THROW(validate_povm_elements(set));
}

TEST(BinnedPovm, SingleWideBinIsNearIdentity) {
    const PovmSet set = build_binned_quadrature_povm(0.0, BinLayout{10.0, 1, false}, 4);
    ASSERT_EQ(set.elements.size(), 1u);
    EXPECT_LT(max_abs(set.elements[0] - CMatrix::Identity(4, 4)), 1e-10);
    EXPECT_LT(set.deficit, 1e-10);
}

TEST(BinnedPovm, DefaultLayoutIsCompleteUpToTwenty) {
    for (int d = 1; d <= 20; ++d) {
        const BinLayout layout = BinLayout::default_for(d);
        EXPECT_EQ(layout.n_bins, 2 * d - 1);
        const PovmSet with = build_binned_quadrature_povm(0.3, layout, d);
        EXPECT_LT(with.deficit, 1e-8) << d;
        // Without the overflow elements the window alone misses ~1e-6 of
        // psi_0's mass at d = 1; the miss drops below 1e-8 from d = 6 on.
        BinLayout no_tail = layout;
        no_tail.include_overflow = false;
        EXPECT_LT(build_binned_quadrature_povm(0.3, no_tail, d).deficit, d >= 6 ? 1e-8 : 1e-6) << d;
    }
}

TEST(BinnedPovm, ElementsArePsdHermitian) {
    for (int d : {2, 5, 9}) {
        for (double theta : {0.0, 0.5, 2.8}) {
            const PovmSet set = build_binned_quadrature_povm(theta, BinLayout{4.0, 11, true}, d);
            for (const auto& e : set.elements) {
                EXPECT_LT(hermiticity_defect(e), 1e-10);
                EXPECT_GE(min_eigenvalue(e), -1e-10);
            }
        }
    }
}

TEST(BinnedPovm, FoldingOverflowKeepsCompleteness) {
    const PovmSet set = build_binned_quadrature_povm(0.2, BinLayout{3.0, 3, true}, 3);
    const PovmSet folded = fold_overflow_bins(set);
    EXPECT_EQ(folded.elements.size(), 3u);
    EXPECT_LT(folded.deficit, 1e-8);
    EXPECT_LT(max_abs(folded.elements[0] - quadrature_bin_operator(0.2, -kInf, -1.0, 3)), 1e-10);
}

TEST(PovmDeficit, Cases) {
    PovmSet full{4, {quadrature_bin_operator(0.0, -kInf, kInf, 4)}, 0.0, "full"};
    EXPECT_LT(povm_deficit(full), 1e-10);

    PovmSet id{3, {CMatrix::Identity(3, 3)}, 0.0, "id"};
    EXPECT_EQ(povm_deficit(id), 0.0);

    // Without overflow, x_max = 3 and d = 6 miss part of psi_5's tails.
    const PovmSet cut = build_binned_quadrature_povm(0.0, BinLayout{3.0, 6, false}, 6);
    const double tail5 = 2.0 * oracle::overlap_simpson(5, 5, 3.0, 30.0, 60000);
    EXPECT_GT(tail5, 1e-3);
    EXPECT_GT(cut.deficit, 0.0);
    EXPECT_GE(cut.deficit, tail5 - 1e-10);
}

TEST(BinLayout, ElementIndex) {
    const BinLayout with{2.0, 4, true};
    EXPECT_EQ(with.element_index(-3.0), 0);
    EXPECT_EQ(with.element_index(-2.0), 1);
    EXPECT_EQ(with.element_index(-0.1), 2);
    EXPECT_EQ(with.element_index(0.0), 3);
    EXPECT_EQ(with.element_index(1.99), 4);
    EXPECT_EQ(with.element_index(2.0), 5);
    const BinLayout without{2.0, 4, false};
    EXPECT_FALSE(without.element_index(-2.5).has_value());
    EXPECT_FALSE(without.element_index(2.0).has_value());
    EXPECT_EQ(without.element_index(-2.0), 0);
    EXPECT_THROW((BinLayout{0.0, 3, true}.validate()), std::invalid_argument);
    EXPECT_THROW((BinLayout{1.0, 0, true}.validate()), std::invalid_argument);
}

TEST(DisplacedNumber, ZeroDisplacementIsNumberProjector) {
    for (int n = 0; n < 4; ++n) {
        const CMatrix op = displaced_number_operator(0.0, n, 4, min_work_dim(4, 0.0));
        CMatrix expected = CMatrix::Zero(4, 4);
        expected(n, n) = 1.0;
        EXPECT_EQ(op, expected) << n;
    }
}

TEST(DisplacedNumber, CoherentProjectorMatchesAmplitudes) {
    for (Complex beta : {Complex(0.5, 0.0), Complex(1.0, 1.0), Complex(-1.2, 0.4)}) {
        const int d = 6;
        const CMatrix op = displaced_number_operator(beta, 0, d, min_work_dim(d, beta));
        const auto coh = coherent_amplitudes(beta, d);
        for (int k = 0; k < d; ++k) {
            EXPECT_NEAR(op(k, k).real(), std::norm(coh.state.amplitudes(k)), 1e-9) << beta << " " << k;
        }
    }
}

TEST(DisplacedNumber, MatchesLaguerreOracle) {
    for (Complex beta : {Complex(1.0, 0.0), Complex(0.0, 1.0), Complex(1.0, 1.0), Complex(0.3, -0.8)}) {
        const int d = 4;
        const auto family = displaced_number_family(beta, 6, d, min_work_dim(d, beta) + 6);
        for (int n = 0; n < 6; ++n) {
            EXPECT_LT(max_abs(family[static_cast<std::size_t>(n)] - oracle::displaced_projector(beta, n, d)), 1e-9)
                << beta << " n=" << n;
        }
    }
}

TEST(DisplacedNumber, FamilyOverWorkDimResolvesIdentity) {
    const Complex beta(0.8, -0.6);
    const int d = 3;
    const int work = min_work_dim(d, beta);
    const auto family = displaced_number_family(beta, work, d, work);
    CMatrix sum = CMatrix::Zero(d, d);
    for (const auto& e : family) {
        sum += e;
        EXPECT_GE(min_eigenvalue(e), -1e-9);
        EXPECT_LT(hermiticity_defect(e), 1e-9);
    }
    EXPECT_LT(max_abs(sum - CMatrix::Identity(d, d)), 1e-8);
}

TEST(DisplacedNumber, GuardRejectsSmallWorkDim) {
    const Complex beta(1.0, 1.0);
    EXPECT_THROW(displaced_number_operator(beta, 0, 3, min_work_dim(3, beta) - 1), std::invalid_argument);
    EXPECT_EQ(min_work_dim(3, beta), 3 + 8 + 20);
}

TEST(DisplacedNumber, CountingPovmIsComplete) {
    const PovmSet set = build_displaced_counting_povm(Complex(0.5, 0.5), 4, 3);
    EXPECT_EQ(set.elements.size(), 5u);
    EXPECT_LT(set.deficit, 1e-8);
    EXPECT_NO_THROW(validate_povm_elements(set));
}

}  // namespace
}  // namespace cvic
