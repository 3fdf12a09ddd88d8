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
#include <complex>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "cvic/completeness.hpp"
#include "cvic/povm.hpp"
#include "oracles.hpp"

namespace cvic {
namespace {

// Published rank table, rows d = 2..8, columns m = 1..6.
constexpr int kReferenceRanks[7][6] = {
    {3, 4, 4, 4, 4, 4},       {5, 8, 9, 9, 9, 9},       {7, 12, 15, 16, 16, 16},
    {9, 16, 21, 24, 25, 25},  {11, 20, 27, 32, 35, 36}, {13, 24, 33, 40, 45, 48},
    {15, 28, 39, 48, 55, 60},
};

std::vector<double> equispaced(int m, double offset = 0.0) {
    std::vector<double> out;
    for (int j = 0; j < m; ++j) {
        out.push_back(offset + j * std::numbers::pi / m);
    }
    return out;
}

TEST(PredictedRank, ClosedForm) {
    EXPECT_EQ(predicted_rank(2, 1), 3);
    EXPECT_EQ(predicted_rank(5, 3), 21);
    EXPECT_EQ(predicted_rank(4, 6), 16);
    for (int m = 1; m < 10; ++m) {
        EXPECT_EQ(predicted_rank(1, m), 1);
    }
    for (int d = 2; d <= 8; ++d) {
        for (int m = 1; m <= 6; ++m) {
            EXPECT_EQ(predicted_rank(d, m), kReferenceRanks[d - 2][m - 1]);
        }
    }
    EXPECT_THROW(predicted_rank(0, 1), std::invalid_argument);
}

TEST(PredictedRank, AccumulatesOneDimensionPerPhase) {
    for (long d = 1; d <= 50; ++d) {
        for (long m = 1; m <= d; ++m) {
            EXPECT_EQ(accumulated_rank(d, m), predicted_rank(d, m)) << d << "," << m;
        }
        EXPECT_EQ(accumulated_rank(d, d + 5), d * d);
    }
    static_assert(accumulated_rank(5, 3) == 21);
}

TEST(DesignMatrix, Shape) {
    const auto spec = MeasurementSpec::continuous(SupportSet({0, 2, 5}), {0.0, 1.0});
    const RMatrix a = design_matrix(spec);
    EXPECT_EQ(a.rows(), 2 * default_x_nodes(spec.support));
    EXPECT_EQ(a.cols(), 9);

    const BinLayout layout{4.0, 5, true};
    const RMatrix b = design_matrix(MeasurementSpec::binned(SupportSet({0, 1, 2}), {0.0, 1.0, 2.0}, layout));
    EXPECT_EQ(b.rows(), 3 * layout.element_count());
    EXPECT_EQ(b.cols(), 9);
}

TEST(DesignMatrix, SmallCases) {
    for (double theta : {0.0, 0.6, 2.0}) {
        EXPECT_EQ(numerical_rank(design_matrix(MeasurementSpec::continuous(SupportSet({0}), {theta}))).numerical_rank, 1);
    }
    // theta = 0 only: the sigma_y direction is missing.
    EXPECT_EQ(numerical_rank(design_matrix(MeasurementSpec::continuous(SupportSet({0, 1}), {0.0}))).numerical_rank, 3);
    for (int d = 1; d <= 7; ++d) {
        const auto r = numerical_rank(design_matrix(MeasurementSpec::continuous(SupportSet::contiguous(d), equispaced(d))));
        EXPECT_EQ(r.numerical_rank, d * d) << d;
    }
}

TEST(DesignMatrix, RejectsInvalidSpecs) {
    EXPECT_THROW(design_matrix(MeasurementSpec::continuous(SupportSet({0, 1}), {0.3, 0.3 + std::numbers::pi})),
                 std::invalid_argument);
    EXPECT_THROW(design_matrix(MeasurementSpec::continuous(SupportSet({0, 1}), {})), std::invalid_argument);
    auto spec = MeasurementSpec::continuous(SupportSet({0, 3}), {0.0});
    spec.x_nodes_per_phase = 6;  // needs 2*3+1
    EXPECT_THROW(design_matrix(spec), std::invalid_argument);
    spec.x_nodes_per_phase = 7;
    EXPECT_NO_THROW(design_matrix(spec));
}

TEST(NumericalRank, IdentityAndDuplicates) {
    for (int s = 1; s <= 4; ++s) {
        const auto r = numerical_rank(RMatrix::Identity(s * s, s * s));
        EXPECT_EQ(r.numerical_rank, s * s);
        EXPECT_TRUE(std::isinf(r.gap));
        EXPECT_FALSE(r.ill_conditioned());
    }
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    RMatrix a(5, 9);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a.data()[i] = n(rng);
    }
    RMatrix dup(6, 9);
    dup << a, a.row(2);
    EXPECT_EQ(numerical_rank(a).numerical_rank, 5);
    EXPECT_EQ(numerical_rank(dup).numerical_rank, 5);
    EXPECT_GT(numerical_rank(dup).gap, 1e6);
}

TEST(NumericalRank, ReportIsWellFormed) {
    const auto r = rank_for(SupportSet::contiguous(6), 4);
    EXPECT_EQ(r.numerical_rank, 32);
    ASSERT_TRUE(r.predicted_rank.has_value());
    EXPECT_EQ(*r.predicted_rank, 32);
    EXPECT_GE(r.gap, 1e6);
    EXPECT_LE(r.numerical_rank, 36);
    for (std::size_t i = 1; i < r.singular_values.size(); ++i) {
        EXPECT_GE(r.singular_values[i - 1], r.singular_values[i]);
        EXPECT_GE(r.singular_values[i], 0.0);
    }
    EXPECT_NEAR(r.tolerance_used,
                static_cast<double>(std::max<std::size_t>(4 * 12, 36)) * r.singular_values[0] * 1e-12,
                1e-20);
}

TEST(NumericalRank, ExplicitToleranceAndEmpty) {
    RMatrix a = RMatrix::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 1e-6;
    EXPECT_EQ(numerical_rank(a).numerical_rank, 2);
    EXPECT_EQ(numerical_rank(a, 1e-3).numerical_rank, 1);
    EXPECT_NEAR(numerical_rank(a, 1e-3).gap, 1e6, 1e-3);
    EXPECT_THROW(numerical_rank(RMatrix(0, 3)), std::invalid_argument);
}

TEST(RankFor, Examples) {
    EXPECT_EQ(rank_for(SupportSet::contiguous(5), 1).numerical_rank, 9);
    const SupportSet quads({0, 4, 8});
    const auto one = rank_for(quads, 1);
    EXPECT_EQ(one.numerical_rank, 6);
    EXPECT_FALSE(one.predicted_rank.has_value());
    EXPECT_EQ(rank_for(quads, 2).numerical_rank, 9);
}

TEST(RankFor, EquispacedPhasesAreDegenerateOnSparseSupports) {
    // Why sparse supports get golden-ratio default phases.
    const SupportSet quads({0, 4, 8});
    EXPECT_LT(rank_for_phases(quads, equispaced(2)).numerical_rank, 9);
    EXPECT_EQ(rank_for_phases(quads, default_phases(quads, 2)).numerical_rank, 9);
}

TEST(RankFor, HeadlineRuleUpToTwelve) {
    for (int d = 1; d <= 12; ++d) {
        for (int m = 1; m <= 12; ++m) {
            const auto r = rank_for(SupportSet::contiguous(d), m);
            EXPECT_EQ(r.numerical_rank, predicted_rank(d, m)) << d << "," << m;
            EXPECT_FALSE(r.ill_conditioned()) << d << "," << m;
        }
    }
}

TEST(RankFor, MonotoneAndSaturating) {
    for (const SupportSet& s : {SupportSet::contiguous(5), SupportSet({0, 4, 8}), SupportSet({0, 1, 3, 7}),
                                SupportSet({2, 3, 5})}) {
        int prev = 0;
        const int full = s.size() * s.size();
        bool saturated = false;
        for (int m = 1; m <= 8; ++m) {
            const int r = rank_for(s, m).numerical_rank;
            EXPECT_GE(r, prev);
            EXPECT_LE(r, full);
            if (saturated) {
                EXPECT_EQ(r, full);
            }
            saturated = saturated || r == full;
            prev = r;
        }
        EXPECT_TRUE(saturated);
    }
}

TEST(RankFor, PhaseOffsetInvariance) {
    for (int d : {3, 5, 7}) {
        for (int m = 1; m <= d; ++m) {
            const int base = rank_for_phases(SupportSet::contiguous(d), equispaced(m)).numerical_rank;
            for (double offset : {0.1, 0.77, 2.5}) {
                EXPECT_EQ(rank_for_phases(SupportSet::contiguous(d), equispaced(m, offset)).numerical_rank, base);
            }
        }
    }
}

TEST(RankFor, MoreNodesNeverChangeRank) {
    for (const SupportSet& s : {SupportSet::contiguous(4), SupportSet({0, 4, 8}), SupportSet({1, 2, 6})}) {
        for (int m = 1; m <= 3; ++m) {
            auto spec = MeasurementSpec::continuous(s, default_phases(s, m));
            const int base = numerical_rank(design_matrix(spec)).numerical_rank;
            for (int extra : {-1, 3, 10, 30}) {
                spec.x_nodes_per_phase = default_x_nodes(s) + extra;
                EXPECT_EQ(numerical_rank(design_matrix(spec)).numerical_rank, base) << extra;
            }
        }
    }
}

TEST(RankFor, SparseCountsFollowDegreeArgument) {
    // {0,4,8}, one phase: powers 0,4,8,12,16 are each reached by distinct
    // products, plus H4H4 and H0H8 are independent at x^8: 5 + 1 = 6.
    const int n1 = 2 * 3 - 1;
    const int n3 = 2 * 3 - 5;
    EXPECT_EQ(rank_for(SupportSet({0, 4, 8}), 1).numerical_rank, n1 + n3);
}

TEST(MinPhases, Examples) {
    EXPECT_EQ(min_phases_for_completeness(SupportSet({0, 1}), 6), 2);
    EXPECT_EQ(min_phases_for_completeness(SupportSet({0, 4, 8}), 6), 2);
    EXPECT_EQ(min_phases_for_completeness(SupportSet::contiguous(6), 8), 6);
    EXPECT_FALSE(min_phases_for_completeness(SupportSet::contiguous(6), 5).has_value());
    EXPECT_EQ(min_phases_for_completeness(SupportSet({3}), 1), 1);
}

TEST(SweepTable, ReproducesReferenceRanks) {
    const RankTable t = sweep_table(2, 8, 1, 6);
    ASSERT_EQ(t.ds.size(), 7u);
    ASSERT_EQ(t.ms.size(), 6u);
    for (std::size_t i = 0; i < 7; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            EXPECT_EQ(t.cells[i][j].numerical_rank, kReferenceRanks[i][j]);
            EXPECT_EQ(t.is_ic(i, j), t.ms[j] >= t.ds[i]);
        }
    }
    EXPECT_EQ(t.cells[6][5].numerical_rank, 60);
    EXPECT_TRUE(t.all_agree());
    EXPECT_TRUE(t.disagreements().empty());
}

TEST(SweepTable, CsvAndWorkerIndependence) {
    const RankTable t = sweep_table(2, 3, 1, 3, 1);
    EXPECT_EQ(t.to_csv(), "d,m=1,m=2,m=3\n2,3,4*,4*\n3,5,8,9*\n");
    const RankTable u = sweep_table(2, 3, 1, 3, 4);
    EXPECT_EQ(u.to_csv(), t.to_csv());
    EXPECT_EQ(sweep_table(2, 2, 1, 1).to_csv(), "d,m=1\n2,3\n");
    EXPECT_THROW(sweep_table(3, 2, 1, 1), std::invalid_argument);
}

TEST(PovmSpanRank, BinnedSingleQuadrature) {
    const PovmSet nine = build_binned_quadrature_povm(0.0, BinLayout{default_x_max(3), 9, false}, 3);
    EXPECT_EQ(povm_span_rank({nine}).numerical_rank, 5);

    const PovmSet three = fold_overflow_bins(build_binned_quadrature_povm(0.0, BinLayout{default_x_max(3), 3, true}, 3));
    ASSERT_EQ(three.elements.size(), 3u);
    EXPECT_EQ(povm_span_rank({three}).numerical_rank, 3);
}

TEST(PovmSpanRank, EquispacedBinnedQuadraturesAreComplete) {
    std::vector<PovmSet> sets;
    for (double theta : equispaced(3)) {
        sets.push_back(build_binned_quadrature_povm(theta, BinLayout::default_for(3), 3));
    }
    EXPECT_EQ(povm_span_rank(sets).numerical_rank, 9);
}

TEST(PovmSpanRank, BinningCap) {
    for (int d = 1; d <= 6; ++d) {
        for (int bins = 1; bins <= 2 * d + 3; ++bins) {
            const PovmSet set = build_binned_quadrature_povm(0.4, BinLayout{default_x_max(d), bins, false}, d);
            EXPECT_EQ(povm_span_rank({set}).numerical_rank, std::min(bins, 2 * d - 1)) << d << "," << bins;
        }
    }
}

TEST(PovmSpanRank, AgreesWithBinnedDesignMatrix) {
    const SupportSet s = SupportSet::contiguous(4);
    const BinLayout layout{default_x_max(4), 6, true};
    const auto phases = equispaced(2);
    std::vector<PovmSet> sets;
    for (double theta : phases) {
        sets.push_back(build_binned_quadrature_povm(theta, layout, 4));
    }
    EXPECT_EQ(povm_span_rank(sets).numerical_rank,
              numerical_rank(design_matrix(MeasurementSpec::binned(s, phases, layout))).numerical_rank);
}

TEST(PovmSpanRank, RejectsMixedDimensions) {
    const PovmSet a{2, {CMatrix::Identity(2, 2)}, 0.0, "a"};
    const PovmSet b{3, {CMatrix::Identity(3, 3)}, 0.0, "b"};
    EXPECT_THROW(povm_span_rank({a, b}), std::invalid_argument);
    EXPECT_THROW(povm_span_rank({}), std::invalid_argument);
}

TEST(DisplacedCountingRank, BareCountingIsDiagonal) {
    for (int d = 1; d <= 6; ++d) {
        EXPECT_EQ(displaced_counting_rank({0.0}, d, d).numerical_rank, d);
    }
}

TEST(DisplacedCountingRank, DisplacementsCompleteTheQubit) {
    const std::vector<Complex> betas{0.0, 1.0, Complex(0, 1), Complex(1, 1)};
    EXPECT_EQ(displaced_counting_rank(betas, 2, 2).numerical_rank, 4);

    // Oracle: Laguerre-form projectors, rank from Gram eigenvalues.
    std::vector<Eigen::VectorXd> rows;
    for (Complex b : betas) {
        for (int n = 0; n < 2; ++n) {
            rows.push_back(oracle::real_coordinates(oracle::displaced_projector(b, n, 2)));
        }
    }
    RMatrix a(static_cast<Eigen::Index>(rows.size()), 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    }
    EXPECT_EQ(oracle::gram_rank(a), 4);

    auto with_dup = betas;
    with_dup.push_back(Complex(0, 1));
    EXPECT_EQ(displaced_counting_rank(with_dup, 2, 2).numerical_rank, 4);
}

TEST(DisplacedCountingRank, RejectsTooFewOutcomes) {
    EXPECT_THROW(displaced_counting_rank({0.0}, 2, 3), std::invalid_argument);
    EXPECT_THROW(displaced_counting_rank({}, 3, 3), std::invalid_argument);
}

}  // namespace
}  // namespace cvic
