// Copyright 2026 The povm-forge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "povm_forge/wigner.h"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "povm_forge/error.h"

using namespace povm_forge;

namespace {

constexpr double kPi = std::numbers::pi;

PovmElement fock_element(std::size_t n, std::size_t truncation) {
    std::vector<double> diag(truncation + 1, 0.0);
    diag[n] = 1.0;
    return PovmElement{diag, 0};
}

const PovmSet &builtin_detector() {
    static const PovmSet povm = make_builtin_tmd_model(0.48, 60).povm;
    return povm;
}

}  // namespace

TEST(fock_wigner, origin_values) {
    EXPECT_NEAR(fock_wigner(0, 0.0, 0.0), 1.0 / kPi, 1e-15);
    EXPECT_NEAR(fock_wigner(1, 0.0, 0.0), -1.0 / kPi, 1e-15);
    EXPECT_NEAR(fock_wigner(2, 0.0, 0.0, 2.0), 1.0 / (2.0 * kPi), 1e-15);
    EXPECT_THROW(fock_wigner(-1, 0.0, 0.0), DomainError);
    EXPECT_THROW(fock_wigner(1, 0.0, 0.0, 0.0), DomainError);
}

TEST(fock_wigner, five_sign_changes_inside_radius_five) {
    int changes = 0;
    double last = fock_wigner(5, 1e-6, 0.0);
    for (int i = 1; i <= 5000; ++i) {
        double r = 5.0 * i / 5000.0 - 1e-9;
        double w = fock_wigner(5, r, 0.0);
        changes += (w > 0) != (last > 0);
        last = w;
    }
    EXPECT_EQ(changes, 5);
}

TEST(fock_wigner, matches_defining_integral) {
    std::mt19937_64 rng(1234);
    std::uniform_int_distribution<int> nd(0, 10);
    std::uniform_real_distribution<double> xd(-4.0, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        int n = nd(rng);
        double x = xd(rng);
        double p = xd(rng);
        std::vector<double> weights(static_cast<std::size_t>(n) + 1, 0.0);
        weights.back() = 1.0;
        EXPECT_NEAR(fock_wigner(n, x, p), oracle::defining_integral_wigner(weights, x, p, 1.0), 1e-6)
            << "n=" << n << " x=" << x << " p=" << p;
    }
}

TEST(fock_wigner, other_hbar_matches_defining_integral) {
    std::vector<double> weights{0.2, 0.0, 0.5, 0.3};
    for (double x : {0.0, 0.7, -1.9}) {
        double p = 0.4;
        EXPECT_NEAR(diagonal_wigner(weights, x * x + p * p, 2.0),
                    oracle::defining_integral_wigner(weights, x, p, 2.0, 16.0, 8000), 1e-6);
    }
}

TEST(fock_wigner, rotational_symmetry) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> rd(0.0, 5.0);
    std::uniform_real_distribution<double> ad(0.0, 2.0 * kPi);
    const auto &element = builtin_detector()[3];
    for (int trial = 0; trial < 100; ++trial) {
        double r = rd(rng);
        double a = ad(rng);
        double x = r * std::cos(a);
        double p = r * std::sin(a);
        EXPECT_NEAR(diagonal_wigner(element.diag, x * x + p * p), diagonal_wigner(element.diag, r * r), 1e-10);
        for (int n : {0, 3, 9}) {
            EXPECT_NEAR(fock_wigner(n, x, p), fock_wigner(n, r, 0.0), 1e-10);
        }
    }
}

TEST(povm_wigner, vacuum_element_is_positive) {
    auto field = povm_wigner(fock_element(0, 10), WignerGrid{});
    EXPECT_GT(field.values.minCoeff(), 0.0);
    EXPECT_NEAR(field.values(150, 150), 1.0 / kPi, 1e-15);
}

TEST(povm_wigner, identity_averages_to_flat_value) {
    // Partial sums at the origin alternate between 1/pi and 0; their Cesaro
    // mean is the flat identity value 1/(2 pi).
    double running = 0.0;
    double mean = 0.0;
    for (std::size_t N = 0; N <= 60; ++N) {
        running = diagonal_wigner(std::vector<double>(N + 1, 1.0), 0.0);
        mean += running;
    }
    mean /= 61.0;
    EXPECT_NEAR(mean, 1.0 / (2.0 * kPi), 0.02 / (2.0 * kPi));
    std::vector<double> ones(61, 1.0);
    EXPECT_NEAR(running, oracle::defining_integral_wigner(ones, 0.0, 0.0, 1.0, 16.0, 16000), 1e-6);
    EXPECT_NEAR(diagonal_wigner(ones, 1.0), oracle::defining_integral_wigner(ones, 1.0, 0.0, 1.0, 16.0, 16000), 1e-6);
}

TEST(povm_wigner, zero_click_element_is_gaussian_like) {
    auto field = povm_wigner(builtin_detector()[0], WignerGrid{});
    EXPECT_GT(field.values.minCoeff(), 0.0);
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    field.values.maxCoeff(&row, &col);
    EXPECT_EQ(row, 150);
    EXPECT_EQ(col, 150);
}

TEST(povm_wigner, one_click_negative_at_origin) {
    EXPECT_LT(diagonal_wigner(builtin_detector()[1].diag, 0.0), 0.0);
}

TEST(povm_wigner, trace_identity) {
    // W_n reaches out to r = sqrt(2n + 1), about 11 for n = 60.
    WignerGrid wide{-14.0, 14.0, -14.0, 14.0, 701, 1.0};
    for (std::size_t j = 0; j < builtin_detector().outcomes(); ++j) {
        const auto &element = builtin_detector()[j];
        double trace = 0.0;
        for (double v : element.diag) trace += v;
        double volume = wigner_volume(povm_wigner(element, wide));
        EXPECT_NEAR(volume, trace, 0.01 * trace) << "outcome " << j;
    }
}

TEST(wigner_overlap, vacuum_never_clicks) {
    WignerGrid grid;
    auto state = fock_state_wigner(FockDistribution::vacuum(20), grid);
    for (double eta : {0.1, 0.5, 1.0}) {
        auto povm = apd_povm(eta, 20);
        EXPECT_NEAR(wigner_overlap(state, povm_wigner(povm[0], grid)), 1.0, 1e-6);
        EXPECT_NEAR(wigner_overlap(state, povm_wigner(povm[1], grid)), 0.0, 1e-6);
    }
}

TEST(wigner_overlap, orthogonal_supports) {
    WignerGrid grid;
    auto state = fock_state_wigner(FockDistribution::vacuum(8), grid);
    std::vector<double> diag{0.0, 1.0, 0.5, 1.0, 0.2, 0.0, 1.0, 1.0, 1.0};
    EXPECT_LE(std::abs(wigner_overlap(state, povm_wigner(PovmElement{diag, 0}, grid))), 1e-3);
}

TEST(wigner_overlap, matches_trace_formula) {
    WignerGrid grid;
    std::vector<WignerField> elements;
    for (const auto &e : builtin_detector().elements()) elements.push_back(povm_wigner(e, grid));
    for (double mean : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        auto exact = outcome_probabilities(builtin_detector(), coherent_fock_distribution(CoherentAmplitude(mean), 60));
        auto state = coherent_state_wigner(CoherentAmplitude(mean, 0.3), grid);
        for (std::size_t j = 0; j < elements.size(); ++j) {
            EXPECT_NEAR(wigner_overlap(state, elements[j]), exact.probs[j], 1e-3) << mean << " " << j;
        }
    }
}

TEST(wigner_overlap, grid_mismatch) {
    WignerGrid a;
    WignerGrid b;
    b.points_per_axis = 101;
    EXPECT_THROW(wigner_overlap(fock_state_wigner(FockDistribution::vacuum(2), a),
                                fock_state_wigner(FockDistribution::vacuum(2), b)),
                 DomainError);
}

TEST(wigner_grid, validation) {
    EXPECT_THROW(WignerGrid({1.0, -1.0, -1.0, 1.0, 10, 1.0}).validate(), DomainError);
    EXPECT_THROW(WignerGrid({-1.0, 1.0, -1.0, 1.0, 1, 1.0}).validate(), DomainError);
    EXPECT_THROW(WignerGrid({-1.0, 1.0, -1.0, 1.0, 10, -1.0}).validate(), DomainError);
    WignerGrid g;
    EXPECT_EQ(g.x(0), -6.0);
    EXPECT_EQ(g.x(300), 6.0);
    EXPECT_NEAR(g.x(150), 0.0, 1e-15);
}

TEST(radial_nodes, simple_elements) {
    EXPECT_EQ(radial_nodes(fock_element(0, 10), 8.0, 4000), 0);
    EXPECT_EQ(radial_nodes(fock_element(5, 10), 8.0, 4000), 5);
    EXPECT_EQ(radial_nodes(fock_element(5, 60), 8.0, 4000), 5);
    EXPECT_THROW(radial_nodes(fock_element(1, 3), 0.0, 4000), DomainError);
    EXPECT_THROW(radial_nodes(fock_element(1, 3), 8.0, 50), DomainError);
}

TEST(radial_nodes, five_click_element) {
    EXPECT_EQ(radial_nodes(builtin_detector()[5], 8.0, 4000), 9);
}

TEST(radial_nodes, five_click_truncation_sensitivity) {
    // Node count of the 5-click element against Fock truncation. Truncating
    // where the element is still non-negligible adds ripples at large radius,
    // so the count only settles once N reaches about 60.
    int converged = radial_nodes(builtin_detector()[5], 8.0, 4000);
    std::ostringstream record;
    for (std::size_t N : {9u, 12u, 16u, 20u, 30u, 40u, 50u, 60u, 80u, 100u}) {
        int nodes = radial_nodes(make_builtin_tmd_model(0.48, N).povm[5], 8.0, 4000);
        record << N << ":" << nodes << " ";
        if (N >= 60) {
            EXPECT_EQ(nodes, converged) << "N=" << N;
        }
    }
    RecordProperty("nodes_by_truncation", record.str());
    std::cout << "5-click nodes by truncation: " << record.str() << "\n";
}

TEST(wigner_export, csv_and_matrix) {
    WignerGrid small{-1.0, 1.0, -1.0, 1.0, 3, 1.0};
    auto field = povm_wigner(fock_element(1, 2), small);
    std::ostringstream csv;
    write_wigner_csv(csv, field);
    EXPECT_EQ(csv.str().substr(0, 18), "x,p,W\n-1,-1,0.1292");
    std::ostringstream matrix;
    write_wigner_matrix(matrix, field);
    EXPECT_EQ(matrix.str().substr(0, 9), "3 -1 0 1\n");
    std::ostringstream cross;
    write_cross_section_csv(cross, fock_element(1, 2), 2.0, 3);
    EXPECT_EQ(cross.str().substr(0, 6), "r,W\n0,");
    EXPECT_NE(cross.str().find("\n2,"), std::string::npos);
}
