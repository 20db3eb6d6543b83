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

#include "povm_forge/probes.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "povm_forge/error.h"

using namespace povm_forge;

namespace {

// The 10x10 matrix as printed, rows <n> = 1..10, columns n = 0..9.
const double kDisplayed[10][10] = {
    {0.37, 0.37, 0.18, 0.06, 0.02, 0.00, 0.00, 0.00, 0.00, 0.00},
    {0.14, 0.27, 0.27, 0.18, 0.09, 0.04, 0.01, 0.00, 0.00, 0.00},
    {0.05, 0.15, 0.22, 0.22, 0.17, 0.10, 0.05, 0.02, 0.01, 0.00},
    {0.02, 0.07, 0.15, 0.20, 0.20, 0.16, 0.10, 0.06, 0.03, 0.01},
    {0.01, 0.03, 0.08, 0.14, 0.18, 0.18, 0.15, 0.10, 0.07, 0.04},
    {0.00, 0.01, 0.04, 0.09, 0.13, 0.16, 0.16, 0.14, 0.10, 0.07},
    {0.00, 0.01, 0.02, 0.05, 0.09, 0.13, 0.15, 0.15, 0.13, 0.10},
    {0.00, 0.00, 0.01, 0.03, 0.06, 0.09, 0.12, 0.14, 0.14, 0.12},
    {0.00, 0.00, 0.01, 0.02, 0.03, 0.06, 0.09, 0.12, 0.13, 0.13},
    {0.00, 0.00, 0.00, 0.01, 0.02, 0.04, 0.06, 0.09, 0.11, 0.13},
};

ProbeSet probes_from(std::vector<double> means, std::size_t dim) {
    return ProbeSet::from_mean_photons(means, dim);
}

}  // namespace

TEST(calibration, zero_maps_to_zero) {
    EXPECT_EQ(power_to_mean_photon(0.0, 800e-9, 1e5), 0.0);
    EXPECT_EQ(mean_photon_to_power(0.0, 800e-9, 1e5), 0.0);
}

TEST(calibration, single_photon_per_pulse_power) {
    double direct = 1.0 * 6.62607015e-34 * 299792458.0 * 1e5 / 800e-9;
    double p = mean_photon_to_power(1.0, 800e-9, 1e5);
    EXPECT_NEAR(p, direct, 1e-15 * direct);
    EXPECT_NEAR(p, 2.483e-14, 2.483e-14 * 1e-3);
    EXPECT_NEAR(power_to_mean_photon(p, 800e-9, 1e5), 1.0, 1e-12);
}

TEST(calibration, round_trip_over_magnitudes) {
    for (int e = -6; e < 6; ++e) {
        double m = std::pow(10.0, e);
        double back = power_to_mean_photon(mean_photon_to_power(m, 1550e-9, 8e7), 1550e-9, 8e7);
        EXPECT_NEAR(back, m, 1e-12 * m) << m;
    }
}

TEST(calibration, rejects_bad_optics) {
    EXPECT_THROW(power_to_mean_photon(1e-12, 0.0, 1e5), DomainError);
    EXPECT_THROW(power_to_mean_photon(1e-12, 800e-9, -1.0), DomainError);
    EXPECT_THROW(power_to_mean_photon(-1e-12, 800e-9, 1e5), DomainError);
    EXPECT_THROW(mean_photon_to_power(-1.0, 800e-9, 1e5), DomainError);
}

TEST(calibration, pickoff_and_systematic_error) {
    PowerCalibration cal{0.01, 0.05};
    EXPECT_NEAR(cal.probe_power(1e-12), 1e-10 * 1.05, 1e-24);
    auto probe = CoherentProbe::from_power(cal.probe_power(2.483e-16));
    EXPECT_NEAR(probe.mean_photon(), 1.05 * power_to_mean_photon(2.483e-14, 800e-9, 1e5), 1e-12);
}

TEST(probe_set, validation) {
    EXPECT_THROW(ProbeSet({}, 3), DomainError);
    EXPECT_THROW(probes_from({1.0}, 0), DomainError);
    std::vector<CoherentProbe> mixed{CoherentProbe::from_mean_photon(1.0, 800e-9),
                                     CoherentProbe::from_mean_photon(1.0, 1550e-9)};
    EXPECT_THROW(ProbeSet(mixed, 2), DomainError);
    auto grid = default_probe_grid(30);
    EXPECT_EQ(grid.size(), 400u);
    EXPECT_EQ(grid[0].mean_photon(), 0.0);
    EXPECT_EQ(grid[399].mean_photon(), 40.0);
    EXPECT_EQ(grid.max_mean_photon(), 40.0);
}

TEST(completeness_matrix, displayed_first_row) {
    auto m = completeness_matrix(probes_from({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 10));
    for (int n = 0; n < 10; ++n) {
        EXPECT_NEAR(m(0, n), kDisplayed[0][n], 0.005) << n;
    }
}

TEST(completeness_matrix, displayed_matrix_near_everywhere) {
    // Two printed entries (row <n>=9, columns 2 and 3) round to the wrong side
    // of the half-cent; every entry still sits within 0.0051.
    auto m = completeness_matrix(probes_from({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 10));
    int beyond_half_cent = 0;
    for (int a = 0; a < 10; ++a) {
        for (int n = 0; n < 10; ++n) {
            double diff = std::abs(m(a, n) - kDisplayed[a][n]);
            EXPECT_LT(diff, 0.0051) << a << " " << n;
            beyond_half_cent += diff > 0.005;
        }
    }
    EXPECT_EQ(beyond_half_cent, 2);
}

TEST(completeness_matrix, trivial_and_duplicate) {
    auto one = completeness_matrix(probes_from({0.0}, 1));
    ASSERT_EQ(one.rows(), 1);
    EXPECT_EQ(one(0, 0), 1.0);
    auto dup = completeness_matrix(probes_from({2.0, 2.0}, 2));
    EXPECT_EQ(dup.row(0), dup.row(1));
    EXPECT_THROW(completeness_matrix(probes_from({1.0, 2.0, 3.0}, 2)), DomainError);
}

TEST(completeness_matrix, row_sums_bounded_by_tail) {
    auto probes = probes_from({0.5, 3.0, 7.0, 12.0}, 4);
    auto m = probe_fock_matrix(probes, 80);
    for (Eigen::Index a = 0; a < m.rows(); ++a) {
        EXPECT_LE(m.row(a).sum(), 1.0 + 1e-15);
        EXPECT_GE(m.row(a).sum(), 1.0 - 1e-9);
    }
}

TEST(completeness_check, paper_set_is_complete) {
    auto r = completeness_check(probes_from({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 10));
    EXPECT_NE(r.determinant, 0.0);
    EXPECT_TRUE(r.complete);
    EXPECT_FALSE(r.gram);
    EXPECT_TRUE(std::isfinite(r.condition_number));
}

TEST(completeness_check, duplicates_are_incomplete) {
    auto r = completeness_check(probes_from({1, 2, 2}, 3));
    EXPECT_EQ(r.determinant, 0.0);
    EXPECT_FALSE(r.complete);
    auto c = completeness_check(probes_from(std::vector<double>(10, 1.0), 10));
    EXPECT_FALSE(c.complete);
}

TEST(completeness_check, two_by_two_hand_value) {
    auto r = completeness_check(probes_from({0.0, 1.0}, 2));
    EXPECT_NEAR(r.determinant, std::exp(-1.0), 1e-15);
    EXPECT_TRUE(r.complete);
}

TEST(completeness_check, permutation_only_flips_sign) {
    std::vector<double> means{0.4, 1.3, 2.2, 3.9, 5.0, 6.1};
    double reference = std::abs(completeness_check(probes_from(means, 6)).determinant);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(means.begin(), means.end(), rng);
        double d = std::abs(completeness_check(probes_from(means, 6)).determinant);
        EXPECT_NEAR(d, reference, 1e-12 * reference);
    }
}

TEST(completeness_check, overdetermined_grid) {
    auto r = completeness_check(default_probe_grid(30));
    EXPECT_TRUE(r.gram);
    EXPECT_TRUE(r.complete);
    EXPECT_GT(r.condition_number, 1.0);
    EXPECT_THROW(completeness_check(probes_from({1.0, 2.0}, 3)), DomainError);
}

TEST(probes_csv, round_trip) {
    auto probes = probes_from(linspace(0.0, 4.0, 9), 5);
    std::stringstream s;
    write_probes_csv(s, probes);
    EXPECT_EQ(s.str().substr(0, s.str().find('\n')), "index,mean_photon,avg_power_W,wavelength_m,rep_rate_Hz");
    auto back = read_probes_csv(s, 5);
    ASSERT_EQ(back.size(), probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        EXPECT_EQ(back[i].mean_photon(), probes[i].mean_photon());
        EXPECT_EQ(back[i].avg_power(), probes[i].avg_power());
    }
}

TEST(probes_csv, rejects_inconsistent_power) {
    std::stringstream s("index,mean_photon,avg_power_W,wavelength_m,rep_rate_Hz\n0,1,1e-10,8e-07,100000\n");
    EXPECT_THROW(read_probes_csv(s, 3), IoError);
}
