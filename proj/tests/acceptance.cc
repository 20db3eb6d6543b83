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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails or overruns its time budget.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "povm_forge/detector.h"
#include "povm_forge/probes.h"
#include "povm_forge/reconstruction.h"
#include "povm_forge/simulation.h"
#include "povm_forge/wigner.h"

using namespace povm_forge;

namespace {

struct Verdict {
    bool pass;
    std::string detail;
};

// The 10x10 matrix as printed: rows <n> = 1..10, columns n = 0..9.
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

std::string num(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::vector<double> random_simplex(std::size_t n, std::mt19937_64 &rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> v(n);
    double total = 0.0;
    for (double &x : v) {
        x = e(rng);
        total += x;
    }
    for (double &x : v) {
        x /= total;
    }
    return v;
}

Verdict completeness_matrix_reproduction() {
    auto probes = ProbeSet::from_mean_photons(linspace(1.0, 10.0, 10), 10);
    Eigen::MatrixXd m = completeness_matrix(probes);
    double worst = 0.0;
    int wa = 0;
    int wn = 0;
    int outside = 0;
    for (int a = 0; a < 10; ++a) {
        for (int n = 0; n < 10; ++n) {
            double diff = std::abs(m(a, n) - kDisplayed[a][n]);
            outside += diff > 0.005;
            if (diff > worst) {
                worst = diff;
                wa = a;
                wn = n;
            }
        }
    }
    double det = completeness_check(probes).determinant;
    bool pass = outside == 0 && det != 0.0;
    return {pass, "max |M - displayed| = " + num(worst) + " at <n>=" + std::to_string(wa + 1) +
                      ", n=" + std::to_string(wn) + " (" + std::to_string(outside) +
                      " entries beyond 0.005); det = " + num(det)};
}

Verdict builtin_dataset_sanity() {
    const Eigen::MatrixXd &raw = builtin_tmd_raw();
    double worst = 0.0;
    for (Eigen::Index n = 0; n < raw.cols(); ++n) {
        worst = std::max(worst, std::abs(raw.col(n).sum() - 1.0));
    }
    bool shipped = raw(1, 2) == 0.128 && raw(2, 2) == 0.872;
    return {worst <= 0.005 && shipped, "max |column sum - 1| = " + num(worst) + "; C[1][2] = " + num(raw(1, 2)) +
                                           ", C[2][2] = " + num(raw(2, 2))};
}

Verdict convolution_oracle_equivalence() {
    std::mt19937_64 rng(20261019);
    double worst = 0.0;
    int checked = 0;
    for (std::size_t bins = 2; bins <= 4; ++bins) {
        for (int trial = 0; trial < 50; ++trial) {
            auto p = random_simplex(bins, rng);
            auto dp = convolution_matrix(p, 6);
            for (std::size_t n = 0; n <= 6; ++n) {
                auto brute = convolution_bruteforce(p, n);
                for (std::size_t k = 0; k <= bins; ++k) {
                    double expected = k < brute.size() ? brute[k] : 0.0;
                    worst = std::max(worst, std::abs(dp.entries()(static_cast<Eigen::Index>(k),
                                                                  static_cast<Eigen::Index>(n)) -
                                                     expected));
                    ++checked;
                }
            }
        }
    }
    return {worst <= 1e-12, std::to_string(checked) + " entries, max |DP - enumeration| = " + num(worst)};
}

Verdict povm_completeness() {
    double worst = 0.0;
    auto track = [&](const PovmSet &povm) {
        for (std::size_t n = 0; n <= 60; ++n) {
            double sum = 0.0;
            for (const auto &e : povm.elements()) {
                sum += e.diag[n];
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    };
    for (int i = 0; i < 10; ++i) {
        track(apd_povm(i / 9.0, 60));
    }
    for (double loss : {0.0, 0.25, 0.48}) {
        track(make_builtin_tmd_model(loss, 60).povm);
    }
    return {worst <= 1e-10, "max |sum_j diag_j[n] - 1| over 13 detectors, n <= 60: " + num(worst)};
}

Verdict response_curve_properties() {
    auto grid = linspace(0.0, 40.0, 400);
    auto povm = make_builtin_tmd_model(0.48, default_truncation(40.0)).povm;
    auto one = response_curve(povm, 1, grid).probability;
    auto five = response_curve(povm, 5, grid).probability;
    auto a1 = static_cast<std::size_t>(std::max_element(one.begin(), one.end()) - one.begin());
    auto a5 = static_cast<std::size_t>(std::max_element(five.begin(), five.end()) - five.begin());
    bool ordered = grid[a1] < grid[a5];
    bool smaller_peak = one[a1] < five[a5];
    return {ordered && smaller_peak, "argmax 1-click at <n>=" + num(grid[a1]) + ", 5-click at <n>=" + num(grid[a5]) +
                                         (ordered ? " (ordered)" : " (NOT ordered)") + "; peak 1-click " +
                                         num(one[a1]) + " vs 5-click " + num(five[a5]) +
                                         (smaller_peak ? " (smaller)" : " (NOT smaller)")};
}

Verdict reconstruction_round_trip() {
    const std::size_t dim = 30;
    auto povm = make_builtin_tmd_model(0.48, default_truncation(40.0)).povm;
    auto probes = default_probe_grid(dim);
    auto error_against_truth = [&](const ReconstructedPovm &r) {
        double worst = 0.0;
        for (std::size_t j = 0; j < povm.outcomes(); ++j) {
            for (std::size_t n = 0; n < dim; ++n) {
                worst = std::max(worst, std::abs(r.povm[j].diag[n] - povm[j].diag[n]));
            }
        }
        return worst;
    };
    auto feasibility = [&](const ReconstructedPovm &r) {
        Eigen::MatrixXd m = r.povm.as_matrix();
        double neg = std::max(0.0, -m.minCoeff());
        double sums = (m.colwise().sum().array() - 1.0).abs().maxCoeff();
        return std::max(neg, sums);
    };

    auto exact = reconstruct(build_problem(exact_dataset(povm, probes), dim));
    double exact_err = error_against_truth(exact);
    double exact_feas = feasibility(exact);
    auto sampled = reconstruct(build_problem(sample_dataset(povm, probes, 1000000, 20261019), dim));
    double sampled_err = error_against_truth(sampled);
    double sampled_feas = feasibility(sampled);
    bool pass = exact_err <= 1e-5 && exact_feas <= 1e-8 && sampled_err <= 1e-2 && sampled_feas <= 1e-8;
    return {pass, "noiseless max error " + num(exact_err) + " (target 1e-05), feasibility " + num(exact_feas) +
                      "; 1e6 shots max error " + num(sampled_err) + " (target 0.01), feasibility " +
                      num(sampled_feas)};
}

Verdict wigner_checks() {
    auto povm = make_builtin_tmd_model(0.48, 60).povm;
    double w1 = diagonal_wigner(povm[1].diag, 0.0);
    double w0_min = povm_wigner(povm[0], WignerGrid{}).values.minCoeff();
    int nodes5 = radial_nodes(povm[5], 8.0, 4000);
    std::vector<double> fock5(61, 0.0);
    fock5[5] = 1.0;
    int nodes_fock = radial_nodes(PovmElement{fock5, 5}, 8.0, 4000);
    bool pass = w1 < 0.0 && w0_min > 0.0 && nodes5 == 9 && nodes_fock == 5;
    return {pass, "W_1(0,0) = " + num(w1) + "; min W_0 on grid = " + num(w0_min) + "; 5-click nodes = " +
                      std::to_string(nodes5) + " (target 9); Fock 5 nodes = " + std::to_string(nodes_fock)};
}

Verdict overlap_trace_equivalence() {
    auto povm = make_builtin_tmd_model(0.48, 60).povm;
    WignerGrid grid;
    std::vector<WignerField> fields;
    for (const auto &e : povm.elements()) {
        fields.push_back(povm_wigner(e, grid));
    }
    double worst = 0.0;
    for (double mean : {0.5, 1.0, 2.0, 4.0}) {
        auto exact = outcome_probabilities(povm, coherent_fock_distribution(CoherentAmplitude(mean), 60));
        auto state = coherent_state_wigner(CoherentAmplitude(mean), grid);
        for (std::size_t j = 0; j < fields.size(); ++j) {
            worst = std::max(worst, std::abs(wigner_overlap(state, fields[j]) - exact.probs[j]));
        }
    }
    return {worst <= 1e-3, "max |overlap - trace| over 4 probes x 9 outcomes = " + num(worst)};
}

Verdict calibration_arithmetic() {
    double p = mean_photon_to_power(1.0, 800e-9, 1e5);
    double rel = std::abs(p - 2.483e-14) / 2.483e-14;
    return {rel <= 1e-3, "P = " + num(p) + " W, relative deviation " + num(rel)};
}

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Verdict()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "completeness matrix reproduction", 1.0, completeness_matrix_reproduction},
        {2, "built-in convolution matrix sanity", 1.0, builtin_dataset_sanity},
        {3, "convolution oracle equivalence", 10.0, convolution_oracle_equivalence},
        {4, "POVM completeness", 1.0, povm_completeness},
        {5, "response curve properties", 5.0, response_curve_properties},
        {6, "noiseless and finite-shot reconstruction", 60.0, reconstruction_round_trip},
        {7, "Wigner sign and node checks", 30.0, wigner_checks},
        {8, "overlap/trace equivalence", 30.0, overlap_trace_equivalence},
        {9, "calibration arithmetic", 1.0, calibration_arithmetic},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Verdict v{false, ""};
        try {
            v = c.check();
        } catch (const std::exception &e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = seconds < c.budget_seconds;
        bool pass = v.pass && in_time;
        failures += !pass;
        std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << v.detail
                  << "; " << num(seconds) << " s (budget " << num(c.budget_seconds) << " s"
                  << (in_time ? "" : ", EXCEEDED") << ")" << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
