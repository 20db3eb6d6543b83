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

#ifndef POVM_FORGE_RECONSTRUCTION_H
#define POVM_FORGE_RECONSTRUCTION_H

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "povm_forge/detector.h"
#include "povm_forge/simulation.h"

namespace povm_forge {

/// How probe photon-number mass above dimension-1 enters the design matrix.
enum class TailHandling {
    /// Drop it: F[a][n] is the plain Poisson weight for n < d.
    kTruncate,
    /// Fold it into the last column, i.e. assume the detector response is
    /// constant from n = d-1 upward. Rows of F then sum to one.
    kSaturate,
};

/// Inversion of p_a = sum_n F[a][n] theta_j[n] for the diagonal POVM theta.
struct ReconstructionProblem {
    Eigen::MatrixXd design;  // F: probe x photon number
    Eigen::MatrixXd data;    // P: probe x outcome
    std::size_t dimension = 0;
    std::size_t outcomes = 0;
    double smoothing_weight = 0.0;
    /// Non-fatal diagnostics from build_problem (incomplete probe set,
    /// truncation tail, duplicate probes).
    std::vector<std::string> warnings;

    /// Throws DomainError on shape mismatches, negative design entries, design
    /// rows summing above one, data rows not summing to one within 1e-9, or a
    /// negative smoothing weight.
    void validate() const;
};

ReconstructionProblem build_problem(const TomographyDataset &dataset, std::size_t dimension,
                                    double smoothing_weight = 0.0, TailHandling tail = TailHandling::kTruncate);

struct SolverOptions {
    int max_iterations = 50000;
    /// Converged once the objective falls by less than relative_tolerance
    /// (relative) over stall_window consecutive iterations.
    int stall_window = 50;
    double relative_tolerance = 1e-12;
};

struct ReconstructedPovm {
    PovmSet povm;
    /// Root-mean-square of P - F theta^T over all entries.
    double residual;
    double objective;
    int iterations;
    bool converged;
};

/// Minimizes ||P - F theta^T||^2 + w * sum_{j,n} (theta_j[n+1] - theta_j[n])^2
/// over theta >= 0 with sum_j theta_j[n] = 1 for every n.
///
/// The feasible set is a product of probability simplices (one per photon
/// number), so the solver is an accelerated projected gradient method: each
/// step projects every photon-number column onto the simplex exactly. The step
/// size comes from a backtracking test on the quadratic's curvature along the
/// step, and momentum restarts whenever the objective would increase, which
/// keeps the iterates monotone. Starts from the uniform POVM 1/D.
///
/// Never throws for non-convergence: converged is false and the best iterate
/// is returned.
ReconstructedPovm reconstruct(const ReconstructionProblem &problem, const SolverOptions &options = {});

/// Objective value at theta (outcome x photon number).
double reconstruction_objective(const ReconstructionProblem &problem, const Eigen::MatrixXd &theta);

/// Euclidean projection of v onto {x >= 0, sum x = 1}.
std::vector<double> project_to_simplex(std::span<const double> v);

struct PovmDistance {
    /// max over j, n of |a_j[n] - b_j[n]|.
    double max_abs;
    /// max over outcomes j and diagonal states sigma of |p_j(sigma) - p'_j(sigma)|.
    /// p_j is linear in sigma, so the maximum sits on a Fock state |n><n| and
    /// equals max_n |a_j[n] - b_j[n]|; taking the max over j gives max_abs.
    double worst_case_probability_gap;
};

PovmDistance povm_distance(const PovmSet &a, const PovmSet &b);

/// Rows are outcomes, columns photon numbers (matrix CSV, corner "outcome").
void write_povm_csv(std::ostream &out, const PovmSet &povm);
PovmSet read_povm_csv(std::istream &in);

/// Per-element arrays plus solver metadata.
void write_reconstruction_json(std::ostream &out, const ReconstructedPovm &result);
ReconstructedPovm read_reconstruction_json(std::istream &in);

}  // namespace povm_forge

#endif  // POVM_FORGE_RECONSTRUCTION_H
