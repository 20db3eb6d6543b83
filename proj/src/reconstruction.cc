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

#include "povm_forge/reconstruction.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>
#include <string>

#include "json.hpp"

#include "povm_forge/csv.h"
#include "povm_forge/error.h"

namespace povm_forge {

namespace {

constexpr double kDataRowTolerance = 1e-9;
constexpr double kDesignRowSlack = 1e-12;
constexpr double kTailWarning = 1e-6;
constexpr double kFeasibilityTolerance = 1e-8;

// Projects every column (one photon number) of theta onto the simplex.
Eigen::MatrixXd project_columns(const Eigen::MatrixXd &theta) {
    Eigen::MatrixXd out(theta.rows(), theta.cols());
    std::vector<double> column(static_cast<std::size_t>(theta.rows()));
    for (Eigen::Index n = 0; n < theta.cols(); ++n) {
        for (Eigen::Index j = 0; j < theta.rows(); ++j) {
            column[static_cast<std::size_t>(j)] = theta(j, n);
        }
        auto projected = project_to_simplex(column);
        for (Eigen::Index j = 0; j < theta.rows(); ++j) {
            out(j, n) = projected[static_cast<std::size_t>(j)];
        }
    }
    return out;
}

// Second-difference operator Delta^T Delta for the smoothing penalty.
Eigen::MatrixXd smoothing_operator(std::size_t dimension) {
    auto d = static_cast<Eigen::Index>(dimension);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index n = 0; n + 1 < d; ++n) {
        k(n, n) += 1.0;
        k(n + 1, n + 1) += 1.0;
        k(n, n + 1) -= 1.0;
        k(n + 1, n) -= 1.0;
    }
    return k;
}

double smoothing_penalty(const Eigen::MatrixXd &theta) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < theta.rows(); ++j) {
        for (Eigen::Index n = 0; n + 1 < theta.cols(); ++n) {
            double diff = theta(j, n + 1) - theta(j, n);
            s += diff * diff;
        }
    }
    return s;
}

double residual_rms(const ReconstructionProblem &problem, const Eigen::MatrixXd &theta) {
    Eigen::MatrixXd r = problem.data - problem.design * theta.transpose();
    return std::sqrt(r.squaredNorm() / static_cast<double>(r.size()));
}

}  // namespace

void ReconstructionProblem::validate() const {
    if (dimension == 0 || outcomes == 0) {
        throw DomainError("reconstruction needs a positive dimension and at least one outcome");
    }
    if (design.rows() == 0 || design.rows() != data.rows()) {
        throw DomainError("design and data must have the same positive number of probe rows");
    }
    if (static_cast<std::size_t>(design.cols()) != dimension || static_cast<std::size_t>(data.cols()) != outcomes) {
        throw DomainError("design/data column counts do not match dimension/outcomes");
    }
    if (!std::isfinite(smoothing_weight) || smoothing_weight < 0.0) {
        throw DomainError("smoothing weight must be finite and nonnegative");
    }
    for (Eigen::Index a = 0; a < design.rows(); ++a) {
        double row = 0.0;
        for (Eigen::Index n = 0; n < design.cols(); ++n) {
            if (!std::isfinite(design(a, n)) || design(a, n) < 0.0) {
                throw DomainError("design matrix entries must be finite and nonnegative");
            }
            row += design(a, n);
        }
        if (row > 1.0 + kDesignRowSlack) {
            throw DomainError("design row " + std::to_string(a) + " sums above one");
        }
        double total = 0.0;
        for (Eigen::Index j = 0; j < data.cols(); ++j) {
            if (!std::isfinite(data(a, j)) || data(a, j) < 0.0) {
                throw DomainError("data entries must be finite and nonnegative");
            }
            total += data(a, j);
        }
        if (std::abs(total - 1.0) > kDataRowTolerance) {
            throw DomainError("data row " + std::to_string(a) + " does not sum to one");
        }
    }
}

ReconstructionProblem build_problem(const TomographyDataset &dataset, std::size_t dimension, double smoothing_weight,
                                    TailHandling tail) {
    if (dimension == 0) {
        throw DomainError("reconstruction dimension must be at least 1");
    }
    if (dataset.probes.size() == 0 || dataset.frequencies.rows() == 0) {
        throw DomainError("dataset is empty");
    }
    dataset.validate();

    ReconstructionProblem problem;
    problem.dimension = dimension;
    problem.outcomes = dataset.outcomes();
    problem.smoothing_weight = smoothing_weight;
    problem.data = dataset.frequencies;
    problem.design = probe_fock_matrix(dataset.probes, dimension);

    double worst_tail = 0.0;
    for (Eigen::Index a = 0; a < problem.design.rows(); ++a) {
        double captured = problem.design.row(a).sum();
        worst_tail = std::max(worst_tail, 1.0 - captured);
        if (tail == TailHandling::kSaturate) {
            problem.design(a, problem.design.cols() - 1) += std::max(0.0, 1.0 - captured);
        }
    }
    if (worst_tail > kTailWarning) {
        problem.warnings.push_back("largest probe puts " + format_double(worst_tail) + " of its mass above n = " +
                                   std::to_string(dimension - 1) +
                                   (tail == TailHandling::kTruncate ? "; that mass is dropped from the design"
                                                                    : "; that mass is attributed to the last column"));
    }

    std::set<double> seen;
    for (const auto &probe : dataset.probes.probes()) {
        if (!seen.insert(probe.mean_photon()).second) {
            problem.warnings.push_back("duplicate probe <n> = " + format_double(probe.mean_photon()) +
                                       " gives identical design rows");
            break;
        }
    }

    if (dataset.probes.size() < dimension) {
        problem.warnings.push_back("only " + std::to_string(dataset.probes.size()) + " probes for dimension " +
                                   std::to_string(dimension) + "; the probe set cannot be tomographically complete");
    } else {
        auto report = completeness_check(dataset.probes.with_dimension(dimension));
        if (!report.complete) {
            problem.warnings.push_back("probe set fails the completeness test for dimension " +
                                       std::to_string(dimension));
        }
    }
    problem.validate();
    return problem;
}

std::vector<double> project_to_simplex(std::span<const double> v) {
    if (v.empty()) {
        throw DomainError("cannot project an empty vector onto the simplex");
    }
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double threshold = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        cumulative += sorted[i];
        double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (sorted[i] - candidate > 0.0) {
            threshold = candidate;
        }
    }
    std::vector<double> out(v.size());
    double total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = std::max(v[i] - threshold, 0.0);
        total += out[i];
    }
    // Round-off cleanup so columns sum to one to the last few ulps.
    if (total > 0.0) {
        for (double &x : out) {
            x /= total;
        }
    }
    return out;
}

double reconstruction_objective(const ReconstructionProblem &problem, const Eigen::MatrixXd &theta) {
    Eigen::MatrixXd r = problem.data - problem.design * theta.transpose();
    return r.squaredNorm() + problem.smoothing_weight * smoothing_penalty(theta);
}

ReconstructedPovm reconstruct(const ReconstructionProblem &problem, const SolverOptions &options) {
    problem.validate();
    if (options.max_iterations < 0 || options.stall_window < 1 || !(options.relative_tolerance >= 0.0)) {
        throw DomainError("invalid solver options");
    }
    const auto outcomes = static_cast<Eigen::Index>(problem.outcomes);
    const auto dim = static_cast<Eigen::Index>(problem.dimension);

    // f(theta) = |P|^2 - 2 <theta, H> + <theta A, theta>, gradient 2 (theta A - H).
    const Eigen::MatrixXd curvature =
        problem.design.transpose() * problem.design + problem.smoothing_weight * smoothing_operator(problem.dimension);
    const Eigen::MatrixXd linear = problem.data.transpose() * problem.design;
    const double objective_floor =
        static_cast<double>(problem.data.size()) * std::pow(16.0 * std::numeric_limits<double>::epsilon(), 2);

    Eigen::MatrixXd theta = Eigen::MatrixXd::Constant(outcomes, dim, 1.0 / static_cast<double>(outcomes));
    double f_theta = reconstruction_objective(problem, theta);
    Eigen::MatrixXd previous = theta;
    double momentum = 1.0;
    double lipschitz = std::max(2.0 * curvature.trace() / static_cast<double>(dim), 1e-300);

    auto projected_step = [&](const Eigen::MatrixXd &from) {
        Eigen::MatrixXd gradient = 2.0 * (from * curvature - linear);
        while (true) {
            Eigen::MatrixXd candidate = project_columns(from - gradient / lipschitz);
            Eigen::MatrixXd step = candidate - from;
            double quadratic = (step * curvature).cwiseProduct(step).sum();
            if (quadratic <= 0.5 * lipschitz * step.squaredNorm() * (1.0 + 1e-12) || step.squaredNorm() == 0.0) {
                return candidate;
            }
            lipschitz *= 2.0;
        }
    };

    std::vector<double> history{f_theta};
    bool converged = outcomes == 1 || f_theta <= objective_floor;
    int iterations = 0;
    while (!converged && iterations < options.max_iterations) {
        ++iterations;
        double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        Eigen::MatrixXd extrapolated = theta + ((momentum - 1.0) / next_momentum) * (theta - previous);
        Eigen::MatrixXd candidate = projected_step(extrapolated);
        double f_candidate = reconstruction_objective(problem, candidate);
        if (f_candidate > f_theta) {
            // Restart: drop momentum and take a plain projected-gradient step.
            next_momentum = 1.0;
            candidate = projected_step(theta);
            f_candidate = reconstruction_objective(problem, candidate);
        }
        if (f_candidate > f_theta) {
            // Even the plain step fails to decrease: we are at round-off level.
            converged = true;
            break;
        }
        previous = theta;
        theta = std::move(candidate);
        f_theta = f_candidate;
        momentum = next_momentum;
        history.push_back(f_theta);

        if (f_theta <= objective_floor || (previous - theta).squaredNorm() == 0.0) {
            converged = true;
        } else if (history.size() > static_cast<std::size_t>(options.stall_window)) {
            double earlier = history[history.size() - 1 - static_cast<std::size_t>(options.stall_window)];
            converged = earlier - f_theta <= options.relative_tolerance * earlier;
        }
    }

    PovmSet povm = PovmSet::from_matrix(theta, kFeasibilityTolerance);
    return ReconstructedPovm{std::move(povm), residual_rms(problem, theta), f_theta, iterations, converged};
}

PovmDistance povm_distance(const PovmSet &a, const PovmSet &b) {
    if (a.outcomes() != b.outcomes() || a.truncation() != b.truncation()) {
        throw DomainError("POVM sets differ in outcome count or truncation");
    }
    PovmDistance d{0.0, 0.0};
    for (std::size_t j = 0; j < a.outcomes(); ++j) {
        double worst_state = 0.0;
        for (std::size_t n = 0; n <= a.truncation(); ++n) {
            worst_state = std::max(worst_state, std::abs(a[j].diag[n] - b[j].diag[n]));
        }
        d.max_abs = std::max(d.max_abs, worst_state);
        d.worst_case_probability_gap = std::max(d.worst_case_probability_gap, worst_state);
    }
    return d;
}

void write_povm_csv(std::ostream &out, const PovmSet &povm) {
    write_matrix_csv(out, povm.as_matrix(), "outcome");
}

PovmSet read_povm_csv(std::istream &in) {
    return PovmSet::from_matrix(read_matrix_csv(in), kFeasibilityTolerance);
}

void write_reconstruction_json(std::ostream &out, const ReconstructedPovm &result) {
    nlohmann::json j;
    j["outcomes"] = result.povm.outcomes();
    j["truncation"] = result.povm.truncation();
    auto &elements = j["elements"] = nlohmann::json::array();
    for (const auto &e : result.povm.elements()) {
        elements.push_back({{"outcome", e.outcome_label}, {"diag", e.diag}});
    }
    j["residual"] = result.residual;
    j["objective"] = result.objective;
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    out << j.dump(2) << '\n';
}

ReconstructedPovm read_reconstruction_json(std::istream &in) {
    try {
        nlohmann::json j;
        in >> j;
        std::vector<PovmElement> elements;
        for (const auto &e : j.at("elements")) {
            elements.push_back(PovmElement{e.at("diag").get<std::vector<double>>(), e.at("outcome").get<int>()});
        }
        return ReconstructedPovm{PovmSet(std::move(elements), kFeasibilityTolerance), j.at("residual").get<double>(),
                                 j.at("objective").get<double>(), j.at("iterations").get<int>(),
                                 j.at("converged").get<bool>()};
    } catch (const nlohmann::json::exception &e) {
        throw IoError(std::string("malformed reconstruction JSON: ") + e.what());
    }
}

}  // namespace povm_forge
