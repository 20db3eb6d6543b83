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

#include "povm_forge/detector.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "povm_forge/csv.h"
#include "povm_forge/error.h"

namespace povm_forge {

namespace {

constexpr double kClampSlack = 1e-12;
constexpr double kBinProbSumTolerance = 1e-9;
constexpr double kColumnSumTolerance = 1e-10;

std::vector<double> validated_bin_probs(std::span<const double> bin_probs) {
    if (bin_probs.empty()) {
        throw DomainError("bin probability list is empty");
    }
    double total = 0.0;
    for (double p : bin_probs) {
        if (!std::isfinite(p) || p < 0.0) {
            throw DomainError("bin probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kBinProbSumTolerance) {
        throw DomainError("bin probabilities must sum to 1 (got " + format_double(total) + ")");
    }
    std::vector<double> out(bin_probs.begin(), bin_probs.end());
    for (double &p : out) {
        p /= total;
    }
    return out;
}

}  // namespace

ConvolutionMatrix ConvolutionMatrix::from_entries(Eigen::MatrixXd entries, std::vector<double> bin_probs,
                                                  bool renormalize_columns) {
    if (entries.rows() < 2 || entries.cols() < 1) {
        throw DomainError("convolution matrix needs at least one bin and one photon-number column");
    }
    for (Eigen::Index n = 0; n < entries.cols(); ++n) {
        double sum = 0.0;
        for (Eigen::Index k = 0; k < entries.rows(); ++k) {
            double v = entries(k, n);
            if (!std::isfinite(v) || v < 0.0) {
                throw DomainError("convolution matrix entries must be finite and nonnegative");
            }
            if (k > n && v != 0.0) {
                throw DomainError("convolution matrix assigns probability to more clicks than photons");
            }
            sum += v;
        }
        if (renormalize_columns) {
            if (sum <= 0.0) {
                throw DomainError("convolution matrix column " + std::to_string(n) + " is all zero");
            }
            entries.col(n) /= sum;
        } else if (std::abs(sum - 1.0) > kColumnSumTolerance) {
            throw DomainError("convolution matrix column " + std::to_string(n) + " sums to " + format_double(sum));
        }
    }
    return ConvolutionMatrix(std::move(entries), std::move(bin_probs));
}

PovmSet::PovmSet(std::vector<PovmElement> elements, double completeness_tolerance) : elements_(std::move(elements)) {
    if (elements_.empty()) {
        throw DomainError("a POVM needs at least one element");
    }
    std::size_t size = elements_.front().diag.size();
    if (size == 0) {
        throw DomainError("POVM elements need at least the vacuum entry");
    }
    for (auto &e : elements_) {
        if (e.diag.size() != size) {
            throw DomainError("POVM elements have different truncations");
        }
        for (double &v : e.diag) {
            if (!std::isfinite(v) || v < -kClampSlack || v > 1.0 + kClampSlack) {
                throw DomainError("POVM element " + std::to_string(e.outcome_label) + " has an entry outside [0, 1]");
            }
            v = std::clamp(v, 0.0, 1.0);
        }
    }
    if (completeness_defect() > completeness_tolerance) {
        throw DomainError("POVM elements do not sum to the identity (defect " + format_double(completeness_defect()) +
                          ")");
    }
}

PovmSet PovmSet::from_matrix(const Eigen::MatrixXd &diagonals, double completeness_tolerance) {
    std::vector<PovmElement> elements;
    elements.reserve(static_cast<std::size_t>(diagonals.rows()));
    for (Eigen::Index j = 0; j < diagonals.rows(); ++j) {
        PovmElement e;
        e.outcome_label = static_cast<int>(j);
        e.diag.resize(static_cast<std::size_t>(diagonals.cols()));
        for (Eigen::Index n = 0; n < diagonals.cols(); ++n) {
            e.diag[static_cast<std::size_t>(n)] = diagonals(j, n);
        }
        elements.push_back(std::move(e));
    }
    return PovmSet(std::move(elements), completeness_tolerance);
}

Eigen::MatrixXd PovmSet::as_matrix() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(outcomes()), static_cast<Eigen::Index>(truncation() + 1));
    for (std::size_t j = 0; j < outcomes(); ++j) {
        for (std::size_t n = 0; n <= truncation(); ++n) {
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) = elements_[j].diag[n];
        }
    }
    return m;
}

double PovmSet::completeness_defect() const {
    double worst = 0.0;
    for (std::size_t n = 0; n < elements_.front().diag.size(); ++n) {
        double sum = 0.0;
        for (const auto &e : elements_) {
            sum += e.diag[n];
        }
        worst = std::max(worst, std::abs(sum - 1.0));
    }
    return worst;
}

PovmSet apd_povm(double efficiency, std::size_t truncation) {
    if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
        throw DomainError("APD efficiency must lie in [0, 1]");
    }
    PovmElement no_click{std::vector<double>(truncation + 1), 0};
    PovmElement click{std::vector<double>(truncation + 1), 1};
    double miss = 1.0 - efficiency;
    double miss_pow = 1.0;
    for (std::size_t n = 0; n <= truncation; ++n) {
        no_click.diag[n] = miss_pow;
        click.diag[n] = 1.0 - miss_pow;
        miss_pow *= miss;
    }
    return PovmSet({std::move(no_click), std::move(click)});
}

LossMatrix loss_matrix(double loss_fraction, std::size_t truncation) {
    if (!(loss_fraction >= 0.0 && loss_fraction <= 1.0)) {
        throw DomainError("loss fraction must lie in [0, 1]");
    }
    auto size = static_cast<Eigen::Index>(truncation + 1);
    Eigen::MatrixXd entries = Eigen::MatrixXd::Zero(size, size);
    double survival = 1.0 - loss_fraction;
    for (Eigen::Index n = 0; n < size; ++n) {
        for (Eigen::Index kept = 0; kept <= n; ++kept) {
            entries(kept, n) = binomial_pmf(n, kept, survival);
        }
    }
    return LossMatrix(std::move(entries), loss_fraction);
}

ConvolutionMatrix convolution_matrix(std::span<const double> bin_probs, std::size_t max_photons) {
    std::vector<double> probs = validated_bin_probs(bin_probs);
    const auto photons = static_cast<Eigen::Index>(max_photons + 1);
    const auto occupied = static_cast<Eigen::Index>(probs.size() + 1);

    // state(t, k): t! times the multinomial weight of placing t photons into
    // the bins seen so far with exactly k of them occupied. Each new bin takes
    // c of the t photons, C(t, c) p^c ways. All entries stay within [0, 1].
    Eigen::MatrixXd state = Eigen::MatrixXd::Zero(photons, occupied);
    state(0, 0) = 1.0;
    Eigen::MatrixXd next(photons, occupied);
    for (std::size_t b = 0; b < probs.size(); ++b) {
        double p = probs[b];
        next.setZero();
        for (Eigen::Index t = 0; t < photons; ++t) {
            for (Eigen::Index c = 0; c <= t; ++c) {
                double weight;
                if (c == 0) {
                    weight = 1.0;
                } else if (p == 0.0) {
                    break;
                } else {
                    weight = std::exp(log_binomial(t, c) + static_cast<double>(c) * std::log(p));
                }
                int step = c > 0 ? 1 : 0;
                for (Eigen::Index k = 0; k + step < occupied; ++k) {
                    next(t, k + step) += weight * state(t - c, k);
                }
            }
        }
        std::swap(state, next);
    }
    Eigen::MatrixXd entries = state.transpose();
    return ConvolutionMatrix::from_entries(std::move(entries), std::move(probs), false);
}

std::vector<double> convolution_bruteforce(std::span<const double> bin_probs, std::size_t photons) {
    if (photons > kMaxBruteforcePhotons) {
        throw RefusalError("brute-force enumeration is limited to " + std::to_string(kMaxBruteforcePhotons) +
                           " photons");
    }
    std::vector<double> probs = validated_bin_probs(bin_probs);
    const std::size_t bins = probs.size();
    std::vector<double> out(bins + 1, 0.0);
    // Odometer over every ordered assignment photon -> bin.
    std::vector<std::size_t> assignment(photons, 0);
    std::vector<char> seen(bins);
    while (true) {
        double weight = 1.0;
        std::fill(seen.begin(), seen.end(), 0);
        std::size_t distinct = 0;
        for (std::size_t bin : assignment) {
            weight *= probs[bin];
            if (!seen[bin]) {
                seen[bin] = 1;
                ++distinct;
            }
        }
        out[distinct] += weight;

        std::size_t pos = 0;
        while (pos < photons && ++assignment[pos] == bins) {
            assignment[pos] = 0;
            ++pos;
        }
        if (pos == photons) {
            break;
        }
    }
    return out;
}

PovmSet tmd_povm(const ConvolutionMatrix &conv, const LossMatrix &loss) {
    if (conv.max_photons() != loss.truncation()) {
        throw DomainError("convolution matrix covers " + std::to_string(conv.max_photons()) +
                          " photons but the loss matrix covers " + std::to_string(loss.truncation()));
    }
    Eigen::MatrixXd product = conv.entries() * loss.entries();
    return PovmSet::from_matrix(product);
}

OutcomeProbabilities outcome_probabilities(const PovmSet &povm, const FockDistribution &state) {
    if (povm.truncation() != state.truncation()) {
        throw DomainError("POVM truncation " + std::to_string(povm.truncation()) + " differs from state truncation " +
                          std::to_string(state.truncation()));
    }
    OutcomeProbabilities out;
    out.probs.resize(povm.outcomes());
    out.total = 0.0;
    for (std::size_t j = 0; j < povm.outcomes(); ++j) {
        double p = 0.0;
        const auto &diag = povm[j].diag;
        for (std::size_t n = 0; n < diag.size(); ++n) {
            p += diag[n] * state[n];
        }
        out.probs[j] = p;
        out.total += p;
    }
    out.tail_deficit = 1.0 - out.total;
    return out;
}

const Eigen::MatrixXd &builtin_tmd_raw() {
    static const Eigen::MatrixXd raw = [] {
        Eigen::MatrixXd m(9, 9);
        // clang-format off
        m << 1, 0, 0,     0,     0,     0,     0,     0,     0,
             0, 1, 0.128, 0.017, 0.000, 0.000, 0.000, 0.000, 0.000,
             0, 0, 0.872, 0.334, 0.101, 0.028, 0.008, 0.002, 0.001,
             0, 0, 0,     0.649, 0.496, 0.265, 0.123, 0.053, 0.022,
             0, 0, 0,     0,     0.402, 0.509, 0.422, 0.290, 0.181,
             0, 0, 0,     0,     0,     0.198, 0.375, 0.444, 0.423,
             0, 0, 0,     0,     0,     0,     0.073, 0.193, 0.308,
             0, 0, 0,     0,     0,     0,     0,     0.018, 0.063,
             0, 0, 0,     0,     0,     0,     0,     0,     0.002;
        // clang-format on
        return m;
    }();
    return raw;
}

ConvolutionMatrix builtin_tmd_convolution(std::size_t max_photons) {
    const Eigen::MatrixXd &raw = builtin_tmd_raw();
    const auto columns = static_cast<Eigen::Index>(max_photons + 1);
    Eigen::MatrixXd entries(raw.rows(), columns);
    const Eigen::Index measured = std::min(columns, raw.cols());
    entries.leftCols(measured) = raw.leftCols(measured);
    if (columns > raw.cols()) {
        std::vector<double> equal_split(kBuiltinTmdBins, 1.0 / static_cast<double>(kBuiltinTmdBins));
        ConvolutionMatrix ideal = convolution_matrix(equal_split, max_photons);
        entries.rightCols(columns - raw.cols()) = ideal.entries().rightCols(columns - raw.cols());
    }
    return ConvolutionMatrix::from_entries(std::move(entries), {}, true);
}

DetectorModel make_apd_model(double efficiency, std::size_t truncation) {
    return DetectorModel{"apd:" + format_double(efficiency), std::nullopt, std::nullopt,
                         apd_povm(efficiency, truncation)};
}

DetectorModel make_tmd_model(std::span<const double> bin_probs, double loss_fraction, std::size_t truncation) {
    ConvolutionMatrix conv = convolution_matrix(bin_probs, truncation);
    LossMatrix loss = loss_matrix(loss_fraction, truncation);
    PovmSet povm = tmd_povm(conv, loss);
    std::string description = "tmd:";
    for (std::size_t b = 0; b < bin_probs.size(); ++b) {
        description += (b ? "," : "") + format_double(bin_probs[b]);
    }
    return DetectorModel{std::move(description), std::move(loss), std::move(conv), std::move(povm)};
}

DetectorModel make_builtin_tmd_model(double loss_fraction, std::size_t truncation) {
    ConvolutionMatrix conv = builtin_tmd_convolution(truncation);
    LossMatrix loss = loss_matrix(loss_fraction, truncation);
    PovmSet povm = tmd_povm(conv, loss);
    return DetectorModel{"builtin:" + std::string(kBuiltinTmdName), std::move(loss), std::move(conv),
                         std::move(povm)};
}

void write_matrix_csv(std::ostream &out, const Eigen::MatrixXd &m, std::string_view corner_label) {
    out << corner_label;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << ',' << c;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        out << r;
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << ',' << format_double(m(r, c));
        }
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix_csv(std::istream &in) {
    std::vector<std::string> fields;
    if (!next_csv_row(in, fields) || fields.size() < 2) {
        throw IoError("matrix CSV is missing its header row");
    }
    const std::size_t cols = fields.size() - 1;
    for (std::size_t c = 0; c < cols; ++c) {
        if (parse_integer(fields[c + 1], "column index") != static_cast<long long>(c)) {
            throw IoError("matrix CSV header must list column indices 0, 1, ...");
        }
    }
    std::vector<std::vector<double>> rows;
    while (next_csv_row(in, fields)) {
        if (fields.size() != cols + 1) {
            throw IoError("matrix CSV row " + std::to_string(rows.size()) + " has the wrong number of fields");
        }
        if (parse_integer(fields[0], "row index") != static_cast<long long>(rows.size())) {
            throw IoError("matrix CSV rows must be numbered 0, 1, ...");
        }
        std::vector<double> row(cols);
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] = parse_double(fields[c + 1], "matrix entry");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw IoError("matrix CSV has no data rows");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        }
    }
    return m;
}

}  // namespace povm_forge
