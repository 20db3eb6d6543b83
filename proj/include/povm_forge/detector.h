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

#ifndef POVM_FORGE_DETECTOR_H
#define POVM_FORGE_DETECTOR_H

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "povm_forge/fock.h"

namespace povm_forge {

/// Binomial loss channel. entries(n', n) is the probability that n' of n
/// input photons survive; each photon survives with probability 1 - loss_fraction.
class LossMatrix {
   public:
    const Eigen::MatrixXd &entries() const { return entries_; }
    double loss_fraction() const { return loss_fraction_; }
    std::size_t truncation() const { return static_cast<std::size_t>(entries_.cols()) - 1; }

   private:
    friend LossMatrix loss_matrix(double loss_fraction, std::size_t truncation);
    LossMatrix(Eigen::MatrixXd entries, double loss_fraction)
        : entries_(std::move(entries)), loss_fraction_(loss_fraction) {}

    Eigen::MatrixXd entries_;
    double loss_fraction_;
};

/// Click-count distribution of a multiplexed detector. entries(k, n) is the
/// probability that n photons reaching the bins occupy exactly k distinct bins.
class ConvolutionMatrix {
   public:
    /// Wraps an explicit (B+1) x (N+1) matrix. Columns are divided by their sums
    /// when renormalize_columns is set; otherwise every column must already sum
    /// to 1 within 1e-10. Throws DomainError on negative entries, k > n mass, or
    /// a bad column sum.
    static ConvolutionMatrix from_entries(Eigen::MatrixXd entries, std::vector<double> bin_probs,
                                          bool renormalize_columns);

    const Eigen::MatrixXd &entries() const { return entries_; }
    /// Empty when the matrix came from measured data with unknown bin probabilities.
    std::span<const double> bin_probs() const { return bin_probs_; }
    std::size_t bins() const { return static_cast<std::size_t>(entries_.rows()) - 1; }
    std::size_t max_photons() const { return static_cast<std::size_t>(entries_.cols()) - 1; }

   private:
    ConvolutionMatrix(Eigen::MatrixXd entries, std::vector<double> bin_probs)
        : entries_(std::move(entries)), bin_probs_(std::move(bin_probs)) {}

    Eigen::MatrixXd entries_;
    std::vector<double> bin_probs_;
};

/// Diagonal of one POVM element in the Fock basis.
struct PovmElement {
    std::vector<double> diag;
    int outcome_label = 0;

    std::size_t truncation() const { return diag.size() - 1; }
};

/// A complete set of diagonal POVM elements sharing one truncation.
class PovmSet {
   public:
    /// Validates that every entry lies in [0, 1] and that the elements sum to
    /// the identity within completeness_tolerance for every photon number.
    /// Entries within 1e-12 of [0, 1] are clamped.
    explicit PovmSet(std::vector<PovmElement> elements, double completeness_tolerance = 1e-10);

    /// Rows are outcomes, columns photon numbers.
    static PovmSet from_matrix(const Eigen::MatrixXd &diagonals, double completeness_tolerance = 1e-10);

    std::span<const PovmElement> elements() const { return elements_; }
    const PovmElement &operator[](std::size_t j) const { return elements_[j]; }
    std::size_t outcomes() const { return elements_.size(); }
    std::size_t truncation() const { return elements_.front().truncation(); }
    Eigen::MatrixXd as_matrix() const;

    /// max over n of |sum_j diag_j[n] - 1|.
    double completeness_defect() const;

   private:
    std::vector<PovmElement> elements_;
};

/// Binary on/off detector with per-photon efficiency. Element 0 is no-click.
PovmSet apd_povm(double efficiency, std::size_t truncation);

LossMatrix loss_matrix(double loss_fraction, std::size_t truncation);

/// Occupancy distribution for every photon number 0..max_photons, computed by
/// a dynamic program over bins. bin_probs are validated (nonnegative, summing
/// to 1 within 1e-9) and then rescaled to sum to exactly one.
ConvolutionMatrix convolution_matrix(std::span<const double> bin_probs, std::size_t max_photons);

/// Click-count distribution for a single photon number by exhaustive
/// enumeration of all B^n photon-to-bin assignments. Output has B+1 entries.
/// Throws RefusalError above kMaxBruteforcePhotons.
inline constexpr std::size_t kMaxBruteforcePhotons = 8;
std::vector<double> convolution_bruteforce(std::span<const double> bin_probs, std::size_t photons);

/// POVM diagonals as the rows of C * L.
PovmSet tmd_povm(const ConvolutionMatrix &conv, const LossMatrix &loss);

struct OutcomeProbabilities {
    std::vector<double> probs;
    /// sum_j probs[j]; equals the captured mass of the state for a complete POVM.
    double total;
    /// 1 - total; the share of probability lost to Fock truncation.
    double tail_deficit;
};

/// p_j = sum_n diag_j[n] sigma_n.
OutcomeProbabilities outcome_probabilities(const PovmSet &povm, const FockDistribution &state);

// Built-in measured data.

inline constexpr std::string_view kBuiltinTmdName = "paper-tmd-8bin";
inline constexpr std::size_t kBuiltinTmdBins = 8;

/// The 9 x 9 measured eight-bin convolution matrix, verbatim (three decimals).
const Eigen::MatrixXd &builtin_tmd_raw();

/// The measured matrix as a ConvolutionMatrix up to max_photons. Measured
/// columns are rescaled to unit sum; columns above 8 photons come from the
/// equal-split eight-bin model.
ConvolutionMatrix builtin_tmd_convolution(std::size_t max_photons);

/// A detector forward model: the POVM plus, for multiplexed detectors, the
/// matrices it was assembled from.
struct DetectorModel {
    std::string description;
    std::optional<LossMatrix> loss;
    std::optional<ConvolutionMatrix> conv;
    PovmSet povm;
};

DetectorModel make_apd_model(double efficiency, std::size_t truncation);
DetectorModel make_tmd_model(std::span<const double> bin_probs, double loss_fraction, std::size_t truncation);
DetectorModel make_builtin_tmd_model(double loss_fraction, std::size_t truncation);

/// CSV with a header row of column indices; each data row starts with its
/// row index. Used for L, C and POVM diagonals.
void write_matrix_csv(std::ostream &out, const Eigen::MatrixXd &m, std::string_view corner_label);
Eigen::MatrixXd read_matrix_csv(std::istream &in);

}  // namespace povm_forge

#endif  // POVM_FORGE_DETECTOR_H
