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

#ifndef POVM_FORGE_SIMULATION_H
#define POVM_FORGE_SIMULATION_H

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "povm_forge/detector.h"
#include "povm_forge/probes.h"

namespace povm_forge {

/// Largest probe tail mass above the detector truncation that a forward
/// simulation accepts.
inline constexpr double kMaxSimulationTailMass = 1e-6;

/// Per-probe outcome frequencies. shots_per_probe == 0 marks exact probabilities.
struct TomographyDataset {
    ProbeSet probes;
    Eigen::MatrixXd frequencies;  // probe x outcome
    std::int64_t shots_per_probe = 0;
    std::uint64_t seed = 0;

    std::size_t outcomes() const { return static_cast<std::size_t>(frequencies.cols()); }

    /// Throws DomainError unless every row is nonnegative and sums to 1 within 1e-12.
    void validate() const;
};

struct ResponseCurve {
    std::vector<double> mean_photons;
    std::vector<double> probability;
    int outcome_label = 0;
};

/// Options shared by the dataset generators. The per-probe true mean photon
/// number is nominal * (1 + power_error), modeling a systematic calibration
/// error; the dataset records the nominal probes.
struct SimulationOptions {
    unsigned threads = 1;
    double power_error = 0.0;
};

/// Outcome distribution of one probe, normalized to unit mass. Throws
/// RefusalError naming probe_index when the probe's Poisson tail above the
/// detector truncation exceeds kMaxSimulationTailMass.
std::vector<double> probe_outcome_distribution(const PovmSet &detector, double mean_photon, std::size_t probe_index);

TomographyDataset exact_dataset(const PovmSet &detector, const ProbeSet &probes, const SimulationOptions &options = {});

/// One multinomial draw of `shots` per probe, sampled by sequential
/// conditional binomials from the probe's own substream.
TomographyDataset sample_dataset(const PovmSet &detector, const ProbeSet &probes, std::int64_t shots,
                                 std::uint64_t seed, const SimulationOptions &options = {});

ResponseCurve response_curve(const PovmSet &detector, int outcome, std::span<const double> mean_photon_grid);

/// Reproducible generator for probe `index` under master `seed`. Identical for
/// any thread count.
std::mt19937_64 probe_substream(std::uint64_t seed, std::uint64_t index);

/// Multinomial counts over probs (which must sum to 1 within 1e-9).
std::vector<std::int64_t> sample_multinomial(std::span<const double> probs, std::int64_t shots,
                                             std::mt19937_64 &rng);

/// Header mean_photon,shots,freq_outcome_0,...,freq_outcome_{D-1}; one row per
/// probe. Optics and seed are not part of the CSV layout, so imported datasets
/// get the given wavelength and repetition rate and seed 0.
void write_dataset_csv(std::ostream &out, const TomographyDataset &dataset);
TomographyDataset read_dataset_csv(std::istream &in, double wavelength = kDefaultWavelength,
                                   double rep_rate = kDefaultRepRate);

/// Lossless JSON form including optics and seed.
void write_dataset_json(std::ostream &out, const TomographyDataset &dataset);
TomographyDataset read_dataset_json(std::istream &in);

}  // namespace povm_forge

#endif  // POVM_FORGE_SIMULATION_H
