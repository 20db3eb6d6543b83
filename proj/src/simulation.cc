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

#include "povm_forge/simulation.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <thread>

#include "json.hpp"

#include "povm_forge/csv.h"
#include "povm_forge/error.h"

namespace povm_forge {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr std::uint64_t kSubstreamTag = 0x706f766d2d666f72ULL;  // "povm-for"

// Runs body(i) for i in [0, count), split into contiguous chunks over
// `threads` workers. Each index is handled by exactly one worker, so results
// written per index do not depend on the thread count.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    workers.reserve(threads);
    std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        workers.emplace_back([&, t] {
            try {
                std::size_t begin = t * chunk;
                std::size_t end = std::min(count, begin + chunk);
                for (std::size_t i = begin; i < end; ++i) {
                    body(i);
                }
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto &w : workers) {
        w.join();
    }
    for (auto &e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

double true_mean(const CoherentProbe &probe, const SimulationOptions &options) {
    if (!std::isfinite(options.power_error) || options.power_error <= -1.0) {
        throw DomainError("power error must exceed -1");
    }
    return probe.mean_photon() * (1.0 + options.power_error);
}

}  // namespace

void TomographyDataset::validate() const {
    if (static_cast<std::size_t>(frequencies.rows()) != probes.size()) {
        throw DomainError("dataset has " + std::to_string(frequencies.rows()) + " frequency rows for " +
                          std::to_string(probes.size()) + " probes");
    }
    if (frequencies.cols() < 1) {
        throw DomainError("dataset needs at least one outcome");
    }
    if (shots_per_probe < 0) {
        throw DomainError("shots per probe must be nonnegative");
    }
    for (Eigen::Index i = 0; i < frequencies.rows(); ++i) {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < frequencies.cols(); ++j) {
            double f = frequencies(i, j);
            if (!std::isfinite(f) || f < 0.0) {
                throw DomainError("dataset frequencies must be finite and nonnegative (probe " + std::to_string(i) +
                                  ")");
            }
            sum += f;
        }
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
            throw DomainError("dataset row " + std::to_string(i) + " sums to " + format_double(sum));
        }
    }
}

std::vector<double> probe_outcome_distribution(const PovmSet &detector, double mean_photon, std::size_t probe_index) {
    FockDistribution state = coherent_fock_distribution(CoherentAmplitude(mean_photon), detector.truncation());
    if (state.tail_mass() > kMaxSimulationTailMass) {
        throw RefusalError("probe " + std::to_string(probe_index) + " (<n> = " + format_double(mean_photon) +
                           ") has Poisson tail mass " + format_double(state.tail_mass()) +
                           " above detector truncation " + std::to_string(detector.truncation()) +
                           "; raise the truncation to at least " + std::to_string(default_truncation(mean_photon)));
    }
    OutcomeProbabilities out = outcome_probabilities(detector, state);
    for (double &p : out.probs) {
        p /= out.total;
    }
    return out.probs;
}

TomographyDataset exact_dataset(const PovmSet &detector, const ProbeSet &probes, const SimulationOptions &options) {
    Eigen::MatrixXd freq(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(detector.outcomes()));
    parallel_for(probes.size(), options.threads, [&](std::size_t i) {
        auto row = probe_outcome_distribution(detector, true_mean(probes[i], options), i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            freq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
        }
    });
    TomographyDataset dataset{probes, std::move(freq), 0, 0};
    dataset.validate();
    return dataset;
}

std::mt19937_64 probe_substream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                      static_cast<std::uint32_t>(kSubstreamTag), static_cast<std::uint32_t>(kSubstreamTag >> 32)};
    return std::mt19937_64(seq);
}

std::vector<std::int64_t> sample_multinomial(std::span<const double> probs, std::int64_t shots, std::mt19937_64 &rng) {
    if (shots < 0) {
        throw DomainError("shot count must be nonnegative");
    }
    if (probs.empty()) {
        throw DomainError("multinomial needs at least one outcome");
    }
    double total = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0.0) {
            throw DomainError("multinomial probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw DomainError("multinomial probabilities must sum to 1");
    }
    std::vector<std::int64_t> counts(probs.size(), 0);
    // Suffix sums keep each conditional exact at 1 once only one outcome remains possible.
    std::vector<double> suffix(probs.size() + 1, 0.0);
    for (std::size_t j = probs.size(); j-- > 0;) {
        suffix[j] = suffix[j + 1] + probs[j];
    }
    std::int64_t remaining = shots;
    for (std::size_t j = 0; j < probs.size() && remaining > 0; ++j) {
        if (j + 1 == probs.size()) {
            counts[j] = remaining;
            break;
        }
        double conditional = suffix[j] > 0.0 ? std::clamp(probs[j] / suffix[j], 0.0, 1.0) : 0.0;
        std::int64_t drawn = 0;
        if (conditional >= 1.0) {
            drawn = remaining;
        } else if (conditional > 0.0) {
            std::binomial_distribution<std::int64_t> binomial(remaining, conditional);
            drawn = binomial(rng);
        }
        counts[j] = drawn;
        remaining -= drawn;
    }
    return counts;
}

TomographyDataset sample_dataset(const PovmSet &detector, const ProbeSet &probes, std::int64_t shots,
                                 std::uint64_t seed, const SimulationOptions &options) {
    if (shots < 1) {
        throw DomainError("sampling needs at least one shot per probe");
    }
    Eigen::MatrixXd freq(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(detector.outcomes()));
    parallel_for(probes.size(), options.threads, [&](std::size_t i) {
        auto probs = probe_outcome_distribution(detector, true_mean(probes[i], options), i);
        auto rng = probe_substream(seed, i);
        auto counts = sample_multinomial(probs, shots, rng);
        for (std::size_t j = 0; j < counts.size(); ++j) {
            freq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                static_cast<double>(counts[j]) / static_cast<double>(shots);
        }
    });
    TomographyDataset dataset{probes, std::move(freq), shots, seed};
    dataset.validate();
    return dataset;
}

ResponseCurve response_curve(const PovmSet &detector, int outcome, std::span<const double> mean_photon_grid) {
    if (outcome < 0 || static_cast<std::size_t>(outcome) >= detector.outcomes()) {
        throw DomainError("outcome " + std::to_string(outcome) + " is not one of the detector's " +
                          std::to_string(detector.outcomes()) + " outcomes");
    }
    ResponseCurve curve;
    curve.outcome_label = detector[static_cast<std::size_t>(outcome)].outcome_label;
    curve.mean_photons.assign(mean_photon_grid.begin(), mean_photon_grid.end());
    curve.probability.reserve(mean_photon_grid.size());
    for (std::size_t i = 0; i < mean_photon_grid.size(); ++i) {
        auto probs = probe_outcome_distribution(detector, mean_photon_grid[i], i);
        curve.probability.push_back(std::clamp(probs[static_cast<std::size_t>(outcome)], 0.0, 1.0));
    }
    return curve;
}

void write_dataset_csv(std::ostream &out, const TomographyDataset &dataset) {
    out << "mean_photon,shots";
    for (std::size_t j = 0; j < dataset.outcomes(); ++j) {
        out << ",freq_outcome_" << j;
    }
    out << '\n';
    for (std::size_t i = 0; i < dataset.probes.size(); ++i) {
        out << format_double(dataset.probes[i].mean_photon()) << ',' << dataset.shots_per_probe;
        for (std::size_t j = 0; j < dataset.outcomes(); ++j) {
            out << ',' << format_double(dataset.frequencies(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        out << '\n';
    }
}

TomographyDataset read_dataset_csv(std::istream &in, double wavelength, double rep_rate) {
    std::vector<std::string> fields;
    if (!next_csv_row(in, fields) || fields.size() < 3 || fields[0] != "mean_photon" || fields[1] != "shots") {
        throw IoError("dataset CSV header must start with mean_photon,shots,freq_outcome_0");
    }
    const std::size_t outcomes = fields.size() - 2;
    for (std::size_t j = 0; j < outcomes; ++j) {
        if (fields[j + 2] != "freq_outcome_" + std::to_string(j)) {
            throw IoError("dataset CSV header column " + std::to_string(j + 2) + " must be freq_outcome_" +
                          std::to_string(j));
        }
    }
    std::vector<double> means;
    std::vector<double> values;
    std::int64_t shots = -1;
    while (next_csv_row(in, fields)) {
        if (fields.size() != outcomes + 2) {
            throw IoError("dataset CSV row " + std::to_string(means.size()) + " has the wrong number of fields");
        }
        means.push_back(parse_double(fields[0], "mean_photon"));
        std::int64_t row_shots = parse_integer(fields[1], "shots");
        if (shots >= 0 && row_shots != shots) {
            throw IoError("dataset CSV rows disagree on the shot count");
        }
        shots = row_shots;
        for (std::size_t j = 0; j < outcomes; ++j) {
            values.push_back(parse_double(fields[j + 2], "frequency"));
        }
    }
    if (means.empty()) {
        throw IoError("dataset CSV has no probe rows");
    }
    Eigen::MatrixXd freq(static_cast<Eigen::Index>(means.size()), static_cast<Eigen::Index>(outcomes));
    for (std::size_t i = 0; i < means.size(); ++i) {
        for (std::size_t j = 0; j < outcomes; ++j) {
            freq(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * outcomes + j];
        }
    }
    TomographyDataset dataset{ProbeSet::from_mean_photons(means, 1, wavelength, rep_rate), std::move(freq), shots, 0};
    dataset.validate();
    return dataset;
}

void write_dataset_json(std::ostream &out, const TomographyDataset &dataset) {
    nlohmann::json j;
    j["wavelength_m"] = dataset.probes[0].wavelength();
    j["rep_rate_Hz"] = dataset.probes[0].rep_rate();
    j["shots_per_probe"] = dataset.shots_per_probe;
    j["seed"] = dataset.seed;
    auto &rows = j["probes"] = nlohmann::json::array();
    for (std::size_t i = 0; i < dataset.probes.size(); ++i) {
        std::vector<double> freq(dataset.outcomes());
        for (std::size_t k = 0; k < freq.size(); ++k) {
            freq[k] = dataset.frequencies(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
        rows.push_back({{"mean_photon", dataset.probes[i].mean_photon()}, {"frequencies", freq}});
    }
    out << j.dump(2) << '\n';
}

TomographyDataset read_dataset_json(std::istream &in) {
    nlohmann::json j;
    try {
        in >> j;
        double wavelength = j.at("wavelength_m").get<double>();
        double rep_rate = j.at("rep_rate_Hz").get<double>();
        const auto &rows = j.at("probes");
        if (!rows.is_array() || rows.empty()) {
            throw IoError("dataset JSON has no probes");
        }
        std::vector<double> means;
        std::vector<std::vector<double>> freq;
        for (const auto &row : rows) {
            means.push_back(row.at("mean_photon").get<double>());
            freq.push_back(row.at("frequencies").get<std::vector<double>>());
        }
        Eigen::MatrixXd m(static_cast<Eigen::Index>(freq.size()), static_cast<Eigen::Index>(freq.front().size()));
        for (std::size_t i = 0; i < freq.size(); ++i) {
            if (freq[i].size() != freq.front().size()) {
                throw IoError("dataset JSON rows have different outcome counts");
            }
            for (std::size_t k = 0; k < freq[i].size(); ++k) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = freq[i][k];
            }
        }
        TomographyDataset dataset{ProbeSet::from_mean_photons(means, 1, wavelength, rep_rate), std::move(m),
                                  j.at("shots_per_probe").get<std::int64_t>(), j.at("seed").get<std::uint64_t>()};
        dataset.validate();
        return dataset;
    } catch (const nlohmann::json::exception &e) {
        throw IoError(std::string("malformed dataset JSON: ") + e.what());
    }
}

}  // namespace povm_forge
