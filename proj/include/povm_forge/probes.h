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

#ifndef POVM_FORGE_PROBES_H
#define POVM_FORGE_PROBES_H

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "povm_forge/fock.h"

namespace povm_forge {

/// Exact SI values (2019 redefinition).
struct PhysicalConstants {
    static constexpr double planck = 6.62607015e-34;        // J s
    static constexpr double light_speed = 299792458.0;      // m / s
};

inline constexpr double kDefaultWavelength = 800e-9;  // m
inline constexpr double kDefaultRepRate = 1e5;        // Hz

/// |alpha|^2 = P lambda / (h c f).
double power_to_mean_photon(double power, double wavelength, double rep_rate);

/// P = <n> h c f / lambda.
double mean_photon_to_power(double mean_photon, double wavelength, double rep_rate);

/// Power monitoring through a calibrated pick-off beam splitter: the power
/// meter reads the high-power arm, and the probe arm carries monitored / ratio.
/// relative_error models a systematic miscalibration of that reading.
struct PowerCalibration {
    double pickoff_ratio = 1.0;
    double relative_error = 0.0;

    double probe_power(double monitored_power) const;
};

/// A pulsed coherent probe, parameterized consistently by mean photon number
/// and time-averaged power.
class CoherentProbe {
   public:
    static CoherentProbe from_mean_photon(double mean_photon, double wavelength = kDefaultWavelength,
                                          double rep_rate = kDefaultRepRate, double phase = 0.0);
    static CoherentProbe from_power(double avg_power, double wavelength = kDefaultWavelength,
                                    double rep_rate = kDefaultRepRate, double phase = 0.0);

    const CoherentAmplitude &amplitude() const { return amplitude_; }
    double mean_photon() const { return amplitude_.mean_photon(); }
    double wavelength() const { return wavelength_; }
    double rep_rate() const { return rep_rate_; }
    double avg_power() const { return avg_power_; }

   private:
    CoherentProbe(CoherentAmplitude amplitude, double wavelength, double rep_rate, double avg_power)
        : amplitude_(amplitude), wavelength_(wavelength), rep_rate_(rep_rate), avg_power_(avg_power) {}

    CoherentAmplitude amplitude_;
    double wavelength_;
    double rep_rate_;
    double avg_power_;
};

/// An ordered probe ensemble. dimension is the Fock dimension d used when the
/// set is tested for tomographic completeness.
class ProbeSet {
   public:
    /// Throws DomainError when empty, when probes disagree on wavelength or
    /// repetition rate, or when dimension is zero.
    ProbeSet(std::vector<CoherentProbe> probes, std::size_t dimension);

    static ProbeSet from_mean_photons(std::span<const double> mean_photons, std::size_t dimension,
                                      double wavelength = kDefaultWavelength, double rep_rate = kDefaultRepRate);

    std::span<const CoherentProbe> probes() const { return probes_; }
    const CoherentProbe &operator[](std::size_t i) const { return probes_[i]; }
    std::size_t size() const { return probes_.size(); }
    std::size_t dimension() const { return dimension_; }
    double max_mean_photon() const;

    ProbeSet with_dimension(std::size_t dimension) const { return ProbeSet(probes_, dimension); }

   private:
    std::vector<CoherentProbe> probes_;
    std::size_t dimension_;
};

/// count points evenly spaced on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t count);

/// 400 probes with <n> evenly spaced on [0, 40].
ProbeSet default_probe_grid(std::size_t dimension);

/// M[i][n] = |<n|alpha_i>|^2 for n = 0..dimension-1, for any number of probes.
Eigen::MatrixXd probe_fock_matrix(const ProbeSet &probes, std::size_t dimension);

/// Square d x d stacked probe diagonals; requires probes.size() == dimension.
Eigen::MatrixXd completeness_matrix(const ProbeSet &probes);

struct CompletenessReport {
    /// det(M) for a square set, det(M^T M) for an overdetermined one.
    double determinant;
    /// Ratio of extreme singular values of M; +inf when rank deficient.
    double condition_number;
    bool complete;
    bool gram;
};

/// Determinant test for tomographic completeness over the diagonal subspace.
/// Sets with more probes than dimension are tested through the Gram matrix;
/// fewer probes than dimension is a DomainError.
CompletenessReport completeness_check(const ProbeSet &probes);

/// CSV columns: index, mean_photon, avg_power_W, wavelength_m, rep_rate_Hz.
void write_probes_csv(std::ostream &out, const ProbeSet &probes);
ProbeSet read_probes_csv(std::istream &in, std::size_t dimension);

}  // namespace povm_forge

#endif  // POVM_FORGE_PROBES_H
