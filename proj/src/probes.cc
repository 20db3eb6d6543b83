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
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "povm_forge/csv.h"
#include "povm_forge/error.h"

namespace povm_forge {

namespace {

constexpr double kDeterminantFloor = 1e-300;

void check_optics(double wavelength, double rep_rate) {
    if (!std::isfinite(wavelength) || wavelength <= 0.0) {
        throw DomainError("wavelength must be positive");
    }
    if (!std::isfinite(rep_rate) || rep_rate <= 0.0) {
        throw DomainError("repetition rate must be positive");
    }
}

double photon_energy_rate(double wavelength, double rep_rate) {
    return PhysicalConstants::planck * PhysicalConstants::light_speed * rep_rate / wavelength;
}

}  // namespace

double power_to_mean_photon(double power, double wavelength, double rep_rate) {
    check_optics(wavelength, rep_rate);
    if (!std::isfinite(power) || power < 0.0) {
        throw DomainError("power must be finite and nonnegative");
    }
    return power / photon_energy_rate(wavelength, rep_rate);
}

double mean_photon_to_power(double mean_photon, double wavelength, double rep_rate) {
    check_optics(wavelength, rep_rate);
    if (!std::isfinite(mean_photon) || mean_photon < 0.0) {
        throw DomainError("mean photon number must be finite and nonnegative");
    }
    return mean_photon * photon_energy_rate(wavelength, rep_rate);
}

double PowerCalibration::probe_power(double monitored_power) const {
    if (!std::isfinite(pickoff_ratio) || pickoff_ratio <= 0.0) {
        throw DomainError("pick-off ratio must be positive");
    }
    if (!std::isfinite(relative_error) || relative_error <= -1.0) {
        throw DomainError("relative calibration error must exceed -1");
    }
    if (!std::isfinite(monitored_power) || monitored_power < 0.0) {
        throw DomainError("monitored power must be finite and nonnegative");
    }
    return monitored_power / pickoff_ratio * (1.0 + relative_error);
}

CoherentProbe CoherentProbe::from_mean_photon(double mean_photon, double wavelength, double rep_rate, double phase) {
    double power = mean_photon_to_power(mean_photon, wavelength, rep_rate);
    return CoherentProbe(CoherentAmplitude(mean_photon, phase), wavelength, rep_rate, power);
}

CoherentProbe CoherentProbe::from_power(double avg_power, double wavelength, double rep_rate, double phase) {
    double mean = power_to_mean_photon(avg_power, wavelength, rep_rate);
    return CoherentProbe(CoherentAmplitude(mean, phase), wavelength, rep_rate, avg_power);
}

ProbeSet::ProbeSet(std::vector<CoherentProbe> probes, std::size_t dimension)
    : probes_(std::move(probes)), dimension_(dimension) {
    if (probes_.empty()) {
        throw DomainError("a probe set needs at least one probe");
    }
    if (dimension_ == 0) {
        throw DomainError("probe set dimension must be at least 1");
    }
    for (const auto &p : probes_) {
        if (p.wavelength() != probes_.front().wavelength() || p.rep_rate() != probes_.front().rep_rate()) {
            throw DomainError("all probes must share wavelength and repetition rate");
        }
    }
}

ProbeSet ProbeSet::from_mean_photons(std::span<const double> mean_photons, std::size_t dimension, double wavelength,
                                     double rep_rate) {
    std::vector<CoherentProbe> probes;
    probes.reserve(mean_photons.size());
    for (double m : mean_photons) {
        probes.push_back(CoherentProbe::from_mean_photon(m, wavelength, rep_rate));
    }
    return ProbeSet(std::move(probes), dimension);
}

double ProbeSet::max_mean_photon() const {
    double best = 0.0;
    for (const auto &p : probes_) {
        best = std::max(best, p.mean_photon());
    }
    return best;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
    if (count == 0) {
        throw DomainError("linspace needs at least one point");
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("linspace bounds must be finite");
    }
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = lo;
        return out;
    }
    double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t i = 0; i < count; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    out.back() = hi;
    return out;
}

ProbeSet default_probe_grid(std::size_t dimension) {
    return ProbeSet::from_mean_photons(linspace(0.0, 40.0, 400), dimension);
}

Eigen::MatrixXd probe_fock_matrix(const ProbeSet &probes, std::size_t dimension) {
    if (dimension == 0) {
        throw DomainError("dimension must be at least 1");
    }
    Eigen::MatrixXd m(static_cast<Eigen::Index>(probes.size()), static_cast<Eigen::Index>(dimension));
    for (std::size_t i = 0; i < probes.size(); ++i) {
        for (std::size_t n = 0; n < dimension; ++n) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(n)) =
                poisson_pmf(probes[i].mean_photon(), static_cast<long long>(n));
        }
    }
    return m;
}

Eigen::MatrixXd completeness_matrix(const ProbeSet &probes) {
    if (probes.size() != probes.dimension()) {
        throw DomainError("completeness matrix needs exactly d = " + std::to_string(probes.dimension()) +
                          " probes, got " + std::to_string(probes.size()));
    }
    return probe_fock_matrix(probes, probes.dimension());
}

CompletenessReport completeness_check(const ProbeSet &probes) {
    if (probes.size() < probes.dimension()) {
        throw DomainError("completeness needs at least d = " + std::to_string(probes.dimension()) + " probes, got " +
                          std::to_string(probes.size()));
    }
    Eigen::MatrixXd m = probe_fock_matrix(probes, probes.dimension());
    CompletenessReport report{};
    report.gram = probes.size() > probes.dimension();
    if (report.gram) {
        Eigen::MatrixXd gram = m.transpose() * m;
        report.determinant = gram.partialPivLu().determinant();
    } else {
        report.determinant = m.partialPivLu().determinant();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto &sv = svd.singularValues();
    double smallest = sv(sv.size() - 1);
    report.condition_number = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    report.complete = std::abs(report.determinant) > kDeterminantFloor && std::isfinite(report.condition_number);
    return report;
}

void write_probes_csv(std::ostream &out, const ProbeSet &probes) {
    out << "index,mean_photon,avg_power_W,wavelength_m,rep_rate_Hz\n";
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto &p = probes[i];
        out << i << ',' << format_double(p.mean_photon()) << ',' << format_double(p.avg_power()) << ','
            << format_double(p.wavelength()) << ',' << format_double(p.rep_rate()) << '\n';
    }
}

ProbeSet read_probes_csv(std::istream &in, std::size_t dimension) {
    std::vector<std::string> fields;
    if (!next_csv_row(in, fields) ||
        fields != std::vector<std::string>{"index", "mean_photon", "avg_power_W", "wavelength_m", "rep_rate_Hz"}) {
        throw IoError("probe CSV header must be index,mean_photon,avg_power_W,wavelength_m,rep_rate_Hz");
    }
    std::vector<CoherentProbe> probes;
    while (next_csv_row(in, fields)) {
        if (fields.size() != 5) {
            throw IoError("probe CSV rows need five fields");
        }
        double mean = parse_double(fields[1], "mean_photon");
        double power = parse_double(fields[2], "avg_power_W");
        double wavelength = parse_double(fields[3], "wavelength_m");
        double rep_rate = parse_double(fields[4], "rep_rate_Hz");
        auto probe = CoherentProbe::from_mean_photon(mean, wavelength, rep_rate);
        double scale = std::max(std::abs(power), std::abs(probe.avg_power()));
        if (std::abs(probe.avg_power() - power) > 1e-9 * scale) {
            throw IoError("probe " + fields[0] + ": avg_power_W is inconsistent with mean_photon");
        }
        probes.push_back(probe);
    }
    return ProbeSet(std::move(probes), dimension);
}

}  // namespace povm_forge
