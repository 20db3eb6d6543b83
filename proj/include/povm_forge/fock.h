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

#ifndef POVM_FORGE_FOCK_H
#define POVM_FORGE_FOCK_H

#include <cstddef>
#include <span>
#include <vector>

namespace povm_forge {

/// Photon-number distribution sigma_n over a truncated Fock space n = 0..N.
///
/// Truncated distributions may carry less than unit mass; the missing mass
/// is reported by tail_mass() and is only folded back in when the caller
/// asks for renormalized().
class FockDistribution {
   public:
    /// Throws DomainError if an entry is negative or non-finite, or the
    /// entries sum to more than 1 + 1e-12.
    explicit FockDistribution(std::vector<double> probs);

    static FockDistribution vacuum(std::size_t truncation);
    static FockDistribution number_state(std::size_t n, std::size_t truncation);

    std::span<const double> probs() const { return probs_; }
    double operator[](std::size_t n) const { return probs_[n]; }
    std::size_t truncation() const { return probs_.size() - 1; }
    std::size_t size() const { return probs_.size(); }

    double captured_mass() const { return captured_mass_; }
    /// 1 - sum(probs), clamped at zero against round-off.
    double tail_mass() const;

    FockDistribution renormalized() const;

   private:
    std::vector<double> probs_;
    double captured_mass_;
};

/// Coherent-state probe parameters. Only the mean photon number |alpha|^2
/// enters the diagonal (phase-insensitive) models; the phase is carried along.
class CoherentAmplitude {
   public:
    /// Throws DomainError for a negative or non-finite mean photon number.
    explicit CoherentAmplitude(double mean_photon, double phase = 0.0);

    double mean_photon() const { return mean_photon_; }
    double phase() const { return phase_; }
    double modulus() const;

   private:
    double mean_photon_;
    double phase_;
};

/// Poisson photon statistics of a coherent state, evaluated in log space.
FockDistribution coherent_fock_distribution(const CoherentAmplitude &amp, std::size_t truncation,
                                            bool renormalize = false);

/// Passing a coherent state through a beam splitter of intensity
/// transmission t yields another coherent state with mean t * <n>.
CoherentAmplitude attenuate(const CoherentAmplitude &amp, double transmission);

/// ln C(n, k).
double log_binomial(long long n, long long k);

/// ln n!.
double log_factorial(long long n);

/// C(n, k) p^k (1-p)^(n-k), with 0^0 = 1.
double binomial_pmf(long long n, long long k, double p);

/// exp(-mean) mean^n / n!, with the mean = 0 case returning the vacuum.
double poisson_pmf(double mean, long long n);

/// Default Fock truncation for probes up to max_mean_photon:
/// ceil(<n> + 15 sqrt(<n>) + 15).
std::size_t default_truncation(double max_mean_photon);

}  // namespace povm_forge

#endif  // POVM_FORGE_FOCK_H
