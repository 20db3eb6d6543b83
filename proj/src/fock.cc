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

#include "povm_forge/fock.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "povm_forge/error.h"

namespace povm_forge {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr std::size_t kLogFactorialTableSize = 4096;

// Magic-static table so concurrent callers never touch lgamma's global signgam.
const std::array<double, kLogFactorialTableSize> &log_factorial_table() {
    static const auto table = [] {
        std::array<double, kLogFactorialTableSize> t{};
        t[0] = 0.0;
        for (std::size_t n = 1; n < t.size(); ++n) {
            t[n] = std::lgamma(static_cast<double>(n) + 1.0);
        }
        return t;
    }();
    return table;
}

double stirling_log_factorial(double n) {
    // ln n! = n ln n - n + ln(2 pi n)/2 + 1/(12n) - 1/(360n^3) + 1/(1260n^5)
    double inv = 1.0 / n;
    double inv2 = inv * inv;
    return n * std::log(n) - n + 0.5 * std::log(2.0 * std::numbers::pi * n) +
           inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

}  // namespace

FockDistribution::FockDistribution(std::vector<double> probs) : probs_(std::move(probs)), captured_mass_(0.0) {
    if (probs_.empty()) {
        throw DomainError("FockDistribution needs at least the vacuum entry");
    }
    for (std::size_t n = 0; n < probs_.size(); ++n) {
        double p = probs_[n];
        if (!std::isfinite(p) || p < 0.0) {
            throw DomainError("FockDistribution entry " + std::to_string(n) + " is negative or non-finite");
        }
        captured_mass_ += p;
    }
    if (captured_mass_ > 1.0 + kMassTolerance) {
        throw DomainError("FockDistribution entries sum to more than one");
    }
}

FockDistribution FockDistribution::vacuum(std::size_t truncation) {
    return number_state(0, truncation);
}

FockDistribution FockDistribution::number_state(std::size_t n, std::size_t truncation) {
    if (n > truncation) {
        throw DomainError("number state lies above the truncation");
    }
    std::vector<double> probs(truncation + 1, 0.0);
    probs[n] = 1.0;
    return FockDistribution(std::move(probs));
}

double FockDistribution::tail_mass() const {
    return std::max(0.0, 1.0 - captured_mass_);
}

FockDistribution FockDistribution::renormalized() const {
    if (captured_mass_ <= 0.0) {
        throw DomainError("cannot renormalize a distribution with zero captured mass");
    }
    std::vector<double> out(probs_);
    for (double &p : out) {
        p /= captured_mass_;
    }
    return FockDistribution(std::move(out));
}

CoherentAmplitude::CoherentAmplitude(double mean_photon, double phase) : mean_photon_(mean_photon), phase_(phase) {
    if (!std::isfinite(mean_photon) || mean_photon < 0.0) {
        throw DomainError("mean photon number must be finite and nonnegative");
    }
    if (!std::isfinite(phase)) {
        throw DomainError("coherent phase must be finite");
    }
}

double CoherentAmplitude::modulus() const {
    return std::sqrt(mean_photon_);
}

FockDistribution coherent_fock_distribution(const CoherentAmplitude &amp, std::size_t truncation, bool renormalize) {
    std::vector<double> probs(truncation + 1);
    for (std::size_t n = 0; n <= truncation; ++n) {
        probs[n] = poisson_pmf(amp.mean_photon(), static_cast<long long>(n));
    }
    // Summation round-off can overshoot 1 by a few ulps for fully captured distributions.
    double total = 0.0;
    for (double p : probs) {
        total += p;
    }
    if (total > 1.0) {
        for (double &p : probs) {
            p /= total;
        }
    }
    FockDistribution dist(std::move(probs));
    return renormalize ? dist.renormalized() : dist;
}

CoherentAmplitude attenuate(const CoherentAmplitude &amp, double transmission) {
    if (!(transmission >= 0.0 && transmission <= 1.0)) {
        throw DomainError("transmission must lie in [0, 1]");
    }
    return CoherentAmplitude(transmission * amp.mean_photon(), amp.phase());
}

double log_factorial(long long n) {
    if (n < 0) {
        throw DomainError("log_factorial of a negative integer");
    }
    const auto &table = log_factorial_table();
    if (static_cast<std::size_t>(n) < table.size()) {
        return table[static_cast<std::size_t>(n)];
    }
    return stirling_log_factorial(static_cast<double>(n));
}

double log_binomial(long long n, long long k) {
    if (n < 0 || k < 0 || k > n) {
        throw DomainError("log_binomial requires 0 <= k <= n");
    }
    if (k == 0 || k == n) {
        return 0.0;
    }
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double binomial_pmf(long long n, long long k, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binomial success probability must lie in [0, 1]");
    }
    if (k < 0 || k > n) {
        return 0.0;
    }
    if (p == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    if (p == 1.0) {
        return k == n ? 1.0 : 0.0;
    }
    double log_p = log_binomial(n, k) + static_cast<double>(k) * std::log(p) +
                   static_cast<double>(n - k) * std::log1p(-p);
    return std::exp(log_p);
}

double poisson_pmf(double mean, long long n) {
    if (!std::isfinite(mean) || mean < 0.0) {
        throw DomainError("Poisson mean must be finite and nonnegative");
    }
    if (n < 0) {
        return 0.0;
    }
    if (mean == 0.0) {
        return n == 0 ? 1.0 : 0.0;
    }
    return std::exp(-mean + static_cast<double>(n) * std::log(mean) - log_factorial(n));
}

std::size_t default_truncation(double max_mean_photon) {
    if (!std::isfinite(max_mean_photon) || max_mean_photon < 0.0) {
        throw DomainError("mean photon number must be finite and nonnegative");
    }
    return static_cast<std::size_t>(std::ceil(max_mean_photon + 15.0 * std::sqrt(max_mean_photon) + 15.0));
}

}  // namespace povm_forge
