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

#include "povm_forge/wigner.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "povm_forge/csv.h"
#include "povm_forge/error.h"

namespace povm_forge {

namespace {

constexpr double kNodeFloor = 1e-9;

double trapezoid_weight(std::size_t i, std::size_t count) {
    return (i == 0 || i + 1 == count) ? 0.5 : 1.0;
}

template <typename Fn>
WignerField sample_field(const WignerGrid &grid, std::string label, Fn &&w) {
    grid.validate();
    auto n = static_cast<Eigen::Index>(grid.points_per_axis);
    Eigen::MatrixXd values(n, n);
    for (std::size_t i = 0; i < grid.points_per_axis; ++i) {
        for (std::size_t k = 0; k < grid.points_per_axis; ++k) {
            values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = w(grid.x(i), grid.p(k));
        }
    }
    return WignerField{grid, std::move(values), std::move(label)};
}

}  // namespace

void WignerGrid::validate() const {
    if (!(x_min < x_max) || !(p_min < p_max) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
        !std::isfinite(p_min) || !std::isfinite(p_max)) {
        throw DomainError("Wigner grid bounds must be finite and ordered");
    }
    if (points_per_axis < 2) {
        throw DomainError("Wigner grid needs at least two points per axis");
    }
    if (!std::isfinite(hbar) || hbar <= 0.0) {
        throw DomainError("hbar must be positive");
    }
}

double WignerGrid::x(std::size_t i) const {
    return i + 1 == points_per_axis ? x_max : x_min + dx() * static_cast<double>(i);
}

double WignerGrid::p(std::size_t k) const {
    return k + 1 == points_per_axis ? p_max : p_min + dp() * static_cast<double>(k);
}

double WignerGrid::dx() const {
    return (x_max - x_min) / static_cast<double>(points_per_axis - 1);
}

double WignerGrid::dp() const {
    return (p_max - p_min) / static_cast<double>(points_per_axis - 1);
}

double diagonal_wigner(std::span<const double> diag, double r2, double hbar) {
    if (!std::isfinite(hbar) || hbar <= 0.0) {
        throw DomainError("hbar must be positive");
    }
    const double u = 2.0 * r2 / hbar;
    // Upward recurrence (k+1) L_{k+1} = (2k + 1 - u) L_k - k L_{k-1}.
    double l_prev = 0.0;
    double l_cur = 1.0;
    double sum = 0.0;
    for (std::size_t n = 0; n < diag.size(); ++n) {
        double sign = (n % 2 == 0) ? 1.0 : -1.0;
        sum += sign * diag[n] * l_cur;
        double k = static_cast<double>(n);
        double l_next = ((2.0 * k + 1.0 - u) * l_cur - k * l_prev) / (k + 1.0);
        l_prev = l_cur;
        l_cur = l_next;
    }
    return sum * std::exp(-r2 / hbar) / (std::numbers::pi * hbar);
}

double fock_wigner(long long n, double x, double p, double hbar) {
    if (n < 0) {
        throw DomainError("Fock index must be nonnegative");
    }
    std::vector<double> diag(static_cast<std::size_t>(n) + 1, 0.0);
    diag.back() = 1.0;
    return diagonal_wigner(diag, x * x + p * p, hbar);
}

WignerField povm_wigner(const PovmElement &element, const WignerGrid &grid) {
    return sample_field(grid, "outcome " + std::to_string(element.outcome_label),
                        [&](double x, double p) { return diagonal_wigner(element.diag, x * x + p * p, grid.hbar); });
}

WignerField fock_state_wigner(const FockDistribution &state, const WignerGrid &grid) {
    return sample_field(grid, "fock mixture",
                        [&](double x, double p) { return diagonal_wigner(state.probs(), x * x + p * p, grid.hbar); });
}

WignerField coherent_state_wigner(const CoherentAmplitude &amp, const WignerGrid &grid) {
    const double scale = std::sqrt(2.0 * grid.hbar) * amp.modulus();
    const double x0 = scale * std::cos(amp.phase());
    const double p0 = scale * std::sin(amp.phase());
    return sample_field(grid, "coherent <n>=" + format_double(amp.mean_photon()), [&](double x, double p) {
        double r2 = (x - x0) * (x - x0) + (p - p0) * (p - p0);
        return std::exp(-r2 / grid.hbar) / (std::numbers::pi * grid.hbar);
    });
}

double wigner_volume(const WignerField &field) {
    const auto &g = field.grid;
    double sum = 0.0;
    for (std::size_t i = 0; i < g.points_per_axis; ++i) {
        for (std::size_t k = 0; k < g.points_per_axis; ++k) {
            sum += trapezoid_weight(i, g.points_per_axis) * trapezoid_weight(k, g.points_per_axis) *
                   field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k));
        }
    }
    return sum * g.dx() * g.dp();
}

double wigner_overlap(const WignerField &state_field, const WignerField &detector_field) {
    if (!(state_field.grid == detector_field.grid)) {
        throw DomainError("Wigner fields are sampled on different grids");
    }
    WignerField product{state_field.grid, state_field.values.cwiseProduct(detector_field.values), "product"};
    return 2.0 * std::numbers::pi * state_field.grid.hbar * wigner_volume(product);
}

int radial_nodes(const PovmElement &element, double r_max, std::size_t samples, double hbar) {
    if (!std::isfinite(r_max) || r_max <= 0.0) {
        throw DomainError("r_max must be positive");
    }
    if (samples < 100) {
        throw DomainError("radial node counting needs at least 100 samples");
    }
    if (element.diag.empty()) {
        throw DomainError("POVM element has no entries");
    }
    std::vector<double> w(samples);
    double peak = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
        double r = r_max * static_cast<double>(i + 1) / static_cast<double>(samples);
        w[i] = diagonal_wigner(element.diag, r * r, hbar);
        peak = std::max(peak, std::abs(w[i]));
    }
    int nodes = 0;
    int last_sign = 0;
    for (double value : w) {
        if (std::abs(value) <= kNodeFloor * peak) {
            continue;
        }
        int sign = value > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) {
            ++nodes;
        }
        last_sign = sign;
    }
    return nodes;
}

void write_wigner_csv(std::ostream &out, const WignerField &field) {
    out << "x,p,W\n";
    const auto &g = field.grid;
    for (std::size_t i = 0; i < g.points_per_axis; ++i) {
        for (std::size_t k = 0; k < g.points_per_axis; ++k) {
            out << format_double(g.x(i)) << ',' << format_double(g.p(k)) << ','
                << format_double(field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))) << '\n';
        }
    }
}

void write_wigner_matrix(std::ostream &out, const WignerField &field) {
    const auto &g = field.grid;
    out << g.points_per_axis;
    for (std::size_t k = 0; k < g.points_per_axis; ++k) {
        out << ' ' << format_double(g.p(k));
    }
    out << '\n';
    for (std::size_t i = 0; i < g.points_per_axis; ++i) {
        out << format_double(g.x(i));
        for (std::size_t k = 0; k < g.points_per_axis; ++k) {
            out << ' ' << format_double(field.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        }
        out << '\n';
    }
}

void write_cross_section_csv(std::ostream &out, const PovmElement &element, double r_max, std::size_t samples,
                             double hbar) {
    if (!std::isfinite(r_max) || r_max <= 0.0 || samples < 2) {
        throw DomainError("cross section needs r_max > 0 and at least two samples");
    }
    out << "r,W\n";
    for (std::size_t i = 0; i < samples; ++i) {
        double r = i + 1 == samples ? r_max : r_max * static_cast<double>(i) / static_cast<double>(samples - 1);
        out << format_double(r) << ',' << format_double(diagonal_wigner(element.diag, r * r, hbar)) << '\n';
    }
}

}  // namespace povm_forge
