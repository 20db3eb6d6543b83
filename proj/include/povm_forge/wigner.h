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

#ifndef POVM_FORGE_WIGNER_H
#define POVM_FORGE_WIGNER_H

#include <Eigen/Dense>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "povm_forge/detector.h"
#include "povm_forge/fock.h"

namespace povm_forge {

/// Square sampling of the (x, p) quadrature plane. Quadratures are in units
/// where the vacuum has variance hbar / 2.
struct WignerGrid {
    double x_min = -6.0;
    double x_max = 6.0;
    double p_min = -6.0;
    double p_max = 6.0;
    std::size_t points_per_axis = 301;
    double hbar = 1.0;

    /// Throws DomainError on unordered bounds, fewer than 2 points or hbar <= 0.
    void validate() const;
    double x(std::size_t i) const;
    double p(std::size_t k) const;
    double dx() const;
    double dp() const;

    bool operator==(const WignerGrid &) const = default;
};

struct WignerField {
    WignerGrid grid;
    Eigen::MatrixXd values;  // [x index, p index]
    std::string label;
};

/// Wigner function of the Fock projector |n><n|:
/// ((-1)^n / (pi hbar)) exp(-r^2/hbar) L_n(2 r^2 / hbar), r^2 = x^2 + p^2.
double fock_wigner(long long n, double x, double p, double hbar = 1.0);

/// W of a diagonal operator sum_n diag[n] |n><n| at radius^2 r2. One upward
/// Laguerre recurrence serves every n.
double diagonal_wigner(std::span<const double> diag, double r2, double hbar = 1.0);

WignerField povm_wigner(const PovmElement &element, const WignerGrid &grid);

/// Wigner function of a photon-number mixture (phase-averaged state).
WignerField fock_state_wigner(const FockDistribution &state, const WignerGrid &grid);

/// Displaced vacuum centred at (sqrt(2 hbar) |alpha| cos(phase), sqrt(2 hbar) |alpha| sin(phase)).
WignerField coherent_state_wigner(const CoherentAmplitude &amp, const WignerGrid &grid);

/// 2 pi hbar times the trapezoid-rule integral of W_state * W_detector: the
/// outcome probability. Throws DomainError when the grids differ.
double wigner_overlap(const WignerField &state_field, const WignerField &detector_field);

/// Trapezoid-rule integral of the field over its grid.
double wigner_volume(const WignerField &field);

/// Sign changes of W(r, 0) over r in (0, r_max] sampled at `samples` evenly
/// spaced radii. Samples with |W| <= 1e-9 max|W| are skipped so round-off
/// near true zeros does not register as extra nodes.
int radial_nodes(const PovmElement &element, double r_max, std::size_t samples, double hbar = 1.0);

/// Rows of (x, p, W) with header x,p,W, x outer, p inner.
void write_wigner_csv(std::ostream &out, const WignerField &field);

/// gnuplot "nonuniform matrix" layout: first row is the point count followed
/// by the p coordinates; each later row is an x coordinate followed by W(x, p_k).
void write_wigner_matrix(std::ostream &out, const WignerField &field);

/// Radial profile W(r, 0) for r evenly spaced on [0, r_max]; header r,W.
void write_cross_section_csv(std::ostream &out, const PovmElement &element, double r_max, std::size_t samples,
                             double hbar = 1.0);

}  // namespace povm_forge

#endif  // POVM_FORGE_WIGNER_H
