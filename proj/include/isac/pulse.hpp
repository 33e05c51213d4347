// SPDX-License-Identifier: Apache-2.0
//
// isac-sim: sensing performance analysis under random communication signaling
// Copyright (C) 2026 The isac-sim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cstddef>
#include <vector>

#include "isac/types.hpp"

namespace isac {

/// Zero-phase Nyquist pulse described by its squared-magnitude spectrum.
///
/// The frequency grid has spacing 1 / (span * T), so a shift by 1/T moves
/// exactly `span` grid points and the folded-spectrum (Nyquist) condition is
/// a set of linear equalities. The time pulse is sampled at T / oversampling
/// over one period of span * T.
struct PulseSpec {
    double symbol_period = 1.0;  // T, seconds
    double rolloff = 0.0;        // bandwidth cap (1 + rolloff) / (2T)
    std::size_t oversampling = 16;
    std::size_t span = 16;

    RVector freq;      // f_i = i / (span T), i = -I..I
    RVector spectrum;  // G(f_i) = |P(f_i)|^2 in seconds; folds to T

    /// p_n = sqrt(T) p(n T / oversampling), n = -L/2..L/2-1, L = oversampling * span.
    /// Dimensionless with sum p_n^2 = oversampling.
    RVector taps;

    std::size_t half_band() const { return static_cast<std::size_t>(freq.size() / 2); }
    double sample_rate() const { return static_cast<double>(oversampling) / symbol_period; }
    std::size_t center_tap() const { return static_cast<std::size_t>(taps.size() / 2); }
    /// G(f_i) / T for i = 0..I
    RVector half_spectrum() const;
};

/// g(tau) = integral of G(f) exp(j 2 pi f tau) df on tau_n = n T / oversampling,
/// n = -L/2..L/2.
struct PulseAcf {
    RVector tau;  // seconds
    RVector g;

    double at(long n) const { return g[static_cast<Eigen::Index>(n + (g.size() - 1) / 2)]; }
};

struct RegionIslr {
    double tau_begin = 0.0;  // seconds
    double tau_end = 0.0;
    double value_db = 0.0;
};

PulseSpec rrc_pulse(double symbol_period, double rolloff, std::size_t oversampling = 16, std::size_t span = 16);

/// Pulse with half spectrum u_i = G(f_i) / T, i = 0..I (I set by the rolloff).
PulseSpec pulse_from_half_spectrum(double symbol_period, double rolloff, std::size_t oversampling, std::size_t span,
                                   const RVector& half);

PulseAcf pulse_acf(const PulseSpec& p);

/// 10 log10( sum_{tau in [begin, end]} g(tau)^2 / g(0)^2 ) over grid delays.
RegionIslr region_islr(const PulseSpec& p, double tau_begin, double tau_end);

/// max_{1 <= |k| <= kmax} |g(kT)| / g(0)
double nyquist_defect(const PulseSpec& p, std::size_t kmax = 8);

/// max_r |sum_{i = r mod span} G_i / T - 1|
double folded_spectrum_defect(const PulseSpec& p);

/// Upsamples by the pulse oversampling and circularly convolves with the taps.
CVector shape_signal(const CVector& symbols, const PulseSpec& pulse);

/// Euclidean projection onto {u : A u = b, u >= 0} by Dykstra's alternating
/// projections between the affine set and the nonnegative orthant.
class AffineNonnegProjector {
  public:
    AffineNonnegProjector(Eigen::MatrixXd a, RVector b);

    RVector project_affine(const RVector& v) const;
    RVector project(const RVector& v, double tol = 1e-14, std::size_t max_iters = 200000) const;
    double affine_residual(const RVector& u) const { return (a_ * u - b_).cwiseAbs().maxCoeff(); }

    const Eigen::MatrixXd& a() const { return a_; }
    const RVector& b() const { return b_; }

  private:
    Eigen::MatrixXd a_;
    RVector b_;
    Eigen::MatrixXd pinv_;  // A^T (A A^T)^+
};

/// Nyquist folded-spectrum equalities on the half spectrum: one row per
/// residue class r = 0..span/2, right-hand side 1.
AffineNonnegProjector nyquist_constraints(double rolloff, std::size_t span);

struct PulseDesign {
    PulseSpec pulse;
    std::vector<double> objective_history;  // region ISL after each accepted step
    std::size_t iterations = 0;
    bool converged = false;
    double islr_before_db = 0.0;  // raised-cosine starting point
    double islr_after_db = 0.0;
};

/// Minimizes the region ISL of the pulse ACF over [tau_begin, tau_end] by
/// projected gradient on G subject to G >= 0, spectral symmetry, the bandwidth
/// cap and the Nyquist equalities. Starts from the raised cosine.
PulseDesign design_pulse(double symbol_period, double rolloff, std::size_t oversampling, std::size_t span,
                         double tau_begin, double tau_end, std::size_t max_iters = 5000, double tol = 1e-10);

}  // namespace isac
