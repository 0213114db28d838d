// Copyright 2026 The nvghz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Closed-form protocol observables and the SNR / detection-time chain.
//
// Conventional protocol: n_DD pi pulses spaced by tau on L separable probes,
// interaction time t = (n_DD + 1) tau. Entangled protocol: one spin echo
// (t = 2 tau) on an L-qubit GHZ probe.

#include <optional>
#include <string_view>

#include "nvghz/model_core.hpp"

namespace nvghz {

struct ProtocolParams {
  double tau = 0.0;           // s
  int n_dd = 1;               // odd pulse count
  double omega_target = 0.0;  // rad/s
  double t2_echo = 0.0;       // s; +infinity switches dephasing off
  double probe_count = 1.0;   // L, not necessarily integral in the continuum
  double nuclear_count = 1.0; // M
  double coupling_G = 0.0;    // rad/s m^3 (or cyclic, see GammaConvention)
  std::optional<double> total_time;  // s

  double interaction_time() const { return (n_dd + 1) * tau; }
  /// T / t; requires total_time.
  double measurement_count() const;

  /// Throws DomainError listing the first violated invariant.
  void validate() const;
};

enum class Provenance { published_formula, rederived_numeric };
std::string_view to_string(Provenance provenance);

struct DetectionResult {
  double signal = 0.0;
  double noise = 0.0;
  double snr = 0.0;
  double t_detect = 0.0;  // s
  Provenance provenance = Provenance::rederived_numeric;
};

/// Second-order observables carry flags rather than throwing when the input
/// leaves the perturbative regime.
struct ObservableValue {
  double value = 0.0;
  bool non_perturbative = false;  // RMS coupling above 1e-2 of omega
  bool clamped = false;           // result was forced back into [0, 1]
};

/// sin(count * x) / sin(x), evaluated by the second-kind Chebyshev recurrence
/// U_{count-1}(cos x); the removable points x = k pi give +-count.
double dirichlet_ratio(int count, double x);

/// T2 under n_dd pulses: t2_echo * n_dd^(2/3). Throws DomainError for even or
/// non-positive n_dd.
double t2_dd(double t2_echo, int n_dd);

/// How many tau-periods enter the pulse-sum ratio.
///   half:    N_DD = (n_DD + 1) / 2 echo pairs, sin(N_DD w tau) / sin(w tau).
///            This is what the exact simulation reproduces.
///   printed: sin(w t) / sin(w tau) with t = (n_DD + 1) tau.
enum class DirichletCount { half, printed };

struct ExpectationVariant {
  DirichletCount count = DirichletCount::half;
  int decay_exponent = 1;  // multiplier of (t/T2DD)^3 in the prefactor
};

/// <M_x> after the pulse train, second order in G.
ObservableValue expectation_mx(const ProtocolParams& params, double gamma_sep,
                               ExpectationVariant variant = {});

/// L (1 - exp(-2 (t/T2DD)^3)).
double variance_mx(const ProtocolParams& params);

/// GHZ return probability after one echo, second order in G. Requires
/// n_dd == 1. `decay_power` is the exponent of (2 tau / T2echo) in the
/// coherence factor.
ObservableValue p_ghz(const ProtocolParams& params, double gamma_ent, int decay_power = 3);

/// SNR after N_m repetitions; t_detect is the budget at which snr = 1.
/// Throw DegenerateInputError on zero noise.
DetectionResult snr_dd(const ProtocolParams& params, double gamma_sep, double n_measurements);
DetectionResult snr_ghz(const ProtocolParams& params, double gamma_ent, double n_measurements);

inline constexpr double c_dd_published = 0.0536;
inline constexpr double c_ent_published = 0.0107;

/// c_dd T2^-3 G^-4 z_min^9 / (rho M^2) n_dd^-2. signal = noise = snr = 1.
DetectionResult t_detect_dd_published(const PhysicalScenario& scenario,
                                      const EnsembleGeometry& geom, double t2_echo,
                                      double nuclear_count, int n_dd);
/// c_ent T2^-3 G^-4 z_min^3 / (rho^3 M^2).
DetectionResult t_detect_ent_published(const PhysicalScenario& scenario,
                                       const EnsembleGeometry& geom, double t2_echo,
                                       double nuclear_count);
/// (c_dd / c_ent) z_min^6 rho^2 / n_dd^2.
double t_detect_ratio(const PhysicalScenario& scenario, const EnsembleGeometry& geom,
                      double t2_echo, double nuclear_count, int n_dd);

/// t (e^{2 (t/T2DD)^3} - 1) / [sin^8(w tau / 2) R^4] (w^2 / 32 G^2)^2, so that
/// the detection time is f * L / Gamma_sep^2. Throws DivergenceError where
/// the signal vanishes.
double f_dd(double tau, const ProtocolParams& params,
            DirichletCount count = DirichletCount::half);

/// f_dd at n_dd = 1 in the rescaled variables tau_bar = tau L^(1/3),
/// w_bar = w / L^(1/3); detection time f_ent * L / Gamma_ent^2.
double f_ent(double tau_bar, const ProtocolParams& params);

}  // namespace nvghz
