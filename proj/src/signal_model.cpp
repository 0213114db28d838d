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

#include "nvghz/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nvghz/errors.hpp"

namespace nvghz {

namespace {

constexpr double kPerturbativeLimit = 1e-2;

double cube(double x) { return x * x * x; }

// (t / T)^3 with T = +inf meaning no dephasing.
double decay_argument(double t, double t2) {
  return std::isinf(t2) ? 0.0 : cube(t / t2);
}

double pow4(double x) {
  const double x2 = x * x;
  return x2 * x2;
}

int dirichlet_count(int n_dd, DirichletCount count) {
  return count == DirichletCount::half ? (n_dd + 1) / 2 : n_dd + 1;
}

// 32 G^2 sin^4(w tau / 2) R^2 Gamma / w^2: the G^2 loss in <M_x> before decay.
double dd_deficit(const ProtocolParams& p, double gamma_sep, DirichletCount count) {
  const double w = p.omega_target;
  const double ratio = dirichlet_ratio(dirichlet_count(p.n_dd, count), w * p.tau);
  const double s = std::sin(0.5 * w * p.tau);
  return 32.0 * p.coupling_G * p.coupling_G * pow4(s) / (w * w) * ratio * ratio * gamma_sep;
}

double ghz_coherence(const ProtocolParams& p, int decay_power) {
  const double ratio = std::isinf(p.t2_echo) ? 0.0 : 2.0 * p.tau / p.t2_echo;
  return std::exp(-p.probe_count * std::pow(ratio, decay_power));
}

// 16 G^2 sin^4(w tau / 2) Gamma / w^2, before the coherence factor.
double ghz_deficit(const ProtocolParams& p, double gamma_ent) {
  const double w = p.omega_target;
  const double s = std::sin(0.5 * w * p.tau);
  return 16.0 * p.coupling_G * p.coupling_G / (w * w) * pow4(s) * gamma_ent;
}

}  // namespace

double ProtocolParams::measurement_count() const {
  if (!total_time) throw DomainError("measurement_count: no total_time budget supplied");
  return *total_time / interaction_time();
}

void ProtocolParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("ProtocolParams: tau must be > 0");
  if (n_dd < 1 || n_dd % 2 == 0) throw DomainError("ProtocolParams: n_dd must be odd and >= 1");
  if (!(omega_target > 0.0)) throw DomainError("ProtocolParams: omega_target must be > 0");
  if (!(t2_echo > 0.0)) throw DomainError("ProtocolParams: t2_echo must be > 0");
  if (!(probe_count > 0.0)) throw DomainError("ProtocolParams: probe count L must be > 0");
  if (!(nuclear_count > 0.0)) throw DomainError("ProtocolParams: nuclear count M must be > 0");
  if (!(coupling_G >= 0.0)) throw DomainError("ProtocolParams: coupling_G must be >= 0");
  if (total_time && !(measurement_count() >= 1.0)) {
    throw DomainError("ProtocolParams: total_time must allow at least one measurement");
  }
}

std::string_view to_string(Provenance provenance) {
  return provenance == Provenance::published_formula ? "published_formula"
                                                     : "rederived_numeric";
}

double dirichlet_ratio(int count, double x) {
  if (count < 1) throw DomainError("dirichlet_ratio: count must be >= 1");
  const double c = std::cos(x);
  double prev = 1.0;      // U_0
  double cur = 2.0 * c;   // U_1
  if (count == 1) return prev;
  for (int k = 2; k < count; ++k) {
    const double next = 2.0 * c * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double t2_dd(double t2_echo, int n_dd) {
  if (!(t2_echo > 0.0)) throw DomainError("t2_dd: t2_echo must be > 0");
  if (n_dd < 1 || n_dd % 2 == 0) {
    throw DomainError("t2_dd: n_dd must be odd and >= 1, got " + std::to_string(n_dd));
  }
  if (n_dd == 1) return t2_echo;
  return t2_echo * std::cbrt(static_cast<double>(n_dd) * n_dd);
}

ObservableValue expectation_mx(const ProtocolParams& params, double gamma_sep,
                               ExpectationVariant variant) {
  params.validate();
  const double x = decay_argument(params.interaction_time(), t2_dd(params.t2_echo, params.n_dd));
  const double deficit = dd_deficit(params, gamma_sep, variant.count);
  const double G = params.coupling_G;
  const double w = params.omega_target;

  ObservableValue out;
  out.value = std::exp(-variant.decay_exponent * x) * (params.probe_count - deficit);
  const double rms = G * std::sqrt(gamma_sep / (params.nuclear_count * params.probe_count)) / w;
  out.non_perturbative = rms > kPerturbativeLimit || deficit > params.probe_count;
  return out;
}

double variance_mx(const ProtocolParams& params) {
  params.validate();
  const double x = decay_argument(params.interaction_time(), t2_dd(params.t2_echo, params.n_dd));
  return -params.probe_count * std::expm1(-2.0 * x);
}

ObservableValue p_ghz(const ProtocolParams& params, double gamma_ent, int decay_power) {
  params.validate();
  if (params.n_dd != 1) throw DomainError("p_ghz: the entangled protocol is a single echo (n_dd = 1)");
  const double coherence = ghz_coherence(params, decay_power);
  const double G = params.coupling_G;
  const double w = params.omega_target;

  ObservableValue out;
  out.value = 0.5 * (1.0 + coherence) - coherence * ghz_deficit(params, gamma_ent);
  out.non_perturbative = G * std::sqrt(gamma_ent / params.nuclear_count) / w > kPerturbativeLimit;
  if (out.value < 0.0 || out.value > 1.0) {
    out.value = std::clamp(out.value, 0.0, 1.0);
    out.clamped = true;
    out.non_perturbative = true;
  }
  return out;
}

DetectionResult snr_dd(const ProtocolParams& params, double gamma_sep, double n_measurements) {
  if (!(n_measurements >= 1.0)) throw DomainError("snr_dd: N_m must be >= 1");
  const double variance = variance_mx(params);
  if (!(variance > 0.0)) throw DegenerateInputError("snr_dd: zero variance (t = 0 or T2 infinite)");
  const double x = decay_argument(params.interaction_time(), t2_dd(params.t2_echo, params.n_dd));

  DetectionResult out;
  // The deficit directly, not baseline - <M_x>: that difference cancels to
  // rounding when the G^2 term is small against L.
  out.signal = std::exp(-x) * std::abs(dd_deficit(params, gamma_sep, DirichletCount::half));
  out.noise = std::sqrt(variance / n_measurements);
  out.snr = out.signal / out.noise;
  // snr grows as sqrt(N_m) = sqrt(T / t).
  out.t_detect = params.interaction_time() * n_measurements / (out.snr * out.snr);
  out.provenance = Provenance::rederived_numeric;
  return out;
}

DetectionResult snr_ghz(const ProtocolParams& params, double gamma_ent, double n_measurements) {
  if (!(n_measurements >= 1.0)) throw DomainError("snr_ghz: N_m must be >= 1");
  const double p0 = p_ghz(params, 0.0).value;
  // Binomial noise at leading order, i.e. at the G = 0 probability.
  const double variance = p0 * (1.0 - p0);
  if (!(variance > 0.0)) throw DegenerateInputError("snr_ghz: zero variance (t = 0 or T2 infinite)");

  DetectionResult out;
  out.signal = ghz_coherence(params, 3) * std::abs(ghz_deficit(params, gamma_ent));
  out.noise = std::sqrt(variance / n_measurements);
  out.snr = out.signal / out.noise;
  out.t_detect = params.interaction_time() * n_measurements / (out.snr * out.snr);
  out.provenance = Provenance::rederived_numeric;
  return out;
}

DetectionResult t_detect_dd_published(const PhysicalScenario& scenario,
                                      const EnsembleGeometry& geom, double t2_echo,
                                      double nuclear_count, int n_dd) {
  if (!(t2_echo > 0.0)) throw DomainError("t_detect_dd_published: t2_echo must be > 0");
  if (!(nuclear_count > 0.0)) throw DomainError("t_detect_dd_published: M must be > 0");
  if (n_dd < 1 || n_dd % 2 == 0) throw DomainError("t_detect_dd_published: n_dd must be odd");
  const double G = scenario.coupling_G();
  const double z = geom.z_min();
  const double z9 = cube(cube(z));
  const double n = static_cast<double>(n_dd);
  DetectionResult out{1.0, 1.0, 1.0, 0.0, Provenance::published_formula};
  out.t_detect = c_dd_published / cube(t2_echo) / pow4(G) * z9 /
                 (geom.rho_nv() * nuclear_count * nuclear_count) / (n * n);
  return out;
}

DetectionResult t_detect_ent_published(const PhysicalScenario& scenario,
                                       const EnsembleGeometry& geom, double t2_echo,
                                       double nuclear_count) {
  if (!(t2_echo > 0.0)) throw DomainError("t_detect_ent_published: t2_echo must be > 0");
  if (!(nuclear_count > 0.0)) throw DomainError("t_detect_ent_published: M must be > 0");
  const double G = scenario.coupling_G();
  DetectionResult out{1.0, 1.0, 1.0, 0.0, Provenance::published_formula};
  out.t_detect = c_ent_published / cube(t2_echo) / pow4(G) * cube(geom.z_min()) /
                 (cube(geom.rho_nv()) * nuclear_count * nuclear_count);
  return out;
}

double t_detect_ratio(const PhysicalScenario& scenario, const EnsembleGeometry& geom,
                      double t2_echo, double nuclear_count, int n_dd) {
  return t_detect_dd_published(scenario, geom, t2_echo, nuclear_count, n_dd).t_detect /
         t_detect_ent_published(scenario, geom, t2_echo, nuclear_count).t_detect;
}

double f_dd(double tau, const ProtocolParams& params, DirichletCount count) {
  ProtocolParams p = params;
  p.tau = tau;
  p.validate();
  if (!(p.coupling_G > 0.0)) throw DivergenceError("f_dd: no signal at G = 0");
  const double w = p.omega_target;
  const double t = p.interaction_time();
  const double x = decay_argument(t, t2_dd(p.t2_echo, p.n_dd));
  const double s = std::sin(0.5 * w * tau);
  const double ratio = dirichlet_ratio(dirichlet_count(p.n_dd, count), w * tau);
  const double denom = pow4(s * s) * pow4(ratio);
  // s^2 R peaks at the pulse count; below rounding of that the signal is zero.
  const double amplitude = std::abs(s * s * ratio);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * dirichlet_count(p.n_dd, count);
  if (!(denom > 0.0) || amplitude <= floor) {
    throw DivergenceError("f_dd: the signal vanishes at tau = " + std::to_string(tau) + " s");
  }
  const double scale = w * w / (32.0 * p.coupling_G * p.coupling_G);
  return t * std::expm1(2.0 * x) / denom * scale * scale;
}

double f_ent(double tau_bar, const ProtocolParams& params) {
  ProtocolParams barred = params;
  const double l3 = std::cbrt(params.probe_count);
  barred.n_dd = 1;
  barred.omega_target = params.omega_target / l3;
  barred.probe_count = 1.0;
  return f_dd(tau_bar, barred, DirichletCount::half);
}

}  // namespace nvghz
