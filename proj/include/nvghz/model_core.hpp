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

// Physical constants, unit conventions, probe-ensemble geometry and the
// secular dipole coefficients shared by every other module.
//
// Units are SI throughout: m, s, T, rad/s. Densities quoted in cm^-3 are
// converted with per_cm3() at the boundary.

#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace nvghz {

using Vec3 = Eigen::Vector3d;

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double mu0 = 1.25663706212e-6;     // T m / A
inline constexpr double hbar = 1.054571817e-34;     // J s
inline constexpr double proton_gamma_hz_per_t = 42.0e6;
inline constexpr double nv_gamma_hz_per_t = 28.024e9;
// Bias field used to place the proton Larmor line when a scenario does not
// specify one. Only the free-tau constant re-derivation depends on it.
inline constexpr double default_bias_field_t = 0.1;
}  // namespace constants

/// Converts a density given per cm^3 to per m^3.
constexpr double per_cm3(double value) { return value * 1.0e6; }

/// How gyromagnetic ratios enter the coupling G.
///   angular: G = mu0 * hbar * gT * gP / (16 pi), in rad/s m^3.
///   cyclic:  the same G expressed as a cyclic frequency, G_angular / (2 pi).
/// The published detection-time constants are calibrated against `cyclic`.
enum class GammaConvention { angular, cyclic };

std::string_view to_string(GammaConvention convention);
GammaConvention parse_gamma_convention(std::string_view text);

class PhysicalScenario {
 public:
  /// Gyromagnetic ratios in rad s^-1 T^-1, frequencies in rad/s.
  static PhysicalScenario make(double gamma_target, double gamma_probe,
                               GammaConvention convention, double omega_target,
                               double omega_probe = 0.0);

  /// Protons sensed by NV electron spins at `bias_field` tesla.
  static PhysicalScenario proton_nv(GammaConvention convention = GammaConvention::cyclic,
                                    double bias_field = constants::default_bias_field_t);

  double gamma_target() const { return gamma_target_; }
  double gamma_probe() const { return gamma_probe_; }
  GammaConvention gamma_convention() const { return convention_; }
  double omega_target() const { return omega_target_; }
  // Rotating-frame bookkeeping only; no computed quantity reads it.
  double omega_probe() const { return omega_probe_; }
  double coupling_G() const { return coupling_G_; }

  /// True when the cached coupling matches a fresh evaluation.
  bool consistent() const;

  PhysicalScenario with_convention(GammaConvention convention) const;

 private:
  PhysicalScenario() = default;

  double gamma_target_ = 0.0;
  double gamma_probe_ = 0.0;
  GammaConvention convention_ = GammaConvention::cyclic;
  double omega_target_ = 0.0;
  double omega_probe_ = 0.0;
  double coupling_G_ = 0.0;
};

/// Effective nucleus-probe coupling G. Throws DomainError on non-positive
/// gyromagnetic ratios.
double coupling_constant(double gamma_target, double gamma_probe, GammaConvention convention);
double coupling_constant(const PhysicalScenario& scenario);

/// Probe ensemble filling the half cylinder
///   { x >= 0, x^2 + y^2 <= r_max^2, z_min <= z <= z_max }.
/// A zero-height region (z_max == z_min) is admitted; it is the zero-volume
/// limit of the continuum formulas.
class EnsembleGeometry {
 public:
  static EnsembleGeometry make(double z_min, double z_max, double r_max, double rho_nv);
  static EnsembleGeometry from_dimensionless(double z_min, double r_tilde, double z_tilde,
                                             double rho_nv);

  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  double r_max() const { return r_max_; }
  double rho_nv() const { return rho_nv_; }
  double r_tilde() const { return r_tilde_; }
  double z_tilde() const { return z_tilde_; }
  double volume() const;

  bool contains(const Vec3& p, double slack = 0.0) const;

  EnsembleGeometry with_rho(double rho_nv) const;
  EnsembleGeometry with_z_min(double z_min) const;

 private:
  EnsembleGeometry() = default;

  double z_min_ = 0.0;
  double z_max_ = 0.0;
  double r_max_ = 0.0;
  double rho_nv_ = 0.0;
  double r_tilde_ = 0.0;
  double z_tilde_ = 0.0;
};

enum class SpinRole { nuclear, probe };

struct SpinSite {
  Vec3 position = Vec3::Zero();
  SpinRole role = SpinRole::probe;
};

/// A(r), B(r), C(r) in m^-3.
struct DipoleCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

/// Coefficients for the relative vector r_kj = r_nucleus - r_probe.
/// Throws SingularityError for the zero vector.
DipoleCoefficients dipole_coefficients(const Vec3& rel);

/// Continuum probe count rho * (pi/2) r_max^2 (z_max - z_min). Not rounded.
double probe_count(const EnsembleGeometry& geom);

/// n probe sites drawn i.i.d. uniformly from the half cylinder. Deterministic
/// for a fixed seed.
std::vector<SpinSite> sample_probe_sites(const EnsembleGeometry& geom, std::size_t n,
                                         std::uint64_t seed);

/// NV ensemble parameters measured for the three reference samples.
struct NvPreset {
  std::string_view name;
  double t2_echo;  // s
  double rho_nv;   // m^-3
};

namespace presets {
inline constexpr NvPreset NV1{"NV1", 8.3e-5, per_cm3(1.1e17)};
inline constexpr NvPreset NV2{"NV2", 4.5e-6, per_cm3(1.1e18)};
inline constexpr NvPreset NV3{"NV3", 3.1e-4, per_cm3(1.8e18)};
// 1.0e22 cm^-3 protons in a (50 nm)^3 cube.
inline constexpr double nuclear_count = 1.25e6;
inline constexpr int n_dd = 63;
}  // namespace presets

}  // namespace nvghz
