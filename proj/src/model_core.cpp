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

#include "nvghz/model_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "nvghz/errors.hpp"

namespace nvghz {

std::string_view to_string(GammaConvention convention) {
  return convention == GammaConvention::angular ? "angular" : "cyclic";
}

GammaConvention parse_gamma_convention(std::string_view text) {
  if (text == "angular") return GammaConvention::angular;
  if (text == "cyclic") return GammaConvention::cyclic;
  throw DomainError("unknown gamma convention '" + std::string(text) +
                    "' (expected angular or cyclic)");
}

double coupling_constant(double gamma_target, double gamma_probe, GammaConvention convention) {
  if (!(gamma_target > 0.0) || !(gamma_probe > 0.0)) {
    throw DomainError("coupling_constant: gyromagnetic ratios must be positive");
  }
  const double angular = constants::mu0 * constants::hbar * gamma_target * gamma_probe /
                         (16.0 * constants::pi);
  return convention == GammaConvention::angular ? angular : angular / constants::two_pi;
}

double coupling_constant(const PhysicalScenario& scenario) {
  return coupling_constant(scenario.gamma_target(), scenario.gamma_probe(),
                           scenario.gamma_convention());
}

PhysicalScenario PhysicalScenario::make(double gamma_target, double gamma_probe,
                                        GammaConvention convention, double omega_target,
                                        double omega_probe) {
  if (!(omega_target > 0.0)) {
    throw DomainError("PhysicalScenario: omega_target must be positive");
  }
  PhysicalScenario s;
  s.gamma_target_ = gamma_target;
  s.gamma_probe_ = gamma_probe;
  s.convention_ = convention;
  s.omega_target_ = omega_target;
  s.omega_probe_ = omega_probe;
  s.coupling_G_ = coupling_constant(gamma_target, gamma_probe, convention);
  return s;
}

PhysicalScenario PhysicalScenario::proton_nv(GammaConvention convention, double bias_field) {
  const double gamma_t = constants::two_pi * constants::proton_gamma_hz_per_t;
  const double gamma_p = constants::two_pi * constants::nv_gamma_hz_per_t;
  return make(gamma_t, gamma_p, convention, gamma_t * bias_field, gamma_p * bias_field);
}

bool PhysicalScenario::consistent() const {
  return coupling_G_ == coupling_constant(gamma_target_, gamma_probe_, convention_);
}

PhysicalScenario PhysicalScenario::with_convention(GammaConvention convention) const {
  return make(gamma_target_, gamma_probe_, convention, omega_target_, omega_probe_);
}

EnsembleGeometry EnsembleGeometry::make(double z_min, double z_max, double r_max,
                                        double rho_nv) {
  std::string problems;
  if (!(z_min > 0.0)) problems += " z_min must be positive;";
  if (!(z_max >= z_min)) problems += " z_max must be >= z_min;";
  if (!(r_max > 0.0)) problems += " r_max must be positive;";
  if (!(rho_nv > 0.0)) problems += " rho_nv must be positive;";
  if (!problems.empty()) throw DomainError("EnsembleGeometry:" + problems);

  EnsembleGeometry g;
  g.z_min_ = z_min;
  g.z_max_ = z_max;
  g.r_max_ = r_max;
  g.rho_nv_ = rho_nv;
  g.r_tilde_ = r_max / z_min;
  g.z_tilde_ = z_max / z_min;
  return g;
}

EnsembleGeometry EnsembleGeometry::from_dimensionless(double z_min, double r_tilde,
                                                      double z_tilde, double rho_nv) {
  if (!(z_tilde >= 1.0)) throw DomainError("EnsembleGeometry: z_tilde must be >= 1");
  EnsembleGeometry g = make(z_min, z_min * z_tilde, z_min * r_tilde, rho_nv);
  // Keep the dimensionless pair bit-exact rather than re-deriving it.
  g.r_tilde_ = r_tilde;
  g.z_tilde_ = z_tilde;
  return g;
}

double EnsembleGeometry::volume() const {
  return 0.5 * constants::pi * r_max_ * r_max_ * (z_max_ - z_min_);
}

bool EnsembleGeometry::contains(const Vec3& p, double slack) const {
  const double r2 = p.x() * p.x() + p.y() * p.y();
  const double rmax = r_max_ * (1.0 + slack);
  return p.x() >= 0.0 && r2 <= rmax * rmax && p.z() >= z_min_ * (1.0 - slack) &&
         p.z() <= z_max_ * (1.0 + slack);
}

EnsembleGeometry EnsembleGeometry::with_rho(double rho_nv) const {
  return from_dimensionless(z_min_, r_tilde_, z_tilde_, rho_nv);
}

EnsembleGeometry EnsembleGeometry::with_z_min(double z_min) const {
  return from_dimensionless(z_min, r_tilde_, z_tilde_, rho_nv_);
}

DipoleCoefficients dipole_coefficients(const Vec3& rel) {
  const double r2 = rel.squaredNorm();
  if (!(r2 > 0.0)) {
    throw SingularityError("dipole_coefficients: probe coincides with nucleus");
  }
  const double r = std::sqrt(r2);
  const double inv_r3 = 1.0 / (r2 * r);
  const double inv_r5 = inv_r3 / r2;
  const double z = rel.z();
  return {-3.0 * rel.x() * z * inv_r5, -3.0 * rel.y() * z * inv_r5,
          inv_r3 * (1.0 - 3.0 * z * z / r2)};
}

double probe_count(const EnsembleGeometry& geom) { return geom.rho_nv() * geom.volume(); }

std::vector<SpinSite> sample_probe_sites(const EnsembleGeometry& geom, std::size_t n,
                                         std::uint64_t seed) {
  std::vector<SpinSite> sites;
  sites.reserve(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    // Area-uniform radius, half-plane angle.
    // The shrink factor keeps x^2 + y^2 <= r_max^2 under rounding.
    const double s = geom.r_max() * std::sqrt(unit(rng)) *
                     (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    const double phi = constants::pi * (unit(rng) - 0.5);
    const double z =
        std::min(geom.z_max(), geom.z_min() + (geom.z_max() - geom.z_min()) * unit(rng));
    SpinSite site;
    site.position = Vec3(std::max(0.0, s * std::cos(phi)), s * std::sin(phi), z);
    site.role = SpinRole::probe;
    sites.push_back(site);
  }
  return sites;
}

}  // namespace nvghz
