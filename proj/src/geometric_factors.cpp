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

#include "nvghz/geometric_factors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "adaptive_quadrature.hpp"
#include "nvghz/errors.hpp"
#include "nvghz/kernels.hpp"

namespace nvghz {

namespace {

constexpr double kRequestedAbsError = 1e-10;

void check_shape(double r_tilde, double z_tilde, const char* who) {
  if (!(r_tilde > 0.0)) throw DomainError(std::string(who) + ": r_tilde must be positive");
  if (!(z_tilde >= 1.0)) throw DomainError(std::string(who) + ": z_tilde must be >= 1");
}

// Rational + arctan block of F_sep evaluated at height zz.
double sep_block(double r, double zz) {
  const double s = r * r + zz * zz;
  const double s3 = s * s * s;
  const double r3 = r * r * r;
  const double poly = -5.0 * r3 * r * r * zz + 8.0 * r3 * zz * zz * zz +
                      5.0 * r * zz * zz * zz * zz * zz + 5.0 * s3 * std::atan(zz / r);
  return poly / (16.0 * r3 * s3);
}

// log((sqrt(r^2 + a^2) + r) / (sqrt(r^2 + a^2) - r)), as typeset.
double log_ratio_verbatim(double r, double a) {
  const double root = std::sqrt(r * r + a * a);
  return std::log((root + r) / (root - r));
}

// For r~ < 1 the same function as a series in r~^2. Integrating the radial
// part exactly gives
//   F_sep = r^4 int_1^z (6 u^4 + 4 u^2 r^2 + r^4) / (u^4 (u^2 + r^2)^4) du,
// and expanding (6 + 4t + t^2) / (1 + t)^4 in t = r^2 / u^2 <= r^2 leaves
// only powers of u. The arctan and rational blocks each grow like r^-3 while
// F_sep shrinks like r^4, so the series is the accurate route at small r.
double f_sep_series(double r, double z) {
  const double r2 = r * r;
  const double log_z = std::log(z);
  auto binom = [](int k) {  // coefficient of t^k in (1 + t)^-4
    if (k < 0) return 0.0;
    const double mag = (k + 1.0) * (k + 2.0) * (k + 3.0) / 6.0;
    return (k % 2 == 0) ? mag : -mag;
  };
  double sum = 0.0;
  double r_pow = 1.0;  // r^(2k)
  for (int k = 0; k < 400; ++k) {
    const double c = 6.0 * binom(k) + 4.0 * binom(k - 1) + binom(k - 2);
    const double m = 7.0 + 2.0 * k;
    const double term = c * r_pow * (-std::expm1(-m * log_z)) / m;
    sum += term;
    if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
    r_pow *= r2;
  }
  return r2 * r2 * sum;
}

detail::QuadTolerance outer_tolerance() { return {1e-14, 1e-13, 4000}; }
detail::QuadTolerance inner_tolerance() { return {1e-16, 1e-14, 4000}; }

// Nested (s outer, z inner) integral of a cylindrical integrand on
// [0, r_tilde] x [1, z_tilde]. The inner error is folded into the estimate.
template <class Integrand>
QuadratureValue cylinder_integral(Integrand integrand, double r_tilde, double z_tilde,
                                  const char* who) {
  double worst_inner = 0.0;
  bool inner_ok = true;
  auto over_z = [&](double s) {
    const auto inner = detail::integrate([&](double z) { return integrand(s, z); }, 1.0, z_tilde,
                                         inner_tolerance());
    worst_inner = std::max(worst_inner, inner.error);
    inner_ok = inner_ok && inner.converged;
    return inner.value;
  };
  const auto outer = detail::integrate(over_z, 0.0, r_tilde, outer_tolerance());
  const double error = outer.error + r_tilde * worst_inner;
  if (!outer.converged || !inner_ok || error > kRequestedAbsError) {
    throw AccuracyError(std::string(who) + ": adaptive quadrature did not converge", outer.value,
                        error);
  }
  return {outer.value, error};
}

}  // namespace

std::string_view to_string(FactorMethod method) {
  switch (method) {
    case FactorMethod::discrete_sum: return "discrete_sum";
    case FactorMethod::closed_form_printed: return "closed_form_printed";
    case FactorMethod::closed_form_corrected: return "closed_form_corrected";
    case FactorMethod::quadrature: return "quadrature";
  }
  return "unknown";
}

std::string_view to_string(ClosedFormVariant variant) {
  return variant == ClosedFormVariant::printed ? "printed" : "corrected";
}

ClosedFormVariant parse_closed_form_variant(std::string_view text) {
  if (text == "printed") return ClosedFormVariant::printed;
  if (text == "corrected") return ClosedFormVariant::corrected;
  throw DomainError("unknown closed-form variant '" + std::string(text) +
                    "' (expected printed or corrected)");
}

GeometricFactorResult gamma_sep_discrete(std::span<const SpinSite> nuclear,
                                         std::span<const SpinSite> probes) {
  if (nuclear.empty() || probes.empty()) {
    throw DomainError("gamma_sep_discrete: nuclear and probe lists must be nonempty");
  }
  double total = 0.0;
  for (const auto& nucleus : nuclear) {
    total += kernels::omp::dipole_sums(nucleus.position, probes).sum_sq;
  }
  return {total, FactorMethod::discrete_sum, 0.0};
}

GeometricFactorResult gamma_ent_discrete(std::span<const SpinSite> nuclear,
                                         std::span<const SpinSite> probes) {
  if (nuclear.empty() || probes.empty()) {
    throw DomainError("gamma_ent_discrete: nuclear and probe lists must be nonempty");
  }
  double total = 0.0;
  for (const auto& nucleus : nuclear) {
    const auto sums = kernels::omp::dipole_sums(nucleus.position, probes);
    total += sums.sum_a * sums.sum_a + sums.sum_b * sums.sum_b;
  }
  return {total, FactorMethod::discrete_sum, 0.0};
}

double f_sep_closed(double r_tilde, double z_tilde, ClosedFormVariant variant) {
  check_shape(r_tilde, z_tilde, "f_sep_closed");
  if (variant == ClosedFormVariant::corrected && r_tilde < 0.5) {
    return f_sep_series(r_tilde, z_tilde);
  }
  const double z3 = z_tilde * z_tilde * z_tilde;
  const double polar = 1.0 / 3.0 - 1.0 / (3.0 * z3);
  const double block = sep_block(r_tilde, z_tilde) - sep_block(r_tilde, 1.0);
  return variant == ClosedFormVariant::printed ? polar + block : polar - block;
}

double integral_a_closed(double r_tilde, double z_tilde) {
  check_shape(r_tilde, z_tilde, "integral_a_closed");
  const double r = r_tilde;
  // log((sqrt(r^2 + a^2) + r) / (sqrt(r^2 + a^2) - r)) == 2 asinh(r / a)
  return 2.0 * std::asinh(r / z_tilde) - 2.0 * std::asinh(r) +
         2.0 * r / std::sqrt(r * r + 1.0) - 2.0 * r / std::sqrt(r * r + z_tilde * z_tilde);
}

double f_ent_closed(double r_tilde, double z_tilde, ClosedFormVariant variant) {
  check_shape(r_tilde, z_tilde, "f_ent_closed");
  if (variant == ClosedFormVariant::corrected) {
    const double a = integral_a_closed(r_tilde, z_tilde);
    return a * a;
  }
  const double r = r_tilde;
  const double bracket =
      -log_ratio_verbatim(r, z_tilde) * log_ratio_verbatim(r, 1.0) +
      (2.0 * r / std::sqrt(r * r + z_tilde * z_tilde) - 2.0 * r / std::sqrt(r * r + 1.0));
  return bracket * bracket;
}

GeometricFactorResult gamma_sep_continuum(double nuclear_count, const EnsembleGeometry& geom,
                                          ClosedFormVariant variant) {
  if (!(nuclear_count >= 1.0)) throw DomainError("gamma_sep_continuum: M must be >= 1");
  const double z3 = geom.z_min() * geom.z_min() * geom.z_min();
  const double f = f_sep_closed(geom.r_tilde(), geom.z_tilde(), variant);
  return {nuclear_count * geom.rho_nv() * (3.0 * constants::pi / 8.0) / z3 * f,
          variant == ClosedFormVariant::printed ? FactorMethod::closed_form_printed
                                                : FactorMethod::closed_form_corrected,
          0.0};
}

GeometricFactorResult gamma_ent_continuum(double nuclear_count, const EnsembleGeometry& geom,
                                          ClosedFormVariant variant) {
  if (!(nuclear_count >= 1.0)) throw DomainError("gamma_ent_continuum: M must be >= 1");
  const double f = f_ent_closed(geom.r_tilde(), geom.z_tilde(), variant);
  return {nuclear_count * geom.rho_nv() * geom.rho_nv() * f,
          variant == ClosedFormVariant::printed ? FactorMethod::closed_form_printed
                                                : FactorMethod::closed_form_corrected,
          0.0};
}

QuadratureValue quadrature_sep(double r_tilde, double z_tilde) {
  check_shape(r_tilde, z_tilde, "quadrature_sep");
  // The integrand does not depend on phi; the half-plane contributes pi.
  auto integrand = [](double s, double z) {
    const double q = s * s + z * z;
    const double q2 = q * q;
    return 9.0 * s * s * s * z * z / (q2 * q2 * q);
  };
  auto v = cylinder_integral(integrand, r_tilde, z_tilde, "quadrature_sep");
  return {constants::pi * v.value, constants::pi * v.est_error};
}

QuadratureValue quadrature_sep(const EnsembleGeometry& geom) {
  return quadrature_sep(geom.r_tilde(), geom.z_tilde());
}

QuadratureEntPair quadrature_ent(double r_tilde, double z_tilde) {
  check_shape(r_tilde, z_tilde, "quadrature_ent");
  // A = -3 x z / r^5 = -3 s cos(phi) z / r^5; with the Jacobian s the radial
  // part is -3 s^2 z / r^5. cos(phi) over the half plane integrates to 2.
  auto radial = [](double s, double z) {
    const double q = s * s + z * z;
    return -3.0 * s * s * z / (q * q * std::sqrt(q));
  };
  const auto rz = cylinder_integral(radial, r_tilde, z_tilde, "quadrature_ent");
  const auto sin_phi = detail::integrate([](double phi) { return std::sin(phi); },
                                         -0.5 * constants::pi, 0.5 * constants::pi,
                                         {1e-16, 1e-14, 100});
  QuadratureEntPair out;
  out.a = {2.0 * rz.value, 2.0 * rz.est_error};
  out.b = {sin_phi.value * rz.value,
           std::abs(sin_phi.error * rz.value) + std::abs(sin_phi.value) * rz.est_error};
  return out;
}

QuadratureEntPair quadrature_ent(const EnsembleGeometry& geom) {
  return quadrature_ent(geom.r_tilde(), geom.z_tilde());
}

GeometricFactorResult gamma_sep_monte_carlo(double nuclear_count, const EnsembleGeometry& geom,
                                            std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("gamma_sep_monte_carlo: need at least one sample");
  const auto sites = sample_probe_sites(geom, samples, seed);
  const auto sums = kernels::omp::dipole_sums(Vec3::Zero(), sites);
  const double n = static_cast<double>(samples);
  const double weight = geom.rho_nv() * geom.volume();
  const double mean = sums.sum_sq / n;
  const double var = std::max(0.0, sums.sum_sq_sq / n - mean * mean);
  return {nuclear_count * weight * mean, FactorMethod::discrete_sum,
          nuclear_count * weight * std::sqrt(var / n)};
}

GeometricFactorResult gamma_ent_monte_carlo(double nuclear_count, const EnsembleGeometry& geom,
                                            std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("gamma_ent_monte_carlo: need at least one sample");
  const auto sites = sample_probe_sites(geom, samples, seed);
  const auto sums = kernels::omp::dipole_sums(Vec3::Zero(), sites);
  const double n = static_cast<double>(samples);
  const double weight = geom.rho_nv() * geom.volume();
  const double mean_a = sums.sum_a / n;
  const double mean_b = sums.sum_b / n;
  const double var_a = std::max(0.0, sums.sum_a_sq / n - mean_a * mean_a);
  const double int_a = weight * mean_a;
  const double int_b = weight * mean_b;
  return {nuclear_count * (int_a * int_a + int_b * int_b), FactorMethod::discrete_sum,
          nuclear_count * 2.0 * std::abs(int_a) * weight * std::sqrt(var_a / n)};
}

}  // namespace nvghz
