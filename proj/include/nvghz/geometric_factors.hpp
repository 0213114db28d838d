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

// Geometric factors of the two protocols.
//
//   separable:  Gamma_sep = sum_k sum_j A(r_kj)^2 + B(r_kj)^2
//   entangled:  Gamma_ent = sum_k (sum_j A(r_kj))^2 + (sum_j B(r_kj))^2
//
// plus their continuum limits over a uniformly filled half cylinder, written
// through the dimensionless shape functions F_sep(r~, z~), F_ent(r~, z~), and
// an adaptive quadrature of the same integrals that arbitrates between the
// closed forms.

#include <cstdint>
#include <span>
#include <string_view>

#include "nvghz/model_core.hpp"

namespace nvghz {

enum class FactorMethod { discrete_sum, closed_form_printed, closed_form_corrected, quadrature };

/// `printed` is the closed form as originally typeset; `corrected` is the
/// exact antiderivative (sign of the arctan block for F_sep, log difference
/// instead of a log product for F_ent). Only `corrected` matches quadrature.
enum class ClosedFormVariant { printed, corrected };

std::string_view to_string(FactorMethod method);
std::string_view to_string(ClosedFormVariant variant);
ClosedFormVariant parse_closed_form_variant(std::string_view text);

struct GeometricFactorResult {
  double value = 0.0;  // m^-6
  FactorMethod method = FactorMethod::discrete_sum;
  double est_error = 0.0;
};

GeometricFactorResult gamma_sep_discrete(std::span<const SpinSite> nuclear,
                                         std::span<const SpinSite> probes);
GeometricFactorResult gamma_ent_discrete(std::span<const SpinSite> nuclear,
                                         std::span<const SpinSite> probes);

/// Both throw DomainError for r_tilde <= 0 or z_tilde < 1.
double f_sep_closed(double r_tilde, double z_tilde,
                    ClosedFormVariant variant = ClosedFormVariant::corrected);
double f_ent_closed(double r_tilde, double z_tilde,
                    ClosedFormVariant variant = ClosedFormVariant::corrected);

/// Signed integral of A over the unit-z_min half cylinder; its square is
/// F_ent(corrected).
double integral_a_closed(double r_tilde, double z_tilde);

/// M rho (3 pi / 8) z_min^-3 F_sep.
GeometricFactorResult gamma_sep_continuum(double nuclear_count, const EnsembleGeometry& geom,
                                          ClosedFormVariant variant = ClosedFormVariant::corrected);
/// M rho^2 F_ent.
GeometricFactorResult gamma_ent_continuum(double nuclear_count, const EnsembleGeometry& geom,
                                          ClosedFormVariant variant = ClosedFormVariant::corrected);

struct QuadratureValue {
  double value = 0.0;
  double est_error = 0.0;
};

struct QuadratureEntPair {
  QuadratureValue a;  // integral of A~ dV~
  QuadratureValue b;  // integral of B~ dV~, zero by symmetry
};

/// Integral of 9 (x^2 + y^2) z^2 / r^10 over the half cylinder with z_min = 1,
/// so F_sep = (8 / 3 pi) * value. Throws AccuracyError if the adaptive rule
/// does not reach 1e-10 absolute.
QuadratureValue quadrature_sep(const EnsembleGeometry& geom);
QuadratureValue quadrature_sep(double r_tilde, double z_tilde);

QuadratureEntPair quadrature_ent(const EnsembleGeometry& geom);
QuadratureEntPair quadrature_ent(double r_tilde, double z_tilde);

/// Monte-Carlo estimates of the continuum factors: n uniform probe samples,
/// each weighted by rho * V / n, all nuclei at the origin. est_error is one
/// standard error.
GeometricFactorResult gamma_sep_monte_carlo(double nuclear_count, const EnsembleGeometry& geom,
                                            std::size_t samples, std::uint64_t seed);
GeometricFactorResult gamma_ent_monte_carlo(double nuclear_count, const EnsembleGeometry& geom,
                                            std::size_t samples, std::uint64_t seed);

}  // namespace nvghz
