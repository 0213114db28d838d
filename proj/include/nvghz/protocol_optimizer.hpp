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

// Derivative-free minimisation: Brent's method for the pulse interval,
// multi-start Nelder-Mead for the dimensionless ensemble shape, and the
// assembly of the detection-time prefactors from both.

#include <functional>
#include <string_view>
#include <vector>

#include "nvghz/geometric_factors.hpp"
#include "nvghz/signal_model.hpp"

namespace nvghz {

struct OptimizationOutcome {
  std::vector<double> argmin;
  double min_value = 0.0;
  int iterations = 0;
  bool converged = false;
  double tolerance_used = 0.0;
  bool multimodal = false;   // distinct minima within 1% of each other
  bool at_boundary = false;  // argmin touches the search box
};

/// Brent minimisation on [lo, hi] to absolute tolerance `tol` in x.
/// Throws BracketError (carrying the edge) when the minimum sits within tol of
/// either end, i.e. the bracket holds no interior minimum.
OptimizationOutcome minimize_scalar(const std::function<double(double)>& objective, double lo,
                                    double hi, double tol);

enum class GeometryVariant { sep, ent };
std::string_view to_string(GeometryVariant variant);
GeometryVariant parse_geometry_variant(std::string_view text);

struct GeometryBox {
  double r_lo = 0.05, r_hi = 20.0;
  double z_lo = 1.001, z_hi = 20.0;
};

/// J = r~^2 (z~ - 1) / F^2, proportional to L / Gamma^2.
double geometry_objective(GeometryVariant variant, double r_tilde, double z_tilde,
                          ClosedFormVariant shape = ClosedFormVariant::corrected);

/// 16 Nelder-Mead runs from a fixed 4x4 log-spaced start grid, run in
/// parallel and reduced in start order. argmin = {r~, z~}.
OptimizationOutcome minimize_geometry(GeometryVariant variant,
                                      ClosedFormVariant shape = ClosedFormVariant::corrected,
                                      GeometryBox box = {});

/// Constants of the two detection-time formulas rebuilt from their parts.
struct ConstantDerivation {
  // Prefactors with G measured in rad/s (angular) and as G / 2 pi (cyclic).
  double c_dd_angular = 0.0;
  double c_ent_angular = 0.0;
  double c_dd_cyclic = 0.0;
  double c_ent_cyclic = 0.0;

  // Resonance-constrained minimum of f_dd over the interaction time, and the
  // closed form pi^4 / (32 n^2 T2^3 G^4) it is compared with.
  double f_dd_min = 0.0;
  double f_dd_closed_form = 0.0;
  bool f_dd_min_at_boundary = false;  // infimum is the t -> 0 limit
  double f_ent_min = 0.0;
  double f_ent_closed_form = 0.0;
  bool f_ent_min_at_boundary = false;

  // Same constant with tau free near pi / omega_target at fixed omega.
  double c_dd_free_tau_cyclic = 0.0;
  double tau_free = 0.0;

  OptimizationOutcome geometry_sep;
  OptimizationOutcome geometry_ent;
};

/// Every constant is dimensionless: the result does not depend on t2_echo or
/// coupling_G beyond rounding. n_dd and omega_target only set the free-tau
/// comparison.
ConstantDerivation derive_constants(double t2_echo, double coupling_G, int n_dd,
                                    double omega_target);

}  // namespace nvghz
