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

#include <cmath>

#include <doctest.h>

#include "nvghz/errors.hpp"
#include "nvghz/protocol_optimizer.hpp"

using namespace nvghz;

namespace {

const ConstantDerivation& derivation() {
  static const ConstantDerivation d =
      derive_constants(presets::NV1.t2_echo, 1.949734393644549e-23, 63,
                       PhysicalScenario::proton_nv().omega_target());
  return d;
}

}  // namespace

TEST_SUITE("protocol_optimizer") {

TEST_CASE("scalar minimisation") {
  const auto out = minimize_scalar([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -1.0,
                                   2.0, 1e-10);
  CHECK(out.converged);
  CHECK(out.argmin.at(0) == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(out.min_value == doctest::Approx(1.0));
  CHECK(out.tolerance_used == 1e-10);

  const auto cosine = minimize_scalar([](double x) { return std::cos(x); }, 2.0, 4.5, 1e-9);
  CHECK(cosine.argmin.at(0) == doctest::Approx(constants::pi).epsilon(1e-8));
}

TEST_CASE("a monotone objective reports the edge") {
  try {
    minimize_scalar([](double x) { return x; }, 1.0, 2.0, 1e-8);
    FAIL("expected BracketError");
  } catch (const BracketError& e) {
    CHECK(e.boundary_point() == 1.0);
  }
  try {
    minimize_scalar([](double x) { return -x * x * x; }, 0.5, 3.0, 1e-8);
    FAIL("expected BracketError");
  } catch (const BracketError& e) {
    CHECK(e.boundary_point() == 3.0);
  }
  CHECK_THROWS_AS(minimize_scalar([](double x) { return x; }, 2.0, 1.0, 1e-8), DomainError);
}

TEST_CASE("geometry objective") {
  const double r = 1.7, z = 2.3;
  CHECK(geometry_objective(GeometryVariant::sep, r, z) ==
        doctest::Approx(r * r * (z - 1) / std::pow(f_sep_closed(r, z), 2)));
  CHECK(geometry_objective(GeometryVariant::ent, r, z) ==
        doctest::Approx(r * r * (z - 1) / std::pow(f_ent_closed(r, z), 2)));
  CHECK(parse_geometry_variant("ent") == GeometryVariant::ent);
  CHECK(to_string(GeometryVariant::sep) == "sep");
  CHECK_THROWS_AS(parse_geometry_variant("both"), DomainError);
}

TEST_CASE("optimal ensemble shapes") {
  const auto sep = minimize_geometry(GeometryVariant::sep);
  CHECK(sep.converged);
  CHECK_FALSE(sep.at_boundary);
  CHECK(sep.argmin.at(0) == doctest::Approx(1.160097).epsilon(1e-4));
  CHECK(sep.argmin.at(1) == doctest::Approx(1.288909).epsilon(1e-4));
  CHECK(sep.min_value == doctest::Approx(24.2353137).epsilon(1e-6));
  // Within 1% of the published (1.16, 1.29).
  CHECK(std::abs(sep.argmin[0] / 1.16 - 1) < 0.01);
  CHECK(std::abs(sep.argmin[1] / 1.29 - 1) < 0.01);

  const auto ent = minimize_geometry(GeometryVariant::ent);
  CHECK(ent.converged);
  CHECK_FALSE(ent.at_boundary);
  CHECK(ent.argmin.at(0) == doctest::Approx(5.053779).epsilon(1e-4));
  CHECK(ent.argmin.at(1) == doctest::Approx(4.959975).epsilon(1e-4));
  CHECK(ent.min_value == doctest::Approx(3.4795716).epsilon(1e-6));
  CHECK(std::abs(ent.argmin[0] / 5.05 - 1) < 0.01);
  CHECK(std::abs(ent.argmin[1] / 4.96 - 1) < 0.01);
}

TEST_CASE("printed shapes run into the search box") {
  const auto sep = minimize_geometry(GeometryVariant::sep, ClosedFormVariant::printed);
  CHECK(sep.at_boundary);
  CHECK(sep.argmin.at(0) == doctest::Approx(0.05).epsilon(1e-3));
  const auto ent = minimize_geometry(GeometryVariant::ent, ClosedFormVariant::printed);
  CHECK(ent.at_boundary);
}

TEST_CASE("derived prefactors") {
  const auto& d = derivation();
  CHECK(d.c_dd_cyclic == doctest::Approx(0.053571805).epsilon(1e-6));
  CHECK(d.c_ent_cyclic == doctest::Approx(0.010675192).epsilon(1e-6));
  CHECK(d.c_dd_angular == doctest::Approx(83.494094).epsilon(1e-6));
  CHECK(d.c_ent_angular == doctest::Approx(16.637772).epsilon(1e-6));
  CHECK(d.c_dd_angular / d.c_dd_cyclic == doctest::Approx(std::pow(constants::two_pi, 4)));
  // Published 0.0536 and 0.0107, two significant figures.
  CHECK(std::abs(d.c_dd_cyclic / c_dd_published - 1) < 0.01);
  CHECK(std::abs(d.c_ent_cyclic / c_ent_published - 1) < 0.01);

  CHECK(d.f_dd_min_at_boundary);
  CHECK(d.f_dd_min == doctest::Approx(d.f_dd_closed_form).epsilon(1e-6));
  CHECK(d.f_ent_min == doctest::Approx(d.f_ent_closed_form).epsilon(1e-6));
  CHECK(d.c_dd_free_tau_cyclic == doctest::Approx(0.053540028).epsilon(1e-5));
  CHECK(d.c_dd_free_tau_cyclic <= d.c_dd_cyclic);
  CHECK(d.tau_free > 0.0);
}

TEST_CASE("prefactors are dimensionless") {
  const auto other = derive_constants(3.1e-4, 1.225054249505013e-22, 63,
                                      PhysicalScenario::proton_nv().omega_target());
  CHECK(other.c_dd_cyclic == doctest::Approx(derivation().c_dd_cyclic).epsilon(1e-8));
  CHECK(other.c_ent_cyclic == doctest::Approx(derivation().c_ent_cyclic).epsilon(1e-8));
}

}  // TEST_SUITE
