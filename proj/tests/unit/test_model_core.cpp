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
#include "nvghz/model_core.hpp"

using namespace nvghz;

TEST_SUITE("model_core") {

TEST_CASE("coupling constant in both conventions") {
  const double gt = constants::two_pi * constants::proton_gamma_hz_per_t;
  const double gp = constants::two_pi * constants::nv_gamma_hz_per_t;
  const double angular = coupling_constant(gt, gp, GammaConvention::angular);
  const double cyclic = coupling_constant(gt, gp, GammaConvention::cyclic);
  CHECK(angular == doctest::Approx(1.225054249505013e-22).epsilon(1e-14));
  CHECK(cyclic == doctest::Approx(1.949734393644549e-23).epsilon(1e-14));
  CHECK(cyclic * constants::two_pi == doctest::Approx(angular).epsilon(1e-15));
}

TEST_CASE("coupling constant rejects non-positive ratios") {
  CHECK_THROWS_AS(coupling_constant(0.0, 1.0, GammaConvention::angular), DomainError);
  CHECK_THROWS_AS(coupling_constant(1.0, -1.0, GammaConvention::cyclic), DomainError);
}

TEST_CASE("scenario caches a consistent coupling") {
  const auto s = PhysicalScenario::proton_nv();
  CHECK(s.consistent());
  CHECK(s.gamma_convention() == GammaConvention::cyclic);
  CHECK(s.omega_target() == doctest::Approx(constants::two_pi * 42e6 * 0.1));
  const auto a = s.with_convention(GammaConvention::angular);
  CHECK(a.consistent());
  CHECK(a.coupling_G() / s.coupling_G() == doctest::Approx(constants::two_pi));
}

TEST_CASE("gamma convention round trip") {
  CHECK(parse_gamma_convention("angular") == GammaConvention::angular);
  CHECK(parse_gamma_convention(to_string(GammaConvention::cyclic)) == GammaConvention::cyclic);
  CHECK_THROWS_AS(parse_gamma_convention("radians"), DomainError);
}

TEST_CASE("dipole coefficients") {
  SUBCASE("on axis only C survives") {
    const auto c = dipole_coefficients(Vec3(0, 0, 2.0));
    CHECK(c.a == 0.0);
    CHECK(c.b == 0.0);
    CHECK(c.c == doctest::Approx(-2.0 / 8.0));
  }
  SUBCASE("in plane") {
    const auto c = dipole_coefficients(Vec3(1.0, 0, 0));
    CHECK(c.a == 0.0);
    CHECK(c.c == doctest::Approx(1.0));
  }
  SUBCASE("general point") {
    const Vec3 r(0.3, -0.7, 1.1);
    const double n = r.norm();
    const auto c = dipole_coefficients(r);
    CHECK(c.a == doctest::Approx(-3 * 0.3 * 1.1 / std::pow(n, 5)));
    CHECK(c.b == doctest::Approx(-3 * -0.7 * 1.1 / std::pow(n, 5)));
    CHECK(c.c == doctest::Approx((1 - 3 * 1.21 / (n * n)) / std::pow(n, 3)));
  }
  CHECK_THROWS_AS(dipole_coefficients(Vec3::Zero()), SingularityError);
}

TEST_CASE("geometry and probe count") {
  const double z = 5e-7;
  const auto g = EnsembleGeometry::make(z, 1.29 * z, 1.16 * z, 1.1e23);
  CHECK(probe_count(g) == doctest::Approx(8.428233355124159e3).epsilon(1e-12));
  CHECK(g.r_tilde() == doctest::Approx(1.16));
  CHECK(g.z_tilde() == doctest::Approx(1.29));

  const auto flat = EnsembleGeometry::make(z, z, z, 1e23);
  CHECK(flat.volume() == 0.0);
  CHECK_THROWS_AS(EnsembleGeometry::make(z, 0.5 * z, z, 1e23), DomainError);
  CHECK_THROWS_AS(EnsembleGeometry::make(-z, z, z, 1e23), DomainError);
  CHECK_THROWS_AS(EnsembleGeometry::from_dimensionless(z, 1.0, 0.9, 1e23), DomainError);

  const auto d = EnsembleGeometry::from_dimensionless(2e-6, 5.05, 4.96, 1e23);
  CHECK(d.r_tilde() == 5.05);
  CHECK(d.z_tilde() == 4.96);
  CHECK(d.with_z_min(1e-6).r_max() == doctest::Approx(5.05e-6));
  CHECK(d.with_rho(3e23).rho_nv() == 3e23);
}

TEST_CASE("probe sampling stays inside the half cylinder and is reproducible") {
  const auto g = EnsembleGeometry::from_dimensionless(1e-6, 2.0, 3.0, 1e23);
  const auto a = sample_probe_sites(g, 5000, 42);
  const auto b = sample_probe_sites(g, 5000, 42);
  REQUIRE(a.size() == 5000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(g.contains(a[i].position));
    CHECK(a[i].position == b[i].position);
  }
  CHECK(sample_probe_sites(g, 10, 43)[0].position != a[0].position);
}

TEST_CASE("presets carry the caption values") {
  CHECK(presets::NV1.t2_echo == 8.3e-5);
  CHECK(presets::NV1.rho_nv == doctest::Approx(1.1e23));
  CHECK(presets::NV2.t2_echo == 4.5e-6);
  CHECK(presets::NV2.rho_nv == doctest::Approx(1.1e24));
  CHECK(presets::NV3.t2_echo == 3.1e-4);
  CHECK(presets::NV3.rho_nv == doctest::Approx(1.8e24));
  CHECK(presets::nuclear_count == 1.25e6);
}

}  // TEST_SUITE
