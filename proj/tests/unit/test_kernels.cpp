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

#include <random>

#include <doctest.h>

#include "nvghz/errors.hpp"
#include "nvghz/kernels.hpp"

using namespace nvghz;

namespace {

std::vector<SpinSite> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SpinSite> out(n);
  for (auto& s : out) s.position = Vec3(u(rng), u(rng), 1.5 + u(rng));
  return out;
}

CMatrix random_matrix(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  CMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("omp dipole sums agree with the serial reference") {
  for (std::size_t n : {1u, 17u, 4096u, 4097u, 20000u}) {
    const auto probes = cloud(n, n);
    const Vec3 nucleus(0.01, -0.02, 0.03);
    const auto s = kernels::serial::dipole_sums(nucleus, probes);
    const auto p = kernels::omp::dipole_sums(nucleus, probes);
    CHECK(p.sum_sq == doctest::Approx(s.sum_sq).epsilon(1e-13));
    CHECK(p.sum_sq_sq == doctest::Approx(s.sum_sq_sq).epsilon(1e-13));
    CHECK(p.sum_a == doctest::Approx(s.sum_a).epsilon(1e-12));
    CHECK(p.sum_b == doctest::Approx(s.sum_b).epsilon(1e-12));
    CHECK(p.sum_a_sq == doctest::Approx(s.sum_a_sq).epsilon(1e-13));
  }
}

TEST_CASE("omp dipole sums are bitwise reproducible") {
  const auto probes = cloud(30000, 5);
  const auto a = kernels::omp::dipole_sums(Vec3::Zero(), probes);
  const auto b = kernels::omp::dipole_sums(Vec3::Zero(), probes);
  CHECK(a.sum_sq == b.sum_sq);
  CHECK(a.sum_a == b.sum_a);
}

TEST_CASE("dipole sums flag a coincident probe") {
  auto probes = cloud(10000, 9);
  probes[7777].position = Vec3(0.5, 0.5, 0.5);
  CHECK_THROWS_AS(kernels::omp::dipole_sums(Vec3(0.5, 0.5, 0.5), probes), SingularityError);
  CHECK_THROWS_AS(kernels::serial::dipole_sums(Vec3(0.5, 0.5, 0.5), probes), SingularityError);
}

TEST_CASE("bit-flip conjugation: omp equals serial and is an involution") {
  for (int dim : {4, 64, 256}) {
    const CMatrix m = random_matrix(dim, static_cast<std::uint64_t>(dim));
    CMatrix s(dim, dim), p(dim, dim), back(dim, dim);
    const std::size_t mask = static_cast<std::size_t>(dim / 2 + 1);
    kernels::serial::conjugate_bit_flip(m, s, mask);
    kernels::omp::conjugate_bit_flip(m, p, mask);
    CHECK((s - p).cwiseAbs().maxCoeff() == 0.0);
    kernels::omp::conjugate_bit_flip(p, back, mask);
    CHECK((back - m).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dephasing kernel: omp equals serial, diagonal untouched") {
  for (int dim : {8, 128}) {
    const CMatrix m = random_matrix(dim, 77);
    CMatrix s = m, p = m;
    kernels::serial::dephase(s, 0b101, 0.3);
    kernels::omp::dephase(p, 0b101, 0.3);
    CHECK((s - p).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.diagonal() - m.diagonal()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(s(0, 5) - 0.09 * m(0, 5)) < 1e-15);
    CHECK(std::abs(s(0, 1) - 0.3 * m(0, 1)) < 1e-15);
    CHECK(s(0, 2) == m(0, 2));
  }
}

}  // TEST_SUITE
