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

#include "nvghz/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <vector>

#include <omp.h>

#include "nvghz/errors.hpp"

namespace nvghz::kernels {

namespace {

// The three sums of one probe, with r_kj = nucleus - probe.
inline bool accumulate(const Vec3& nucleus, const SpinSite& probe, DipoleSums& acc) {
  const Vec3 rel = nucleus - probe.position;
  const double r2 = rel.squaredNorm();
  if (!(r2 > 0.0)) return false;
  const double r = std::sqrt(r2);
  const double scale = -3.0 * rel.z() / (r2 * r2 * r);
  const double a = scale * rel.x();
  const double b = scale * rel.y();
  const double sq = a * a + b * b;
  acc.sum_sq += sq;
  acc.sum_sq_sq += sq * sq;
  acc.sum_a += a;
  acc.sum_b += b;
  acc.sum_a_sq += a * a;
  return true;
}

std::vector<double> attenuation_powers(std::size_t mask, double attenuation) {
  std::vector<double> powers(static_cast<std::size_t>(std::popcount(mask)) + 1, 1.0);
  for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * attenuation;
  return powers;
}

}  // namespace

namespace serial {

DipoleSums dipole_sums(const Vec3& nucleus, std::span<const SpinSite> probes) {
  DipoleSums acc;
  for (const auto& probe : probes) {
    if (!accumulate(nucleus, probe, acc)) {
      throw SingularityError("dipole_sums: probe coincides with nucleus");
    }
  }
  return acc;
}

void conjugate_bit_flip(const CMatrix& in, CMatrix& out, std::size_t mask) {
  const auto n = static_cast<std::size_t>(in.rows());
  out.resize(in.rows(), in.cols());
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = 0; row < n; ++row) {
      out(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          in(static_cast<Eigen::Index>(row ^ mask), static_cast<Eigen::Index>(col ^ mask));
    }
  }
}

void dephase(CMatrix& rho, std::size_t mask, double attenuation) {
  const auto powers = attenuation_powers(mask, attenuation);
  const auto n = static_cast<std::size_t>(rho.rows());
  for (std::size_t col = 0; col < n; ++col) {
    for (std::size_t row = 0; row < n; ++row) {
      rho(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *=
          powers[static_cast<std::size_t>(std::popcount((row ^ col) & mask))];
    }
  }
}

}  // namespace serial

namespace omp {

DipoleSums dipole_sums(const Vec3& nucleus, std::span<const SpinSite> probes) {
  const std::size_t n = probes.size();
  const std::size_t chunks = (n + reduction_chunk - 1) / reduction_chunk;
  std::vector<DipoleSums> partial(chunks);
  int singular = 0;

#pragma omp parallel for schedule(static) reduction(| : singular)
  for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks); ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * reduction_chunk;
    const std::size_t end = std::min(n, begin + reduction_chunk);
    DipoleSums acc;
    for (std::size_t i = begin; i < end; ++i) {
      if (!accumulate(nucleus, probes[i], acc)) singular |= 1;
    }
    partial[static_cast<std::size_t>(c)] = acc;
  }
  if (singular) throw SingularityError("dipole_sums: probe coincides with nucleus");

  DipoleSums total;
  for (const auto& p : partial) {
    total.sum_sq += p.sum_sq;
    total.sum_sq_sq += p.sum_sq_sq;
    total.sum_a += p.sum_a;
    total.sum_b += p.sum_b;
    total.sum_a_sq += p.sum_a_sq;
  }
  return total;
}

void conjugate_bit_flip(const CMatrix& in, CMatrix& out, std::size_t mask) {
  const auto n = static_cast<std::ptrdiff_t>(in.rows());
  out.resize(in.rows(), in.cols());
#pragma omp parallel for schedule(static) if (n >= 64)
  for (std::ptrdiff_t col = 0; col < n; ++col) {
    const auto src_col = static_cast<Eigen::Index>(static_cast<std::size_t>(col) ^ mask);
    for (std::ptrdiff_t row = 0; row < n; ++row) {
      out(row, col) = in(static_cast<Eigen::Index>(static_cast<std::size_t>(row) ^ mask), src_col);
    }
  }
}

void dephase(CMatrix& rho, std::size_t mask, double attenuation) {
  const auto powers = attenuation_powers(mask, attenuation);
  const auto n = static_cast<std::ptrdiff_t>(rho.rows());
#pragma omp parallel for schedule(static) if (n >= 64)
  for (std::ptrdiff_t col = 0; col < n; ++col) {
    for (std::ptrdiff_t row = 0; row < n; ++row) {
      const auto diff = (static_cast<std::size_t>(row) ^ static_cast<std::size_t>(col)) & mask;
      rho(row, col) *= powers[static_cast<std::size_t>(std::popcount(diff))];
    }
  }
}

}  // namespace omp

}  // namespace nvghz::kernels
