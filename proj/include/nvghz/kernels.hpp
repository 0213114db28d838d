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

// Data-parallel inner loops. Each kernel has a plain serial reference and an
// OpenMP version; the library calls the OpenMP one, tests hold the two
// together, and bench/ times them against each other.
//
// The OpenMP reductions sum fixed-size chunks and then combine the partial
// sums in chunk order, so results do not depend on the thread count.

#include <cstddef>
#include <span>

#include "nvghz/linalg.hpp"
#include "nvghz/model_core.hpp"

namespace nvghz::kernels {

/// Per-nucleus sums over probes. The second moments feed Monte-Carlo error
/// estimates.
struct DipoleSums {
  double sum_sq = 0.0;     // sum(A^2 + B^2)
  double sum_sq_sq = 0.0;  // sum((A^2 + B^2)^2)
  double sum_a = 0.0;
  double sum_b = 0.0;
  double sum_a_sq = 0.0;   // sum(A^2)
};

inline constexpr std::size_t reduction_chunk = 4096;

namespace serial {

DipoleSums dipole_sums(const Vec3& nucleus, std::span<const SpinSite> probes);

/// out(a, b) = in(a ^ mask, b ^ mask): conjugation by a product of sigma_x.
void conjugate_bit_flip(const CMatrix& in, CMatrix& out, std::size_t mask);

/// Multiplies rho(a, b) by attenuation^popcount((a ^ b) & mask): the
/// dephasing map applied independently to every qubit in `mask`.
void dephase(CMatrix& rho, std::size_t mask, double attenuation);

}  // namespace serial

namespace omp {

DipoleSums dipole_sums(const Vec3& nucleus, std::span<const SpinSite> probes);
void conjugate_bit_flip(const CMatrix& in, CMatrix& out, std::size_t mask);
void dephase(CMatrix& rho, std::size_t mask, double attenuation);

}  // namespace omp

}  // namespace nvghz::kernels
