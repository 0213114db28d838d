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

// Globally adaptive 15-point Gauss-Kronrod integration on a finite interval.
// Internal to the library: only the two semicylinder integrals are public.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace nvghz::detail {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

struct QuadTolerance {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
};

namespace gk15 {
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights for xgk[1], xgk[3], xgk[5] and the centre.
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk15

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& other) const { return error < other.error; }
};

template <class F>
Interval gk15_rule(F&& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = gk15::wgk[7] * fc;
  double gauss = gk15::wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = half * gk15::xgk[static_cast<std::size_t>(j)];
    const double pair = f(centre - dx) + f(centre + dx);
    kronrod += gk15::wgk[static_cast<std::size_t>(j)] * pair;
    if (j % 2 == 1) gauss += gk15::wg[static_cast<std::size_t>(j / 2)] * pair;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

/// Bisects the interval with the largest error estimate until the summed
/// estimate meets max(abs_tol, rel_tol * |value|).
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadTolerance& tol = {}) {
  if (a == b) return {};
  std::priority_queue<Interval> heap;
  const Interval first = gk15_rule(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int intervals = 1;
  while (error > std::max(tol.abs_tol, tol.rel_tol * std::abs(value))) {
    if (intervals >= tol.max_intervals) return {value, error, false};
    const Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Interval left = gk15_rule(f, worst.a, mid);
    const Interval right = gk15_rule(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  return {value, error, true};
}

}  // namespace nvghz::detail
