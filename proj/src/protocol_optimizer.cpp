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

#include "nvghz/protocol_optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "nvghz/errors.hpp"

namespace nvghz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSimplexTol = 1e-4;
constexpr int kMaxSimplexIterations = 5000;
constexpr int kGridSide = 4;

using Point = std::array<double, 2>;

struct SimplexRun {
  Point x{};
  double value = kInf;
  int iterations = 0;
  bool converged = false;
};

// Plain Nelder-Mead with the standard coefficients; converged when every
// vertex lies within kSimplexTol of the best one in both coordinates.
template <class F>
SimplexRun nelder_mead(F&& f, Point start, Point step) {
  std::array<Point, 3> v{start, start, start};
  v[1][0] += step[0];
  v[2][1] += step[1];
  std::array<double, 3> fv{f(v[0]), f(v[1]), f(v[2])};

  SimplexRun run;
  for (; run.iterations < kMaxSimplexIterations; ++run.iterations) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    const int best = order[0], mid = order[1], worst = order[2];

    double spread = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int d = 0; d < 2; ++d) spread = std::max(spread, std::abs(v[i][d] - v[best][d]));
    }
    if (spread < kSimplexTol && std::isfinite(fv[best])) {
      run.converged = true;
      break;
    }

    Point centroid{};
    for (int d = 0; d < 2; ++d) centroid[d] = 0.5 * (v[best][d] + v[mid][d]);
    auto along = [&](double coeff) {
      Point p;
      for (int d = 0; d < 2; ++d) p[d] = centroid[d] + coeff * (v[worst][d] - centroid[d]);
      return p;
    };

    const Point reflected = along(-1.0);
    const double f_reflected = f(reflected);
    if (f_reflected < fv[best]) {
      const Point expanded = along(-2.0);
      const double f_expanded = f(expanded);
      if (f_expanded < f_reflected) {
        v[worst] = expanded;
        fv[worst] = f_expanded;
      } else {
        v[worst] = reflected;
        fv[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < fv[mid]) {
      v[worst] = reflected;
      fv[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < fv[worst];
    const Point contracted = along(outside ? -0.5 : 0.5);
    const double f_contracted = f(contracted);
    if (f_contracted < (outside ? f_reflected : fv[worst])) {
      v[worst] = contracted;
      fv[worst] = f_contracted;
      continue;
    }
    for (int i : {mid, worst}) {
      for (int d = 0; d < 2; ++d) v[i][d] = v[best][d] + 0.5 * (v[i][d] - v[best][d]);
      fv[i] = f(v[i]);
    }
  }
  const auto it = std::min_element(fv.begin(), fv.end());
  run.x = v[static_cast<std::size_t>(it - fv.begin())];
  run.value = *it;
  return run;
}

std::array<double, kGridSide> log_grid(double lo, double hi) {
  std::array<double, kGridSide> out{};
  for (int i = 0; i < kGridSide; ++i) {
    out[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i + 1) / (kGridSide + 1));
  }
  return out;
}

// Resonance-constrained f: omega = pi / tau, minimised over log(tau).
struct ResonantMinimum {
  double value = 0.0;
  bool at_boundary = false;
};

ResonantMinimum resonant_minimum(double t2_echo, double coupling_G, int n_dd) {
  const double t2 = t2_dd(t2_echo, n_dd);
  const double periods = n_dd + 1.0;
  auto f_of_log_tau = [&](double log_tau) {
    const double tau = std::exp(log_tau);
    ProtocolParams p;
    p.tau = tau;
    p.n_dd = n_dd;
    p.omega_target = constants::pi / tau;
    p.t2_echo = t2_echo;
    p.coupling_G = coupling_G;
    return f_dd(tau, p);
  };
  const double lo = std::log(1e-3 * t2 / periods);
  const double hi = std::log(3.0 * t2 / periods);
  try {
    const auto outcome = minimize_scalar(f_of_log_tau, lo, hi, 1e-9);
    return {outcome.min_value, false};
  } catch (const BracketError& edge) {
    if (edge.boundary_point() > 0.5 * (lo + hi)) throw;
    // f increases monotonically in t; its infimum is the t -> 0 limit.
    return {f_of_log_tau(edge.boundary_point() + std::log(1e-4)), true};
  }
}

}  // namespace

OptimizationOutcome minimize_scalar(const std::function<double(double)>& objective, double lo,
                                    double hi, double tol) {
  if (!(lo < hi)) throw DomainError("minimize_scalar: empty bracket");
  if (!(tol > 0.0)) throw DomainError("minimize_scalar: tol must be > 0");
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  const double eps = 2.0 * std::numeric_limits<double>::epsilon();

  double a = lo, b = hi;
  double x = a + golden * (b - a), w = x, v = x;
  double fx = objective(x), fw = fx, fv = fx;
  double d = 0.0, e = 0.0;
  int iterations = 0;
  bool converged = false;

  for (; iterations < 500; ++iterations) {
    const double m = 0.5 * (a + b);
    const double tol1 = eps * std::abs(x) + tol / 3.0;
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) {
      converged = true;
      break;
    }
    bool golden_step = true;
    if (std::abs(e) > tol1) {
      // Parabola through (v, w, x).
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double e_prev = e;
      e = d;
      if (std::abs(p) < std::abs(0.5 * q * e_prev) && p > q * (a - x) && p < q * (b - x)) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = (m >= x) ? tol1 : -tol1;
        golden_step = false;
      }
    }
    if (golden_step) {
      e = (x >= m) ? a - x : b - x;
      d = golden * e;
    }
    const double u = (std::abs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
    const double fu = objective(u);
    if (fu <= fx) {
      (u >= x ? a : b) = x;
      v = w, fv = fw;
      w = x, fw = fx;
      x = u, fx = fu;
    } else {
      (u < x ? a : b) = u;
      if (fu <= fw || w == x) {
        v = w, fv = fw;
        w = u, fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u, fv = fu;
      }
    }
  }

  // An edge that is no worse than the interior estimate (to rounding) means
  // the bracket holds no interior minimum; near a flat edge Brent can stop a
  // little inside it, so compare values rather than positions.
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(fx);
  if (a == lo || objective(lo) <= fx + slack) {
    throw BracketError("minimize_scalar: minimum at the lower bracket edge", lo);
  }
  if (b == hi || objective(hi) <= fx + slack) {
    throw BracketError("minimize_scalar: minimum at the upper bracket edge", hi);
  }

  OptimizationOutcome out;
  out.argmin = {x};
  out.min_value = fx;
  out.iterations = iterations;
  out.converged = converged;
  out.tolerance_used = tol;
  return out;
}

std::string_view to_string(GeometryVariant variant) {
  return variant == GeometryVariant::sep ? "sep" : "ent";
}

GeometryVariant parse_geometry_variant(std::string_view text) {
  if (text == "sep") return GeometryVariant::sep;
  if (text == "ent") return GeometryVariant::ent;
  throw DomainError("unknown geometry variant '" + std::string(text) + "' (expected sep or ent)");
}

double geometry_objective(GeometryVariant variant, double r_tilde, double z_tilde,
                          ClosedFormVariant shape) {
  const double f = variant == GeometryVariant::sep ? f_sep_closed(r_tilde, z_tilde, shape)
                                                   : f_ent_closed(r_tilde, z_tilde, shape);
  if (f == 0.0) return kInf;
  return r_tilde * r_tilde * (z_tilde - 1.0) / (f * f);
}

OptimizationOutcome minimize_geometry(GeometryVariant variant, ClosedFormVariant shape,
                                      GeometryBox box) {
  const auto r_starts = log_grid(box.r_lo, box.r_hi);
  const auto dz_starts = log_grid(box.z_lo - 1.0, box.z_hi - 1.0);
  auto objective = [&](const Point& p) {
    if (p[0] < box.r_lo || p[0] > box.r_hi || p[1] < box.z_lo || p[1] > box.z_hi) return kInf;
    const double j = geometry_objective(variant, p[0], p[1], shape);
    return std::isfinite(j) ? j : kInf;
  };

  constexpr int starts = kGridSide * kGridSide;
  std::array<SimplexRun, starts> runs{};
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < starts; ++i) {
    const Point start{r_starts[static_cast<std::size_t>(i / kGridSide)],
                      1.0 + dz_starts[static_cast<std::size_t>(i % kGridSide)]};
    Point step{0.1 * start[0], 0.1 * (start[1] - 1.0)};
    if (start[0] + step[0] > box.r_hi) step[0] = -step[0];
    if (start[1] + step[1] > box.z_hi) step[1] = -step[1];
    SimplexRun run = nelder_mead(objective, start, step);
    // One restart from the converged point guards against a collapsed simplex.
    const Point restart_step{0.05 * run.x[0], 0.05 * (run.x[1] - 1.0)};
    const SimplexRun again = nelder_mead(objective, run.x, restart_step);
    SimplexRun& kept = runs[static_cast<std::size_t>(i)];
    kept = again.value <= run.value ? again : run;
    kept.iterations = run.iterations + again.iterations;
  }

  int best = -1;
  int total_iterations = 0;
  for (int i = 0; i < starts; ++i) {
    const auto& run = runs[static_cast<std::size_t>(i)];
    total_iterations += run.iterations;
    if (!run.converged || !std::isfinite(run.value)) continue;
    if (best < 0 || run.value < runs[static_cast<std::size_t>(best)].value) best = i;
  }
  if (best < 0) throw OptimizationError("minimize_geometry: no start converged");

  const SimplexRun lowest = runs[static_cast<std::size_t>(best)];
  SimplexRun chosen = lowest;
  bool multimodal = false;
  for (const auto& run : runs) {
    if (!run.converged || !(run.value <= 1.01 * lowest.value)) continue;
    const double distance =
        std::max(std::abs(run.x[0] - lowest.x[0]), std::abs(run.x[1] - lowest.x[1]));
    if (distance <= 1e-2) continue;
    multimodal = true;
    if (run.x[0] < chosen.x[0]) chosen = run;
  }

  OptimizationOutcome out;
  out.argmin = {chosen.x[0], chosen.x[1]};
  out.min_value = chosen.value;
  out.iterations = total_iterations;
  out.converged = true;
  out.tolerance_used = kSimplexTol;
  out.multimodal = multimodal;
  const double edge = 1e-3;
  out.at_boundary = chosen.x[0] - box.r_lo < edge || box.r_hi - chosen.x[0] < edge ||
                    chosen.x[1] - box.z_lo < edge || box.z_hi - chosen.x[1] < edge;
  return out;
}

ConstantDerivation derive_constants(double t2_echo, double coupling_G, int n_dd,
                                    double omega_target) {
  if (!(t2_echo > 0.0) || !(coupling_G > 0.0) || !(omega_target > 0.0)) {
    throw DomainError("derive_constants: t2_echo, coupling_G and omega_target must be > 0");
  }
  ConstantDerivation out;
  out.geometry_sep = minimize_geometry(GeometryVariant::sep);
  out.geometry_ent = minimize_geometry(GeometryVariant::ent);

  const double n = static_cast<double>(n_dd);
  const double g4 = std::pow(coupling_G, 4);
  const double t3 = t2_echo * t2_echo * t2_echo;
  const double pi = constants::pi;
  const double cyclic_scale = std::pow(constants::two_pi, 4);

  const auto dd = resonant_minimum(t2_echo, coupling_G, n_dd);
  out.f_dd_min = dd.value;
  out.f_dd_min_at_boundary = dd.at_boundary;
  out.f_dd_closed_form = std::pow(pi, 4) / (32.0 * n * n * t3 * g4);

  const auto ent = resonant_minimum(t2_echo, coupling_G, 1);
  out.f_ent_min = ent.value;
  out.f_ent_min_at_boundary = ent.at_boundary;
  out.f_ent_closed_form = std::pow(pi, 4) / (32.0 * t3 * g4);

  // L / Gamma_sep^2 = (32 / 9 pi) z^9 / (rho M^2) J_sep
  // L / Gamma_ent^2 = (pi / 2) z^3 / (rho^3 M^2) J_ent
  const double sep_geometry = 32.0 / (9.0 * pi) * out.geometry_sep.min_value;
  const double ent_geometry = 0.5 * pi * out.geometry_ent.min_value;
  out.c_dd_angular = out.f_dd_min * n * n * t3 * g4 * sep_geometry;
  out.c_ent_angular = out.f_ent_min * t3 * g4 * ent_geometry;
  out.c_dd_cyclic = out.c_dd_angular / cyclic_scale;
  out.c_ent_cyclic = out.c_ent_angular / cyclic_scale;

  // Free tau at the scenario's Larmor frequency, within half a line width of
  // the first resonance.
  const double centre = pi / omega_target;
  const double half_width = 0.5 / ((n_dd + 1) / 2);
  ProtocolParams p;
  p.n_dd = n_dd;
  p.omega_target = omega_target;
  p.t2_echo = t2_echo;
  p.coupling_G = coupling_G;
  p.tau = centre;
  auto f_free = [&](double tau) { return f_dd(tau, p); };
  double f_best = 0.0;
  try {
    const auto free = minimize_scalar(f_free, centre * (1.0 - half_width),
                                      centre * (1.0 + half_width), 1e-9 * centre);
    out.tau_free = free.argmin[0];
    f_best = free.min_value;
  } catch (const BracketError& edge) {
    out.tau_free = edge.boundary_point();
    f_best = f_free(out.tau_free);
  }
  out.c_dd_free_tau_cyclic = f_best * n * n * t3 * g4 * sep_geometry / cyclic_scale;
  return out;
}

}  // namespace nvghz
