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

#include "nvghz/quantum_oracle.hpp"

#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "nvghz/errors.hpp"
#include "nvghz/kernels.hpp"
#include "nvghz/signal_model.hpp"

namespace nvghz {

namespace {

constexpr Complex kI{0.0, 1.0};

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// rho_T (x) rho_P with the nuclear block as the high bits.
CMatrix kron(const CMatrix& high, const CMatrix& low) {
  const Eigen::Index dl = low.rows();
  CMatrix out(high.rows() * dl, high.cols() * dl);
  for (Eigen::Index i = 0; i < high.rows(); ++i) {
    for (Eigen::Index j = 0; j < high.cols(); ++j) {
      out.block(i * dl, j * dl, dl, dl) = high(i, j) * low;
    }
  }
  return out;
}

CMatrix ghz_projector(int l_probe) {
  const Eigen::Index d = Eigen::Index{1} << l_probe;
  CMatrix g = CMatrix::Zero(d, d);
  g(0, 0) = g(0, d - 1) = g(d - 1, 0) = g(d - 1, d - 1) = 0.5;
  return g;
}

CMatrix initial_nuclear_state(const QuantumSystem& sys, const OracleParams& params) {
  const Eigen::Index d = Eigen::Index{1} << sys.m_nuclear();
  if (!params.nuclear_state) return CMatrix::Identity(d, d) / static_cast<double>(d);
  const CMatrix& rho = *params.nuclear_state;
  if (rho.rows() != d || rho.cols() != d) {
    throw DomainError("nuclear_state must be " + std::to_string(d) + "x" + std::to_string(d));
  }
  return rho;
}

// Tr_T rho for the nuclear block in the high bits.
CMatrix probe_reduced(const CMatrix& rho, int l_probe) {
  const Eigen::Index dl = Eigen::Index{1} << l_probe;
  const Eigen::Index dn = rho.rows() / dl;
  CMatrix out = CMatrix::Zero(dl, dl);
  for (Eigen::Index n = 0; n < dn; ++n) out += rho.block(n * dl, n * dl, dl, dl);
  return out;
}

void check_protocol(const QuantumSystem& sys, const OracleParams& params) {
  if (!(params.tau >= 0.0)) throw DomainError("protocol: tau must be >= 0");
  if (params.n_dd < 1 || params.n_dd % 2 == 0) throw DomainError("protocol: n_dd must be odd");
  if (sys.l_probe() < 1) throw DomainError("protocol: needs at least one probe");
  if (params.noise != NoiseModel::none && !(params.t2_echo > 0.0)) {
    throw DomainError("protocol: t2_echo must be > 0 when noise is enabled");
  }
}

// Period map: evolve tau, optional channel on the probes, pi pulse.
DensityState run_periods(const QuantumSystem& sys, const OracleParams& params, DensityState state,
                         int periods) {
  const CMatrix u = Propagator(sys.hamiltonian()).unitary(params.tau);
  const double channel = params.noise == NoiseModel::interleaved_channel
                             ? DephasingChannel{params.tau, params.t2_echo}.attenuation()
                             : 1.0;
  for (int i = 0; i < periods; ++i) {
    state = evolve(state, u);
    if (channel != 1.0) kernels::omp::dephase(state.matrix(), sys.probe_mask(), channel);
    state = pi_pulse_probes(state, sys);
  }
  return state;
}

struct GaussLegendre {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(int order) {
  GaussLegendre rule;
  rule.nodes.resize(static_cast<std::size_t>(order));
  rule.weights.resize(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    double x = std::cos(constants::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (order == 1) p0 = 1.0;
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

CMatrix build_effective_hamiltonian(std::span<const SpinSite> nuclear,
                                    std::span<const SpinSite> probes, double omega_target,
                                    double coupling_G, bool flip_probe_z,
                                    std::size_t dimension_cap) {
  const int m = static_cast<int>(nuclear.size());
  const int l = static_cast<int>(probes.size());
  const int n = m + l;
  if (n >= 62 || (std::size_t{1} << n) > dimension_cap) {
    throw ResourceError("hamiltonian: 2^" + std::to_string(n) + " exceeds the dimension cap " +
                        std::to_string(dimension_cap));
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<DipoleCoefficients> coeff(static_cast<std::size_t>(m * l));
  for (int k = 0; k < m; ++k) {
    for (int j = 0; j < l; ++j) {
      coeff[static_cast<std::size_t>(k * l + j)] =
          dipole_coefficients(nuclear[static_cast<std::size_t>(k)].position -
                              probes[static_cast<std::size_t>(j)].position);
    }
  }
  const double probe_sign = flip_probe_z ? -1.0 : 1.0;
  auto bit = [n](int q) { return std::size_t{1} << (n - 1 - q); };
  auto z_of = [](std::size_t a, std::size_t b) { return (a & b) ? -1.0 : 1.0; };

  CMatrix h = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  const auto d = static_cast<std::int64_t>(dim);
#pragma omp parallel for if (d >= 64)
  for (std::int64_t ai = 0; ai < d; ++ai) {
    const auto a = static_cast<std::size_t>(ai);
    double diag = 0.0;
    for (int k = 0; k < m; ++k) {
      const double zk = z_of(a, bit(k));
      diag += 0.5 * omega_target * zk;
      Complex flip = 0.0;
      const bool up = (a & bit(k)) == 0;  // |0> -> |1> under the flip
      for (int j = 0; j < l; ++j) {
        const auto& c = coeff[static_cast<std::size_t>(k * l + j)];
        const double zj = probe_sign * z_of(a, bit(m + j));
        diag += coupling_G * c.c * zk * zj;
        flip += coupling_G * zj * Complex(c.a, up ? c.b : -c.b);
      }
      h(static_cast<Eigen::Index>(a ^ bit(k)), static_cast<Eigen::Index>(a)) = flip;
    }
    h(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = diag;
  }
  return h;
}

QuantumSystem QuantumSystem::make(std::vector<SpinSite> nuclear, std::vector<SpinSite> probes,
                                  double omega_target, double coupling_G,
                                  std::size_t dimension_cap) {
  if (nuclear.empty()) throw DomainError("QuantumSystem: needs at least one nucleus");
  QuantumSystem sys;
  sys.hamiltonian_ =
      build_effective_hamiltonian(nuclear, probes, omega_target, coupling_G, false, dimension_cap);
  sys.nuclear_ = std::move(nuclear);
  sys.probes_ = std::move(probes);
  sys.omega_target_ = omega_target;
  sys.coupling_G_ = coupling_G;
  return sys;
}

QuantumSystem QuantumSystem::make(std::vector<SpinSite> nuclear, std::vector<SpinSite> probes,
                                  const PhysicalScenario& scenario, std::size_t dimension_cap) {
  return make(std::move(nuclear), std::move(probes), scenario.omega_target(),
              scenario.coupling_G(), dimension_cap);
}

DensityState DensityState::from_matrix(CMatrix rho, double tol) {
  if (rho.rows() != rho.cols() || rho.rows() == 0) {
    throw DomainError("DensityState: matrix must be square and nonempty");
  }
  DensityState state;
  state.rho_ = std::move(rho);
  if (state.trace_error() > tol) throw DomainError("DensityState: trace differs from 1");
  if (state.hermiticity_error() > tol) throw DomainError("DensityState: matrix is not Hermitian");
  if (state.min_eigenvalue() < -1e-10) throw DomainError("DensityState: negative eigenvalue");
  return state;
}

DensityState DensityState::unchecked(CMatrix rho) {
  DensityState state;
  state.rho_ = std::move(rho);
  return state;
}

double DensityState::trace_error() const { return std::abs(rho_.trace() - Complex(1.0, 0.0)); }

double DensityState::hermiticity_error() const { return max_abs(rho_ - rho_.adjoint()); }

double DensityState::min_eigenvalue() const {
  const CMatrix sym = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("DensityState: eigensolver failed");
  return solver.eigenvalues().minCoeff();
}

bool DensityState::valid(double trace_tol, double eig_tol) const {
  return trace_error() <= trace_tol && hermiticity_error() <= trace_tol &&
         min_eigenvalue() >= -eig_tol;
}

Propagator::Propagator(const CMatrix& hamiltonian) {
  const double scale = std::max(1.0, max_abs(hamiltonian));
  if (hamiltonian.rows() != hamiltonian.cols() ||
      max_abs(hamiltonian - hamiltonian.adjoint()) > 1e-12 * scale) {
    throw NumericError("Propagator: Hamiltonian is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw NumericError("Propagator: eigensolver failed");
  vectors_ = solver.eigenvectors();
  values_ = solver.eigenvalues();
}

CMatrix Propagator::unitary(double t) const {
  CVector phases(values_.size());
  for (Eigen::Index i = 0; i < values_.size(); ++i) phases(i) = std::exp(-kI * (values_(i) * t));
  CMatrix u = vectors_ * phases.asDiagonal() * vectors_.adjoint();
  const CMatrix defect = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  if (max_abs(defect) > 1e-10) throw NumericError("Propagator: result is not unitary");
  return u;
}

DensityState evolve(const DensityState& state, const CMatrix& unitary) {
  return DensityState::unchecked(unitary * state.matrix() * unitary.adjoint());
}

DensityState evolve(const DensityState& state, const CMatrix& hamiltonian, double duration) {
  return evolve(state, Propagator(hamiltonian).unitary(duration));
}

DensityState pi_pulse_probes(const DensityState& state, const QuantumSystem& sys) {
  CMatrix out(state.matrix().rows(), state.matrix().cols());
  kernels::omp::conjugate_bit_flip(state.matrix(), out, sys.probe_mask());
  return DensityState::unchecked(std::move(out));
}

double DephasingChannel::attenuation() const {
  if (!(t2 > 0.0)) throw DomainError("DephasingChannel: t2 must be > 0");
  if (!(t >= 0.0)) throw DomainError("DephasingChannel: t must be >= 0");
  const double x = t / t2;
  return std::exp(-x * x * x);
}

DensityState apply_dephasing_channel(const DensityState& state, const DephasingChannel& channel,
                                     std::span<const int> qubits, int total_qubits) {
  if (state.dimension() != (std::size_t{1} << total_qubits)) {
    throw DomainError("apply_dephasing_channel: state dimension does not match qubit count");
  }
  std::size_t mask = 0;
  for (int q : qubits) {
    if (q < 0 || q >= total_qubits) throw DomainError("apply_dephasing_channel: bad qubit index");
    mask |= std::size_t{1} << (total_qubits - 1 - q);
  }
  DensityState out = state;
  kernels::omp::dephase(out.matrix(), mask, channel.attenuation());
  return out;
}

CMatrix dephased_ghz_observable(int l_probe, double t, double t2) {
  if (l_probe < 1) throw DomainError("dephased_ghz_observable: L must be >= 1");
  const double coherence = std::pow(DephasingChannel{t, t2}.attenuation(), l_probe);
  CMatrix o = ghz_projector(l_probe);
  const Eigen::Index last = o.rows() - 1;
  o(0, last) *= coherence;
  o(last, 0) *= coherence;
  return o;
}

double run_dd_protocol(const QuantumSystem& sys, const OracleParams& params) {
  check_protocol(sys, params);
  const Eigen::Index dl = Eigen::Index{1} << sys.l_probe();
  const CMatrix plus = CMatrix::Constant(dl, dl, 1.0 / static_cast<double>(dl));
  DensityState state =
      DensityState::unchecked(kron(initial_nuclear_state(sys, params), plus));
  state = run_periods(sys, params, std::move(state), params.n_dd + 1);

  const CMatrix& rho = state.matrix();
  double mx = 0.0;
  for (int j = 0; j < sys.l_probe(); ++j) {
    const std::size_t flip = sys.qubit_bit(sys.m_nuclear() + j);
    for (std::size_t a = 0; a < sys.dimension(); ++a) {
      mx += rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a ^ flip)).real();
    }
  }
  if (params.noise == NoiseModel::observable_attenuation) {
    const double t = (params.n_dd + 1) * params.tau;
    mx *= DephasingChannel{t, t2_dd(params.t2_echo, params.n_dd)}.attenuation();
  }
  return mx;
}

double run_ghz_protocol(const QuantumSystem& sys, const OracleParams& params) {
  check_protocol(sys, params);
  DensityState state = DensityState::unchecked(
      kron(initial_nuclear_state(sys, params), ghz_projector(sys.l_probe())));
  state = run_periods(sys, params, std::move(state), 2);

  const CMatrix observable = params.noise == NoiseModel::observable_attenuation
                                 ? dephased_ghz_observable(sys.l_probe(), 2.0 * params.tau,
                                                           params.t2_echo)
                                 : ghz_projector(sys.l_probe());
  return (probe_reduced(state.matrix(), sys.l_probe()) * observable).trace().real();
}

double perturbation_defect(const CMatrix& a, const CMatrix& b, double eps, double tau) {
  if (a.rows() != a.cols() || b.rows() != a.rows() || b.cols() != a.cols()) {
    throw DomainError("perturbation_defect: A and B must be square and of equal size");
  }
  if (a.rows() > 16) throw DomainError("perturbation_defect: dimension above 16");
  const Eigen::Index d = a.rows();

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (a + a.adjoint()));
  if (solver.info() != Eigen::Success) throw NumericError("perturbation_defect: eigensolver failed");
  const CMatrix& v = solver.eigenvectors();
  const Eigen::VectorXd& energy = solver.eigenvalues();
  const CMatrix b_eig = v.adjoint() * b * v;

  // F(l) in the eigenbasis of A.
  auto f = [&](double l) {
    CMatrix out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        out(i, j) = b_eig(i, j) * std::exp(kI * ((energy(i) - energy(j)) * l));
      }
    }
    return out;
  };

  auto expansion = [&](int order) {
    const auto rule = gauss_legendre(order);
    CMatrix first = CMatrix::Zero(d, d);
    CMatrix forward = CMatrix::Zero(d, d);
    CMatrix backward = CMatrix::Zero(d, d);
    CMatrix ordered = CMatrix::Zero(d, d);
    for (int i = 0; i < order; ++i) {
      const double lam = 0.5 * tau * (rule.nodes[static_cast<std::size_t>(i)] + 1.0);
      const double w_lam = 0.5 * tau * rule.weights[static_cast<std::size_t>(i)];
      const CMatrix f_pos = f(lam);
      const CMatrix f_neg = f(-lam);
      first += w_lam * (f_pos - f_neg);
      forward += w_lam * f_pos;
      backward += w_lam * f_neg;
      CMatrix inner = CMatrix::Zero(d, d);
      for (int k = 0; k < order; ++k) {
        const double xi = 0.5 * lam * (rule.nodes[static_cast<std::size_t>(k)] + 1.0);
        const double w_xi = 0.5 * lam * rule.weights[static_cast<std::size_t>(k)];
        inner += w_xi * (f_pos * f(xi) + f(-xi) * f_neg);
      }
      ordered += w_lam * inner;
    }
    return CMatrix(CMatrix::Identity(d, d) + kI * eps * first - eps * eps * ordered +
                   eps * eps * forward * backward);
  };

  CMatrix middle = expansion(8);
  for (int order = 16; order <= 512; order *= 2) {
    CMatrix next = expansion(order);
    const double change = max_abs(next - middle);
    middle = std::move(next);
    if (change < 1e-12) break;
  }

  CVector half(d);
  for (Eigen::Index i = 0; i < d; ++i) half(i) = std::exp(-kI * (energy(i) * tau));
  const CMatrix approx = v * half.asDiagonal() * middle * half.asDiagonal() * v.adjoint();
  const CMatrix exact = Propagator(a - eps * b).unitary(tau) * Propagator(a + eps * b).unitary(tau);
  Eigen::JacobiSVD<CMatrix> svd(exact - approx);
  return svd.singularValues()(0);
}

}  // namespace nvghz
