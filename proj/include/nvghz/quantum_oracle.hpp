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

// Dense simulation of M nuclear and L probe qubits under the secular
// effective Hamiltonian
//
//   H = sum_k (w/2) Z_k + G sum_{k,j} [A_kj X_k + B_kj Y_k + C_kj Z_k] Z_j.
//
// Basis ordering: nuclear qubits first, then probes; qubit 0 is the most
// significant bit of a basis index. |0> is the +1 eigenstate of Z.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nvghz/linalg.hpp"
#include "nvghz/model_core.hpp"

namespace nvghz {

inline constexpr std::size_t default_dimension_cap = std::size_t{1} << 12;

/// H built directly from its matrix elements. `flip_probe_z` negates every
/// probe Z, which is the Hamiltonian seen between two probe pi pulses.
/// Throws ResourceError above `dimension_cap`, SingularityError on coincident
/// sites.
CMatrix build_effective_hamiltonian(std::span<const SpinSite> nuclear,
                                    std::span<const SpinSite> probes, double omega_target,
                                    double coupling_G, bool flip_probe_z = false,
                                    std::size_t dimension_cap = default_dimension_cap);

class QuantumSystem {
 public:
  static QuantumSystem make(std::vector<SpinSite> nuclear, std::vector<SpinSite> probes,
                            double omega_target, double coupling_G,
                            std::size_t dimension_cap = default_dimension_cap);
  static QuantumSystem make(std::vector<SpinSite> nuclear, std::vector<SpinSite> probes,
                            const PhysicalScenario& scenario,
                            std::size_t dimension_cap = default_dimension_cap);

  int m_nuclear() const { return static_cast<int>(nuclear_.size()); }
  int l_probe() const { return static_cast<int>(probes_.size()); }
  int qubits() const { return m_nuclear() + l_probe(); }
  std::size_t dimension() const { return std::size_t{1} << qubits(); }
  const std::vector<SpinSite>& nuclear_sites() const { return nuclear_; }
  const std::vector<SpinSite>& probe_sites() const { return probes_; }
  const CMatrix& hamiltonian() const { return hamiltonian_; }
  double omega_target() const { return omega_target_; }
  double coupling_G() const { return coupling_G_; }

  /// Bit of qubit q in a basis index.
  std::size_t qubit_bit(int q) const { return std::size_t{1} << (qubits() - 1 - q); }
  /// All probe bits.
  std::size_t probe_mask() const { return (std::size_t{1} << l_probe()) - 1; }

 private:
  QuantumSystem() = default;

  std::vector<SpinSite> nuclear_;
  std::vector<SpinSite> probes_;
  double omega_target_ = 0.0;
  double coupling_G_ = 0.0;
  CMatrix hamiltonian_;
};

/// Unit-trace Hermitian PSD operator.
class DensityState {
 public:
  /// Throws DomainError unless the matrix is square, Hermitian and unit
  /// trace to `tol`, with no eigenvalue below -1e-10.
  static DensityState from_matrix(CMatrix rho, double tol = 1e-12);
  /// Skips validation; for intermediate states produced by trusted maps.
  static DensityState unchecked(CMatrix rho);

  const CMatrix& matrix() const { return rho_; }
  CMatrix& matrix() { return rho_; }
  std::size_t dimension() const { return static_cast<std::size_t>(rho_.rows()); }

  double trace_error() const;
  double hermiticity_error() const;
  double min_eigenvalue() const;
  bool valid(double trace_tol = 1e-12, double eig_tol = 1e-10) const;

 private:
  CMatrix rho_;
};

/// exp(-i H t) via one Hermitian eigendecomposition, reused for any t.
class Propagator {
 public:
  /// Throws NumericError if the eigensolver fails or H is not Hermitian.
  explicit Propagator(const CMatrix& hamiltonian);
  /// Throws NumericError if the result is not unitary to 1e-10.
  CMatrix unitary(double t) const;

 private:
  CMatrix vectors_;
  Eigen::VectorXd values_;
};

DensityState evolve(const DensityState& state, const CMatrix& unitary);
DensityState evolve(const DensityState& state, const CMatrix& hamiltonian, double duration);

/// Conjugation by X on every probe qubit.
DensityState pi_pulse_probes(const DensityState& state, const QuantumSystem& sys);

struct DephasingChannel {
  double t = 0.0;   // s
  double t2 = 0.0;  // s
  /// exp(-(t / t2)^3).
  double attenuation() const;
};

/// rho -> (1+e)/2 rho + (1-e)/2 Z rho Z on each listed qubit.
DensityState apply_dephasing_channel(const DensityState& state, const DephasingChannel& channel,
                                     std::span<const int> qubits, int total_qubits);

/// (1/2)[|0..0><0..0| + |1..1><1..1| + e^{-L (t/t2)^3}(|0..0><1..1| + h.c.)].
CMatrix dephased_ghz_observable(int l_probe, double t, double t2);

/// How dephasing enters a protocol run.
///   none:                   noiseless dynamics.
///   observable_attenuation: noiseless dynamics, attenuated observable.
///   interleaved_channel:    per-period channel on the probes; qualitative
///                           only, it does not produce the T2DD rescaling.
enum class NoiseModel { none, observable_attenuation, interleaved_channel };

struct OracleParams {
  double tau = 0.0;  // s
  int n_dd = 1;
  double t2_echo = 0.0;  // s; only read when noise != none
  NoiseModel noise = NoiseModel::none;
  /// 2^M x 2^M nuclear state; the maximally mixed state when empty.
  std::optional<CMatrix> nuclear_state;
};

/// <sum_j X_j> after n_dd + 1 periods of [evolve tau, pi pulse] from
/// rho_T (x) |+><+|^L.
double run_dd_protocol(const QuantumSystem& sys, const OracleParams& params);

/// Return probability Tr[rho (I (x) O)] after [evolve tau, pi pulse] x 2
/// from rho_T (x) |GHZ><GHZ|; O is the (dephased) GHZ projector.
double run_ghz_protocol(const QuantumSystem& sys, const OracleParams& params);

/// Spectral-norm distance between exp(-i(A - eB)tau) exp(-i(A + eB)tau) and
/// its second-order expansion in e, with the time-ordered integrals of
/// F(l) = e^{iAl} B e^{-iAl} done by Gauss-Legendre, order doubled until the
/// expansion changes by less than 1e-12.
double perturbation_defect(const CMatrix& a, const CMatrix& b, double eps, double tau);

}  // namespace nvghz
