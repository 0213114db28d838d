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
#include <random>

#include <doctest.h>

#include "nvghz/errors.hpp"
#include "nvghz/geometric_factors.hpp"
#include "nvghz/quantum_oracle.hpp"
#include "nvghz/signal_model.hpp"

using namespace nvghz;

namespace {

// Textbook construction with Kronecker products, qubit 0 leftmost.
CMatrix pauli(char which) {
  CMatrix p(2, 2);
  switch (which) {
    case 'x': p << 0, 1, 1, 0; break;
    case 'y': p << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 'z': p << 1, 0, 0, -1; break;
    default: p.setIdentity();
  }
  return p;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix embed(int n, int q1, char p1, int q2 = -1, char p2 = 'i') {
  CMatrix out = CMatrix::Identity(1, 1);
  for (int q = 0; q < n; ++q) {
    out = kron(out, pauli(q == q1 ? p1 : q == q2 ? p2 : 'i'));
  }
  return out;
}

CMatrix reference_hamiltonian(const std::vector<SpinSite>& nuclear,
                              const std::vector<SpinSite>& probes, double w, double g,
                              bool flip) {
  const int m = static_cast<int>(nuclear.size());
  const int n = m + static_cast<int>(probes.size());
  const int dim = 1 << n;
  CMatrix h = CMatrix::Zero(dim, dim);
  for (int k = 0; k < m; ++k) h += 0.5 * w * embed(n, k, 'z');
  for (int k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < probes.size(); ++j) {
      const int q = m + static_cast<int>(j);
      const auto c = dipole_coefficients(nuclear[k].position - probes[j].position);
      const double s = flip ? -g : g;
      h += s * (c.a * embed(n, k, 'x', q, 'z') + c.b * embed(n, k, 'y', q, 'z') +
                c.c * embed(n, k, 'z', q, 'z'));
    }
  }
  return h;
}

struct Sites {
  std::vector<SpinSite> nuclear;
  std::vector<SpinSite> probes;
};

Sites random_sites(int l, int m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sites s;
  for (int k = 0; k < m; ++k)
    s.nuclear.push_back({Vec3(0.2 * u(rng) - 0.1, 0.2 * u(rng) - 0.1, 0.2 * u(rng) - 0.1),
                         SpinRole::nuclear});
  for (int j = 0; j < l; ++j)
    s.probes.push_back({Vec3(u(rng), 2 * u(rng) - 1, 1 + u(rng)), SpinRole::probe});
  return s;
}

ProtocolParams closed_params(int l, int m, double g, int n_dd) {
  ProtocolParams p;
  p.tau = 1.3;
  p.n_dd = n_dd;
  p.omega_target = 1.0;
  p.t2_echo = std::numeric_limits<double>::infinity();
  p.probe_count = l;
  p.nuclear_count = m;
  p.coupling_G = g;
  return p;
}

CMatrix random_density(int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_SUITE("quantum_oracle") {

TEST_CASE("Hamiltonian matches the Kronecker-product construction") {
  for (auto [l, m] : {std::pair{1, 1}, {2, 1}, {1, 2}, {3, 2}}) {
    const auto s = random_sites(l, m, static_cast<std::uint64_t>(10 * l + m));
    for (bool flip : {false, true}) {
      const CMatrix fast = build_effective_hamiltonian(s.nuclear, s.probes, 1.7, 0.3, flip);
      const CMatrix ref = reference_hamiltonian(s.nuclear, s.probes, 1.7, 0.3, flip);
      CHECK((fast - ref).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("dimension cap and coincident sites") {
  const auto s = random_sites(4, 2, 3);
  CHECK_THROWS_AS(build_effective_hamiltonian(s.nuclear, s.probes, 1.0, 0.1, false, 32),
                  ResourceError);
  CHECK_NOTHROW(build_effective_hamiltonian(s.nuclear, s.probes, 1.0, 0.1, false, 64));
  std::vector<SpinSite> clash{{s.nuclear[0].position}};
  CHECK_THROWS_AS(build_effective_hamiltonian(s.nuclear, clash, 1.0, 0.1), SingularityError);
}

TEST_CASE("system layout") {
  const auto s = random_sites(3, 2, 4);
  const auto sys = QuantumSystem::make(s.nuclear, s.probes, 1.0, 0.01);
  CHECK(sys.qubits() == 5);
  CHECK(sys.dimension() == 32);
  CHECK(sys.qubit_bit(0) == 16);
  CHECK(sys.qubit_bit(4) == 1);
  CHECK(sys.probe_mask() == 0b111);
  const auto scen = QuantumSystem::make(s.nuclear, s.probes, PhysicalScenario::proton_nv());
  CHECK(scen.coupling_G() == PhysicalScenario::proton_nv().coupling_G());
}

TEST_CASE("density state validation") {
  CHECK_NOTHROW(DensityState::from_matrix(random_density(4, 1)));
  CMatrix bad = random_density(4, 2);
  bad(0, 0) += 0.1;
  CHECK_THROWS_AS(DensityState::from_matrix(bad), DomainError);
  CMatrix nonherm = random_density(4, 3);
  nonherm(0, 1) += Complex(0.0, 0.1);
  CHECK_THROWS_AS(DensityState::from_matrix(nonherm), DomainError);
  CMatrix negative = CMatrix::Zero(2, 2);
  negative(0, 0) = 1.5;
  negative(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityState::from_matrix(negative), DomainError);
  CHECK_FALSE(DensityState::unchecked(negative).valid());
  CHECK(DensityState::unchecked(negative).min_eigenvalue() == doctest::Approx(-0.5));
}

TEST_CASE("propagator") {
  const auto s = random_sites(2, 1, 5);
  const CMatrix h = build_effective_hamiltonian(s.nuclear, s.probes, 1.0, 0.2);
  const Propagator prop(h);
  const CMatrix u1 = prop.unitary(0.4), u2 = prop.unitary(0.9), u3 = prop.unitary(1.3);
  CHECK((u1 * u2 - u3).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((u3 * u3.adjoint() - CMatrix::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-13);
  // A single precessing qubit.
  CMatrix z = pauli('z') * 0.5;
  const CMatrix u = Propagator(z).unitary(0.7);
  CHECK(std::abs(u(0, 0) - std::exp(Complex(0, -0.35))) < 1e-15);
  CHECK(std::abs(u(1, 1) - std::exp(Complex(0, 0.35))) < 1e-15);
  CMatrix nonherm = CMatrix::Zero(2, 2);
  nonherm(0, 1) = 1.0;
  CHECK_THROWS_AS(Propagator{nonherm}, NumericError);
}

TEST_CASE("pi pulse") {
  const auto s = random_sites(2, 1, 6);
  const auto sys = QuantumSystem::make(s.nuclear, s.probes, 1.0, 0.05);
  const auto rho = DensityState::from_matrix(random_density(8, 7));
  const auto twice = pi_pulse_probes(pi_pulse_probes(rho, sys), sys);
  CHECK((twice.matrix() - rho.matrix()).cwiseAbs().maxCoeff() == 0.0);
  const CMatrix x = kron(pauli('i'), kron(pauli('x'), pauli('x')));
  CHECK((pi_pulse_probes(rho, sys).matrix() - x * rho.matrix() * x).cwiseAbs().maxCoeff() < 1e-15);
  // Pulse, evolve, pulse == evolve under the probe-flipped Hamiltonian.
  const CMatrix flipped = build_effective_hamiltonian(s.nuclear, s.probes, 1.0, 0.05, true);
  const auto a = pi_pulse_probes(evolve(pi_pulse_probes(rho, sys), sys.hamiltonian(), 0.8), sys);
  const auto b = evolve(rho, flipped, 0.8);
  CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dephasing channel") {
  const DephasingChannel ch{0.5, 0.8};
  CHECK(ch.attenuation() == doctest::Approx(std::exp(-std::pow(0.5 / 0.8, 3))));
  const auto rho = DensityState::from_matrix(random_density(8, 8));
  const std::vector<int> q1{1};
  const auto out = apply_dephasing_channel(rho, ch, q1, 3);
  const double e = ch.attenuation();
  const CMatrix z = embed(3, 1, 'z');
  const CMatrix expect = 0.5 * (1 + e) * rho.matrix() + 0.5 * (1 - e) * z * rho.matrix() * z;
  CHECK((out.matrix() - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(out.trace_error() < 1e-14);
  CHECK(out.min_eigenvalue() > -1e-12);
  CHECK_THROWS_AS(apply_dephasing_channel(rho, ch, std::vector<int>{3}, 3), DomainError);

  const CMatrix o = dephased_ghz_observable(2, 0.5, 0.8);
  CHECK(o(0, 0).real() == 0.5);
  CHECK(o(3, 3).real() == 0.5);
  CHECK(o(0, 3).real() == doctest::Approx(0.5 * std::exp(-2 * std::pow(0.5 / 0.8, 3))));
  CHECK(o(1, 1) == Complex(0.0));
}

TEST_CASE("noiseless protocols at G = 0") {
  const auto s = random_sites(3, 1, 9);
  const auto sys = QuantumSystem::make(s.nuclear, s.probes, 1.0, 0.0);
  OracleParams op;
  op.tau = 1.3;
  op.n_dd = 3;
  CHECK(run_dd_protocol(sys, op) == doctest::Approx(3.0).epsilon(1e-13));
  op.n_dd = 1;
  CHECK(run_ghz_protocol(sys, op) == doctest::Approx(1.0).epsilon(1e-13));
  op.noise = NoiseModel::observable_attenuation;
  op.t2_echo = 5.0;
  const double c = std::exp(-3 * std::pow(2.6 / 5.0, 3));
  CHECK(run_ghz_protocol(sys, op) == doctest::Approx(0.5 * (1 + c)).epsilon(1e-13));
}

TEST_CASE("closed forms reproduce the simulated signal") {
  const double g = 1e-2;
  for (auto [l, m] : {std::pair{1, 1}, {2, 1}, {2, 2}, {3, 1}}) {
    CAPTURE(l);
    CAPTURE(m);
    const auto s = random_sites(l, m, static_cast<std::uint64_t>(100 + 10 * l + m));
    const auto sys = QuantumSystem::make(s.nuclear, s.probes, 1.0, g);
    OracleParams op;
    op.tau = 1.3;
    op.n_dd = 3;
    const double gs = gamma_sep_discrete(s.nuclear, s.probes).value;
    const double ge = gamma_ent_discrete(s.nuclear, s.probes).value;
    const double sim_dd = run_dd_protocol(sys, op);
    const double closed_dd = expectation_mx(closed_params(l, m, g, 3), gs).value;
    CHECK(std::abs(sim_dd - closed_dd) < 1e-2 * (l - closed_dd));
    op.n_dd = 1;
    const double sim_ghz = run_ghz_protocol(sys, op);
    const double closed_ghz = p_ghz(closed_params(l, m, g, 1), ge).value;
    CHECK(std::abs(sim_ghz - closed_ghz) < 1e-2 * (1 - closed_ghz));
  }
}

TEST_CASE("the closed-form remainder is fourth order in G") {
  // The observables are even in G, so halving G shrinks the remainder by
  // about 16.
  const auto s = random_sites(2, 1, 21);
  auto residual = [&](double g) {
    const auto sys = QuantumSystem::make(s.nuclear, s.probes, 1.0, g);
    OracleParams op;
    op.tau = 1.3;
    op.n_dd = 3;
    const double gs = gamma_sep_discrete(s.nuclear, s.probes).value;
    return std::abs(run_dd_protocol(sys, op) - expectation_mx(closed_params(2, 1, g, 3), gs).value);
  };
  const double ratio = residual(4e-2) / residual(2e-2);
  CHECK(ratio == doctest::Approx(16.0).epsilon(0.1));
}

TEST_CASE("nuclear initial state does not matter") {
  const auto s = random_sites(2, 1, 31);
  const auto sys = QuantumSystem::make(s.nuclear, s.probes, 1.0, 0.05);
  OracleParams op;
  op.tau = 1.3;
  op.n_dd = 3;
  const double mixed = run_dd_protocol(sys, op);
  CMatrix up = CMatrix::Zero(2, 2);
  up(0, 0) = 1.0;
  op.nuclear_state = up;
  CHECK(run_dd_protocol(sys, op) == doctest::Approx(mixed).epsilon(1e-10));
  op.nuclear_state = CMatrix::Constant(2, 2, 0.5);
  CHECK(run_dd_protocol(sys, op) == doctest::Approx(mixed).epsilon(1e-10));
  op.nuclear_state = CMatrix::Identity(4, 4) * 0.25;
  CHECK_THROWS_AS(run_dd_protocol(sys, op), DomainError);
}

TEST_CASE("second-order expansion defect") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> n;
  auto herm = [&](int dim) {
    CMatrix a(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
    return CMatrix(0.5 * (a + a.adjoint()));
  };
  const CMatrix a = herm(4), b = herm(4);
  const double d1 = perturbation_defect(a, b, 1e-2, 0.7);
  const double d2 = perturbation_defect(a, b, 5e-3, 0.7);
  CHECK(d2 / d1 == doctest::Approx(0.125).epsilon(0.02));
  // Commuting pieces: the expansion only misses higher powers of e.
  const CMatrix diag_a = a.diagonal().asDiagonal();
  const CMatrix diag_b = b.diagonal().asDiagonal();
  CHECK(perturbation_defect(diag_a, diag_b, 1e-2, 0.7) < 1e-5);
}

}  // TEST_SUITE
