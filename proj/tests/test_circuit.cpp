// Copyright 2026 The spinreg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "spinreg/circuit.hpp"
#include "spinreg/errors.hpp"
#include "spinreg/pulse.hpp"

using namespace spinreg;

namespace {

constexpr double kMHz = kTwoPi * 1e6;

const ComplexMatrix kI2 = oracle::mat2(1, 0, 0, 1);
const ComplexMatrix kP0 = oracle::mat2(1, 0, 0, 0);
const ComplexMatrix kP1 = oracle::mat2(0, 0, 0, 1);
const ComplexMatrix kX = oracle::mat2(0, 1, 1, 0);
const ComplexMatrix kZ = oracle::mat2(1, 0, 0, -1);

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

// |0><0| (x) I + |1><1| (x) u: upper factor controls the lower one.
ComplexMatrix ctrl_down(const ComplexMatrix& u) {
  return add(oracle::naive_kron(kP0, kI2), oracle::naive_kron(kP1, u));
}
// I (x) |0><0| + u (x) |1><1|: lower factor controls the upper one.
ComplexMatrix ctrl_up(const ComplexMatrix& u) {
  return add(oracle::naive_kron(kI2, kP0), oracle::naive_kron(u, kP1));
}

bool is_identity(const ComplexMatrix& m, double tol) { return oracle::max_diff(m, ComplexMatrix::identity(m.dim())) <= tol; }

RegisterSpec one_nucleus() {
  RegisterSpec s;
  s.omega_L = 0.8 * kMHz;
  const double w1 = 15 * kMHz, th = 0.6, ph = 0.3;
  s.hyperfine = {{w1 * std::sin(th) * std::cos(ph), w1 * std::sin(th) * std::sin(ph), w1 * std::cos(th) - s.omega_L}};
  s.validate();
  return s;
}

double lowered_fidelity(const Circuit& c, const RegisterSpec& spec) {
  std::vector<LocalFrame> frames;
  for (std::size_t j = 0; j < spec.n_nuclei(); ++j) frames.push_back(local_frame(spec, j));
  const LoweringOptions opt;
  const LoweredCircuit l = lower_to_pulses(c, spec, min_clock_time(frames, opt.rf_amp), opt);
  SimulationOptions so;
  so.backend = Backend::rwa;
  return oracle::fidelity(l.target_lab, simulate_sequence(spec, l.sequence, so));
}

ComplexMatrix circuit_oracle_product(const std::vector<ComplexMatrix>& ops_in_order) {
  ComplexMatrix u = ComplexMatrix::identity(ops_in_order.front().dim());
  for (const auto& g : ops_in_order) u = oracle::naive_mul(g, u);
  return u;
}

}  // namespace

TEST_CASE("abc decomposition identities") {
  std::mt19937_64 rng(5);
  auto check = [](const ComplexMatrix& u, double tol) {
    const AbcDecomposition d = abc_decompose(u);
    CHECK(oracle::max_diff(oracle::naive_mul(d.a, oracle::naive_mul(d.b, d.c)), kI2) <= tol);
    ComplexMatrix r = oracle::naive_mul(d.a, oracle::naive_mul(kZ, oracle::naive_mul(d.b, oracle::naive_mul(kZ, d.c))));
    CHECK(oracle::max_diff(r * std::polar(1.0, d.alpha), u) <= tol);
    CHECK(d.a.is_unitary(1e-12));
    CHECK(d.b.is_unitary(1e-12));
    CHECK(d.c.is_unitary(1e-12));
  };
  for (int k = 0; k < 1000; ++k) check(oracle::random_unitary(2, rng), 1e-12);
  check(kI2, 1e-15);
  check(kX, 1e-12);
  check(kZ, 1e-12);
  check(oracle::mat2(0, 1, -1, 0), 1e-12);
  const AbcDecomposition id = abc_decompose(kI2);
  CHECK(std::abs(std::remainder(id.alpha, kTwoPi)) <= 1e-12);
  CHECK_THROWS_AS(abc_decompose(oracle::mat2(1, 1, 0, 1)), ValidationError);
}

TEST_CASE("circuit unitary ordering and embedding") {
  Circuit empty;
  empty.n_qubits = 3;
  CHECK(is_identity(circuit_unitary(empty), 0.0));
  Circuit hh;
  hh.n_qubits = 1;
  hh.add(GateKind::H, 0).add(GateKind::H, 0);
  CHECK(is_identity(circuit_unitary(hh), 1e-15));

  // Leftmost gate acts first: X then Z is Z X.
  Circuit xz;
  xz.n_qubits = 1;
  xz.add(GateKind::X, 0).add(GateKind::Z, 0);
  CHECK(oracle::max_diff(circuit_unitary(xz), oracle::naive_mul(kZ, kX)) <= 1e-15);

  // Qubit 0 is the most significant factor; CX with control 0, target 2.
  Circuit cx;
  cx.n_qubits = 3;
  cx.add(GateKind::X, 2, 0);
  const ComplexMatrix want = add(oracle::naive_kron(kP0, oracle::naive_kron(kI2, kI2)),
                                 oracle::naive_kron(kP1, oracle::naive_kron(kI2, kX)));
  CHECK(oracle::max_diff(circuit_unitary(cx), want) <= 1e-15);

  std::mt19937_64 rng(8);
  const ComplexMatrix u = oracle::random_unitary(2, rng);
  Circuit mix;
  mix.n_qubits = 2;
  mix.add(GateKind::H, 1).add_u(u, 0, 1).add(GateKind::Y, 0);
  const ComplexMatrix y = oracle::mat2(0, cplx(0, -1), cplx(0, 1), 0);
  const ComplexMatrix h = oracle::mat2(1, 1, 1, -1) * cplx(1 / std::sqrt(2.0));
  const ComplexMatrix ref = circuit_oracle_product(
      {oracle::naive_kron(kI2, h), ctrl_up(u), oracle::naive_kron(y, kI2)});
  CHECK(oracle::max_diff(circuit_unitary(mix), ref) <= 1e-14);

  // Phase gate of angle a is R_z(a), diag(1, e^{ia}) up to a global phase.
  Circuit ph;
  ph.n_qubits = 1;
  ph.add_phase(GateKind::Phase, 0.7, 0);
  CHECK(oracle::phase_free_diff(circuit_unitary(ph), oracle::mat2(1, 0, 0, std::polar(1.0, 0.7))) <= 1e-14);
}

TEST_CASE("two-nucleus controlled gate construction") {
  const Circuit id = controlled_u_nn(kI2);
  CHECK(id.n_qubits == 3);
  CHECK(id.gates.size() == 9);
  CHECK(is_identity(circuit_unitary(id), 1e-12));

  const ComplexMatrix cx12 = oracle::naive_kron(kI2, ctrl_down(kX));
  CHECK(oracle::max_diff(circuit_unitary(controlled_u_nn(kX)), cx12) <= 1e-10);

  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix u = oracle::random_unitary(2, rng);
    const ComplexMatrix got = circuit_unitary(controlled_u_nn(u));
    CHECK(oracle::max_diff(got, oracle::naive_kron(kI2, ctrl_down(u))) <= 1e-10);
  }
}

TEST_CASE("two-nucleus construction by basis sectors") {
  // Trace each (electron, C1) basis sector through the gate list by hand.
  std::mt19937_64 rng(22);
  const ComplexMatrix u = oracle::random_unitary(2, rng);
  const ComplexMatrix got = circuit_unitary(controlled_u_nn(u));
  for (int e = 0; e < 2; ++e)
    for (int c1 = 0; c1 < 2; ++c1)
      for (int c2 = 0; c2 < 2; ++c2) {
        const std::size_t col = 4 * e + 2 * c1 + c2;
        for (int c2o = 0; c2o < 2; ++c2o) {
          const std::size_t row = 4 * e + 2 * c1 + c2o;
          const cplx want = c1 == 1 ? u(c2o, c2) : cplx(c2o == c2 ? 1.0 : 0.0);
          CHECK(std::abs(got(row, col) - want) <= 1e-10);
        }
      }
}

TEST_CASE("electron-target controlled gate construction") {
  CHECK(is_identity(circuit_unitary(controlled_u_electron(kI2)), 1e-12));
  CHECK(oracle::phase_free_diff(circuit_unitary(controlled_u_electron(kZ)), ctrl_up(kZ)) <= 1e-10);
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix u = oracle::random_unitary(2, rng);
    const ComplexMatrix got = circuit_unitary(controlled_u_electron(u));
    CHECK(oracle::max_diff(got, ctrl_up(u)) <= 1e-10);
  }
  // Nucleus in |0>: the electron sees A B C = I.
  const ComplexMatrix u = oracle::random_unitary(2, rng);
  const ComplexMatrix got = circuit_unitary(controlled_u_electron(u));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) CHECK(std::abs(got(2 * a, 2 * b) - cplx(a == b ? 1.0 : 0.0)) <= 1e-10);
}

TEST_CASE("circuit validation") {
  Circuit c;
  c.n_qubits = 2;
  c.add(GateKind::X, 2);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.gates.clear();
  c.add(GateKind::X, 1, 1);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.gates.clear();
  c.add_u(oracle::mat2(1, 0, 0, 1.01), 0);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.gates.clear();
  c.add_phase(GateKind::Phase, std::nan(""), 0);
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c.gates.clear();
  c.add(GateKind::H, 1, 0);
  CHECK_NOTHROW(c.validate());
  c.n_qubits = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("circuit text parser") {
  std::istringstream in(
      "# two-qubit example\n"
      "qubits 2\n"
      "H 0\n"
      "X 1 0   # controlled on the electron\n"
      "U2 0 1 0,1 0,0 0,0 0,-1\n"
      "PHASE 1 0.5\n");
  const Circuit c = read_circuit(in);
  CHECK(c.n_qubits == 2);
  REQUIRE(c.gates.size() == 4);
  CHECK(c.gates[1].kind == GateKind::X);
  CHECK(c.gates[1].target == 1);
  CHECK(*c.gates[1].control == 0);
  CHECK(c.gates[2].kind == GateKind::U2);
  CHECK(*c.gates[2].control == 1);
  CHECK(c.gates[2].u(0, 0) == cplx(0, 1));
  CHECK(c.gates[2].u(1, 1) == cplx(0, -1));
  CHECK(c.gates[3].angle == 0.5);
  CHECK(!c.gates[3].control);

  auto err = [](const std::string& text) -> std::string {
    std::istringstream is(text);
    try {
      read_circuit(is);
    } catch (const ValidationError& e) {
      return e.what();
    }
    return {};
  };
  CHECK(err("").find("missing") != std::string::npos);
  CHECK(err("H 0\n").find("line 1") != std::string::npos);
  CHECK(err("qubits 2\nH 0\nFOO 1\n").find("line 3: unknown gate kind 'FOO'") != std::string::npos);
  CHECK(err("qubits 2\nH 0 1 2\n").find("line 2: wrong number") != std::string::npos);
  CHECK(err("qubits 2\n\nX -1\n").find("line 3: bad qubit index") != std::string::npos);
  CHECK(err("qubits 2\nX 5\n").find("line 2") != std::string::npos);
  CHECK(err("qubits 2\nU2 0 1,0 1,0 0,0 1,0\n").find("line 2") != std::string::npos);
  CHECK(err("qubits 2\nU2 0 1 0 0 1\n").find("line 2: complex") != std::string::npos);
  CHECK(err("qubits 2\nPHASE 0 x\n").find("line 2: bad number 'x'") != std::string::npos);
}

TEST_CASE("lowering to pulse schedules") {
  const RegisterSpec spec = one_nucleus();
  Circuit xe;
  xe.n_qubits = 2;
  xe.add(GateKind::X, 0);
  CHECK(lowered_fidelity(xe, spec) >= 0.9999);
  {
    const LoweredCircuit l = lower_to_pulses(xe, spec, 0.0);
    REQUIRE(l.sequence.segments.size() == 1);
    CHECK(l.sequence.segments[0].mw_amp > 0);
    CHECK(l.sequence.segments[0].rf_amp == 0);
  }

  Circuit cr;
  cr.n_qubits = 2;
  cr.add_u(oracle::su2(kPi / 2, 1, 0, 0), 1, 0);
  CHECK(lowered_fidelity(cr, spec) >= 0.999);

  Circuit ur;
  ur.n_qubits = 2;
  ur.add_u(oracle::su2(kPi, 1, 0, 0), 1);
  CHECK(lowered_fidelity(ur, spec) >= 0.99);

  std::mt19937_64 rng(31);
  Circuit mix;
  mix.n_qubits = 2;
  mix.add(GateKind::H, 0).add_u(oracle::random_unitary(2, rng), 1, 0).add(GateKind::Z, 0).add_u(oracle::random_unitary(2, rng), 1);
  const double f = lowered_fidelity(mix, spec);
  CHECK(f >= 0.99);

  // Identity insertion leaves the fidelity unchanged.
  Circuit padded;
  padded.n_qubits = 2;
  for (const Gate& g : mix.gates) {
    padded.gates.push_back(g);
    padded.add_u(kI2, 0);
  }
  CHECK(std::abs(lowered_fidelity(padded, spec) - f) <= 1e-9);

  Circuit ce;
  ce.n_qubits = 2;
  ce.add(GateKind::X, 0, 1);
  CHECK(lowered_fidelity(ce, spec) >= 0.99);
}

TEST_CASE("lowering errors") {
  const RegisterSpec spec = one_nucleus();
  Circuit cr;
  cr.n_qubits = 2;
  cr.add(GateKind::X, 1, 0);
  CHECK_THROWS_AS(lower_to_pulses(cr, spec, 1e-6), DomainError);
  cr.n_qubits = 3;
  CHECK_THROWS_AS(lower_to_pulses(cr, spec, 1e-3), ValidationError);
  cr.n_qubits = 2;
  LoweringOptions bad;
  bad.t_pi_mw = 0;
  CHECK_THROWS_AS(lower_to_pulses(cr, spec, 1e-3, bad), ValidationError);
}
