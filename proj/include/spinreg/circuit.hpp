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

#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "spinreg/linalg.hpp"
#include "spinreg/propagation.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

enum class GateKind { X, Y, Z, H, U2, Phase, GlobalPhase };

// Phase is diag(exp(-i angle/2), exp(i angle/2)); GlobalPhase is
// exp(i angle/2) times the identity on the target.
struct Gate {
  GateKind kind = GateKind::X;
  std::size_t target = 0;
  std::optional<std::size_t> control;  // controlled on |1>
  ComplexMatrix u;                     // U2 only
  double angle = 0.0;                  // Phase / GlobalPhase only

  ComplexMatrix matrix() const;  // 2x2 action on the target
};

// Qubit 0 is the electron, qubit j (j >= 1) is nucleus j - 1.
struct Circuit {
  std::size_t n_qubits = 1;
  std::vector<Gate> gates;

  Circuit& add(GateKind kind, std::size_t target, std::optional<std::size_t> control = std::nullopt);
  Circuit& add_u(const ComplexMatrix& u, std::size_t target, std::optional<std::size_t> control = std::nullopt);
  Circuit& add_phase(GateKind kind, double angle, std::size_t target,
                     std::optional<std::size_t> control = std::nullopt);
  void validate() const;
};

// Dense operator of a single circuit gate on n_qubits (qubit 0 most significant).
ComplexMatrix gate_operator(const Gate& g, std::size_t n_qubits);

// Leftmost gate acts first.
ComplexMatrix circuit_unitary(const Circuit& c);

struct AbcDecomposition {
  ComplexMatrix a, b, c;
  double alpha = 0.0;
};

// u = exp(i alpha) A Z B Z C with ABC = I.
AbcDecomposition abc_decompose(const ComplexMatrix& u);

// Controlled-u from nucleus C1 (qubit 1) onto C2 (qubit 2) through the electron.
Circuit controlled_u_nn(const ComplexMatrix& u);
// Controlled-u from the nucleus (qubit 1) onto the electron (qubit 0).
Circuit controlled_u_electron(const ComplexMatrix& u);

// Basis change from the circuit's logical basis (each nucleus in its ms=1
// local frame) to lab coordinates: I_e (x) R_1 (x) ... (x) R_n.
ComplexMatrix logical_to_lab(const RegisterSpec& spec);

struct LoweringOptions {
  double rf_amp = kTwoPi * 20e3;  // enhanced ms=1 rf Rabi frequency
  double t_pi_mw = 0.25e-9;       // electron pi pulse duration
};

struct LoweredCircuit {
  PulseSequence sequence;
  double clock = 0.0;  // Larmor-aligned clock time used for nuclear gates
  // Lab-frame unitary the schedule implements ideally (the circuit unitary
  // in lab coordinates, up to global phase).
  ComplexMatrix target_lab;
};

LoweredCircuit lower_to_pulses(const Circuit& c, const RegisterSpec& spec, double T_clock,
                               const LoweringOptions& opt = {});

// One gate per line: KIND TARGET [CONTROL] [ARGS], with KIND in
// X Y Z H U2 PHASE GPHASE, U2 taking four complex entries "re,im" in row
// order and PHASE/GPHASE one angle in rad. A first line "qubits N" is
// required; '#' starts a comment.
Circuit read_circuit(std::istream& in);
Circuit read_circuit_file(const std::filesystem::path& path);

}  // namespace spinreg
