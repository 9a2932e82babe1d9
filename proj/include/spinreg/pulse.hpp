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

#include <optional>
#include <span>

#include "spinreg/linalg.hpp"
#include "spinreg/propagation.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

struct ReducedRabi {
  double omega_bar = 0.0;
  double lambda = 0.0;
};

ReducedRabi reduced_rabi(const LocalFrame& frame, double rf_amp);

// Local-frame rotations Z(a) = exp(-i a sigma_z/2), X(b) = exp(-i b sigma_x/2).
ComplexMatrix rot_z(double a);
ComplexMatrix rot_x(double b);
// R_z(gamma) R_x(beta) R_z(alpha)
ComplexMatrix euler_zxz(double alpha, double beta, double gamma);

// Lab-frame ms=1 propagator of a resonant rf pulse, in local-frame coordinates
// (rf_amp is the enhanced ms=1 amplitude).
ComplexMatrix ul_propagator(const LocalFrame& frame, double rf_amp, double t_p, double psi);

double min_clock_time(std::span<const LocalFrame> frames, double rf_amp);

// Smallest T >= t_min that is a multiple of `periods` nuclear Larmor periods.
double larmor_aligned_clock(const RegisterSpec& spec, double t_min, int periods = 1);

// Both compilers take the enhanced ms=1 amplitude Omega_rf; emitted segments
// carry the bare amplitude Omega_rf / kappa_target. A non-positive t_pi means
// t_pi = pi / Omega_bar.
PulseSequence compile_plain_gate(const RegisterSpec& spec, const GateSpec& gate, double rf_amp, double t_pi,
                                 double T);
PulseSequence compile_decoupled_gate(const RegisterSpec& spec, const GateSpec& gate, double rf_amp,
                                     double t_pi_rf, double t_pi_mw, double T);

// The 2x2 target-nucleus blocks (local frame of the target) that the ideal
// schedules implement in the ms=1 and ms=0 electron branches, phases included.
struct GateBlocks {
  ComplexMatrix ms1;
  ComplexMatrix ms0;
};
GateBlocks plain_gate_blocks(const RegisterSpec& spec, const GateSpec& gate, double T);
GateBlocks decoupled_gate_blocks(const RegisterSpec& spec, const GateSpec& gate, double T);

ComplexMatrix simulate_sequence(const RegisterSpec& spec, const PulseSequence& seq, const SimulationOptions& opt = {});

// Full-register operator P0 (x) u0 + P1 (x) u1 acting on nucleus j with
// u0, u1 given in the local frame of j (identity on the other nuclei).
ComplexMatrix controlled_local(const RegisterSpec& spec, std::size_t j, const ComplexMatrix& u0_local,
                               const ComplexMatrix& u1_local);

// 2x2 block of `u` on nucleus j for the given electron branch, assuming u
// is block diagonal on the electron and a product on nucleus j; the block is
// expressed in the local frame of j. Valid for one-nucleus registers or when
// the other nuclei factor out.
ComplexMatrix branch_block_local(const RegisterSpec& spec, const ComplexMatrix& u, int ms, std::size_t j);

// Re(rho01 * conj(rho01_ref)) / |rho01_ref|^2 for the electron started in |+>
// with the nuclei maximally mixed.
double electron_coherence(const ComplexMatrix& u, const ComplexMatrix& u_ref);

}  // namespace spinreg
