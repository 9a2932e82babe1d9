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

#include <cstddef>
#include <optional>
#include <vector>

#include "spinreg/linalg.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

struct PulseSegment {
  double duration = 0.0;  // s
  double mw_amp = 0.0;    // rad/s, electron Rabi frequency
  double mw_phase = 0.0;  // rad
  double rf_amp = 0.0;    // rad/s, bare nuclear Rabi frequency (ms=0)
  double rf_phase = 0.0;  // rad, referenced to the start of the segment
  double rf_carrier = 0.0;  // rad/s
};

struct PulseSequence {
  std::vector<PulseSegment> segments;
  double total_time() const;
};

struct GateSpec {
  std::size_t target_nucleus = 0;
  double euler_alpha = 0.0;
  double euler_beta = 0.0;
  double euler_gamma = 0.0;
};

// Sampled Ornstein-Uhlenbeck electron detuning; values[k] holds on
// [k*dt, (k+1)*dt) measured from the start of the sequence.
struct OuPath {
  double dt = 0.0;
  std::vector<double> values;
};

inline constexpr int kDefaultStepsPerPeriod = 20;

struct SimulationOptions {
  Backend backend = Backend::rwa;
  double static_detuning = 0.0;   // rad/s on the electron
  const OuPath* ou = nullptr;
  double max_step = 0.0;          // lab backend; 0 selects the automatic step
  int steps_per_period = kDefaultStepsPerPeriod;
};

// One piecewise-constant propagation step. The generator for the step is
// fixed by the segment controls, the step-averaged rf coefficient and the
// electron detuning; rwa steps additionally carry a rotating-frame factor on
// the last step of each rf segment.
struct PropagationStep {
  std::size_t segment = 0;
  double t0 = 0.0;  // from segment start
  double dt = 0.0;
  double detuning = 0.0;
  // Lab backend: average of 2 cos(carrier t + phase) over the step and its
  // derivative with respect to the phase.
  double rf_coef = 0.0;
  double rf_coef_dphase = 0.0;
  bool rotating = false;         // rwa frame in effect for this segment
  bool close_frame = false;      // apply exp(-i carrier T_seg K) after this step
  double segment_duration = 0.0;
};

struct StepGridOptions {
  Backend backend = Backend::rwa;
  double static_detuning = 0.0;
  const OuPath* ou = nullptr;
  double max_step = 0.0;
  int steps_per_period = kDefaultStepsPerPeriod;
  // Substep lab segments on the carrier even when rf_amp is zero, and use
  // the rotating frame for every rwa segment with a carrier. The optimizer
  // needs a step structure that does not depend on the control values.
  bool control_independent = false;
  double rf_amp_bound = 0.0;  // used with control_independent for the Rabi criterion
};

std::vector<PropagationStep> build_steps(const RegisterSpec& spec, const PulseSequence& seq,
                                         const StepGridOptions& opt);

// Precomputed operators of the register used to assemble step generators.
class ModelOperators {
 public:
  explicit ModelOperators(const RegisterSpec& spec);

  const RegisterSpec& spec() const { return spec_; }
  const ComplexMatrix& drift() const { return drift_; }
  const ComplexMatrix& sx_e() const { return sx_e_; }  // sigma_x/2 on the electron
  const ComplexMatrix& sy_e() const { return sy_e_; }
  const ComplexMatrix& sz_e() const { return sz_e_; }
  const ComplexMatrix& rf_lab() const { return rf_lab_; }  // sum kappa^(ms) I_x
  // Rwa operators of nucleus a: P1 (x) x~.I, P1 (x) y~.I (with kappa*scale),
  // and the frame generator P1 (x) z~.I.
  const ComplexMatrix& rwa_vx(std::size_t a) const { return vx_[a]; }
  const ComplexMatrix& rwa_vy(std::size_t a) const { return vy_[a]; }
  const ComplexMatrix& rwa_k(std::size_t a) const { return k_[a]; }
  const LocalFrame& frame(std::size_t a) const { return frames_[a]; }
  // exp(-i angle K_a), closed form.
  ComplexMatrix rwa_frame_factor(std::size_t a, double angle) const;

  // Generator of one step and the addressed nucleus it used (rwa).
  ComplexMatrix step_generator(const PulseSegment& seg, const PropagationStep& step, Backend backend) const;
  std::size_t addressed(const PulseSegment& seg) const;

 private:
  RegisterSpec spec_;
  ComplexMatrix drift_, sx_e_, sy_e_, sz_e_, rf_lab_;
  std::vector<ComplexMatrix> vx_, vy_, k_;
  std::vector<LocalFrame> frames_;
};

}  // namespace spinreg
