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

#include <cstdint>
#include <optional>
#include <vector>

#include "spinreg/linalg.hpp"
#include "spinreg/propagation.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

enum class TargetFrame { interaction, lab };

struct OptimizationConfig {
  std::size_t n_segments = 50;
  double total_time = 5e-6;
  ComplexMatrix target;  // full-register unitary in lab coordinates
  TargetFrame target_frame = TargetFrame::interaction;
  double mw_max = 0.0;      // 0 takes RegisterSpec::max_rabi_e
  double rf_max = 0.0;      // bare; 0 takes RegisterSpec::max_rabi_rf
  double rf_carrier = 0.0;  // 0 takes omega1 of nucleus 0
  double sigma_static = 0.0;
  std::size_t n_nodes = 7;
  std::size_t max_iterations = 300;
  double gradient_tolerance = 1e-7;
  std::size_t restarts = 1;
  std::uint64_t seed = 1;
  Backend backend = Backend::lab;
  int steps_per_period = kDefaultStepsPerPeriod;
  unsigned threads = 0;  // 0 uses the hardware concurrency
  // Optional OU evaluation of the final controls (reported separately).
  double ou_G0 = 0.0;
  double ou_tau_c = 1e-3;
  std::size_t ou_trajectories = 0;
};

// I_e (x) R_n(angle) on `nucleus` about its local x axis, identity elsewhere,
// in lab coordinates.
ComplexMatrix local_x_rotation_target(const RegisterSpec& spec, std::size_t nucleus, double angle);

struct FidelityReport {
  double f_ideal = 0.0;
  double f_noisy_mean = 0.0;
  double f_noisy_std = 0.0;
  double gate_time = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t ou_n = 0;
  double f_ou_mean = 0.0;
  double f_ou_std = 0.0;
  std::vector<double> trace;  // objective after each accepted iteration
};

struct EnsembleFidelity {
  double f_ideal = 0.0;
  double f_noisy_mean = 0.0;
  double f_noisy_std = 0.0;
};

// Static-detuning ensemble used for noise robustness: (detuning, weight).
std::vector<std::pair<double, double>> detuning_ensemble(const OptimizationConfig& cfg);

EnsembleFidelity ensemble_fidelity(const PulseSequence& controls, const RegisterSpec& spec,
                                   const OptimizationConfig& cfg);

// Gradient of the optimization objective (ensemble mean when sigma_static > 0,
// else the ideal fidelity) with respect to (mw_amp, mw_phase, rf_amp,
// rf_phase) of every segment, in that order.
struct ObjectiveGradient {
  double value = 0.0;
  std::vector<double> grad;
};
ObjectiveGradient fidelity_gradient(const PulseSequence& controls, const RegisterSpec& spec,
                                    const OptimizationConfig& cfg);

// Piecewise-constant analytic starting point for a local-x rotation on
// nucleus 0: rf rotation, electron pi, rf rotation, electron pi.
PulseSequence analytic_seed(const RegisterSpec& spec, const OptimizationConfig& cfg, double angle);

struct OptimizationResult {
  PulseSequence controls;
  FidelityReport report;
};

OptimizationResult optimize_pulse(const RegisterSpec& spec, const OptimizationConfig& cfg,
                                  const std::optional<PulseSequence>& initial = std::nullopt);

}  // namespace spinreg
