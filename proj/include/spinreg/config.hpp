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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spinreg/grape.hpp"
#include "spinreg/noise.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

// All values below are in internal units (rad/s, s, rad).

struct WindowConfig {
  double omega_e = 0.0;
  double omega_rf = 0.0;
  double margin = kDefaultWindowMargin;
};

struct GateConfig {
  std::string kind = "plain";  // plain | decoupled
  std::size_t target = 0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double rf_amp = kTwoPi * 20e3;  // enhanced ms=1 amplitude
  double t_pi = 0.0;              // 0: pi / Omega_bar
  double t_pi_mw = 1e-9;
  double clock = 0.0;             // 0: smallest Larmor-aligned clock
};

struct CircuitConfig {
  std::filesystem::path file;
  double clock = 0.0;
  double rf_amp = kTwoPi * 20e3;
  double t_pi_mw = 0.25e-9;
};

struct SimulateConfig {
  std::optional<std::filesystem::path> schedule_file;  // otherwise compiled from gate/circuit
  double static_detuning = 0.0;
  double max_step = 0.0;
  int steps_per_period = kDefaultStepsPerPeriod;
};

struct EchoConfig {
  BathSpec bath;
  double t_max = 0.0;
  std::size_t n_points = 200;
};

struct DecayConfig {
  double t2_star = 0.0;
  double t2 = 0.0;
  double tau_c = kDefaultTauC;
  double t_max = 0.0;  // echo half time
  std::size_t n_points = 50;
  std::size_t trajectories = 0;  // 0: no Monte Carlo curve
  double dt = 0.5e-6;
};

struct OptimizeConfig {
  OptimizationConfig opt;  // target filled from the fields below
  std::size_t target_nucleus = 0;
  double target_angle = kPi / 2;
  double t2_star = 0.0;    // 0: no static ensemble
  double t2 = 0.0;         // 0: no OU evaluation
  bool analytic_seed = true;
};

struct RunConfig {
  std::filesystem::path source;
  std::uint64_t seed = 1;
  Backend backend = Backend::rwa;
  std::optional<RegisterSpec> reg;
  std::optional<WindowConfig> window;
  std::optional<GateConfig> gate;
  std::optional<CircuitConfig> circuit;
  std::optional<SimulateConfig> simulate;
  std::optional<EchoConfig> echo;
  std::optional<DecayConfig> decay;
  std::optional<OptimizeConfig> optimize;
};

// Throws ValidationError naming the key path and line on schema violations.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir = ".");

// Fully materialized configuration in file units.
std::string echo_config(const RunConfig& cfg);

}  // namespace spinreg
