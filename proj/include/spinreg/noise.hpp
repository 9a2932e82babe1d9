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
#include <random>
#include <span>
#include <vector>

#include "spinreg/propagation.hpp"

namespace spinreg {

struct BathSpin {
  double omega1 = 0.0;  // rad/s
  double theta1 = 0.0;  // rad
};

struct BathSpec {
  std::vector<BathSpin> spins;
  double omega_L = 0.0;
};

inline constexpr double kDefaultTauC = 1e-3;

struct NoiseModel {
  double sigma_static = 0.0;  // rad/s
  double G0 = 0.0;            // rad^2/s^2
  double tau_c = kDefaultTauC;
  std::size_t n_static_samples = 7;
  std::size_t n_trajectories = 10000;
  std::uint64_t seed = 1;

  void validate() const;
};

double echo_envelope(const BathSpec& bath, double t);

using Rng = std::mt19937_64;
// Independent generator for (seed, stream).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

OuPath sample_ou_trajectory(const NoiseModel& model, double dt, std::size_t n_steps, Rng& rng);

struct EchoDecay {
  double value = 1.0;
  bool valid = true;  // short-time regime t <= tau_c / 3
};

// Hahn echo with the pi pulse at t and the echo at 2t.
EchoDecay echo_decay(const NoiseModel& model, double t);

struct EnsembleStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t n = 0;
};

// Monte Carlo Hahn echo <cos(int_0^t delta - int_t^2t delta)> over
// model.n_trajectories OU paths sampled at step dt, for each half time in t.
// Trajectories are split across threads by stream index and reduced in order.
std::vector<EnsembleStats> echo_decay_monte_carlo(const NoiseModel& model, std::span<const double> t, double dt,
                                                  unsigned threads = 0);

NoiseModel calibrate_noise(double t2_star, double t2, double tau_c = kDefaultTauC);

struct SelectivityShifts {
  double bs_shift = 0.0;
  double rwa_shift = 0.0;
  double worst_case = 0.0;  // -n rf^2 / (2 omega_M)
};

SelectivityShifts selectivity_shifts(double rf_amp, double delta_omega, double omega_M, std::size_t n);
// Constant-drive exact form delta - sqrt(rf^2 + delta^2).
double exact_bs_shift(double rf_amp, double delta_omega);

// Gauss-Hermite nodes and weights normalized for a unit Gaussian, i.e.
// E[f(X)] ~ sum w_i f(x_i) with X ~ N(0, 1).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_hermite_normal(std::size_t n);

void write_curve(const std::filesystem::path& path, std::span<const double> t_seconds, std::span<const double> values);

}  // namespace spinreg
