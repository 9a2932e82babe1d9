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

#include "spinreg/noise.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <thread>

#include "spinreg/errors.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

void NoiseModel::validate() const {
  if (!(sigma_static >= 0) || !(G0 >= 0)) throw ValidationError("noise strengths must be nonnegative");
  if (G0 > 0 && !(tau_c > 0)) throw ValidationError("tau_c must be positive when G0 > 0");
}

double echo_envelope(const BathSpec& bath, double t) {
  if (t < 0) throw ValidationError("time must be nonnegative");
  const double sl = std::sin(bath.omega_L * t / 2);
  double f = 1.0;
  for (const auto& s : bath.spins) {
    if (!(s.omega1 > 0)) throw ValidationError("bath omega1 must be positive");
    const double st = std::sin(s.theta1), s1 = std::sin(s.omega1 * t / 2);
    f *= 1.0 - 2.0 * st * st * s1 * s1 * sl * sl;
  }
  return f;
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

OuPath sample_ou_trajectory(const NoiseModel& model, double dt, std::size_t n_steps, Rng& rng) {
  model.validate();
  if (!(dt > 0)) throw ValidationError("dt must be positive");
  OuPath p;
  p.dt = dt;
  p.values.assign(n_steps, 0.0);
  if (model.G0 == 0.0 || n_steps == 0) return p;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = std::exp(-dt / model.tau_c);
  const double b = std::sqrt(model.G0 * -std::expm1(-2 * dt / model.tau_c));
  double x = std::sqrt(model.G0) * normal(rng);
  for (std::size_t k = 0; k < n_steps; ++k) {
    p.values[k] = x;
    x = x * a + b * normal(rng);
  }
  return p;
}

EchoDecay echo_decay(const NoiseModel& model, double t) {
  model.validate();
  if (t < 0) throw ValidationError("time must be nonnegative");
  EchoDecay d;
  if (model.G0 == 0.0) return d;
  d.value = std::exp(-(2.0 * model.G0 / (3.0 * model.tau_c)) * t * t * t);
  d.valid = t <= model.tau_c / 3;
  return d;
}

std::vector<EnsembleStats> echo_decay_monte_carlo(const NoiseModel& model, std::span<const double> t, double dt,
                                                  unsigned threads) {
  model.validate();
  if (!(dt > 0)) throw ValidationError("dt must be positive");
  std::vector<std::size_t> m(t.size());
  std::size_t m_max = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double r = t[i] / dt;
    m[i] = static_cast<std::size_t>(std::llround(r));
    if (t[i] < 0 || std::abs(r - static_cast<double>(m[i])) > 1e-6 * std::max(1.0, r))
      throw ValidationError("echo times must be nonnegative multiples of dt");
    m_max = std::max(m_max, m[i]);
  }
  const std::size_t n_traj = model.n_trajectories;
  std::vector<double> c(n_traj * t.size());
  auto work = [&](std::size_t begin, std::size_t end) {
    std::vector<double> prefix(2 * m_max + 1);
    for (std::size_t k = begin; k < end; ++k) {
      Rng rng = make_stream(model.seed, k);
      const OuPath p = sample_ou_trajectory(model, dt, 2 * m_max, rng);
      prefix[0] = 0.0;
      for (std::size_t s = 0; s < 2 * m_max; ++s) prefix[s + 1] = prefix[s] + p.values[s] * dt;
      for (std::size_t i = 0; i < t.size(); ++i) c[k * t.size() + i] = std::cos(2 * prefix[m[i]] - prefix[2 * m[i]]);
    }
  };
  unsigned nt = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  nt = static_cast<unsigned>(std::min<std::size_t>(nt, std::max<std::size_t>(1, n_traj)));
  if (nt <= 1) {
    work(0, n_traj);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(work, n_traj * w / nt, n_traj * (w + 1) / nt);
    for (auto& th : pool) th.join();
  }
  std::vector<EnsembleStats> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    double sum = 0.0, sq = 0.0;
    for (std::size_t k = 0; k < n_traj; ++k) sum += c[k * t.size() + i];
    const double mean = n_traj ? sum / static_cast<double>(n_traj) : 0.0;
    for (std::size_t k = 0; k < n_traj; ++k) sq += (c[k * t.size() + i] - mean) * (c[k * t.size() + i] - mean);
    out[i].mean = mean;
    out[i].std = n_traj > 1 ? std::sqrt(sq / static_cast<double>(n_traj - 1)) : 0.0;
    out[i].n = n_traj;
  }
  return out;
}

NoiseModel calibrate_noise(double t2_star, double t2, double tau_c) {
  if (!(t2_star > 0) || !(t2 > 0) || !(tau_c > 0)) throw ValidationError("calibration times must be positive");
  NoiseModel m;
  m.sigma_static = std::isinf(t2_star) ? 0.0 : std::sqrt(2.0) / t2_star;
  m.G0 = std::isinf(t2) ? 0.0 : 3.0 * tau_c / (2.0 * t2 * t2 * t2);
  m.tau_c = tau_c;
  return m;
}

SelectivityShifts selectivity_shifts(double rf_amp, double delta_omega, double omega_M, std::size_t n) {
  if (delta_omega == 0.0) throw ValidationError("delta_omega must be nonzero");
  if (!(omega_M > 0)) throw ValidationError("omega_M must be positive");
  SelectivityShifts s;
  s.bs_shift = -rf_amp * rf_amp / (2 * delta_omega);
  s.rwa_shift = rf_amp * rf_amp / (4 * omega_M);
  s.worst_case = -static_cast<double>(n) * rf_amp * rf_amp / (2 * omega_M);
  return s;
}

double exact_bs_shift(double rf_amp, double delta_omega) {
  const double sgn = delta_omega < 0 ? -1.0 : 1.0;
  return delta_omega - sgn * std::hypot(rf_amp, delta_omega);
}

Quadrature gauss_hermite_normal(std::size_t n) {
  if (n == 0) throw ValidationError("quadrature needs at least one node");
  // Golub-Welsch on the probabilists' Hermite recurrence.
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t k = 1; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    j(i, i - 1) = j(i - 1, i) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  Quadrature q;
  for (std::size_t k = 0; k < n; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    q.nodes.push_back(std::abs(es.eigenvalues()(i)) < 1e-14 ? 0.0 : es.eigenvalues()(i));
    q.weights.push_back(es.eigenvectors()(0, i) * es.eigenvectors()(0, i));
  }
  return q;
}

void write_curve(const std::filesystem::path& path, std::span<const double> t_seconds, std::span<const double> values) {
  if (t_seconds.size() != values.size()) throw ValidationError("curve columns differ in length");
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  f << "time_us value\n";
  char buf[80];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", t_seconds[i] / kSecondsPerMicrosecond, values[i]);
    f << buf;
  }
}

}  // namespace spinreg
