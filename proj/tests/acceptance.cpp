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

// Acceptance checks. Usage: spinreg_acceptance <1..11|all>. Prints one
// PASS/FAIL line per criterion; exit status is nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spinreg/circuit.hpp"
#include "spinreg/grape.hpp"
#include "spinreg/noise.hpp"
#include "spinreg/pulse.hpp"

using namespace spinreg;
namespace fs = std::filesystem;

namespace {

constexpr double kMHz = kTwoPi * 1e6;
constexpr double kKHz = kTwoPi * 1e3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... v) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, v...);
  return buf;
}

// --- 1, 2: echo envelope ----------------------------------------------------

BathSpec random_bath(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BathSpec b;
  b.omega_L = (0.2 + 2.0 * u(rng)) * kMHz;
  for (std::size_t j = 0; j < n; ++j) b.spins.push_back({(0.1 + 3.0 * u(rng)) * kMHz, kPi * u(rng)});
  return b;
}

// Tr(U1 U0 U1^dag U0^dag) / 2^n from dense propagators of the two manifolds.
cplx dense_trace(const BathSpec& b, double t, double phi) {
  const std::size_t n = b.spins.size();
  const std::size_t d = std::size_t{1} << n;
  ComplexMatrix h0(d), h1(d);
  const ComplexMatrix ix = oracle::mat2(0, 0.5, 0.5, 0), iy = oracle::mat2(0, cplx(0, -0.5), cplx(0, 0.5), 0),
                      iz = oracle::mat2(0.5, 0, 0, -0.5);
  for (std::size_t j = 0; j < n; ++j) {
    const auto& s = b.spins[j];
    h0 += embed_operator(iz, j, n) * cplx(b.omega_L);
    const ComplexMatrix axis = (ix * cplx(std::sin(s.theta1) * std::cos(phi))) +
                               (iy * cplx(std::sin(s.theta1) * std::sin(phi))) + (iz * cplx(std::cos(s.theta1)));
    h1 += embed_operator(axis, j, n) * cplx(s.omega1);
  }
  const ComplexMatrix u0 = evolve(h0, t), u1 = evolve(h1, t);
  return (u1 * u0 * u1.adjoint() * u0.adjoint()).trace() / static_cast<double>(d);
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_abs = 0, worst_signed = 0;
  for (int k = 0; k < 200; ++k) {
    const BathSpec b = random_bath(rng, 1 + k % 4);
    for (int i = 0; i < 50; ++i) {
      const double t = 10e-6 * u(rng);
      const double f = echo_envelope(b, t);
      const cplx tr = dense_trace(b, t, kTwoPi * u(rng));
      worst_abs = std::max(worst_abs, std::abs(std::abs(f) - std::abs(tr)));
      worst_signed = std::max(worst_signed, std::abs(cplx(f) - tr));
    }
  }
  const double dt = seconds_since(t0);
  return {worst_abs <= 1e-9 && worst_signed <= 1e-9 && dt <= 10.0,
          fmt("max ||f|-|Tr|/2^n| = %.2e, max |f - Tr/2^n| = %.2e, %.2f s", worst_abs, worst_signed, dt)};
}

Outcome c2() {
  std::mt19937_64 rng(102);
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const BathSpec b = random_bath(rng, 1 + k % 4);
    for (int m = 1; m <= 10; ++m) worst = std::max(worst, std::abs(echo_envelope(b, kTwoPi * m / b.omega_L) - 1.0));
  }
  return {worst <= 1e-12, fmt("max |f_ee(2 pi k / omega_L) - 1| = %.2e over 100 baths", worst)};
}

// --- 3, 4: circuits -----------------------------------------------------------

ComplexMatrix projector(int k) { return k == 0 ? oracle::mat2(1, 0, 0, 0) : oracle::mat2(0, 0, 0, 1); }

Outcome c3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(103);
  const ComplexMatrix i2 = oracle::mat2(1, 0, 0, 1);
  double worst_a = 0, worst_b = 0;
  for (int k = 0; k < 100; ++k) {
    const ComplexMatrix u = oracle::random_unitary(2, rng);
    // I_e (x) [P0 (x) I + P1 (x) u] on (e, C1, C2).
    ComplexMatrix cu = oracle::naive_kron(projector(0), i2);
    const ComplexMatrix p1u = oracle::naive_kron(projector(1), u);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) cu(r, c) += p1u(r, c);
    worst_a = std::max(worst_a, oracle::max_diff(circuit_unitary(controlled_u_nn(u)), oracle::naive_kron(i2, cu)));
    // Nucleus controls the electron: I (x) P0 + u (x) P1 on (e, C).
    ComplexMatrix ce = oracle::naive_kron(i2, projector(0));
    const ComplexMatrix up1 = oracle::naive_kron(u, projector(1));
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t c = 0; c < 4; ++c) ce(r, c) += up1(r, c);
    worst_b = std::max(worst_b, oracle::max_diff(circuit_unitary(controlled_u_electron(u)), ce));
  }
  const double dt = seconds_since(t0);
  return {worst_a <= 1e-10 && worst_b <= 1e-10 && dt <= 5.0,
          fmt("two-nucleus max diff %.2e, electron-target max diff %.2e, %.2f s", worst_a, worst_b, dt)};
}

Outcome c4() {
  std::mt19937_64 rng(104);
  const ComplexMatrix z = oracle::mat2(1, 0, 0, -1), i2 = oracle::mat2(1, 0, 0, 1);
  double w1 = 0, w2 = 0;
  for (int k = 0; k < 1000; ++k) {
    const ComplexMatrix u = oracle::random_unitary(2, rng);
    const AbcDecomposition d = abc_decompose(u);
    w1 = std::max(w1, oracle::max_diff(oracle::naive_mul(d.a, oracle::naive_mul(d.b, d.c)), i2));
    const ComplexMatrix r =
        oracle::naive_mul(d.a, oracle::naive_mul(z, oracle::naive_mul(d.b, oracle::naive_mul(z, d.c))));
    w2 = std::max(w2, oracle::max_diff(r * std::polar(1.0, d.alpha), u));
  }
  return {w1 <= 1e-12 && w2 <= 1e-12, fmt("max |ABC - I| = %.2e, max |e^{ia} AZBZC - U| = %.2e", w1, w2)};
}

// --- 5, 6, 8: pulse schemes ---------------------------------------------------------

RegisterSpec one_nucleus(double w1, double theta, double phi) {
  RegisterSpec s;
  s.omega_L = 0.8 * kMHz;
  s.hyperfine = {{w1 * std::sin(theta) * std::cos(phi), w1 * std::sin(theta) * std::sin(phi),
                  w1 * std::cos(theta) - s.omega_L}};
  s.validate();
  return s;
}

Outcome c5() {
  const RegisterSpec spec = one_nucleus(15 * kMHz, 0.7, 0.4);
  const double rf = 20 * kKHz;
  const LocalFrame f[] = {local_frame(spec, 0)};
  const double T = larmor_aligned_clock(spec, min_clock_time(f, rf));
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  double worst_gate = 1, worst_backend = 1;
  SimulationOptions rwa, lab;
  lab.backend = Backend::lab;
  for (int k = 0; k < 20; ++k) {
    GateSpec g;
    g.euler_alpha = ang(rng);
    g.euler_beta = ang(rng);
    g.euler_gamma = ang(rng);
    const PulseSequence seq = compile_plain_gate(spec, g, rf, 0.0, T);
    const ComplexMatrix ur = simulate_sequence(spec, seq, rwa);
    const ComplexMatrix ul = simulate_sequence(spec, seq, lab);
    worst_gate = std::min(worst_gate, oracle::fidelity(branch_block_local(spec, ur, 1, 0),
                                                       euler_zxz(g.euler_alpha, g.euler_beta, g.euler_gamma)));
    worst_backend = std::min(worst_backend, oracle::fidelity(ur, ul));
  }
  return {worst_gate >= 0.999 && worst_backend >= 0.999,
          fmt("T = %.3f us; min gate fidelity %.6f (rwa); min lab-rwa fidelity %.6f", T * 1e6, worst_gate,
              worst_backend)};
}

Outcome c6() {
  RegisterSpec spec;
  spec.omega_L = 0.8 * kMHz;
  spec.hyperfine = {{0.0, 5 * kMHz, 13.28 * kMHz}};
  spec.validate();
  const double rf = 100 * kKHz, T = 65e-6, tmw = 1e-9, delta = 50 * kKHz;
  std::mt19937_64 rng(106);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  double min_dec = 1, max_plain = -1, min_gate = 1;
  SimulationOptions noisy;
  noisy.static_detuning = delta;
  for (int k = 0; k < 10; ++k) {
    GateSpec g;
    g.euler_alpha = ang(rng);
    g.euler_beta = ang(rng);
    g.euler_gamma = ang(rng);
    const PulseSequence dec = compile_decoupled_gate(spec, g, rf, 0.0, tmw, T);
    const ComplexMatrix u = simulate_sequence(spec, dec);
    min_dec = std::min(min_dec, electron_coherence(simulate_sequence(spec, dec, noisy), u));
    const GateBlocks want = decoupled_gate_blocks(spec, g, T);
    min_gate = std::min(min_gate, oracle::fidelity(branch_block_local(spec, u, 1, 0), want.ms1));
    const PulseSequence plain = compile_plain_gate(spec, g, rf, 0.0, T);
    const ComplexMatrix up = simulate_sequence(spec, plain);
    max_plain = std::max(max_plain, electron_coherence(simulate_sequence(spec, plain, noisy), up));
  }
  return {min_dec >= 0.99 && max_plain <= 0.8,
          fmt("delta = 2pi*50 kHz, T = 65 us: decoupled coherence >= %.5f, plain <= %.5f (gate fidelity >= %.5f)",
              min_dec, max_plain, min_gate)};
}

Outcome c8() {
  double worst = 0;
  for (double r = 0.001; r <= 0.1 + 1e-12; r += 0.001) {
    const double dw = 5 * kMHz, om = r * dw;
    const double exact = exact_bs_shift(om, dw), approx = selectivity_shifts(om, dw, 20 * kMHz, 1).bs_shift;
    worst = std::max(worst, std::abs(exact - approx) / std::abs(approx));
  }
  // One nucleus at 15 MHz driven 200 kHz below resonance for 50 us; in the
  // frame of the carrier the ms=1 block rotates at sqrt(dw^2 + Om^2).
  const RegisterSpec spec = one_nucleus(15 * kMHz, 0.7, 0.4);
  const LocalFrame lf = local_frame(spec, 0);
  const double dw = 200 * kKHz, T = 50e-6;
  PulseSegment s;
  s.duration = T;
  s.rf_carrier = lf.omega1 - dw;
  s.rf_amp = 2 * kKHz;  // bare; enhanced by kappa = 10 in ms=1
  const double om = reduced_rabi(lf, s.rf_amp * spec.enhancement[0]).omega_bar;
  SimulationOptions lab;
  lab.backend = Backend::lab;
  const ComplexMatrix b = branch_block_local(spec, simulate_sequence(spec, PulseSequence{{s}}, lab), 1, 0);
  const ComplexMatrix rot = rot_z(-s.rf_carrier * T) * b;
  const cplx det = rot(0, 0) * rot(1, 1) - rot(0, 1) * rot(1, 0);
  const double c = std::abs((rot.trace() / std::sqrt(det)).real()) / 2;
  // Rotation angle modulo 2 pi; dw * T is a whole number of turns.
  const double measured = 2 * std::acos(std::min(1.0, c)) / T;
  const double predicted = -selectivity_shifts(om, dw, 20 * kMHz, 1).bs_shift;
  const double rel = std::abs(measured - predicted) / predicted;
  return {worst <= 0.01 && rel <= 0.10,
          fmt("max rel. error of -Om^2/(2dw) for Om/dw <= 0.1: %.4f; simulated shift %.2f Hz vs %.2f Hz (%.1f%%)",
              worst, measured / kTwoPi, predicted / kTwoPi, 100 * rel)};
}

// --- 7: noise -------------------------------------------------------------------

Outcome c7() {
  const auto t0 = std::chrono::steady_clock::now();
  NoiseModel m = calibrate_noise(1.5e-6, 250e-6, 1e-3);
  m.n_trajectories = 10000;
  m.seed = 107;
  const std::vector<double> ts{50e-6, 100e-6, 150e-6, 250e-6};
  const auto mc = echo_decay_monte_carlo(m, ts, 0.5e-6);
  bool ok = true;
  std::string d = fmt("Omega = 2pi*%.4g kHz;", std::sqrt(m.G0) / kTwoPi / 1e3);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double want = echo_decay(m, ts[i]).value;
    const double diff = std::abs(mc[i].mean - want);
    ok = ok && diff <= 0.05;
    d += fmt(" t=%g us: MC %.4f +- %.4f vs %.4f (|d| %.4f)%s", ts[i] * 1e6, mc[i].mean,
             mc[i].std / std::sqrt(double(mc[i].n)), want, diff, diff <= 0.05 ? "" : " OUT");
  }
  const double dt = seconds_since(t0);
  d += fmt("; %.2f s", dt);
  return {ok && dt <= 60.0, d};
}

// --- 9, 10: optimizer -------------------------------------------------------------

RegisterSpec bench_register(std::size_t n) {
  const std::vector<Vec3> a{{5, 2, 13.2}, {3, 0, 8.7}, {-2, 1.5, 4.9}};
  RegisterSpec s;
  s.omega_L = 0.8 * kMHz;
  for (std::size_t j = 0; j < n; ++j) s.hyperfine.push_back({a[j][0] * kMHz, a[j][1] * kMHz, a[j][2] * kMHz});
  s.enhancement.assign(n, 10.0);
  if (n > 1) {
    s.dipolar.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s.dipolar[i][j] = kTwoPi * 500;
  }
  s.max_rabi_e = 10 * kMHz;
  s.max_rabi_rf = 20 * kKHz;
  s.validate();
  return s;
}

Outcome c9() {
  std::mt19937_64 rng(109);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const RegisterSpec s = bench_register(n);
    for (int rep = 0; rep < 2; ++rep) {
      OptimizationConfig c;
      c.n_segments = 5;
      c.total_time = 0.4e-6;
      c.target = local_x_rotation_target(s, 0, kPi / 2);
      c.threads = 1;
      if (rep == 1) {
        c.sigma_static = std::sqrt(2.0) / 1.5e-6;
        c.n_nodes = 3;
      }
      PulseSequence x;
      for (std::size_t k = 0; k < c.n_segments; ++k) {
        PulseSegment g;
        g.duration = c.total_time / double(c.n_segments);
        g.mw_amp = s.max_rabi_e * u(rng);
        g.mw_phase = kTwoPi * u(rng);
        g.rf_amp = s.max_rabi_rf * u(rng);
        g.rf_phase = kTwoPi * u(rng);
        g.rf_carrier = local_frame(s, 0).omega1;
        x.segments.push_back(g);
      }
      const ObjectiveGradient g = fidelity_gradient(x, s, c);
      double num = 0, den = 0;
      for (std::size_t i = 0; i < g.grad.size(); ++i) {
        const double scale = i % 4 == 0 ? s.max_rabi_e : i % 4 == 2 ? s.max_rabi_rf : 1.0;
        const double h = 1e-7 * scale;
        auto shifted = [&](double by) {
          PulseSequence y = x;
          PulseSegment& sg = y.segments[i / 4];
          double* p[] = {&sg.mw_amp, &sg.mw_phase, &sg.rf_amp, &sg.rf_phase};
          *p[i % 4] += by;
          return fidelity_gradient(y, s, c).value;
        };
        const double fd = (shifted(h) - shifted(-h)) / (2 * h) * scale;
        num = std::max(num, std::abs(g.grad[i] * scale - fd));
        den = std::max(den, std::abs(fd));
      }
      worst = std::max(worst, num / den);
    }
  }
  return {worst <= 1e-5, fmt("max normwise relative error %.2e over 1-3 nuclei", worst)};
}

struct SweepRun {
  double T = 0, f_ideal = 0, f_noisy = 0, seconds = 0;
};

SweepRun sweep_run(std::size_t n, double T) {
  const auto t0 = std::chrono::steady_clock::now();
  const RegisterSpec s = bench_register(n);
  OptimizationConfig c;
  c.n_segments = 250;
  c.total_time = T;
  c.target = local_x_rotation_target(s, 0, kPi / 2);
  c.sigma_static = calibrate_noise(1.5e-6, 250e-6).sigma_static;
  c.n_nodes = 7;
  c.steps_per_period = 8;
  // Iteration budgets chosen to keep the whole sweep within 30 min on one core.
  c.max_iterations = n == 2 ? 500 : 200;
  c.seed = 110;
  const OptimizationResult r = optimize_pulse(s, c, analytic_seed(s, c, kPi / 2));
  return {T, r.report.f_ideal, r.report.f_noisy_mean, seconds_since(t0)};
}

Outcome c10() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> grid{4.5e-6, 5e-6, 5.5e-6, 6e-6};
  std::string d;
  std::vector<double> best(4, 0.0), t_star(4, 0.0);
  bool ok = true;
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<SweepRun> runs;
    for (double T : grid) {
      runs.push_back(sweep_run(n, T));
      const SweepRun& r = runs.back();
      std::printf("  n=%zu T=%.1f us: f_ideal %.5f f_noisy %.5f (%.0f s)\n", n, T * 1e6, r.f_ideal, r.f_noisy, r.seconds);
      std::fflush(stdout);
    }
    for (const auto& r : runs) best[n] = std::max(best[n], r.f_noisy);
    for (const auto& r : runs)
      if (r.f_noisy >= best[n] - 0.005) {
        t_star[n] = r.T;
        break;
      }
    if (n == 1) {
      const SweepRun& r5 = runs[1];
      const bool p = r5.f_ideal >= 0.999 && r5.f_noisy >= 0.99;
      ok = ok && p;
      d += fmt("n=1 T=5us %.5f/%.5f %s; ", r5.f_ideal, r5.f_noisy, p ? "ok" : "LOW");
    }
    if (n == 2) {
      bool p = false;
      for (const auto& r : runs) p = p || (r.f_ideal >= 0.995 && r.f_noisy >= 0.98);
      ok = ok && p;
      d += fmt("n=2 some T<=6us with >=0.995/0.98: %s; ", p ? "yes" : "NO");
    }
  }
  const bool trend = best[1] >= best[2] && best[2] >= best[3] && t_star[1] <= t_star[2] && t_star[2] <= t_star[3];
  ok = ok && trend;
  const double dt = seconds_since(t0);
  d += fmt("best f_noisy %.4f/%.4f/%.4f, T* %.1f/%.1f/%.1f us %s; %.0f s", best[1], best[2], best[3], t_star[1] * 1e6,
           t_star[2] * 1e6, t_star[3] * 1e6, trend ? "monotone" : "NOT monotone", dt);
  return {ok && dt <= 1800.0, d};
}

// Fifty-segment one-nucleus pi/2 gate under quasi-static detuning.
Outcome example50() {
  const RegisterSpec s = bench_register(1);
  OptimizationConfig c;
  c.n_segments = 50;
  c.total_time = 5e-6;
  c.target = local_x_rotation_target(s, 0, kPi / 2);
  c.sigma_static = calibrate_noise(1.5e-6, 250e-6).sigma_static;
  c.steps_per_period = 8;
  c.max_iterations = 300;
  c.seed = 112;
  const OptimizationResult r = optimize_pulse(s, c, analytic_seed(s, c, kPi / 2));
  return {r.report.f_noisy_mean >= 0.99,
          fmt("f_ideal %.5f, f_noisy %.5f +- %.5f after %zu iterations", r.report.f_ideal, r.report.f_noisy_mean,
              r.report.f_noisy_std, r.report.iterations)};
}

// --- 11: determinism ------------------------------------------------------------

int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome c11() {
  const fs::path base = fs::temp_directory_path() / "spinreg_acceptance_c11";
  fs::remove_all(base);
  const std::string cfg = (fs::path(SPINREG_SOURCE_DIR) / "configs" / "optimize_quick.yaml").string();
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = std::string(SPINREG_CLI_PATH) + " optimize --config " + cfg + " --out " +
                            (base / sub).string() + " > /dev/null 2>&1";
    if (run(cmd) != 0) return {false, "optimize run failed"};
  }
  std::size_t files = 0;
  bool same = true;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    ++files;
    same = same && slurp(e.path()) == slurp(base / "b" / e.path().filename());
  }
  fs::remove_all(base);
  return {same && files >= 4, fmt("%zu output files compared byte for byte: %s", files, same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> checks{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
  const std::string which = argc > 1 ? argv[1] : "all";
  if (which == "example50") {
    const Outcome o = example50();
    std::printf("example grape-50 noisy: %s  %s\n", o.pass ? "PASS" : "FAIL", o.detail.c_str());
    return o.pass ? 0 : 1;
  }
  bool all_ok = true;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    if (which != "all" && which != std::to_string(k + 1)) continue;
    const Outcome o = checks[k]();
    std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    all_ok = all_ok && o.pass;
  }
  return all_ok ? 0 : 1;
}
