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

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "spinreg/circuit.hpp"
#include "spinreg/config.hpp"
#include "spinreg/errors.hpp"
#include "spinreg/grape.hpp"
#include "spinreg/noise.hpp"
#include "spinreg/pulse.hpp"
#include "spinreg/report.hpp"
#include "spinreg/schedule_io.hpp"

namespace fs = std::filesystem;
using namespace spinreg;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool json = false;
  std::optional<std::string> backend;
};

const RegisterSpec& need_register(const RunConfig& c) {
  if (!c.reg) throw ValidationError("config: register or register_file is required for this command");
  return *c.reg;
}

template <class T>
const T& need(const std::optional<T>& v, const char* section) {
  if (!v) throw ValidationError(std::string("config: section '") + section + "' is required for this command");
  return *v;
}

void emit(const Record& r, const Options& o, const fs::path& file) {
  const std::string body = o.json ? r.json() : r.text();
  std::cout << body;
  std::ofstream f(file);
  if (!f) throw ValidationError("cannot write " + file.string());
  f << body;
}

double mhz(double rad_s) { return rad_s / kRadPerSecPerMHz; }
double us(double s) { return s / kSecondsPerMicrosecond; }

Record window_record(const WindowReport& w) {
  Record r;
  r.set("margin", w.margin);
  Record::List checks;
  for (const auto& c : w.checks) {
    Record x;
    x.set("inequality", c.name);
    x.set("lhs_MHz", mhz(c.lhs));
    x.set("rhs_MHz", mhz(c.rhs));
    x.set("ratio", c.ratio);
    x.set("strict", c.strict);
    x.set("pass", c.pass);
    checks.push_back(x);
  }
  r.set("checks", checks);
  r.set("all_pass", w.all_pass());
  return r;
}

struct Compiled {
  PulseSequence seq;
  double clock = 0.0;
  std::optional<ComplexMatrix> target;  // ideal lab-frame unitary
  std::string kind;
};

Compiled compile_from(const RunConfig& c) {
  const RegisterSpec& spec = need_register(c);
  Compiled out;
  if (c.circuit) {
    const Circuit circ = read_circuit_file(c.circuit->file);
    LoweringOptions lo;
    lo.rf_amp = c.circuit->rf_amp;
    lo.t_pi_mw = c.circuit->t_pi_mw;
    double clock = c.circuit->clock;
    if (clock == 0.0) {
      std::vector<LocalFrame> frames;
      for (std::size_t j = 0; j < spec.n_nuclei(); ++j) frames.push_back(local_frame(spec, j));
      clock = min_clock_time(frames, lo.rf_amp);
    }
    LoweredCircuit lc = lower_to_pulses(circ, spec, clock, lo);
    out.seq = std::move(lc.sequence);
    out.clock = lc.clock;
    out.target = lc.target_lab;
    out.kind = "circuit";
    return out;
  }
  const GateConfig& g = need(c.gate, "gate");
  if (g.target >= spec.n_nuclei()) throw ValidationError("gate.target: out of range");
  const GateSpec gs{g.target, g.alpha, g.beta, g.gamma};
  const LocalFrame frames[] = {local_frame(spec, g.target)};
  const bool decoupled = g.kind == "decoupled";
  double clock = g.clock;
  if (clock == 0.0) clock = larmor_aligned_clock(spec, min_clock_time(frames, g.rf_amp), decoupled ? 4 : 1);
  try {
    out.seq = decoupled ? compile_decoupled_gate(spec, gs, g.rf_amp, g.t_pi, g.t_pi_mw, clock)
                        : compile_plain_gate(spec, gs, g.rf_amp, g.t_pi, clock);
  } catch (const DomainError& e) {
    throw DomainError(std::string("gate: ") + e.what());
  }
  const GateBlocks b = decoupled ? decoupled_gate_blocks(spec, gs, clock) : plain_gate_blocks(spec, gs, clock);
  out.target = controlled_local(spec, g.target, b.ms0, b.ms1);
  out.clock = clock;
  out.kind = g.kind;
  return out;
}

int cmd_validate(const RunConfig& c, const Options& o) {
  const WindowConfig& w = need(c.window, "window");
  const WindowReport rep = validate_window(need_register(c), w.omega_e, w.omega_rf, w.margin);
  emit(window_record(rep), o, fs::path(o.out) / (o.json ? "window.json" : "window.txt"));
  return 0;
}

int cmd_compile(const RunConfig& c, const Options& o) {
  const Compiled k = compile_from(c);
  const fs::path sched = fs::path(o.out) / "schedule.txt";
  write_schedule_file(sched, k.seq);
  Record r;
  r.set("kind", k.kind);
  r.set("clock_us", us(k.clock));
  r.set("total_time_us", us(k.seq.total_time()));
  r.set("segments", k.seq.segments.size());
  r.set("schedule_file", sched.filename().string());
  emit(r, o, fs::path(o.out) / (o.json ? "compile.json" : "compile.txt"));
  return 0;
}

int cmd_simulate(const RunConfig& c, const Options& o) {
  const RegisterSpec& spec = need_register(c);
  const SimulateConfig sc = c.simulate.value_or(SimulateConfig{});
  Compiled k;
  if (sc.schedule_file) {
    k.seq = read_schedule_file(*sc.schedule_file);
    if (c.gate || c.circuit) k.target = compile_from(c).target;
    k.kind = "file";
  } else {
    k = compile_from(c);
  }
  SimulationOptions so;
  so.backend = c.backend;
  so.max_step = sc.max_step;
  so.steps_per_period = sc.steps_per_period;
  const ComplexMatrix clean = simulate_sequence(spec, k.seq, so);
  Record r;
  r.set("backend", to_string(c.backend));
  r.set("total_time_us", us(k.seq.total_time()));
  r.set("segments", k.seq.segments.size());
  if (k.target) r.set("gate_fidelity", gate_fidelity(*k.target, clean));
  if (sc.static_detuning != 0.0) {
    so.static_detuning = sc.static_detuning;
    const ComplexMatrix noisy = simulate_sequence(spec, k.seq, so);
    r.set("static_detuning_MHz", mhz(sc.static_detuning));
    r.set("electron_coherence", electron_coherence(noisy, clean));
    if (k.target) r.set("gate_fidelity_detuned", gate_fidelity(*k.target, noisy));
  }
  emit(r, o, fs::path(o.out) / (o.json ? "simulate.json" : "simulate.txt"));
  return 0;
}

std::vector<double> grid(double t_max, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = n > 1 ? t_max * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
  return t;
}

int cmd_echo(const RunConfig& c, const Options& o) {
  const EchoConfig& e = need(c.echo, "echo");
  const auto t = grid(e.t_max, e.n_points);
  std::vector<double> f(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) f[i] = echo_envelope(e.bath, t[i]);
  const fs::path file = fs::path(o.out) / "echo.txt";
  write_curve(file, t, f);
  Record r;
  r.set("curve_file", file.string());
  r.set("points", t.size());
  r.set("bath_spins", e.bath.spins.size());
  emit(r, o, fs::path(o.out) / (o.json ? "echo.json" : "echo.report.txt"));
  return 0;
}

int cmd_decay(const RunConfig& c, const Options& o) {
  const DecayConfig& d = need(c.decay, "decay");
  NoiseModel m = calibrate_noise(d.t2_star, d.t2, d.tau_c);
  m.seed = c.seed;
  m.n_trajectories = d.trajectories;
  auto t = grid(d.t_max, d.n_points);
  std::vector<double> f(t.size());
  bool valid = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const EchoDecay ed = echo_decay(m, t[i]);
    f[i] = ed.value;
    valid = valid && ed.valid;
  }
  const fs::path cum = fs::path(o.out) / "decay_cumulant.txt";
  write_curve(cum, t, f);
  Record r;
  r.set("sigma_static_MHz", mhz(m.sigma_static));
  r.set("noise_rms_MHz", mhz(std::sqrt(m.G0)));
  r.set("tau_c_us", us(m.tau_c));
  r.set("short_time_valid", valid);
  r.set("cumulant_file", cum.string());
  if (d.trajectories > 0) {
    for (auto& x : t) x = std::round(x / d.dt) * d.dt;
    const auto mc = echo_decay_monte_carlo(m, t, d.dt, 0);
    std::vector<double> mean(mc.size()), sd(mc.size());
    for (std::size_t i = 0; i < mc.size(); ++i) mean[i] = mc[i].mean, sd[i] = mc[i].std;
    const fs::path mcf = fs::path(o.out) / "decay_monte_carlo.txt";
    write_curve(mcf, t, mean);
    r.set("monte_carlo_file", mcf.string());
    r.set("trajectories", d.trajectories);
  }
  emit(r, o, fs::path(o.out) / (o.json ? "decay.json" : "decay.txt"));
  return 0;
}

int cmd_optimize(const RunConfig& c, const Options& o) {
  const RegisterSpec& spec = need_register(c);
  OptimizeConfig oc = need(c.optimize, "optimize");
  OptimizationConfig cfg = oc.opt;
  cfg.seed = c.seed;
  if (o.backend) cfg.backend = parse_backend(*o.backend);
  cfg.target = local_x_rotation_target(spec, oc.target_nucleus, oc.target_angle);
  if (oc.t2_star > 0) cfg.sigma_static = calibrate_noise(oc.t2_star, 1.0, 1.0).sigma_static;
  if (oc.t2 > 0) cfg.ou_G0 = calibrate_noise(1.0, oc.t2, cfg.ou_tau_c).G0;
  std::optional<PulseSequence> seed;
  if (oc.analytic_seed) seed = analytic_seed(spec, cfg, oc.target_angle);
  const OptimizationResult res = optimize_pulse(spec, cfg, seed);
  const fs::path sched = fs::path(o.out) / "schedule.txt";
  write_schedule_file(sched, res.controls);
  const fs::path trace = fs::path(o.out) / "trace.txt";
  {
    std::ofstream f(trace);
    f << "iteration objective\n";
    for (std::size_t i = 0; i < res.report.trace.size(); ++i) f << i << ' ' << format_real(res.report.trace[i]) << '\n';
  }
  const FidelityReport& rep = res.report;
  Record r;
  r.set("f_ideal", rep.f_ideal);
  r.set("f_noisy_mean", rep.f_noisy_mean);
  r.set("f_noisy_std", rep.f_noisy_std);
  r.set("gate_time_us", us(rep.gate_time));
  r.set("iterations", rep.iterations);
  r.set("converged", rep.converged);
  if (rep.ou_n > 0) {
    r.set("f_ou_mean", rep.f_ou_mean);
    r.set("f_ou_std", rep.f_ou_std);
    r.set("ou_trajectories", rep.ou_n);
  }
  r.set("schedule_file", sched.filename().string());
  r.set("trace_file", trace.filename().string());
  emit(r, o, fs::path(o.out) / (o.json ? "report.json" : "report.txt"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinreg: electron-nuclear spin register simulation and control"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "configuration file")->required();
    sub->add_option("--seed", o.seed, "random seed (overrides the config)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_flag("--json", o.json, "emit JSON reports");
    sub->add_option("--backend", o.backend, "simulation backend")->check(CLI::IsMember({"lab", "rwa"}));
  };
  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&, const Options&);
  };
  const Cmd cmds[] = {{"validate", "check the parameter window", cmd_validate},
                      {"compile", "compile a gate or circuit to a pulse schedule", cmd_compile},
                      {"simulate", "simulate a schedule and report fidelities", cmd_simulate},
                      {"echo", "bath echo-envelope curve", cmd_echo},
                      {"decay", "spectral-diffusion echo decay curves", cmd_decay},
                      {"optimize", "numerically optimize a gate", cmd_optimize}};
  std::vector<std::pair<CLI::App*, const Cmd*>> subs;
  for (const Cmd& c : cmds) {
    CLI::App* s = app.add_subcommand(c.name, c.help);
    add_common(s);
    subs.emplace_back(s, &c);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    RunConfig cfg = parse_config(o.config);
    if (o.seed) cfg.seed = *o.seed;
    if (o.backend) cfg.backend = parse_backend(*o.backend);
    fs::create_directories(o.out);
    {
      std::ofstream f(fs::path(o.out) / "config.echo.yaml");
      f << echo_config(cfg);
    }
    for (const auto& [s, c] : subs)
      if (s->parsed()) return c->fn(cfg, o);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
