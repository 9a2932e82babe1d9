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

#include "spinreg/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "spinreg/errors.hpp"

namespace spinreg {

namespace {

constexpr double kMHz = kRadPerSecPerMHz;
constexpr double kUs = kSecondsPerMicrosecond;

[[noreturn]] void fail(const YAML::Node& n, const std::string& path, const std::string& msg) {
  std::string where = path.empty() ? std::string("config") : path;
  if (n.IsDefined() && n.Mark().line >= 0) where += " (line " + std::to_string(n.Mark().line + 1) + ")";
  throw ValidationError(where + ": " + msg);
}

const char* const kUnitSuffixes[] = {"_MHz", "_us", "_rad"};

class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(node_, path_, "expected a mapping");
  }

  std::string key_path(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

  YAML::Node raw(const std::string& k) {
    allowed_.insert(k);
    return node_[k];
  }
  bool has(const std::string& k) {
    allowed_.insert(k);
    return static_cast<bool>(node_[k]);
  }

  double real(const std::string& k, double scale, std::optional<double> def = std::nullopt) {
    const YAML::Node v = raw(k);
    if (!v) {
      if (def) return *def;
      near_miss(k);
      fail(node_, key_path(k), "required key missing");
    }
    double x = 0.0;
    try {
      x = v.as<double>();
    } catch (const YAML::Exception&) {
      fail(v, key_path(k), "expected a number");
    }
    if (!std::isfinite(x)) fail(v, key_path(k), "value must be finite");
    return x * scale;
  }

  std::size_t count(const std::string& k, std::size_t def) {
    const YAML::Node v = raw(k);
    if (!v) return def;
    long long x = 0;
    try {
      x = v.as<long long>();
    } catch (const YAML::Exception&) {
      fail(v, key_path(k), "expected a nonnegative integer");
    }
    if (x < 0) fail(v, key_path(k), "expected a nonnegative integer");
    return static_cast<std::size_t>(x);
  }

  std::string text(const std::string& k, const std::string& def) {
    const YAML::Node v = raw(k);
    if (!v) return def;
    if (!v.IsScalar()) fail(v, key_path(k), "expected a string");
    return v.as<std::string>();
  }

  bool flag(const std::string& k, bool def) {
    const YAML::Node v = raw(k);
    if (!v) return def;
    try {
      return v.as<bool>();
    } catch (const YAML::Exception&) {
      fail(v, key_path(k), "expected true or false");
    }
  }

  Section child(const std::string& k) { return Section(raw(k), key_path(k)); }

  // Reject keys that were never asked for.
  void finish() const {
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (allowed_.count(k)) continue;
      for (const char* suf : kUnitSuffixes)
        if (allowed_.count(k + suf)) fail(kv.first, key_path(k), std::string("unit omitted; use ") + k + suf);
      fail(kv.first, key_path(k), "unknown key '" + k + "'");
    }
  }

  const YAML::Node& node() const { return node_; }

 private:
  static std::string folded(std::string k) {
    for (const char* suf : kUnitSuffixes) {
      const std::string su(suf);
      if (k.size() > su.size() && k.compare(k.size() - su.size(), su.size(), su) == 0) k.resize(k.size() - su.size());
    }
    for (auto& c : k) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return k;
  }

  // A present key that differs from `want` only in case or unit suffix.
  void near_miss(const std::string& want) const {
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (k == want || folded(k) != folded(want)) continue;
      for (const char* suf : kUnitSuffixes)
        if (k + suf == want) fail(kv.first, key_path(k), "unit omitted; use " + want);
      fail(kv.first, key_path(k), "unknown key '" + k + "' (expected " + want + ")");
    }
  }

 public:

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> allowed_;
};

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path q(p);
  return q.is_absolute() ? q : base / q;
}

RegisterSpec parse_register(Section s) {
  RegisterSpec r;
  r.omega_L = s.real("omega_L_MHz", kMHz);
  r.delta_E_e = s.real("delta_E_e_MHz", kMHz, 0.0);
  r.omega_M = s.real("omega_M_MHz", kMHz, 0.0);
  r.max_rabi_e = s.real("max_rabi_e_MHz", kMHz, 10.0 * kMHz);
  r.max_rabi_rf = s.real("max_rabi_rf_MHz", kMHz, 0.02 * kMHz);
  const YAML::Node nuclei = s.raw("nuclei");
  if (!nuclei || !nuclei.IsSequence() || nuclei.size() == 0)
    fail(s.node(), s.key_path("nuclei"), "expected a nonempty list of nuclei");
  for (std::size_t i = 0; i < nuclei.size(); ++i) {
    Section n(nuclei[i], s.key_path("nuclei[" + std::to_string(i) + "]"));
    const YAML::Node a = n.raw("hyperfine_MHz");
    if (!a || !a.IsSequence() || a.size() != 3) fail(nuclei[i], n.key_path("hyperfine_MHz"), "expected [x, y, z]");
    Vec3 v{};
    for (std::size_t c = 0; c < 3; ++c) {
      try {
        v[c] = a[c].as<double>() * kMHz;
      } catch (const YAML::Exception&) {
        fail(a[c], n.key_path("hyperfine_MHz"), "expected a number");
      }
    }
    r.hyperfine.push_back(v);
    r.enhancement.push_back(n.real("enhancement", 1.0, kDefaultEnhancement));
    n.finish();
  }
  if (const YAML::Node d = s.raw("dipolar_MHz")) {
    if (!d.IsSequence() || d.size() != nuclei.size()) fail(d, s.key_path("dipolar_MHz"), "expected an n x n matrix");
    for (const auto& row : d) {
      if (!row.IsSequence() || row.size() != nuclei.size()) fail(row, s.key_path("dipolar_MHz"), "expected an n x n matrix");
      std::vector<double> rr;
      for (const auto& x : row) rr.push_back(x.as<double>() * kMHz);
      r.dipolar.push_back(rr);
    }
  }
  s.finish();
  try {
    r.validate();
  } catch (const ValidationError& e) {
    fail(s.node(), s.key_path(""), e.what());
  }
  return r;
}

GateConfig parse_gate(Section s) {
  GateConfig g;
  g.kind = s.text("kind", g.kind);
  if (g.kind != "plain" && g.kind != "decoupled") fail(s.node(), s.key_path("kind"), "expected plain or decoupled");
  g.target = s.count("target", 0);
  g.alpha = s.real("alpha_rad", 1.0, 0.0);
  g.beta = s.real("beta_rad", 1.0, 0.0);
  g.gamma = s.real("gamma_rad", 1.0, 0.0);
  g.rf_amp = s.real("rf_amp_MHz", kMHz, g.rf_amp);
  g.t_pi = s.real("t_pi_us", kUs, 0.0);
  g.t_pi_mw = s.real("t_pi_mw_us", kUs, g.t_pi_mw);
  g.clock = s.real("clock_us", kUs, 0.0);
  s.finish();
  return g;
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ValidationError("config: YAML error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  Section top(root, "");
  cfg.seed = top.count("seed", 1);
  const std::string backend = top.text("backend", "rwa");
  try {
    cfg.backend = parse_backend(backend);
  } catch (const ValidationError&) {
    fail(top.raw("backend"), "backend", "expected lab or rwa");
  }
  if (top.has("register") && top.has("register_file")) fail(root, "register", "give register or register_file, not both");
  if (top.has("register")) {
    cfg.reg = parse_register(top.child("register"));
  } else if (top.has("register_file")) {
    const auto p = resolve_path(base_dir, top.text("register_file", ""));
    if (!std::filesystem::exists(p)) fail(top.raw("register_file"), "register_file", "file not found: " + p.string());
    YAML::Node rn;
    try {
      rn = YAML::LoadFile(p.string());
    } catch (const YAML::Exception& e) {
      throw ValidationError(p.string() + ": YAML error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    cfg.reg = parse_register(Section(rn, p.filename().string()));
  }
  if (top.has("window")) {
    Section s = top.child("window");
    WindowConfig w;
    w.omega_e = s.real("omega_e_MHz", kMHz);
    w.omega_rf = s.real("omega_rf_MHz", kMHz);
    w.margin = s.real("margin", 1.0, kDefaultWindowMargin);
    s.finish();
    cfg.window = w;
  }
  if (top.has("gate")) cfg.gate = parse_gate(top.child("gate"));
  if (top.has("circuit")) {
    Section s = top.child("circuit");
    CircuitConfig c;
    c.file = resolve_path(base_dir, s.text("file", ""));
    if (!std::filesystem::exists(c.file)) fail(s.raw("file"), s.key_path("file"), "file not found: " + c.file.string());
    c.clock = s.real("clock_us", kUs, 0.0);
    c.rf_amp = s.real("rf_amp_MHz", kMHz, c.rf_amp);
    c.t_pi_mw = s.real("t_pi_mw_us", kUs, c.t_pi_mw);
    s.finish();
    cfg.circuit = c;
  }
  if (top.has("simulate")) {
    Section s = top.child("simulate");
    SimulateConfig sc;
    if (s.has("schedule_file")) {
      sc.schedule_file = resolve_path(base_dir, s.text("schedule_file", ""));
      if (!std::filesystem::exists(*sc.schedule_file))
        fail(s.raw("schedule_file"), s.key_path("schedule_file"), "file not found: " + sc.schedule_file->string());
    }
    sc.static_detuning = s.real("static_detuning_MHz", kMHz, 0.0);
    sc.max_step = s.real("max_step_us", kUs, 0.0);
    sc.steps_per_period = static_cast<int>(s.count("steps_per_period", kDefaultStepsPerPeriod));
    s.finish();
    cfg.simulate = sc;
  }
  if (top.has("echo")) {
    Section s = top.child("echo");
    EchoConfig e;
    e.bath.omega_L = s.real("omega_L_MHz", kMHz);
    const YAML::Node spins = s.raw("spins");
    if (spins && !spins.IsSequence()) fail(spins, s.key_path("spins"), "expected a list");
    for (std::size_t i = 0; spins && i < spins.size(); ++i) {
      Section b(spins[i], s.key_path("spins[" + std::to_string(i) + "]"));
      BathSpin bs;
      bs.omega1 = b.real("omega1_MHz", kMHz);
      bs.theta1 = b.real("theta1_rad", 1.0);
      b.finish();
      e.bath.spins.push_back(bs);
    }
    e.t_max = s.real("t_max_us", kUs);
    e.n_points = s.count("n_points", e.n_points);
    s.finish();
    cfg.echo = e;
  }
  if (top.has("decay")) {
    Section s = top.child("decay");
    DecayConfig d;
    d.t2_star = s.real("t2_star_us", kUs);
    d.t2 = s.real("t2_us", kUs);
    d.tau_c = s.real("tau_c_us", kUs, d.tau_c);
    d.t_max = s.real("t_max_us", kUs);
    d.n_points = s.count("n_points", d.n_points);
    d.trajectories = s.count("trajectories", 0);
    d.dt = s.real("dt_us", kUs, d.dt);
    s.finish();
    cfg.decay = d;
  }
  if (top.has("optimize")) {
    Section s = top.child("optimize");
    OptimizeConfig o;
    o.opt.n_segments = s.count("n_segments", o.opt.n_segments);
    o.opt.total_time = s.real("total_time_us", kUs, o.opt.total_time);
    o.target_nucleus = s.count("target_nucleus", 0);
    o.target_angle = s.real("target_angle_rad", 1.0, o.target_angle);
    const std::string frame = s.text("target_frame", "interaction");
    if (frame == "interaction") o.opt.target_frame = TargetFrame::interaction;
    else if (frame == "lab") o.opt.target_frame = TargetFrame::lab;
    else fail(s.raw("target_frame"), s.key_path("target_frame"), "expected interaction or lab");
    o.opt.mw_max = s.real("mw_max_MHz", kMHz, 0.0);
    o.opt.rf_max = s.real("rf_max_MHz", kMHz, 0.0);
    o.opt.rf_carrier = s.real("rf_carrier_MHz", kMHz, 0.0);
    o.t2_star = s.real("t2_star_us", kUs, 0.0);
    o.t2 = s.real("t2_us", kUs, 0.0);
    o.opt.ou_tau_c = s.real("tau_c_us", kUs, o.opt.ou_tau_c);
    o.opt.n_nodes = s.count("n_nodes", o.opt.n_nodes);
    o.opt.max_iterations = s.count("max_iterations", o.opt.max_iterations);
    o.opt.gradient_tolerance = s.real("gradient_tolerance", 1.0, o.opt.gradient_tolerance);
    o.opt.restarts = s.count("restarts", o.opt.restarts);
    o.opt.steps_per_period = static_cast<int>(s.count("steps_per_period", kDefaultStepsPerPeriod));
    o.opt.ou_trajectories = s.count("ou_trajectories", 0);
    o.opt.threads = static_cast<unsigned>(s.count("threads", 0));
    o.analytic_seed = s.flag("analytic_seed", true);
    try {
      o.opt.backend = parse_backend(s.text("backend", "lab"));
    } catch (const ValidationError&) {
      fail(s.raw("backend"), s.key_path("backend"), "expected lab or rwa");
    }
    s.finish();
    cfg.optimize = o;
  }
  top.finish();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("config: cannot read " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  RunConfig cfg = parse_config_text(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
  cfg.source = path;
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << cfg.seed;
  e << YAML::Key << "backend" << YAML::Value << to_string(cfg.backend);
  if (cfg.reg) {
    const RegisterSpec& r = *cfg.reg;
    e << YAML::Key << "register" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "omega_L_MHz" << YAML::Value << r.omega_L / kMHz;
    e << YAML::Key << "delta_E_e_MHz" << YAML::Value << r.delta_E_e / kMHz;
    e << YAML::Key << "omega_M_MHz" << YAML::Value << r.omega_M / kMHz;
    e << YAML::Key << "max_rabi_e_MHz" << YAML::Value << r.max_rabi_e / kMHz;
    e << YAML::Key << "max_rabi_rf_MHz" << YAML::Value << r.max_rabi_rf / kMHz;
    e << YAML::Key << "nuclei" << YAML::Value << YAML::BeginSeq;
    for (std::size_t j = 0; j < r.n_nuclei(); ++j) {
      e << YAML::BeginMap << YAML::Key << "hyperfine_MHz" << YAML::Value << YAML::Flow << YAML::BeginSeq;
      for (double x : r.hyperfine[j]) e << x / kMHz;
      e << YAML::EndSeq << YAML::Key << "enhancement" << YAML::Value << r.enhancement[j] << YAML::EndMap;
    }
    e << YAML::EndSeq;
    if (!r.dipolar.empty()) {
      e << YAML::Key << "dipolar_MHz" << YAML::Value << YAML::BeginSeq;
      for (const auto& row : r.dipolar) {
        e << YAML::Flow << YAML::BeginSeq;
        for (double x : row) e << x / kMHz;
        e << YAML::EndSeq;
      }
      e << YAML::EndSeq;
    }
    e << YAML::EndMap;
  }
  if (cfg.window) {
    e << YAML::Key << "window" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "omega_e_MHz" << YAML::Value << cfg.window->omega_e / kMHz;
    e << YAML::Key << "omega_rf_MHz" << YAML::Value << cfg.window->omega_rf / kMHz;
    e << YAML::Key << "margin" << YAML::Value << cfg.window->margin << YAML::EndMap;
  }
  if (cfg.gate) {
    const GateConfig& g = *cfg.gate;
    e << YAML::Key << "gate" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "kind" << YAML::Value << g.kind;
    e << YAML::Key << "target" << YAML::Value << g.target;
    e << YAML::Key << "alpha_rad" << YAML::Value << g.alpha;
    e << YAML::Key << "beta_rad" << YAML::Value << g.beta;
    e << YAML::Key << "gamma_rad" << YAML::Value << g.gamma;
    e << YAML::Key << "rf_amp_MHz" << YAML::Value << g.rf_amp / kMHz;
    e << YAML::Key << "t_pi_us" << YAML::Value << g.t_pi / kUs;
    e << YAML::Key << "t_pi_mw_us" << YAML::Value << g.t_pi_mw / kUs;
    e << YAML::Key << "clock_us" << YAML::Value << g.clock / kUs << YAML::EndMap;
  }
  if (cfg.circuit) {
    e << YAML::Key << "circuit" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "file" << YAML::Value << cfg.circuit->file.string();
    e << YAML::Key << "clock_us" << YAML::Value << cfg.circuit->clock / kUs;
    e << YAML::Key << "rf_amp_MHz" << YAML::Value << cfg.circuit->rf_amp / kMHz;
    e << YAML::Key << "t_pi_mw_us" << YAML::Value << cfg.circuit->t_pi_mw / kUs << YAML::EndMap;
  }
  if (cfg.simulate) {
    e << YAML::Key << "simulate" << YAML::Value << YAML::BeginMap;
    if (cfg.simulate->schedule_file)
      e << YAML::Key << "schedule_file" << YAML::Value << cfg.simulate->schedule_file->string();
    e << YAML::Key << "static_detuning_MHz" << YAML::Value << cfg.simulate->static_detuning / kMHz;
    e << YAML::Key << "max_step_us" << YAML::Value << cfg.simulate->max_step / kUs;
    e << YAML::Key << "steps_per_period" << YAML::Value << cfg.simulate->steps_per_period << YAML::EndMap;
  }
  if (cfg.echo) {
    e << YAML::Key << "echo" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "omega_L_MHz" << YAML::Value << cfg.echo->bath.omega_L / kMHz;
    e << YAML::Key << "spins" << YAML::Value << YAML::BeginSeq;
    for (const auto& s : cfg.echo->bath.spins)
      e << YAML::Flow << YAML::BeginMap << YAML::Key << "omega1_MHz" << YAML::Value << s.omega1 / kMHz << YAML::Key
        << "theta1_rad" << YAML::Value << s.theta1 << YAML::EndMap;
    e << YAML::EndSeq;
    e << YAML::Key << "t_max_us" << YAML::Value << cfg.echo->t_max / kUs;
    e << YAML::Key << "n_points" << YAML::Value << cfg.echo->n_points << YAML::EndMap;
  }
  if (cfg.decay) {
    const DecayConfig& d = *cfg.decay;
    e << YAML::Key << "decay" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "t2_star_us" << YAML::Value << d.t2_star / kUs;
    e << YAML::Key << "t2_us" << YAML::Value << d.t2 / kUs;
    e << YAML::Key << "tau_c_us" << YAML::Value << d.tau_c / kUs;
    e << YAML::Key << "t_max_us" << YAML::Value << d.t_max / kUs;
    e << YAML::Key << "n_points" << YAML::Value << d.n_points;
    e << YAML::Key << "trajectories" << YAML::Value << d.trajectories;
    e << YAML::Key << "dt_us" << YAML::Value << d.dt / kUs << YAML::EndMap;
  }
  if (cfg.optimize) {
    const OptimizeConfig& o = *cfg.optimize;
    e << YAML::Key << "optimize" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "n_segments" << YAML::Value << o.opt.n_segments;
    e << YAML::Key << "total_time_us" << YAML::Value << o.opt.total_time / kUs;
    e << YAML::Key << "target_nucleus" << YAML::Value << o.target_nucleus;
    e << YAML::Key << "target_angle_rad" << YAML::Value << o.target_angle;
    e << YAML::Key << "target_frame" << YAML::Value
      << (o.opt.target_frame == TargetFrame::interaction ? "interaction" : "lab");
    e << YAML::Key << "mw_max_MHz" << YAML::Value << o.opt.mw_max / kMHz;
    e << YAML::Key << "rf_max_MHz" << YAML::Value << o.opt.rf_max / kMHz;
    e << YAML::Key << "rf_carrier_MHz" << YAML::Value << o.opt.rf_carrier / kMHz;
    e << YAML::Key << "t2_star_us" << YAML::Value << o.t2_star / kUs;
    e << YAML::Key << "t2_us" << YAML::Value << o.t2 / kUs;
    e << YAML::Key << "tau_c_us" << YAML::Value << o.opt.ou_tau_c / kUs;
    e << YAML::Key << "n_nodes" << YAML::Value << o.opt.n_nodes;
    e << YAML::Key << "max_iterations" << YAML::Value << o.opt.max_iterations;
    e << YAML::Key << "gradient_tolerance" << YAML::Value << o.opt.gradient_tolerance;
    e << YAML::Key << "restarts" << YAML::Value << o.opt.restarts;
    e << YAML::Key << "steps_per_period" << YAML::Value << o.opt.steps_per_period;
    e << YAML::Key << "ou_trajectories" << YAML::Value << o.opt.ou_trajectories;
    e << YAML::Key << "threads" << YAML::Value << o.opt.threads;
    e << YAML::Key << "backend" << YAML::Value << to_string(o.opt.backend);
    e << YAML::Key << "analytic_seed" << YAML::Value << o.analytic_seed << YAML::EndMap;
  }
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace spinreg
