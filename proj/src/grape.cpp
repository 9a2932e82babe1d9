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

#include "spinreg/grape.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "spinreg/errors.hpp"
#include "spinreg/noise.hpp"
#include "spinreg/pulse.hpp"
#include "spinreg/simd/kernels.hpp"

namespace spinreg {

ComplexMatrix local_x_rotation_target(const RegisterSpec& spec_in, std::size_t nucleus, double angle) {
  RegisterSpec spec = spec_in;
  spec.validate();
  if (nucleus >= spec.n_nuclei()) throw ValidationError("target nucleus out of range");
  const ComplexMatrix r = local_frame(spec, nucleus).basis();
  const ComplexMatrix lab = r * rot_x(angle) * r.adjoint();
  return embed_operator(lab, nucleus + 1, spec.n_qubits());
}

namespace {

struct Problem {
  RegisterSpec spec;
  double mw_max = 0.0, rf_max = 0.0, carrier = 0.0;
  ComplexMatrix w;  // effective target
  std::vector<std::pair<double, double>> nodes;
};

Problem resolve(const RegisterSpec& spec_in, const OptimizationConfig& cfg) {
  Problem p;
  p.spec = spec_in;
  p.spec.validate();
  if (cfg.n_segments < 1) throw ValidationError("n_segments must be at least 1");
  if (!(cfg.total_time > 0)) throw ValidationError("total_time must be positive");
  p.mw_max = cfg.mw_max > 0 ? cfg.mw_max : p.spec.max_rabi_e;
  p.rf_max = cfg.rf_max > 0 ? cfg.rf_max : p.spec.max_rabi_rf;
  if (!(p.mw_max > 0) || !(p.rf_max > 0)) throw ValidationError("amplitude ceilings must be positive");
  p.carrier = cfg.rf_carrier > 0 ? cfg.rf_carrier : local_frame(p.spec, 0).omega1;
  if (cfg.target.dim() != p.spec.dim() || !cfg.target.is_unitary(1e-10))
    throw ValidationError("target must be a unitary of the register dimension");
  p.w = cfg.target_frame == TargetFrame::interaction ? evolve(drift_hamiltonian(p.spec), cfg.total_time) * cfg.target
                                                     : cfg.target;
  p.nodes = detuning_ensemble(cfg);
  return p;
}

ComplexMatrix transposed(const ComplexMatrix& m) { return m.transpose(); }

// Tr(G T) with T supplied transposed.
cplx trace_with(const ComplexMatrix& g, const ComplexMatrix& t_transposed) {
  return simd::cdotu(g.dim() * g.dim(), g.data(), t_transposed.data());
}

struct Templates {
  ComplexMatrix sx, sy, rf_lab;
  std::vector<ComplexMatrix> vx, vy;
  explicit Templates(const ModelOperators& ops) {
    sx = transposed(ops.sx_e());
    sy = transposed(ops.sy_e());
    rf_lab = transposed(ops.rf_lab());
    for (std::size_t a = 0; a < ops.spec().n_nuclei(); ++a) {
      vx.push_back(transposed(ops.rwa_vx(a)));
      vy.push_back(transposed(ops.rwa_vy(a)));
    }
  }
};

struct Member {
  double f = 0.0;
  std::vector<double> grad;  // natural parameters, 4 per segment
};

Member evaluate_member(const ModelOperators& ops, const Templates& tpl, const PulseSequence& seq,
                       std::vector<PropagationStep> steps, double detuning, const ComplexMatrix& w, Backend backend,
                       bool want_grad) {
  const std::size_t d = ops.spec().dim();
  const std::size_t k_steps = steps.size();
  for (auto& s : steps) s.detuning = detuning;
  Member out;
  std::vector<HermitianEigen> eig;
  std::vector<ComplexMatrix> e, a;
  std::vector<ComplexMatrix> frame;
  if (want_grad) {
    eig.reserve(k_steps);
    e.reserve(k_steps);
    a.reserve(k_steps + 1);
    frame.resize(k_steps);
  }
  ComplexMatrix u = ComplexMatrix::identity(d), tmp(d);
  if (want_grad) a.push_back(u);
  for (std::size_t k = 0; k < k_steps; ++k) {
    const PropagationStep& st = steps[k];
    const PulseSegment& seg = seq.segments[st.segment];
    HermitianEigen he = eigh(ops.step_generator(seg, st, backend));
    ComplexMatrix ek = evolve(he, st.dt);
    if (st.close_frame) {
      ComplexMatrix f = ops.rwa_frame_factor(ops.addressed(seg), seg.rf_carrier * st.segment_duration);
      ek = f * ek;
      if (want_grad) frame[k] = std::move(f);
    }
    multiply_into(ek, u, tmp);
    std::swap(u, tmp);
    if (want_grad) {
      eig.push_back(std::move(he));
      e.push_back(std::move(ek));
      a.push_back(u);
    }
  }
  const cplx g = trace_inner(w, u);
  const double dd = static_cast<double>(d) * static_cast<double>(d);
  out.f = std::min(1.0, std::norm(g) / dd);
  if (!want_grad) return out;

  out.grad.assign(4 * seq.segments.size(), 0.0);
  ComplexMatrix b = w.adjoint();
  ComplexMatrix m(d), q(d), y(d), gm(d), vad(d);
  for (std::size_t kk = k_steps; kk-- > 0;) {
    const PropagationStep& st = steps[kk];
    const PulseSegment& seg = seq.segments[st.segment];
    multiply_into(a[kk], b, m);
    if (st.close_frame) {
      multiply_into(m, frame[kk], tmp);
      std::swap(m, tmp);
    }
    const HermitianEigen& he = eig[kk];
    const ComplexMatrix& v = he.vectors;
    vad = v.adjoint();
    multiply_into(vad, m, tmp);
    multiply_into(tmp, v, q);
    // G = V (Q o Phi^T) V^dagger with Phi the divided differences of exp(-i x dt).
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        const double li = he.values[i], lj = he.values[j];
        const double x = 0.5 * (li - lj) * st.dt;
        const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
        const cplx phi = cplx(0.0, -st.dt) * std::polar(1.0, -0.5 * (li + lj) * st.dt) * sinc;
        y(i, j) = q(i, j) * phi;
      }
    }
    multiply_into(v, y, tmp);
    multiply_into(tmp, vad, gm);
    const cplx tx = trace_with(gm, tpl.sx), ty = trace_with(gm, tpl.sy);
    const double cm = std::cos(seg.mw_phase), sm = std::sin(seg.mw_phase);
    cplx dg[4];
    dg[0] = cm * tx + sm * ty;
    dg[1] = seg.mw_amp * (-sm * tx + cm * ty);
    if (st.rotating && backend == Backend::rwa) {
      const std::size_t ad = ops.addressed(seg);
      const double ang = seg.rf_phase - ops.frame(ad).lambda;
      const cplx vx = trace_with(gm, tpl.vx[ad]), vy = trace_with(gm, tpl.vy[ad]);
      dg[2] = std::cos(ang) * vx + std::sin(ang) * vy;
      dg[3] = seg.rf_amp * (-std::sin(ang) * vx + std::cos(ang) * vy);
    } else {
      const cplx tr = trace_with(gm, tpl.rf_lab);
      dg[2] = st.rf_coef * tr;
      dg[3] = seg.rf_amp * st.rf_coef_dphase * tr;
    }
    for (int p = 0; p < 4; ++p) out.grad[4 * st.segment + p] += 2.0 * std::real(std::conj(g) * dg[p]) / dd;
    multiply_into(b, e[kk], tmp);
    std::swap(b, tmp);
  }
  return out;
}

unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct Evaluation {
  double objective = 0.0;
  std::vector<double> member_f;
  std::vector<double> grad;
};

Evaluation evaluate(const Problem& p, const ModelOperators& ops, const Templates& tpl, const PulseSequence& seq,
                    const OptimizationConfig& cfg, bool want_grad) {
  const double t = seq.total_time();
  if (std::abs(t - cfg.total_time) > 1e-9 * cfg.total_time) throw ValidationError("controls do not span total_time");
  StepGridOptions go;
  go.backend = cfg.backend;
  go.steps_per_period = cfg.steps_per_period;
  go.control_independent = true;
  go.rf_amp_bound = p.rf_max;
  const auto steps = build_steps(ops.spec(), seq, go);
  std::vector<Member> members(p.nodes.size());
  const unsigned nt = worker_count(cfg.threads, members.size());
  auto work = [&](unsigned wid) {
    for (std::size_t i = wid; i < members.size(); i += nt)
      members[i] = evaluate_member(ops, tpl, seq, steps, p.nodes[i].first, p.w, cfg.backend, want_grad);
  };
  if (nt <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  Evaluation ev;
  if (want_grad) ev.grad.assign(4 * seq.segments.size(), 0.0);
  for (std::size_t i = 0; i < members.size(); ++i) {
    const double wgt = p.nodes[i].second;
    ev.objective += wgt * members[i].f;
    ev.member_f.push_back(members[i].f);
    if (want_grad)
      for (std::size_t j = 0; j < ev.grad.size(); ++j) ev.grad[j] += wgt * members[i].grad[j];
  }
  return ev;
}

PulseSequence uniform_grid(const Problem& p, const OptimizationConfig& cfg) {
  PulseSequence s;
  PulseSegment seg;
  seg.duration = cfg.total_time / static_cast<double>(cfg.n_segments);
  seg.rf_carrier = p.carrier;
  s.segments.assign(cfg.n_segments, seg);
  return s;
}

void to_sequence(const Problem& p, const std::vector<double>& x, PulseSequence& s) {
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    s.segments[i].mw_amp = x[4 * i] * p.mw_max;
    s.segments[i].mw_phase = x[4 * i + 1];
    s.segments[i].rf_amp = x[4 * i + 2] * p.rf_max;
    s.segments[i].rf_phase = x[4 * i + 3];
  }
}

std::vector<double> from_sequence(const Problem& p, const PulseSequence& s) {
  std::vector<double> x(4 * s.segments.size());
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    x[4 * i] = std::clamp(s.segments[i].mw_amp / p.mw_max, 0.0, 1.0);
    x[4 * i + 1] = s.segments[i].mw_phase;
    x[4 * i + 2] = std::clamp(s.segments[i].rf_amp / p.rf_max, 0.0, 1.0);
    x[4 * i + 3] = s.segments[i].rf_phase;
  }
  return x;
}

// Sample an arbitrary schedule onto the optimizer grid, averaging amplitudes
// over each grid cell and taking the phase of the dominant overlap.
PulseSequence resample(const Problem& p, const OptimizationConfig& cfg, const PulseSequence& in) {
  PulseSequence g = uniform_grid(p, cfg);
  const double h = cfg.total_time / static_cast<double>(cfg.n_segments);
  std::vector<double> best_mw(cfg.n_segments, 0.0), best_rf(cfg.n_segments, 0.0);
  double t0 = 0.0;
  for (const auto& s : in.segments) {
    const double t1 = t0 + s.duration;
    for (std::size_t i = 0; i < cfg.n_segments; ++i) {
      const double a = std::max(t0, h * static_cast<double>(i)), b = std::min(t1, h * static_cast<double>(i + 1));
      if (b <= a) continue;
      const double frac = (b - a) / h;
      g.segments[i].mw_amp += frac * s.mw_amp;
      g.segments[i].rf_amp += frac * s.rf_amp;
      if (frac * s.mw_amp > best_mw[i]) best_mw[i] = frac * s.mw_amp, g.segments[i].mw_phase = s.mw_phase;
      if (frac * s.rf_amp > best_rf[i]) best_rf[i] = frac * s.rf_amp, g.segments[i].rf_phase = s.rf_phase;
    }
    t0 = t1;
  }
  return g;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool is_amp(std::size_t i) { return i % 4 == 0 || i % 4 == 2; }

// Zero the components that point out of the box at active bounds.
void project_direction(const std::vector<double>& x, std::vector<double>& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!is_amp(i)) continue;
    if ((x[i] <= 0.0 && d[i] < 0) || (x[i] >= 1.0 && d[i] > 0)) d[i] = 0.0;
  }
}

void project_point(std::vector<double>& x) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (is_amp(i)) x[i] = std::clamp(x[i], 0.0, 1.0);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct RunResult {
  std::vector<double> x;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

RunResult run_cg(const Problem& p, const ModelOperators& ops, const Templates& tpl, const OptimizationConfig& cfg,
                 std::vector<double> x) {
  PulseSequence seq = uniform_grid(p, cfg);
  auto scaled_grad = [&](const std::vector<double>& g_nat) {
    std::vector<double> g(g_nat.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double scale = i % 4 == 0 ? p.mw_max : (i % 4 == 2 ? p.rf_max : 1.0);
      g[i] = g_nat[i] * scale;
    }
    return g;
  };
  auto value_grad = [&](const std::vector<double>& xx, std::vector<double>& g) {
    to_sequence(p, xx, seq);
    Evaluation ev = evaluate(p, ops, tpl, seq, cfg, true);
    g = scaled_grad(ev.grad);
    return ev.objective;
  };
  auto value = [&](const std::vector<double>& xx) {
    to_sequence(p, xx, seq);
    return evaluate(p, ops, tpl, seq, cfg, false).objective;
  };

  project_point(x);
  RunResult r;
  std::vector<double> g;
  double f = value_grad(x, g);
  r.trace.push_back(f);
  std::vector<double> pg_prev, d_prev;
  double step = 0.0, prev_slope = 0.0;
  const std::size_t n = x.size();
  for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
    std::vector<double> pg = g;
    project_direction(x, pg);
    if (max_abs(pg) <= cfg.gradient_tolerance || 1.0 - f < 1e-12) {
      r.converged = true;
      break;
    }
    std::vector<double> d = pg;
    bool steepest = true;
    if (!pg_prev.empty() && it % n != 0) {
      const double beta = std::max(0.0, dot(pg, pg) - dot(pg, pg_prev)) / std::max(dot(pg_prev, pg_prev), 1e-300);
      if (beta > 0) {
        for (std::size_t i = 0; i < n; ++i) d[i] += beta * d_prev[i];
        project_direction(x, d);
        steepest = false;
      }
    }
    if (dot(pg, d) <= 0) {
      d = pg;
      steepest = true;
    }
    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const double slope0 = dot(g, d);
      double s = step > 0 && prev_slope > 0 ? std::min(step * prev_slope / slope0, 4.0 * step)
                                            : 0.05 / std::max(max_abs(d), 1e-300);
      for (int ls = 0; ls < 40; ++ls, s *= 0.5) {
        std::vector<double> xn(n);
        for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] + s * d[i];
        project_point(xn);
        double lin = 0.0;
        for (std::size_t i = 0; i < n; ++i) lin += g[i] * (xn[i] - x[i]);
        const double fn = value(xn);
        if (fn > f && fn >= f + 1e-4 * std::max(lin, 0.0)) {
          // Parabola through f, its slope and fn; try its vertex if it lies past s.
          const double slope = slope0;
          const double curv = fn - f - slope * s;
          double best_f = fn;
          if (curv < 0) {
            const double s_q = std::min(-slope * s * s / (2.0 * curv), 8.0 * s);
            if (s_q > 1.1 * s) {
              std::vector<double> xq(n);
              for (std::size_t i = 0; i < n; ++i) xq[i] = x[i] + s_q * d[i];
              project_point(xq);
              const double fq = value(xq);
              if (fq > best_f) {
                best_f = fq;
                xn = std::move(xq);
                s = s_q;
              }
            }
          }
          x = std::move(xn);
          step = s;
          prev_slope = slope0;
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (steepest) break;
        d = pg;
        steepest = true;
        step = 0.0;
      }
    }
    if (!accepted) break;
    const double f_new = value_grad(x, g);
    if (f_new < f) throw DomainError("line search accepted a decreasing step");
    f = f_new;
    r.trace.push_back(f);
    r.iterations = it + 1;
    pg_prev = pg;
    d_prev = d;
  }
  r.x = std::move(x);
  r.objective = f;
  return r;
}

}  // namespace

std::vector<std::pair<double, double>> detuning_ensemble(const OptimizationConfig& cfg) {
  if (cfg.sigma_static < 0) throw ValidationError("sigma_static must be nonnegative");
  if (cfg.sigma_static == 0.0 || cfg.n_nodes <= 1) return {{0.0, 1.0}};
  const Quadrature q = gauss_hermite_normal(cfg.n_nodes);
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) out.emplace_back(cfg.sigma_static * q.nodes[i], q.weights[i]);
  return out;
}

EnsembleFidelity ensemble_fidelity(const PulseSequence& controls, const RegisterSpec& spec,
                                   const OptimizationConfig& cfg) {
  const Problem p = resolve(spec, cfg);
  const double t = controls.total_time();
  if (std::abs(t - cfg.total_time) > 1e-9 * cfg.total_time) throw ValidationError("controls do not span total_time");
  // Scored with the simulator rather than the optimizer's step model.
  auto fidelity_at = [&](double detuning) {
    SimulationOptions so;
    so.backend = cfg.backend;
    so.static_detuning = detuning;
    so.steps_per_period = cfg.steps_per_period;
    return gate_fidelity(p.w, simulate_sequence(p.spec, controls, so));
  };
  std::vector<double> f(p.nodes.size());
  const unsigned nt = worker_count(cfg.threads, f.size());
  auto work = [&](unsigned wid) {
    for (std::size_t i = wid; i < f.size(); i += nt) f[i] = fidelity_at(p.nodes[i].first);
  };
  if (nt <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nt; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }
  EnsembleFidelity r;
  bool has_zero = false;
  for (std::size_t i = 0; i < f.size(); ++i) {
    r.f_noisy_mean += p.nodes[i].second * f[i];
    if (p.nodes[i].first == 0.0) {
      r.f_ideal = f[i];
      has_zero = true;
    }
  }
  if (!has_zero) r.f_ideal = fidelity_at(0.0);
  double var = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) var += p.nodes[i].second * (f[i] - r.f_noisy_mean) * (f[i] - r.f_noisy_mean);
  r.f_noisy_std = std::sqrt(std::max(var, 0.0));
  return r;
}

ObjectiveGradient fidelity_gradient(const PulseSequence& controls, const RegisterSpec& spec,
                                    const OptimizationConfig& cfg) {
  const Problem p = resolve(spec, cfg);
  const ModelOperators ops(p.spec);
  const Templates tpl(ops);
  Evaluation ev = evaluate(p, ops, tpl, controls, cfg, true);
  return {ev.objective, std::move(ev.grad)};
}

PulseSequence analytic_seed(const RegisterSpec& spec, const OptimizationConfig& cfg, double angle) {
  const Problem p = resolve(spec, cfg);
  const LocalFrame lf = local_frame(p.spec, 0);
  const double kappa = p.spec.enhancement[0];
  const double t_p = std::abs(angle) / (kappa * p.rf_max * lf.omega_bar_scale);
  const double t_mw = kPi / p.mw_max;
  // Echo layout: rf on the ms1 branch, electron pi near T/2, rf on the other
  // branch, electron pi ending at T. Static detuning cancels to first order.
  // The first pi is shifted by up to one ms1 period and the two rf phases are
  // scanned; the shift buys the z rotation the rf pulses cannot supply.
  const double T = cfg.total_time;
  const double period = kTwoPi / lf.omega1;
  if (2 * (t_p + t_mw) + 2 * period > T) throw DomainError("analytic seed does not fit in total_time");
  PulseSegment idle;
  idle.rf_carrier = p.carrier;
  auto build = [&](double shift, double psi_a, double psi_b) {
    PulseSegment rf = idle;
    rf.duration = t_p;
    rf.rf_amp = p.rf_max;
    PulseSegment mw = idle;
    mw.duration = t_mw;
    mw.mw_amp = p.mw_max;
    PulseSequence tl;
    auto push = [&](PulseSegment seg, double d) {
      seg.duration = d;
      if (d > 0) tl.segments.push_back(seg);
    };
    const double first = T / 2 + shift - t_mw / 2;
    rf.rf_phase = psi_a;
    push(rf, t_p);
    push(idle, first - t_p);
    push(mw, t_mw);
    rf.rf_phase = psi_b;
    push(rf, t_p);
    push(idle, T - first - 2 * t_mw - t_p);
    push(mw, t_mw);
    return resample(p, cfg, tl);
  };
  const ModelOperators ops(p.spec);
  const Templates tpl(ops);
  // Scored noiselessly: the layout already carries the echo.
  Problem p0 = p;
  p0.nodes = {{0.0, 1.0}};
  auto score = [&](const PulseSequence& s) { return evaluate(p0, ops, tpl, s, cfg, false).objective; };
  constexpr int kShifts = 16, kPhases = 8;
  double best = -1.0, best_shift = 0.0, best_a = lf.lambda, best_b = lf.lambda;
  for (int k = 0; k <= kShifts; ++k) {
    const double shift = period * (2.0 * k / kShifts - 1.0);
    double pa = lf.lambda, pb = lf.lambda, f = -1.0;
    for (int pass = 0; pass < 3; ++pass) {
      double& which = pass == 1 ? pb : pa;
      double keep = which;
      for (int j = 0; j < kPhases; ++j) {
        which = kTwoPi * j / kPhases;
        const double v = score(build(shift, pa, pb));
        if (v > f) f = v, keep = which;
      }
      which = keep;
    }
    if (f > best) best = f, best_shift = shift, best_a = pa, best_b = pb;
  }
  return build(best_shift, best_a, best_b);
}

OptimizationResult optimize_pulse(const RegisterSpec& spec, const OptimizationConfig& cfg,
                                  const std::optional<PulseSequence>& initial) {
  const Problem p = resolve(spec, cfg);
  const ModelOperators ops(p.spec);
  const Templates tpl(ops);
  std::vector<std::vector<double>> starts;
  if (initial) {
    const bool on_grid = initial->segments.size() == cfg.n_segments &&
                         std::abs(initial->total_time() - cfg.total_time) <= 1e-9 * cfg.total_time;
    starts.push_back(from_sequence(p, on_grid ? *initial : resample(p, cfg, *initial)));
  }
  const std::size_t restarts = std::max<std::size_t>(cfg.restarts, 1);
  for (std::size_t r = starts.size(); r < restarts; ++r) {
    Rng rng = make_stream(cfg.seed, r);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<double> x(4 * cfg.n_segments);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = u01(rng);
      switch (i % 4) {
        case 0: x[i] = 0.1 * v; break;
        case 2: x[i] = v; break;
        default: x[i] = kTwoPi * v - kPi; break;
      }
    }
    starts.push_back(std::move(x));
  }
  RunResult best;
  bool have = false;
  for (auto& x0 : starts) {
    RunResult r = run_cg(p, ops, tpl, cfg, x0);
    if (!have || r.objective > best.objective) {
      best = std::move(r);
      have = true;
    }
  }
  OptimizationResult out;
  out.controls = uniform_grid(p, cfg);
  to_sequence(p, best.x, out.controls);
  const EnsembleFidelity ef = ensemble_fidelity(out.controls, p.spec, cfg);
  FidelityReport& rep = out.report;
  rep.f_ideal = ef.f_ideal;
  rep.f_noisy_mean = ef.f_noisy_mean;
  rep.f_noisy_std = ef.f_noisy_std;
  rep.gate_time = cfg.total_time;
  rep.iterations = best.iterations;
  rep.converged = best.converged;
  rep.trace = best.trace;
  if (cfg.ou_trajectories > 0 && cfg.ou_G0 > 0) {
    NoiseModel nm;
    nm.G0 = cfg.ou_G0;
    nm.tau_c = cfg.ou_tau_c;
    const double dt = cfg.total_time / static_cast<double>(4 * cfg.n_segments);
    std::vector<double> f(cfg.ou_trajectories);
    for (std::size_t k = 0; k < f.size(); ++k) {
      Rng rng = make_stream(cfg.seed ^ 0x9e3779b97f4a7c15ULL, k);
      const OuPath path = sample_ou_trajectory(nm, dt, 4 * cfg.n_segments + 1, rng);
      SimulationOptions so;
      so.backend = cfg.backend;
      so.ou = &path;
      so.steps_per_period = cfg.steps_per_period;
      f[k] = gate_fidelity(p.w, simulate_sequence(p.spec, out.controls, so));
    }
    double s = 0.0, sq = 0.0;
    for (double v : f) s += v;
    rep.f_ou_mean = s / static_cast<double>(f.size());
    for (double v : f) sq += (v - rep.f_ou_mean) * (v - rep.f_ou_mean);
    rep.f_ou_std = f.size() > 1 ? std::sqrt(sq / static_cast<double>(f.size() - 1)) : 0.0;
    rep.ou_n = f.size();
  }
  return out;
}

}  // namespace spinreg
