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

#include "spinreg/pulse.hpp"

#include <algorithm>
#include <cmath>

#include "spinreg/errors.hpp"

namespace spinreg {

namespace {

struct Euler {
  double alpha, beta, gamma;
};

// beta into [0, pi]; equal to the input up to a global sign.
Euler normalize(const GateSpec& g) {
  if (!std::isfinite(g.euler_alpha) || !std::isfinite(g.euler_beta) || !std::isfinite(g.euler_gamma))
    throw ValidationError("euler angles must be finite");
  Euler e{g.euler_alpha, std::fmod(g.euler_beta, kTwoPi), g.euler_gamma};
  if (e.beta < 0) e.beta += kTwoPi;
  if (e.beta > kPi) {
    e.alpha -= kPi;
    e.gamma += kPi;
    e.beta = kTwoPi - e.beta;
  }
  return e;
}

double wrap_positive(double a) {
  double s = std::fmod(a, kTwoPi);
  if (s < 0) s += kTwoPi;
  return s;
}

struct GateTiming {
  LocalFrame lf;
  Euler e;
  double kappa = 1.0;
  double t_p = 0.0;
  double t_pi = 0.0;
  double amp_p = 0.0;   // enhanced
  double amp_pi = 0.0;  // enhanced
  double s = 0.0;
};

GateTiming gate_timing(const RegisterSpec& checked, const GateSpec& gate, double rf_amp, double t_pi, double T) {
  if (gate.target_nucleus >= checked.n_nuclei()) throw ValidationError("gate target out of range");
  if (!(rf_amp > 0)) throw ValidationError("rf amplitude must be positive");
  GateTiming g;
  g.lf = local_frame(checked, gate.target_nucleus);
  g.kappa = checked.enhancement[gate.target_nucleus];
  g.e = normalize(gate);
  const LocalFrame frames[] = {g.lf};
  const double t_min = min_clock_time(frames, rf_amp);
  if (T < t_min * (1 - 1e-12)) throw DomainError("clock violation: T below the minimum clock time");
  const double wbar = rf_amp * g.lf.omega_bar_scale;
  g.amp_p = rf_amp;
  g.t_p = g.e.beta / wbar;
  if (t_pi > 0) {
    g.t_pi = t_pi;
    g.amp_pi = kPi / (g.lf.omega_bar_scale * t_pi);
  } else {
    g.t_pi = kPi / wbar;
    g.amp_pi = rf_amp;
  }
  g.s = wrap_positive(g.e.alpha + g.e.gamma);
  return g;
}

PulseSegment rf_segment(const GateTiming& g, double duration, double amp, double phase) {
  PulseSegment s;
  s.duration = duration;
  s.rf_amp = amp / g.kappa;
  s.rf_phase = phase;
  s.rf_carrier = g.lf.omega1;
  return s;
}

PulseSegment delay(double duration) {
  PulseSegment s;
  s.duration = duration;
  return s;
}

void push(PulseSequence& seq, const PulseSegment& s) {
  if (s.duration > 0) seq.segments.push_back(s);
}

}  // namespace

ReducedRabi reduced_rabi(const LocalFrame& frame, double rf_amp) {
  if (rf_amp < 0) throw ValidationError("rf amplitude must be nonnegative");
  return {rf_amp * frame.omega_bar_scale, frame.lambda};
}

ComplexMatrix rot_z(double a) {
  return ComplexMatrix(2, {std::polar(1.0, -a / 2), 0.0, 0.0, std::polar(1.0, a / 2)});
}

ComplexMatrix rot_x(double b) {
  const double c = std::cos(b / 2), s = std::sin(b / 2);
  return ComplexMatrix(2, {c, cplx(0, -s), cplx(0, -s), c});
}

ComplexMatrix euler_zxz(double alpha, double beta, double gamma) { return rot_z(gamma) * rot_x(beta) * rot_z(alpha); }

ComplexMatrix ul_propagator(const LocalFrame& frame, double rf_amp, double t_p, double psi) {
  if (t_p < 0) throw ValidationError("pulse time must be nonnegative");
  const ReducedRabi rr = reduced_rabi(frame, rf_amp);
  const double c = rr.lambda - psi;
  return rot_z(frame.omega1 * t_p - c) * rot_x(rr.omega_bar * t_p) * rot_z(c);
}

double min_clock_time(std::span<const LocalFrame> frames, double rf_amp) {
  if (frames.empty()) throw ValidationError("min_clock_time needs at least one frame");
  if (!(rf_amp > 0)) throw ValidationError("rf amplitude must be positive");
  double worst = 0.0;
  for (const auto& f : frames) {
    if (!(f.omega_bar_scale > 1e-12)) throw DomainError("unreachable spin: reduced rf Rabi frequency is zero");
    worst = std::max(worst, 1.0 / (rf_amp * f.omega_bar_scale) + 1.0 / f.omega1);
  }
  return 2.0 * kTwoPi * worst;
}

double larmor_aligned_clock(const RegisterSpec& spec, double t_min, int periods) {
  if (!(spec.omega_L > 0) || periods < 1) throw ValidationError("larmor alignment needs omega_L > 0");
  const double p = kTwoPi / spec.omega_L * periods;
  const double k = std::max(1.0, std::ceil(t_min / p - 1e-9));
  return k * p;
}

PulseSequence compile_plain_gate(const RegisterSpec& spec_in, const GateSpec& gate, double rf_amp, double t_pi,
                                 double T) {
  RegisterSpec spec = spec_in;
  spec.validate();
  const GateTiming g = gate_timing(spec, gate, rf_amp, t_pi, T);
  const double w = g.lf.omega1;
  const double t1 = T / 2 - g.t_pi - g.s / (2 * w);
  const double t2 = T / 2 - g.t_p - g.t_pi + g.s / (2 * w);
  if (t1 < 0 || t2 < 0) throw DomainError("clock violation: negative delay in plain gate");
  const double psi1 = g.lf.lambda - g.e.alpha;
  const double psi2 = g.lf.lambda - kPi;
  PulseSequence seq;
  push(seq, rf_segment(g, g.t_p, g.amp_p, psi1));
  push(seq, rf_segment(g, g.t_pi, g.amp_pi, psi2));
  push(seq, delay(t1));
  push(seq, rf_segment(g, g.t_pi, g.amp_pi, psi2));
  push(seq, delay(t2));
  return seq;
}

PulseSequence compile_decoupled_gate(const RegisterSpec& spec_in, const GateSpec& gate, double rf_amp,
                                     double t_pi_rf, double t_pi_mw, double T) {
  RegisterSpec spec = spec_in;
  spec.validate();
  if (!(t_pi_mw > 0)) throw ValidationError("mu-wave pi pulse time must be positive");
  const GateTiming g = gate_timing(spec, gate, rf_amp, t_pi_rf, T);
  const double turns = spec.omega_L * T / (4 * kTwoPi);
  if (std::abs(turns - std::round(turns)) > 1e-6)
    throw DomainError("clock violation: T/4 must be a multiple of the nuclear Larmor period");
  const double w = g.lf.omega1;
  const double tau = T / 8 - g.t_pi / 2;
  const double tphi = g.s / (4 * w);
  const double h = t_pi_mw / 2;
  const double d[8] = {tau - tphi - h, tau - h, tau - h, tau - tphi - h,
                       tau + tphi - h, tau - h, tau - h, tau + tphi - g.t_p - h};
  for (double x : d)
    if (x < 0) throw DomainError("clock violation: negative delay in decoupled gate");
  const double psi1 = g.lf.lambda - g.e.alpha;
  const double psi2 = g.lf.lambda - kPi;
  PulseSegment mw;
  mw.duration = t_pi_mw;
  mw.mw_amp = kPi / t_pi_mw;
  const PulseSegment rf_pi = rf_segment(g, g.t_pi, g.amp_pi, psi2);
  PulseSequence seq;
  push(seq, rf_segment(g, g.t_p, g.amp_p, psi1));
  push(seq, rf_pi);
  for (int k = 0; k < 8; ++k) {
    push(seq, delay(d[k]));
    if (k % 2 == 0) {
      push(seq, mw);
    } else if (k < 7) {
      push(seq, rf_pi);
    }
  }
  return seq;
}

GateBlocks plain_gate_blocks(const RegisterSpec& spec_in, const GateSpec& gate, double T) {
  RegisterSpec spec = spec_in;
  spec.validate();
  if (gate.target_nucleus >= spec.n_nuclei()) throw ValidationError("gate target out of range");
  const Euler e = normalize(gate);
  const double s = wrap_positive(e.alpha + e.gamma);
  const LocalFrame lf = local_frame(spec, gate.target_nucleus);
  const ComplexMatrix r = lf.basis();
  GateBlocks b;
  b.ms1 = euler_zxz(e.alpha, e.beta, s - e.alpha) * cplx(-1.0);
  b.ms0 = r.adjoint() * rot_z(spec.omega_L * T) * r;
  return b;
}

GateBlocks decoupled_gate_blocks(const RegisterSpec& spec_in, const GateSpec& gate, double T) {
  GateBlocks b = plain_gate_blocks(spec_in, gate, T);
  b.ms0 = ComplexMatrix::identity(2) * cplx(-1.0);
  return b;
}

namespace {

// Lab steps with rf: interaction picture of the rf-free generator A, first
// and second Magnus terms. The first is exact in closed form; the inner
// integral of the second is closed form, the outer uses 6-point
// Gauss-Legendre. Fourth order in the step.
struct LabFrame {
  std::size_t segment = static_cast<std::size_t>(-1);
  double detuning = 0.0;
  HermitianEigen eig;
  ComplexMatrix vp;  // rf_lab in the eigenbasis
};

cplx phase_integral(double x, double tau) {
  const double y = 0.5 * x * tau;
  const double sinc = std::abs(y) < 1e-6 ? 1.0 - y * y / 6.0 : std::sin(y) / y;
  return tau * sinc * std::polar(1.0, y);
}

ComplexMatrix lab_rf_step(const ModelOperators& ops, const PulseSegment& seg, const PropagationStep& st,
                          LabFrame& fr) {
  static constexpr double kX[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                                   0.2386191860831969,  0.6612093864662645,  0.9324695142031521};
  static constexpr double kW[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                                   0.4679139345726910, 0.3607615730481386, 0.1713244923791704};
  if (fr.segment != st.segment || fr.detuning != st.detuning) {
    PropagationStep bare = st;
    bare.rf_coef = 0.0;
    PulseSegment free_seg = seg;
    free_seg.rf_amp = 0.0;
    fr.eig = eigh(ops.step_generator(free_seg, bare, Backend::lab));
    fr.vp = fr.eig.vectors.adjoint() * ops.rf_lab() * fr.eig.vectors;
    fr.segment = st.segment;
    fr.detuning = st.detuning;
  }
  const std::size_t d = fr.vp.dim();
  const auto& e = fr.eig.values;
  const double h = st.dt, w = seg.rf_carrier;
  const cplx ep = std::polar(1.0, w * st.t0 + seg.rf_phase);
  const double a = seg.rf_amp;
  ComplexMatrix om(d);
  for (std::size_t m = 0; m < d; ++m)
    for (std::size_t n = 0; n < d; ++n) {
      const double de = e[m] - e[n];
      om(m, n) = a * fr.vp(m, n) * (ep * phase_integral(de + w, h) + std::conj(ep) * phase_integral(de - w, h));
    }
  ComplexMatrix vi(d), pi(d);
  for (int q = 0; q < 6; ++q) {
    const double tau = 0.5 * h * (kX[q] + 1.0);
    const double c = 2.0 * a * std::cos(w * (st.t0 + tau) + seg.rf_phase);
    for (std::size_t m = 0; m < d; ++m)
      for (std::size_t n = 0; n < d; ++n) {
        const double de = e[m] - e[n];
        vi(m, n) = c * fr.vp(m, n) * std::polar(1.0, de * tau);
        pi(m, n) = a * fr.vp(m, n) *
                   (ep * phase_integral(de + w, tau) + std::conj(ep) * phase_integral(de - w, tau));
      }
    om += (vi * pi - pi * vi) * cplx(0.0, -0.25 * h * kW[q]);
  }
  ComplexMatrix u = evolve(om, 1.0);
  for (std::size_t m = 0; m < d; ++m) {
    const cplx ph = std::polar(1.0, -e[m] * h);
    for (std::size_t n = 0; n < d; ++n) u(m, n) *= ph;
  }
  return fr.eig.vectors * u * fr.eig.vectors.adjoint();
}

}  // namespace

ComplexMatrix simulate_sequence(const RegisterSpec& spec, const PulseSequence& seq, const SimulationOptions& opt) {
  const ModelOperators ops(spec);
  StepGridOptions g;
  g.backend = opt.backend;
  g.static_detuning = opt.static_detuning;
  g.ou = opt.ou;
  g.max_step = opt.max_step;
  g.steps_per_period = opt.steps_per_period;
  const auto steps = build_steps(ops.spec(), seq, g);
  ComplexMatrix u = ComplexMatrix::identity(ops.spec().dim());
  ComplexMatrix tmp(u.dim());
  LabFrame frame;
  for (const auto& st : steps) {
    const PulseSegment& seg = seq.segments[st.segment];
    ComplexMatrix e = opt.backend == Backend::lab && seg.rf_amp != 0.0
                          ? lab_rf_step(ops, seg, st, frame)
                          : evolve(ops.step_generator(seg, st, opt.backend), st.dt);
    if (st.close_frame) e = ops.rwa_frame_factor(ops.addressed(seg), seg.rf_carrier * st.segment_duration) * e;
    multiply_into(e, u, tmp);
    std::swap(u, tmp);
  }
  return u;
}

ComplexMatrix controlled_local(const RegisterSpec& spec, std::size_t j, const ComplexMatrix& u0_local,
                               const ComplexMatrix& u1_local) {
  if (j >= spec.n_nuclei()) throw ValidationError("nucleus index out of range");
  const ComplexMatrix r = local_frame(spec, j).basis();
  const std::size_t n = spec.n_nuclei();
  return kron(electron_p0(), embed_operator(r * u0_local * r.adjoint(), j, n)) +
         kron(electron_p1(), embed_operator(r * u1_local * r.adjoint(), j, n));
}

ComplexMatrix branch_block_local(const RegisterSpec& spec, const ComplexMatrix& u, int ms, std::size_t j) {
  const std::size_t n = spec.n_nuclei();
  if (j >= n) throw ValidationError("nucleus index out of range");
  const std::size_t nd = std::size_t{1} << n;
  const std::size_t off = ms == 0 ? 0 : nd;
  // Partial trace over the nuclei other than j.
  const std::size_t shift = n - 1 - j;
  ComplexMatrix b(2);
  for (std::size_t r = 0; r < nd; ++r) {
    for (std::size_t c = 0; c < nd; ++c) {
      if ((r & ~(std::size_t{1} << shift)) != (c & ~(std::size_t{1} << shift))) continue;
      b((r >> shift) & 1, (c >> shift) & 1) += u(off + r, off + c);
    }
  }
  b *= cplx(2.0 / static_cast<double>(nd));
  const ComplexMatrix rb = local_frame(spec, j).basis();
  return rb.adjoint() * b * rb;
}

double electron_coherence(const ComplexMatrix& u, const ComplexMatrix& u_ref) {
  if (u.dim() != u_ref.dim() || u.dim() < 2) throw ValidationError("dimension mismatch");
  const std::size_t nd = u.dim() / 2;
  // rho0 = |+><+| (x) I/nd; rho01 = sum_k (U rho0 U^dag)(k, nd + k).
  auto coherence = [&](const ComplexMatrix& w) {
    cplx acc = 0.0;
    for (std::size_t k = 0; k < nd; ++k) {
      for (std::size_t m = 0; m < nd; ++m) {
        const cplx a = w(k, m) + w(k, nd + m);
        const cplx bb = w(nd + k, m) + w(nd + k, nd + m);
        acc += a * std::conj(bb);
      }
    }
    return acc / (2.0 * static_cast<double>(nd));
  };
  const cplx r = coherence(u), r0 = coherence(u_ref);
  return std::real(r * std::conj(r0)) / std::norm(r0);
}

}  // namespace spinreg
