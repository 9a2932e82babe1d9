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

#include "spinreg/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "spinreg/errors.hpp"

namespace spinreg {

double PulseSequence::total_time() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

namespace {

bool uses_frame(const PulseSegment& s, const StepGridOptions& opt) {
  return opt.backend == Backend::rwa && s.rf_carrier > 0.0 && (s.rf_amp > 0.0 || opt.control_independent);
}

double max_enhancement(const RegisterSpec& spec) {
  double k = 1.0;
  for (double e : spec.enhancement) k = std::max(k, e);
  return k;
}

}  // namespace

std::vector<PropagationStep> build_steps(const RegisterSpec& spec, const PulseSequence& seq,
                                         const StepGridOptions& opt) {
  if (opt.steps_per_period < 1) throw ValidationError("steps_per_period must be positive");
  const double total = seq.total_time();
  if (opt.ou != nullptr) {
    if (!(opt.ou->dt > 0.0)) throw ValidationError("noise trajectory step must be positive");
    const double covered = opt.ou->dt * static_cast<double>(opt.ou->values.size());
    if (covered < total * (1.0 - 1e-12)) throw ValidationError("noise trajectory shorter than sequence");
  }
  const double kappa = max_enhancement(spec);
  std::vector<PropagationStep> steps;
  double seg_start = 0.0;
  std::vector<double> cuts;
  for (std::size_t si = 0; si < seq.segments.size(); ++si) {
    const PulseSegment& s = seq.segments[si];
    if (s.duration < 0 || s.mw_amp < 0 || s.rf_amp < 0) throw ValidationError("segment durations and amplitudes must be nonnegative");
    if (s.duration == 0.0) continue;
    const bool rotating = uses_frame(s, opt);
    const bool driven_lab = !rotating && s.rf_carrier > 0.0 && (s.rf_amp > 0.0 || opt.control_independent);
    std::size_t n_sub = 1;
    if (driven_lab) {
      const double carrier_step = kTwoPi / (20.0 * s.rf_carrier);
      if (opt.max_step > 0.0 && opt.max_step > carrier_step * (1 + 1e-12))
        throw ValidationError("step-size violation: lab step exceeds 1/20 of the carrier period");
      double h = kTwoPi / (opt.steps_per_period * s.rf_carrier);
      const double rf = opt.control_independent ? std::max(opt.rf_amp_bound, s.rf_amp) : s.rf_amp;
      if (rf > 0.0) h = std::min(h, kTwoPi / (opt.steps_per_period * kappa * rf));
      if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
      n_sub = static_cast<std::size_t>(std::ceil(s.duration / h * (1 - 1e-12)));
      n_sub = std::max<std::size_t>(n_sub, 1);
    }
    cuts.clear();
    for (std::size_t k = 0; k <= n_sub; ++k) cuts.push_back(s.duration * static_cast<double>(k) / static_cast<double>(n_sub));
    if (opt.ou != nullptr) {
      const double dt = opt.ou->dt;
      auto k = static_cast<long long>(std::floor(seg_start / dt)) + 1;
      for (;; ++k) {
        const double tb = static_cast<double>(k) * dt - seg_start;
        if (tb >= s.duration) break;
        if (tb > 0.0) cuts.push_back(tb);
      }
      std::sort(cuts.begin(), cuts.end());
    }
    const double eps = 1e-13 * s.duration;
    std::size_t first = steps.size();
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double t0 = cuts[k], t1 = cuts[k + 1];
      if (t1 - t0 <= eps) continue;
      PropagationStep st;
      st.segment = si;
      st.t0 = t0;
      st.dt = t1 - t0;
      st.segment_duration = s.duration;
      st.rotating = rotating;
      st.detuning = opt.static_detuning;
      if (opt.ou != nullptr) {
        const double mid = seg_start + 0.5 * (t0 + t1);
        auto idx = static_cast<std::size_t>(std::floor(mid / opt.ou->dt));
        idx = std::min(idx, opt.ou->values.size() - 1);
        st.detuning += opt.ou->values[idx];
      }
      if (!rotating) {
        const double w = s.rf_carrier;
        if (w == 0.0) {
          st.rf_coef = 2.0 * std::cos(s.rf_phase);
          st.rf_coef_dphase = -2.0 * std::sin(s.rf_phase);
        } else {
          st.rf_coef = 2.0 * (std::sin(w * t1 + s.rf_phase) - std::sin(w * t0 + s.rf_phase)) / (w * st.dt);
          st.rf_coef_dphase = 2.0 * (std::cos(w * t1 + s.rf_phase) - std::cos(w * t0 + s.rf_phase)) / (w * st.dt);
        }
      }
      steps.push_back(st);
    }
    if (rotating && steps.size() > first) steps.back().close_frame = true;
    seg_start += s.duration;
  }
  return steps;
}

ModelOperators::ModelOperators(const RegisterSpec& spec) : spec_(spec) {
  spec_.validate();
  const std::size_t n = spec_.n_nuclei();
  const std::size_t nq = spec_.n_qubits();
  drift_ = drift_hamiltonian(spec_);
  const cplx half(0.5);
  sx_e_ = embed_operator(pauli::x() * half, 0, nq);
  sy_e_ = embed_operator(pauli::y() * half, 0, nq);
  sz_e_ = embed_operator(pauli::z() * half, 0, nq);
  const std::size_t nuc_dim = std::size_t{1} << n;
  ComplexMatrix x0(nuc_dim), x1(nuc_dim);
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexMatrix op = embed_operator(pauli::x() * half, j, n);
    x0 += op;
    x1 += op * cplx(spec_.enhancement[j]);
  }
  rf_lab_ = kron(electron_p0(), x0) + kron(electron_p1(), x1);
  for (std::size_t a = 0; a < n; ++a) {
    const LocalFrame lf = local_frame(spec_, a);
    frames_.push_back(lf);
    const double amp = spec_.enhancement[a] * lf.omega_bar_scale;
    vx_.push_back(kron(electron_p1(), embed_operator(spin_along(lf.x_axis()), a, n)) * cplx(amp));
    vy_.push_back(kron(electron_p1(), embed_operator(spin_along(lf.y_axis()), a, n)) * cplx(amp));
    k_.push_back(kron(electron_p1(), embed_operator(spin_along(lf.axis()), a, n)));
  }
}

std::size_t ModelOperators::addressed(const PulseSegment& seg) const {
  std::size_t best = 0;
  double gap = std::abs(frames_[0].omega1 - seg.rf_carrier);
  for (std::size_t j = 1; j < frames_.size(); ++j) {
    const double g = std::abs(frames_[j].omega1 - seg.rf_carrier);
    if (g < gap) {
      gap = g;
      best = j;
    }
  }
  return best;
}

ComplexMatrix ModelOperators::rwa_frame_factor(std::size_t a, double angle) const {
  const std::size_t n = spec_.n_nuclei();
  const Vec3 ax = frames_[a].axis();
  const ComplexMatrix nsig = spin_along(ax) * cplx(2.0);
  const ComplexMatrix rot = ComplexMatrix::identity(2) * cplx(std::cos(angle / 2)) + nsig * cplx(0.0, -std::sin(angle / 2));
  const std::size_t nuc_dim = std::size_t{1} << n;
  return kron(electron_p0(), ComplexMatrix::identity(nuc_dim)) + kron(electron_p1(), embed_operator(rot, a, n));
}

ComplexMatrix ModelOperators::step_generator(const PulseSegment& seg, const PropagationStep& step,
                                             Backend backend) const {
  ComplexMatrix h = drift_;
  if (step.detuning != 0.0) h += sz_e_ * cplx(step.detuning);
  if (seg.mw_amp != 0.0) {
    h += sx_e_ * cplx(seg.mw_amp * std::cos(seg.mw_phase));
    h += sy_e_ * cplx(seg.mw_amp * std::sin(seg.mw_phase));
  }
  if (step.rotating && backend == Backend::rwa) {
    const std::size_t a = addressed(seg);
    const double ang = seg.rf_phase - frames_[a].lambda;
    if (seg.rf_amp != 0.0) {
      h += vx_[a] * cplx(seg.rf_amp * std::cos(ang));
      h += vy_[a] * cplx(seg.rf_amp * std::sin(ang));
    }
    h -= k_[a] * cplx(seg.rf_carrier);
  } else if (seg.rf_amp != 0.0) {
    h += rf_lab_ * cplx(seg.rf_amp * step.rf_coef);
  }
  return h;
}

}  // namespace spinreg
