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

#include "spinreg/register_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinreg/errors.hpp"

namespace spinreg {

namespace {

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

ComplexMatrix nuclear_op(const RegisterSpec& spec, std::size_t j, const ComplexMatrix& op) {
  return embed_operator(op, j + 1, spec.n_qubits());
}

ComplexMatrix electron_op(const RegisterSpec& spec, const ComplexMatrix& op) {
  return embed_operator(op, 0, spec.n_qubits());
}

ComplexMatrix half(const ComplexMatrix& m) { return m * cplx(0.5); }

}  // namespace

double RegisterSpec::coupling(std::size_t j, std::size_t k) const {
  if (dipolar.empty()) return 0.0;
  return dipolar[j][k];
}

void RegisterSpec::validate() {
  const std::size_t n = n_nuclei();
  if (n < 1 || n > 6) throw ValidationError("register must hold 1 to 6 nuclei, got " + std::to_string(n));
  if (!(omega_L > 0)) throw ValidationError("omega_L must be positive");
  if (enhancement.empty()) enhancement.assign(n, kDefaultEnhancement);
  if (enhancement.size() != n) throw ValidationError("enhancement list length must equal the number of nuclei");
  for (double k : enhancement)
    if (!(k >= 1.0)) throw ValidationError("enhancement factors must be >= 1");
  if (!dipolar.empty()) {
    if (dipolar.size() != n) throw ValidationError("dipolar matrix must be n x n");
    for (std::size_t j = 0; j < n; ++j) {
      if (dipolar[j].size() != n) throw ValidationError("dipolar matrix must be n x n");
      if (dipolar[j][j] != 0.0) throw ValidationError("dipolar matrix must have a zero diagonal");
      for (std::size_t k = 0; k < j; ++k)
        if (dipolar[j][k] != dipolar[k][j]) throw ValidationError("dipolar matrix must be symmetric");
    }
  }
  if (delta_E_e < 0 || max_rabi_e < 0 || max_rabi_rf < 0)
    throw ValidationError("delta_E_e and control ceilings must be nonnegative");
  double wmax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double w = norm3(ms1_field(*this, j));
    if (w == 0.0) throw DomainError("nucleus " + std::to_string(j) + " has a degenerate ms=1 axis");
    wmax = std::max(wmax, w);
  }
  if (omega_M == 0.0) {
    omega_M = wmax;
  } else if (std::abs(omega_M - wmax) > 1e-9 * wmax) {
    throw ValidationError("omega_M is inconsistent with the hyperfine couplings (expected max_j |A_j + omega_L z|)");
  }
}

Vec3 LocalFrame::axis() const {
  return {std::sin(theta1) * std::cos(phi1), std::sin(theta1) * std::sin(phi1), std::cos(theta1)};
}

Vec3 LocalFrame::x_axis() const {
  return {std::cos(theta1) * std::cos(phi1), std::cos(theta1) * std::sin(phi1), -std::sin(theta1)};
}

Vec3 LocalFrame::y_axis() const { return {-std::sin(phi1), std::cos(phi1), 0.0}; }

ComplexMatrix LocalFrame::basis() const {
  const ComplexMatrix rz(2, {std::polar(1.0, -phi1 / 2), 0.0, 0.0, std::polar(1.0, phi1 / 2)});
  const double c = std::cos(theta1 / 2), s = std::sin(theta1 / 2);
  const ComplexMatrix ry(2, {c, -s, s, c});
  return rz * ry;
}

Vec3 ms1_field(const RegisterSpec& spec, std::size_t j) {
  if (j >= spec.n_nuclei()) throw ValidationError("nucleus index " + std::to_string(j) + " out of range");
  const Vec3& a = spec.hyperfine[j];
  return {a[0], a[1], a[2] + spec.omega_L};
}

LocalFrame local_frame_from_field(const Vec3& field) {
  const double w = norm3(field);
  if (w == 0.0) throw DomainError("degenerate ms=1 axis: effective field vanishes");
  LocalFrame f;
  f.omega1 = w;
  f.theta1 = std::acos(std::clamp(field[2] / w, -1.0, 1.0));
  f.phi1 = std::atan2(field[1], field[0]);
  const double ct = std::cos(f.theta1), cp = std::cos(f.phi1), sp = std::sin(f.phi1);
  f.lambda = std::atan2(sp, cp * ct);
  f.omega_bar_scale = std::sqrt(cp * cp * ct * ct + sp * sp);
  return f;
}

LocalFrame local_frame(const RegisterSpec& spec, std::size_t j) { return local_frame_from_field(ms1_field(spec, j)); }

ComplexMatrix spin_along(const Vec3& n) {
  return half(pauli::x() * cplx(n[0]) + pauli::y() * cplx(n[1]) + pauli::z() * cplx(n[2]));
}

ComplexMatrix electron_p0() { return ComplexMatrix(2, {1.0, 0.0, 0.0, 0.0}); }
ComplexMatrix electron_p1() { return ComplexMatrix(2, {0.0, 0.0, 0.0, 1.0}); }

ComplexMatrix drift_hamiltonian(const RegisterSpec& spec) {
  const std::size_t n = spec.n_nuclei();
  const std::size_t nuc_dim = std::size_t{1} << n;
  ComplexMatrix h0(nuc_dim), h1(nuc_dim);
  const auto iz = half(pauli::z());
  for (std::size_t j = 0; j < n; ++j) {
    h0 += embed_operator(iz, j, n) * cplx(spec.omega_L);
    h1 += embed_operator(spin_along(ms1_field(spec, j)), j, n);
  }
  ComplexMatrix h = kron(electron_p0(), h0) + kron(electron_p1(), h1);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = j + 1; k < n; ++k) {
      const double b = spec.coupling(j, k);
      if (b == 0.0) continue;
      h += nuclear_op(spec, j, iz) * nuclear_op(spec, k, iz) * cplx(b);
    }
  return h;
}

ComplexMatrix electron_detuning_term(const RegisterSpec& spec, double delta) {
  return electron_op(spec, pauli::z()) * cplx(delta / 2);
}

Backend parse_backend(const std::string& s) {
  if (s == "lab") return Backend::lab;
  if (s == "rwa") return Backend::rwa;
  throw ValidationError("unknown backend '" + s + "' (expected lab or rwa)");
}

std::string to_string(Backend b) { return b == Backend::lab ? "lab" : "rwa"; }

std::size_t addressed_nucleus(const RegisterSpec& spec, double rf_carrier) {
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < spec.n_nuclei(); ++j) {
    const double gap = std::abs(local_frame(spec, j).omega1 - rf_carrier);
    if (gap < best_gap) {
      best_gap = gap;
      best = j;
    }
  }
  return best;
}

ComplexMatrix control_hamiltonian(const RegisterSpec& spec, const ControlValues& c, double t, Backend frame) {
  if (c.mw_amp < 0 || c.rf_amp < 0) throw ValidationError("control amplitudes must be nonnegative");
  ComplexMatrix h(spec.dim());
  if (c.mw_amp != 0.0) {
    const ComplexMatrix drive = (pauli::x() * cplx(std::cos(c.mw_phase)) + pauli::y() * cplx(std::sin(c.mw_phase))) *
                                cplx(c.mw_amp / 2);
    h += electron_op(spec, drive);
  }
  if (c.rf_amp == 0.0) return h;
  const std::size_t n = spec.n_nuclei();
  const std::size_t nuc_dim = std::size_t{1} << n;
  const auto ix = half(pauli::x());
  if (frame == Backend::lab) {
    ComplexMatrix x0(nuc_dim), x1(nuc_dim);
    for (std::size_t j = 0; j < n; ++j) {
      const ComplexMatrix op = embed_operator(ix, j, n);
      x0 += op;
      x1 += op * cplx(spec.enhancement[j]);
    }
    const double f = 2.0 * c.rf_amp * std::cos(c.rf_carrier * t + c.rf_phase);
    h += (kron(electron_p0(), x0) + kron(electron_p1(), x1)) * cplx(f);
  } else {
    const std::size_t a = addressed_nucleus(spec, c.rf_carrier);
    const LocalFrame lf = local_frame(spec, a);
    const double amp = spec.enhancement[a] * c.rf_amp * lf.omega_bar_scale;
    const double ang = c.rf_phase - lf.lambda;
    const Vec3 xa = lf.x_axis(), ya = lf.y_axis();
    const Vec3 dir{std::cos(ang) * xa[0] + std::sin(ang) * ya[0], std::cos(ang) * xa[1] + std::sin(ang) * ya[1],
                   std::cos(ang) * xa[2] + std::sin(ang) * ya[2]};
    h += kron(electron_p1(), embed_operator(spin_along(dir), a, n)) * cplx(amp);
  }
  return h;
}

bool WindowReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const WindowCheck& c) { return c.pass; });
}

WindowReport validate_window(const RegisterSpec& spec, double omega_e, double omega_rf, double margin) {
  if (!(margin > 1.0)) throw ValidationError("window margin must exceed 1");
  const double n = static_cast<double>(spec.n_nuclei());
  const double spread = (n + 1) / 2 * spec.omega_M;
  const double split = spec.omega_M / n;
  auto ratio = [](double a, double b) {
    if (b == 0.0) return a > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return a / b;
  };
  WindowReport r;
  r.margin = margin;
  auto add = [&](std::string name, double lhs, double rhs, bool strict) {
    WindowCheck c{std::move(name), lhs, rhs, ratio(lhs, rhs), strict, false};
    c.pass = strict ? lhs > rhs : c.ratio >= margin;
    r.checks.push_back(c);
  };
  add("Delta_E_e >> Omega_e", spec.delta_E_e, omega_e, false);
  add("Omega_e >> (n+1)/2 omega_M", omega_e, spread, false);
  add("(n+1)/2 omega_M > omega_M/n", spread, split, true);
  add("omega_M/n >> Omega_rf", split, omega_rf, false);
  return r;
}

}  // namespace spinreg
