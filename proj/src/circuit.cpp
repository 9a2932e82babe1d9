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

#include "spinreg/circuit.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

#include "spinreg/errors.hpp"
#include "spinreg/pulse.hpp"

namespace spinreg {

namespace {

ComplexMatrix rz(double a) { return rot_z(a); }

ComplexMatrix ry(double b) {
  const double c = std::cos(b / 2), s = std::sin(b / 2);
  return ComplexMatrix(2, {c, -s, s, c});
}

// u = phase * R_z(gamma) R_x(beta) R_z(alpha)
struct Zxz {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};

Zxz zxz_angles(const ComplexMatrix& u) {
  const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  const ComplexMatrix v = u * (1.0 / std::sqrt(det));
  Zxz e;
  e.beta = 2.0 * std::atan2(std::abs(v(0, 1)), std::abs(v(0, 0)));
  const double sum = std::abs(v(0, 0)) > 1e-14 ? -2.0 * std::arg(v(0, 0)) : 0.0;
  const double diff = std::abs(v(0, 1)) > 1e-14 ? 2.0 * std::arg(cplx(0, 1) * v(0, 1)) : 0.0;
  e.alpha = (sum + diff) / 2;
  e.gamma = (sum - diff) / 2;
  return e;
}

// u = Rz(b) Ry(g) Rz(d) up to phase, for u in SU(2)
void zyz_angles(const ComplexMatrix& v, double& b, double& g, double& d) {
  g = 2.0 * std::atan2(std::abs(v(1, 0)), std::abs(v(0, 0)));
  const double sum = std::abs(v(0, 0)) > 1e-14 ? -2.0 * std::arg(v(0, 0)) : 0.0;
  const double diff = std::abs(v(1, 0)) > 1e-14 ? 2.0 * std::arg(v(1, 0)) : 0.0;
  b = (sum + diff) / 2;
  d = (sum - diff) / 2;
}

double wrap_pi(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace

ComplexMatrix Gate::matrix() const {
  switch (kind) {
    case GateKind::X: return pauli::x();
    case GateKind::Y: return pauli::y();
    case GateKind::Z: return pauli::z();
    case GateKind::H: return pauli::h();
    case GateKind::U2: return u;
    case GateKind::Phase: return rz(angle);
    case GateKind::GlobalPhase: return ComplexMatrix::identity(2) * std::polar(1.0, angle / 2);
  }
  throw ValidationError("unsupported gate kind");
}

Circuit& Circuit::add(GateKind kind, std::size_t target, std::optional<std::size_t> control) {
  Gate g;
  g.kind = kind;
  g.target = target;
  g.control = control;
  gates.push_back(std::move(g));
  return *this;
}

Circuit& Circuit::add_u(const ComplexMatrix& u, std::size_t target, std::optional<std::size_t> control) {
  add(GateKind::U2, target, control);
  gates.back().u = u;
  return *this;
}

Circuit& Circuit::add_phase(GateKind kind, double angle, std::size_t target, std::optional<std::size_t> control) {
  add(kind, target, control);
  gates.back().angle = angle;
  return *this;
}

void Circuit::validate() const {
  if (n_qubits < 1 || n_qubits > 7) throw ValidationError("circuit qubit count must be 1..7");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    const std::string where = "gate " + std::to_string(i) + ": ";
    if (g.target >= n_qubits) throw ValidationError(where + "target out of range");
    if (g.control && (*g.control >= n_qubits || *g.control == g.target))
      throw ValidationError(where + "control out of range or equal to target");
    if (g.kind == GateKind::U2) {
      if (g.u.dim() != 2 || !g.u.is_unitary(1e-10)) throw ValidationError(where + "U2 must be a 2x2 unitary");
    }
    if ((g.kind == GateKind::Phase || g.kind == GateKind::GlobalPhase) && !std::isfinite(g.angle))
      throw ValidationError(where + "angle must be finite");
  }
}

ComplexMatrix gate_operator(const Gate& g, std::size_t n_qubits) {
  const ComplexMatrix m = g.matrix();
  const std::size_t dim = std::size_t{1} << n_qubits;
  const std::size_t tbit = std::size_t{1} << (n_qubits - 1 - g.target);
  const std::size_t cbit = g.control ? std::size_t{1} << (n_qubits - 1 - *g.control) : 0;
  ComplexMatrix op(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    if (cbit != 0 && (col & cbit) == 0) {
      op(col, col) = 1.0;
      continue;
    }
    const std::size_t tc = (col & tbit) ? 1 : 0;
    const std::size_t base = col & ~tbit;
    op(base, col) += m(0, tc);
    op(base | tbit, col) += m(1, tc);
  }
  return op;
}

ComplexMatrix circuit_unitary(const Circuit& c) {
  c.validate();
  const std::size_t dim = std::size_t{1} << c.n_qubits;
  ComplexMatrix u = ComplexMatrix::identity(dim);
  for (const auto& g : c.gates) u = gate_operator(g, c.n_qubits) * u;
  return u;
}

AbcDecomposition abc_decompose(const ComplexMatrix& u) {
  if (u.dim() != 2 || !u.is_unitary()) throw ValidationError("abc_decompose needs a 2x2 unitary");
  const cplx det = u(0, 0) * u(1, 1) - u(0, 1) * u(1, 0);
  AbcDecomposition r;
  r.alpha = std::arg(det) / 2;
  const ComplexMatrix v = u * std::polar(1.0, -r.alpha);
  // With W = H V H = A' X B' X C', conjugating back by H turns X into Z.
  const ComplexMatrix h = pauli::h();
  const ComplexMatrix w = h * v * h;
  double b, g, d;
  zyz_angles(w, b, g, d);
  const ComplexMatrix a1 = rz(b) * ry(g / 2);
  const ComplexMatrix b1 = ry(-g / 2) * rz(-(d + b) / 2);
  const ComplexMatrix c1 = rz((d - b) / 2);
  r.a = h * a1 * h;
  r.b = h * b1 * h;
  r.c = h * c1 * h;
  // zyz_angles fixes w only up to sign; fold a -1 into alpha.
  const ComplexMatrix rec = r.a * pauli::z() * r.b * pauli::z() * r.c;
  if (std::real(trace_inner(rec, v)) < 0) r.alpha += kPi;
  return r;
}

Circuit controlled_u_nn(const ComplexMatrix& u) {
  Circuit c;
  c.n_qubits = 3;
  c.add(GateKind::X, 1, 0);
  c.add(GateKind::H, 0);
  c.add(GateKind::Z, 1, 0);
  c.add(GateKind::H, 0);
  c.add_u(u, 2, 0);
  c.add(GateKind::H, 0);
  c.add(GateKind::Z, 1, 0);
  c.add(GateKind::H, 0);
  c.add(GateKind::X, 1, 0);
  return c;
}

Circuit controlled_u_electron(const ComplexMatrix& u) {
  const AbcDecomposition d = abc_decompose(u);
  Circuit c;
  c.n_qubits = 2;
  c.add_u(d.c, 0);
  c.add(GateKind::Z, 1, 0);
  c.add_u(d.b, 0);
  c.add(GateKind::Z, 1, 0);
  c.add_u(d.a, 0);
  c.add(GateKind::X, 0);
  c.add_phase(GateKind::Phase, d.alpha, 1, 0);
  c.add(GateKind::X, 0);
  c.add_phase(GateKind::Phase, d.alpha, 1, 0);
  c.add_phase(GateKind::GlobalPhase, d.alpha, 0);
  return c;
}

ComplexMatrix logical_to_lab(const RegisterSpec& spec_in) {
  RegisterSpec spec = spec_in;
  spec.validate();
  std::vector<ComplexMatrix> f{ComplexMatrix::identity(2)};
  for (std::size_t j = 0; j < spec.n_nuclei(); ++j) f.push_back(local_frame(spec, j).basis());
  return kron_all(f);
}

namespace {

// Gates of the two primitive kinds: electron one-qubit gates and nuclear
// gates controlled on the electron.
struct Primitive {
  bool electron = true;
  std::size_t nucleus = 0;
  ComplexMatrix u;
};

Gate remap(Gate g, const std::vector<std::size_t>& to) {
  g.target = to[g.target];
  if (g.control) g.control = to[*g.control];
  return g;
}

void expand(const Gate& g, std::vector<Primitive>& out) {
  if (g.kind == GateKind::GlobalPhase) return;
  const ComplexMatrix m = g.matrix();
  if (!g.control) {
    if (g.target == 0) {
      out.push_back({true, 0, m});
    } else {
      const std::size_t j = g.target - 1;
      out.push_back({false, j, m});
      out.push_back({true, 0, pauli::x()});
      out.push_back({false, j, m});
      out.push_back({true, 0, pauli::x()});
    }
    return;
  }
  const std::size_t ctl = *g.control;
  if (ctl == 0) {
    out.push_back({false, g.target - 1, m});
  } else if (g.target == 0) {
    for (const Gate& h : controlled_u_electron(m).gates) expand(remap(h, {0, ctl}), out);
  } else {
    for (const Gate& h : controlled_u_nn(m).gates) expand(remap(h, {0, ctl, g.target}), out);
  }
}

void push_mw(PulseSequence& seq, double omega, double angle, double phase) {
  if (angle < 0) {
    angle = -angle;
    phase += kPi;
  }
  if (angle < 1e-15) return;
  PulseSegment s;
  s.duration = angle / omega;
  s.mw_amp = omega;
  s.mw_phase = wrap_pi(phase);
  seq.segments.push_back(s);
}

}  // namespace

LoweredCircuit lower_to_pulses(const Circuit& c, const RegisterSpec& spec_in, double T_clock,
                               const LoweringOptions& opt) {
  RegisterSpec spec = spec_in;
  spec.validate();
  c.validate();
  if (c.n_qubits != spec.n_qubits()) throw ValidationError("circuit and register sizes differ");
  if (!(opt.t_pi_mw > 0) || !(opt.rf_amp > 0)) throw ValidationError("lowering needs positive t_pi_mw and rf_amp");
  std::vector<Primitive> prims;
  for (const Gate& g : c.gates) expand(g, prims);

  std::vector<LocalFrame> frames;
  for (std::size_t j = 0; j < spec.n_nuclei(); ++j) frames.push_back(local_frame(spec, j));
  LoweredCircuit out;
  out.clock = 0.0;
  bool any_nuclear = false;
  for (const auto& p : prims) any_nuclear = any_nuclear || !p.electron;
  if (any_nuclear) {
    const double t_min = min_clock_time(frames, opt.rf_amp);
    if (T_clock < t_min * (1 - 1e-12)) throw DomainError("clock violation: T_clock below the minimum clock time");
    out.clock = larmor_aligned_clock(spec, T_clock);
  }

  const double omega_e = kPi / opt.t_pi_mw;
  double chi = 0.0;  // physical = diag(1, e^{i chi})_e * intended
  for (const auto& p : prims) {
    const Zxz e = zxz_angles(p.u);
    if (p.electron) {
      push_mw(out.sequence, omega_e, e.beta, chi - e.alpha);
      chi = chi - e.alpha - e.gamma;
      continue;
    }
    GateSpec gs{p.nucleus, e.alpha, e.beta, e.gamma};
    const PulseSequence s = compile_plain_gate(spec, gs, opt.rf_amp, 0.0, out.clock);
    out.sequence.segments.insert(out.sequence.segments.end(), s.segments.begin(), s.segments.end());
    const GateBlocks b = plain_gate_blocks(spec, gs, out.clock);
    const cplx s1 = trace_inner(p.u, b.ms1) / 2.0;
    const cplx s0 = b.ms0.trace() / 2.0;
    chi += std::arg(s1 / s0);
  }
  chi = wrap_pi(chi);
  if (std::abs(chi) > 1e-12) {
    // R_z(-chi) = R_x(-pi/2) R_y(chi) R_x(pi/2), applied right to left.
    push_mw(out.sequence, omega_e, kPi / 2, 0.0);
    push_mw(out.sequence, omega_e, chi, kPi / 2);
    push_mw(out.sequence, omega_e, kPi / 2, kPi);
  }
  const ComplexMatrix l = logical_to_lab(spec);
  out.target_lab = l * circuit_unitary(c) * l.adjoint();
  return out;
}

namespace {

[[noreturn]] void parse_error(std::size_t line, const std::string& msg) {
  throw ValidationError("circuit line " + std::to_string(line) + ": " + msg);
}

std::size_t parse_index(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty() || tok[0] == '-') parse_error(line, "bad qubit index '" + tok + "'");
  return v;
}

double parse_real(const std::string& tok, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || !std::isfinite(v)) parse_error(line, "bad number '" + tok + "'");
  return v;
}

cplx parse_complex(const std::string& tok, std::size_t line) {
  const auto comma = tok.find(',');
  if (comma == std::string::npos) parse_error(line, "complex entries are written re,im: '" + tok + "'");
  return {parse_real(tok.substr(0, comma), line), parse_real(tok.substr(comma + 1), line)};
}

}  // namespace

Circuit read_circuit(std::istream& in) {
  Circuit c;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (!have_header) {
      if (tok.size() != 2 || tok[0] != "qubits") parse_error(lineno, "expected 'qubits N'");
      c.n_qubits = parse_index(tok[1], lineno);
      have_header = true;
      continue;
    }
    const std::string& k = tok[0];
    std::size_t args = 0;
    GateKind kind;
    if (k == "X") kind = GateKind::X;
    else if (k == "Y") kind = GateKind::Y;
    else if (k == "Z") kind = GateKind::Z;
    else if (k == "H") kind = GateKind::H;
    else if (k == "U2") kind = GateKind::U2, args = 4;
    else if (k == "PHASE") kind = GateKind::Phase, args = 1;
    else if (k == "GPHASE") kind = GateKind::GlobalPhase, args = 1;
    else parse_error(lineno, "unknown gate kind '" + k + "'");
    if (tok.size() != 2 + args && tok.size() != 3 + args) parse_error(lineno, "wrong number of fields for " + k);
    Gate g;
    g.kind = kind;
    g.target = parse_index(tok[1], lineno);
    const bool has_control = tok.size() == 3 + args;
    if (has_control) g.control = parse_index(tok[2], lineno);
    const std::size_t a0 = has_control ? 3 : 2;
    if (kind == GateKind::U2) {
      g.u = ComplexMatrix(2, {parse_complex(tok[a0], lineno), parse_complex(tok[a0 + 1], lineno),
                              parse_complex(tok[a0 + 2], lineno), parse_complex(tok[a0 + 3], lineno)});
    } else if (args == 1) {
      g.angle = parse_real(tok[a0], lineno);
    }
    c.gates.push_back(std::move(g));
    try {
      Circuit probe{c.n_qubits, {c.gates.back()}};
      probe.validate();
    } catch (const ValidationError& e) {
      parse_error(lineno, e.what());
    }
  }
  if (!have_header) throw ValidationError("circuit: missing 'qubits N' line");
  return c;
}

Circuit read_circuit_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path.string());
  return read_circuit(f);
}

}  // namespace spinreg
