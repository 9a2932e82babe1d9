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

// Physical model of a register made of one electronic spin (pseudo-spin
// {ms=0, ms=1}, tensor factor 0) and n nuclear spins-1/2 (factors 1..n).
// Internal units are rad/s and seconds.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "spinreg/linalg.hpp"

namespace spinreg {

using Vec3 = std::array<double, 3>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;
// Ordinary frequency in MHz to angular frequency in rad/s.
inline constexpr double kRadPerSecPerMHz = kTwoPi * 1e6;
inline constexpr double kSecondsPerMicrosecond = 1e-6;

struct RegisterSpec {
  double omega_L = 0.0;                  // nuclear Larmor frequency
  std::vector<Vec3> hyperfine;           // A_j, one per nucleus
  std::vector<double> enhancement;       // rf Rabi enhancement in ms=1, >= 1
  std::vector<std::vector<double>> dipolar;  // secular zz couplings b_jk (may be empty)
  double delta_E_e = 0.0;                // gap to the ms=-1 level
  double omega_M = 0.0;                  // 0 means "derive from hyperfine"
  double max_rabi_e = 0.0;
  double max_rabi_rf = 0.0;

  std::size_t n_nuclei() const { return hyperfine.size(); }
  std::size_t n_qubits() const { return hyperfine.size() + 1; }
  std::size_t dim() const { return std::size_t{1} << n_qubits(); }
  double coupling(std::size_t j, std::size_t k) const;

  // Throws ValidationError. Fills omega_M when it was left at zero.
  void validate();
};

inline constexpr double kDefaultEnhancement = 10.0;

struct LocalFrame {
  double omega1 = 0.0;
  double theta1 = 0.0;
  double phi1 = 0.0;
  double lambda = 0.0;
  double omega_bar_scale = 1.0;

  Vec3 axis() const;     // z~ : unit vector along the ms=1 effective field
  Vec3 x_axis() const;   // x~ : polar unit vector
  Vec3 y_axis() const;   // y~ : azimuthal unit vector
  // 2x2 unitary whose columns are the local-frame basis (|up~>, |down~>) in
  // lab coordinates; conjugating by it maps sigma_x,y,z to sigma_x~,y~,z~.
  ComplexMatrix basis() const;
};

// Effective ms=1 field vector A_j + omega_L z.
Vec3 ms1_field(const RegisterSpec& spec, std::size_t j);
LocalFrame local_frame(const RegisterSpec& spec, std::size_t j);
LocalFrame local_frame_from_field(const Vec3& field);

// Single-spin operators n.I = n.sigma/2 as 2x2 matrices.
ComplexMatrix spin_along(const Vec3& n);

// Projectors onto the electron ms=0 / ms=1 states (2x2).
ComplexMatrix electron_p0();
ComplexMatrix electron_p1();

ComplexMatrix drift_hamiltonian(const RegisterSpec& spec);

// (delta/2) sigma_z on the electron, the form taken by static and
// fluctuating electron detuning noise.
ComplexMatrix electron_detuning_term(const RegisterSpec& spec, double delta);

enum class Backend { lab, rwa };
Backend parse_backend(const std::string& s);
std::string to_string(Backend b);

struct ControlValues {
  double mw_amp = 0.0;
  double mw_phase = 0.0;
  double rf_amp = 0.0;
  double rf_phase = 0.0;
  double rf_carrier = 0.0;
};

// Nucleus whose ms=1 frequency is closest to the carrier.
std::size_t addressed_nucleus(const RegisterSpec& spec, double rf_carrier);

// Lab: mu-wave term plus 2 rf_amp cos(carrier t + phase) sum_j kappa_j I_x^j
// (kappa = 1 in ms=0), t measured from the start of the segment.
// Rwa: mu-wave term plus the static co-rotating rf term on the addressed
// nucleus in its ms=1 rotating frame (t is ignored).
ComplexMatrix control_hamiltonian(const RegisterSpec& spec, const ControlValues& c, double t, Backend frame);

struct WindowCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool strict = false;  // ">" rather than ">>"
  bool pass = false;
};

struct WindowReport {
  std::vector<WindowCheck> checks;
  double margin = 5.0;
  bool all_pass() const;
};

inline constexpr double kDefaultWindowMargin = 5.0;

WindowReport validate_window(const RegisterSpec& spec, double omega_e, double omega_rf,
                             double margin = kDefaultWindowMargin);

}  // namespace spinreg
