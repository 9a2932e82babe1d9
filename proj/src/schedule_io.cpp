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

#include "spinreg/schedule_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "spinreg/errors.hpp"
#include "spinreg/register_model.hpp"

namespace spinreg {

namespace {

constexpr const char* kHeader = "duration_us mw_amp_MHz mw_phase_rad rf_amp_MHz rf_phase_rad rf_carrier_MHz";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double us_to_file(double v) { return v * 1e6; }
double us_from_file(double y) { return y * 1e-6; }
double mhz_to_file(double v) { return v / kTwoPi * 1e-6; }
double mhz_from_file(double y) { return y * 1e6 * kTwoPi; }

// Internal value for file value y, nudged so that writing it back
// reproduces y exactly.
double from_file(double y, double (*in)(double), double (*out)(double)) {
  double v = in(y);
  for (int i = 0; i < 8 && out(v) != y; ++i) v = std::nextafter(v, out(v) < y ? INFINITY : -INFINITY);
  return v;
}

}  // namespace

void write_schedule(std::ostream& out, const PulseSequence& seq) {
  out << kHeader << '\n';
  for (const auto& s : seq.segments) {
    out << fmt(us_to_file(s.duration)) << ' ' << fmt(mhz_to_file(s.mw_amp)) << ' '
        << fmt(s.mw_phase) << ' ' << fmt(mhz_to_file(s.rf_amp)) << ' ' << fmt(s.rf_phase) << ' '
        << fmt(mhz_to_file(s.rf_carrier)) << '\n';
  }
}

PulseSequence read_schedule(std::istream& in) {
  PulseSequence seq;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    if (!header) {
      std::istringstream hs(line);
      std::string a, b;
      std::ostringstream norm;
      bool sep = false;
      while (hs >> a) {
        norm << (sep ? " " : "") << a;
        sep = true;
      }
      b = norm.str();
      if (b != kHeader) throw ValidationError("schedule line " + std::to_string(lineno) + ": expected header '" + kHeader + "'");
      header = true;
      continue;
    }
    std::istringstream ls(line);
    double v[6];
    for (double& x : v) {
      std::string tok;
      if (!(ls >> tok)) throw ValidationError("schedule line " + std::to_string(lineno) + ": expected 6 columns");
      std::size_t used = 0;
      try {
        x = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || !std::isfinite(x))
        throw ValidationError("schedule line " + std::to_string(lineno) + ": bad number '" + tok + "'");
    }
    std::string extra;
    if (ls >> extra) throw ValidationError("schedule line " + std::to_string(lineno) + ": too many columns");
    PulseSegment s;
    s.duration = from_file(v[0], us_from_file, us_to_file);
    s.mw_amp = from_file(v[1], mhz_from_file, mhz_to_file);
    s.mw_phase = v[2];
    s.rf_amp = from_file(v[3], mhz_from_file, mhz_to_file);
    s.rf_phase = v[4];
    s.rf_carrier = from_file(v[5], mhz_from_file, mhz_to_file);
    if (s.duration < 0 || s.mw_amp < 0 || s.rf_amp < 0)
      throw ValidationError("schedule line " + std::to_string(lineno) + ": durations and amplitudes must be nonnegative");
    seq.segments.push_back(s);
  }
  if (!header) throw ValidationError("schedule: missing header line");
  return seq;
}

void write_schedule_file(const std::filesystem::path& path, const PulseSequence& seq) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path.string());
  write_schedule(f, seq);
}

PulseSequence read_schedule_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("cannot read " + path.string());
  return read_schedule(f);
}

}  // namespace spinreg
