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

#include <filesystem>
#include <iosfwd>

#include "spinreg/propagation.hpp"

namespace spinreg {

// Tabular schedule text: a header line, then one segment per line with
// duration_us mw_amp_MHz mw_phase_rad rf_amp_MHz rf_phase_rad rf_carrier_MHz.
// Amplitudes and carriers are ordinary frequencies in the file.
void write_schedule(std::ostream& out, const PulseSequence& seq);
PulseSequence read_schedule(std::istream& in);

void write_schedule_file(const std::filesystem::path& path, const PulseSequence& seq);
PulseSequence read_schedule_file(const std::filesystem::path& path);

}  // namespace spinreg
