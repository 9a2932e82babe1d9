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

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace spinreg {

// Ordered structured record rendered either as indented "key: value" text
// or as JSON.
class Record {
 public:
  using List = std::vector<Record>;
  using Value = std::variant<double, long long, bool, std::string, Record, List, std::vector<double>>;

  Record& set(std::string key, Value v);
  Record& set(std::string key, double v) { return set(std::move(key), Value(v)); }
  Record& set(std::string key, bool v) { return set(std::move(key), Value(v)); }
  Record& set(std::string key, const std::string& v) { return set(std::move(key), Value(v)); }
  Record& set(std::string key, const List& v) { return set(std::move(key), Value(v)); }
  Record& set(std::string key, int v) { return set(std::move(key), Value(static_cast<long long>(v))); }
  Record& set(std::string key, std::size_t v) { return set(std::move(key), Value(static_cast<long long>(v))); }
  Record& set(std::string key, const char* v) { return set(std::move(key), Value(std::string(v))); }

  const std::vector<std::pair<std::string, Value>>& entries() const { return entries_; }

  std::string text(int indent = 0) const;
  std::string json() const;

 private:
  std::vector<std::pair<std::string, Value>> entries_;
};

// Shortest round-trip decimal for a double.
std::string format_real(double v);

}  // namespace spinreg
