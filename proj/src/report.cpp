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

#include "spinreg/report.hpp"

#include <charconv>
#include <cmath>
#include <json.hpp>

namespace spinreg {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Record& Record::set(std::string key, Value v) {
  for (auto& kv : entries_) {
    if (kv.first == key) {
      kv.second = std::move(v);
      return *this;
    }
  }
  entries_.emplace_back(std::move(key), std::move(v));
  return *this;
}

namespace {

std::string scalar_text(const Record::Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_real(*d);
  if (const auto* i = std::get_if<long long>(&v)) return std::to_string(*i);
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* xs = std::get_if<std::vector<double>>(&v)) {
    std::string out = "[";
    for (std::size_t i = 0; i < xs->size(); ++i) out += (i ? ", " : "") + format_real((*xs)[i]);
    return out + "]";
  }
  return {};
}

nlohmann::ordered_json to_json(const Record& r);

nlohmann::ordered_json value_json(const Record::Value& v) {
  if (const auto* d = std::get_if<double>(&v)) return std::isfinite(*d) ? nlohmann::ordered_json(*d) : nullptr;
  if (const auto* i = std::get_if<long long>(&v)) return *i;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* r = std::get_if<Record>(&v)) return to_json(*r);
  if (const auto* l = std::get_if<Record::List>(&v)) {
    auto a = nlohmann::ordered_json::array();
    for (const auto& x : *l) a.push_back(to_json(x));
    return a;
  }
  auto a = nlohmann::ordered_json::array();
  for (double x : std::get<std::vector<double>>(v)) a.push_back(std::isfinite(x) ? nlohmann::ordered_json(x) : nullptr);
  return a;
}

nlohmann::ordered_json to_json(const Record& r) {
  auto o = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.entries()) o[k] = value_json(v);
  return o;
}

}  // namespace

std::string Record::text(int indent) const {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  std::string out;
  for (const auto& [k, v] : entries_) {
    if (const auto* r = std::get_if<Record>(&v)) {
      out += pad + k + ":\n" + r->text(indent + 2);
    } else if (const auto* l = std::get_if<List>(&v)) {
      out += pad + k + ":\n";
      for (const auto& item : *l) {
        std::string body = item.text(indent + 4);
        // First line of each item carries the list marker.
        body.replace(0, static_cast<std::size_t>(indent + 4), pad + "  - ");
        out += body;
      }
    } else {
      out += pad + k + ": " + scalar_text(v) + "\n";
    }
  }
  return out;
}

std::string Record::json() const { return to_json(*this).dump(2) + "\n"; }

}  // namespace spinreg
