// Copyright 2026 The Carnot Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "carnot/errors.hpp"

namespace carnot {

using json = nlohmann::ordered_json;

/// Named pass/fail thresholds; lookups of absent names throw.
class Thresholds
{
public:
  Thresholds() = default;
  explicit Thresholds(std::map<std::string, double> values) : values_(std::move(values)) {}

  double at(const std::string & name) const
  {
    const auto it = values_.find(name);
    if (it == values_.end()) throw InputError("missing threshold '" + name + "'");
    return it->second;
  }

  bool has(const std::string & name) const { return values_.count(name) != 0; }
  void set(const std::string & name, double v) { values_[name] = v; }
  const std::map<std::string, double> & values() const { return values_; }

private:
  std::map<std::string, double> values_;
};

/// One row per line, cells already formatted.
struct Table
{
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Quotes a CSV cell when it holds a separator, quote or line break.
inline std::string csv_cell(const std::string & s)
{
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// %.17g, so values round-trip.
inline std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Table & t)
{
  std::string out;
  auto line = [&](const std::vector<std::string> & cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += "\r\n";
  };
  line(t.header);
  for (const auto & r : t.rows) line(r);
  return out;
}

/// Result of a suite or command: named scalars, thresholds, metadata.
class Report
{
public:
  Report() = default;
  explicit Report(std::string suite) : suite_(std::move(suite)) {}

  const std::string & suite() const { return suite_; }
  bool passed() const { return passed_; }
  void set_passed(bool p) { passed_ = p; }

  /// Non-finite values are stored as null in JSON.
  void set(const std::string & name, double v)
  {
    for (auto & kv : values_) {
      if (kv.first == name) {
        kv.second = v;
        return;
      }
    }
    values_.emplace_back(name, v);
  }

  double get(const std::string & name) const
  {
    for (const auto & kv : values_) {
      if (kv.first == name) return kv.second;
    }
    throw InputError("report has no value '" + name + "'");
  }

  const std::vector<std::pair<std::string, double>> & values() const { return values_; }

  /// Records @p name and returns it, so pass conditions read naturally.
  double threshold(const Thresholds & t, const std::string & name)
  {
    const double v = t.at(name);
    thresholds_[name] = v;
    return v;
  }

  const std::map<std::string, double> & thresholds() const { return thresholds_; }

  json & metadata() { return metadata_; }
  const json & metadata() const { return metadata_; }

  Table & strata() { return strata_; }
  const Table & strata() const { return strata_; }

  /// Absorbs another report's values under "prefix." names; passes only if both pass.
  void merge(const Report & other, const std::string & prefix)
  {
    for (const auto & [k, v] : other.values_) set(prefix + "." + k, v);
    for (const auto & [k, v] : other.thresholds_) thresholds_[k] = v;
    passed_ = passed_ && other.passed_;
  }

  json to_json(bool with_timestamp = true) const
  {
    json j;
    j["suite"] = suite_;
    j["passed"] = passed_;
    json vals = json::object();
    for (const auto & [k, v] : values_) {
      if (std::isfinite(v)) vals[k] = v;
      else vals[k] = nullptr;
    }
    j["values"] = vals;
    json th = json::object();
    for (const auto & [k, v] : thresholds_) th[k] = v;
    j["thresholds"] = th;
    json meta = metadata_.is_null() ? json::object() : metadata_;
    if (with_timestamp) meta["timestamp"] = timestamp();
    j["metadata"] = meta;
    return j;
  }

  std::string to_csv() const
  {
    Table t{{"name", "value"}, {}};
    t.rows.push_back({"passed", passed_ ? "1" : "0"});
    for (const auto & [k, v] : values_) t.rows.push_back({k, format_double(v)});
    return carnot::to_csv(t);
  }

  static std::string timestamp()
  {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
  }

private:
  std::string suite_;
  bool passed_{true};
  std::vector<std::pair<std::string, double>> values_;
  std::map<std::string, double> thresholds_;
  json metadata_;
  Table strata_;
};

/// FNV-1a 64-bit.
inline std::uint64_t fnv1a64(const std::string & s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Writes to a sibling temporary and renames it over @p path.
inline void write_file_atomic(const std::filesystem::path & path, const std::string & content)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace carnot
