// Copyright 2026 The sbm-eb Authors.
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

#include "sbm_eb/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "sbm_eb/errors.hpp"

namespace sbm_eb {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::string spaced = s;
  std::replace(spaced.begin(), spaced.end(), ',', ' ');
  std::istringstream ss(spaced);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::kConfigError,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw Error(Errc::kConfigError,
                  "line " + std::to_string(line_no) + ": empty key");
    }
    if (cfg.values_.count(key) != 0) {
      throw Error(Errc::kConfigError, "line " + std::to_string(line_no) +
                                          ": duplicate key '" + key + "'");
    }
    cfg.values_[key] = trim(line.substr(eq + 1));
    cfg.lines_[key] = line_no;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kConfigError, "cannot open " + path.string());
  return parse(in);
}

bool KeyValueConfig::has(const std::string& key) const {
  return values_.count(key) != 0;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  values_[key] = value;
}

void KeyValueConfig::fail(const std::string& key,
                          const std::string& what) const {
  std::string where = key;
  if (auto it = lines_.find(key); it != lines_.end()) {
    where = "line " + std::to_string(it->second) + " (" + key + ")";
  }
  throw Error(Errc::kConfigError, where + ": " + what);
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
  used_.insert(key);
  return values_.at(key);
}

std::optional<std::string> KeyValueConfig::find(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return raw(key);
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       const std::string& fallback) const {
  return has(key) ? raw(key) : fallback;
}

long long KeyValueConfig::get_int(const std::string& key,
                                  long long fallback) const {
  if (!has(key)) return fallback;
  const auto v = get_ints(key);
  if (v.size() != 1) fail(key, "expected one integer");
  return v[0];
}

std::uint64_t KeyValueConfig::get_seed(const std::string& key,
                                       std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const std::string& s = raw(key);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used != s.size() || s.front() == '-') fail(key, "expected a seed");
    return v;
  } catch (const std::logic_error&) {
    fail(key, "expected a seed");
  }
}

double KeyValueConfig::get_double(const std::string& key,
                                  double fallback) const {
  if (!has(key)) return fallback;
  const auto v = get_doubles(key);
  if (v.size() != 1) fail(key, "expected one number");
  return v[0];
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& tok : split_list(raw(key))) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) fail(key, "not a number: '" + tok + "'");
    } catch (const std::logic_error&) {
      fail(key, "not a number: '" + tok + "'");
    }
  }
  return out;
}

std::vector<long long> KeyValueConfig::get_ints(const std::string& key) const {
  std::vector<long long> out;
  for (const auto& tok : split_list(raw(key))) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoll(tok, &used));
      if (used != tok.size()) fail(key, "not an integer: '" + tok + "'");
    } catch (const std::logic_error&) {
      fail(key, "not an integer: '" + tok + "'");
    }
  }
  return out;
}

std::vector<std::string> KeyValueConfig::get_strings(
    const std::string& key) const {
  return split_list(raw(key));
}

Eigen::MatrixXd KeyValueConfig::get_matrix(const std::string& key) const {
  std::vector<std::vector<double>> rows;
  std::istringstream ss(raw(key));
  std::string part;
  while (std::getline(ss, part, ';')) {
    if (trim(part).empty()) continue;
    KeyValueConfig tmp;
    tmp.values_[key] = part;
    rows.push_back(tmp.get_doubles(key));
    if (rows.back().size() != rows.front().size()) {
      fail(key, "matrix rows differ in length");
    }
  }
  if (rows.empty()) fail(key, "empty matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return m;
}

void KeyValueConfig::reject_unused() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (used_.count(key) == 0) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) {
    throw Error(Errc::kConfigError, "unknown keys: " + unknown);
  }
}

}  // namespace sbm_eb
