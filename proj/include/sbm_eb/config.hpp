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

// Flat key=value configuration files.
//
//   # comment
//   name = eq8_dense
//   B = 0.42 0.42; 0.42 0.5
//   n_values = 100, 250, 500
//
// Matrices separate rows with ';'. Lists accept commas or whitespace.

#ifndef SBM_EB_CONFIG_HPP_
#define SBM_EB_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbm_eb {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::optional<std::string> find(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_seed(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<long long> get_ints(const std::string& key) const;
  std::vector<std::string> get_strings(const std::string& key) const;
  Eigen::MatrixXd get_matrix(const std::string& key) const;

  // Throws ConfigError naming every key that was never read.
  void reject_unused() const;

 private:
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
  const std::string& raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, std::size_t> lines_;
  mutable std::set<std::string> used_;
};

}  // namespace sbm_eb

#endif  // SBM_EB_CONFIG_HPP_
