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

#ifndef SBM_EB_ERRORS_HPP_
#define SBM_EB_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace sbm_eb {

enum class Errc {
  kInvalidArgument,
  // Numerical failures.
  kNotPsd,
  kRankExceedsD,
  kProbabilityOutOfRange,
  kInvalidConcentration,
  kDegenerateProbability,
  kInsufficientPositiveSpectrum,
  kSingularDelta,
  kDegenerateCluster,
  kRejectionBudgetExhausted,
  kInsufficientLength,
  kAllTies,
  // Input data problems.
  kParseError,
  kSelfLoopRejected,
  kDisconnectedSample,
  // Configuration problems.
  kConfigError,
};

const char* errc_name(Errc code);

// Process exit code for a failure of the given kind: 2 config, 3 data,
// 4 numerical.
int exit_code_for(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sbm_eb

#endif  // SBM_EB_ERRORS_HPP_
