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

#include "sbm_eb/errors.hpp"

namespace sbm_eb {

const char* errc_name(Errc code) {
  switch (code) {
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kNotPsd: return "NotPSD";
    case Errc::kRankExceedsD: return "RankExceedsD";
    case Errc::kProbabilityOutOfRange: return "ProbabilityOutOfRange";
    case Errc::kInvalidConcentration: return "InvalidConcentration";
    case Errc::kDegenerateProbability: return "DegenerateProbability";
    case Errc::kInsufficientPositiveSpectrum:
      return "InsufficientPositiveSpectrum";
    case Errc::kSingularDelta: return "SingularDelta";
    case Errc::kDegenerateCluster: return "DegenerateCluster";
    case Errc::kRejectionBudgetExhausted: return "RejectionBudgetExhausted";
    case Errc::kInsufficientLength: return "InsufficientLength";
    case Errc::kAllTies: return "AllTies";
    case Errc::kParseError: return "ParseError";
    case Errc::kSelfLoopRejected: return "SelfLoopRejected";
    case Errc::kDisconnectedSample: return "DisconnectedSample";
    case Errc::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kConfigError:
    case Errc::kInvalidArgument:
      return 2;
    case Errc::kParseError:
    case Errc::kSelfLoopRejected:
    case Errc::kDisconnectedSample:
      return 3;
    default:
      return 4;
  }
}

}  // namespace sbm_eb
