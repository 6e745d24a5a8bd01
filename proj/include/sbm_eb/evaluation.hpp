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

// Error metrics under label alignment, convergence diagnostics, posterior
// point estimates and paired sign tests.

#ifndef SBM_EB_EVALUATION_HPP_
#define SBM_EB_EVALUATION_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sbm_eb/mcmc.hpp"

namespace sbm_eb {

struct AlignmentResult {
  std::vector<int> permutation;  // estimated label k maps to permutation[k]
  double error = 0.0;
  std::vector<std::vector<long>> confusion;  // [estimated][true]
};

// Minimum misassignment fraction over relabelings of the estimate:
// exhaustive for K <= 8, Hungarian assignment otherwise.
AlignmentResult misassignment_rate(std::span<const int> tau_est,
                                   std::span<const int> tau_true, int K);

// Maximum-weight assignment on a square matrix; returns row -> column.
std::vector<int> hungarian_max(const std::vector<std::vector<long>>& weight);

// Potential scale reduction factor for m >= 2 chains of equal length >= 2.
// Returns +infinity when within-chain variance vanishes but between-chain
// variance does not, and 1 when both vanish.
double gelman_rubin(const std::vector<std::vector<double>>& series);

// First iteration t (checked every `step` iterations, t >= min_iters) at
// which R-hat over the window [t/2, t] drops below `threshold`.
std::optional<std::size_t> convergence_iteration(
    const std::vector<std::vector<double>>& series, double threshold = 1.1,
    std::size_t min_iters = 100, std::size_t step = 50);

// Per-vertex marginal mode over retained samples (iteration >= burn_in) of
// all traces, after aligning each sample to tau_ref. Ties go to the lower
// block index.
std::vector<int> posterior_tau_estimate(std::span<const ChainTrace> traces,
                                        std::size_t burn_in,
                                        std::span<const int> tau_ref);

// Exact two-sided sign test on paired values; ties dropped. Throws AllTies.
double paired_sign_test(std::span<const double> a, std::span<const double> b);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double se = 0.0;
  double ci_low = 0.0;  // normal-approximation 95% interval
  double ci_high = 0.0;
};

SummaryStats summarize(std::span<const double> values);

}  // namespace sbm_eb

#endif  // SBM_EB_EVALUATION_HPP_
