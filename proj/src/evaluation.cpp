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

#include "sbm_eb/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sbm_eb/errors.hpp"

namespace sbm_eb {

AlignmentResult misassignment_rate(std::span<const int> tau_est,
                                   std::span<const int> tau_true, int K) {
  if (tau_est.size() != tau_true.size()) {
    throw Error(Errc::kInvalidArgument, "label vectors differ in length");
  }
  AlignmentResult out;
  out.confusion.assign(static_cast<std::size_t>(K),
                       std::vector<long>(static_cast<std::size_t>(K), 0));
  for (std::size_t i = 0; i < tau_est.size(); ++i) {
    const int e = tau_est[i];
    const int t = tau_true[i];
    if (e < 0 || e >= K || t < 0 || t >= K) {
      throw Error(Errc::kInvalidArgument, "label outside [0, K)");
    }
    ++out.confusion[static_cast<std::size_t>(e)][static_cast<std::size_t>(t)];
  }
  const double n = static_cast<double>(tau_est.size());

  if (K <= 8) {
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    long best = -1;
    do {
      long agree = 0;
      for (int k = 0; k < K; ++k) {
        agree += out.confusion[static_cast<std::size_t>(k)]
                              [static_cast<std::size_t>(perm[k])];
      }
      if (agree > best) {
        best = agree;
        out.permutation = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    out.permutation = hungarian_max(out.confusion);
  }
  long agree = 0;
  for (int k = 0; k < K; ++k) {
    agree += out.confusion[static_cast<std::size_t>(k)]
                          [static_cast<std::size_t>(out.permutation[k])];
  }
  out.error = n == 0 ? 0.0 : 1.0 - static_cast<double>(agree) / n;
  return out;
}

std::vector<int> hungarian_max(const std::vector<std::vector<long>>& weight) {
  // Shortest augmenting path on costs (max - w), 1-based potentials.
  const int n = static_cast<int>(weight.size());
  long top = 0;
  for (const auto& row : weight) {
    for (long w : row) top = std::max(top, w);
  }
  const long inf = std::numeric_limits<long>::max() / 4;
  std::vector<long> u(n + 1, 0), v(n + 1, 0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<long> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      long delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const long cost = top - weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cost < minv[j]) {
          minv[j] = cost;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) row_to_col[match[j] - 1] = j - 1;
  return row_to_col;
}

double gelman_rubin(const std::vector<std::vector<double>>& series) {
  if (series.size() < 2) {
    throw Error(Errc::kInsufficientLength, "need at least two chains");
  }
  const std::size_t len = series.front().size();
  if (len < 2) {
    throw Error(Errc::kInsufficientLength, "chains need at least 2 values");
  }
  for (const auto& s : series) {
    if (s.size() != len) {
      throw Error(Errc::kInsufficientLength, "chains differ in length");
    }
  }
  const double m = static_cast<double>(series.size());
  const double L = static_cast<double>(len);
  std::vector<double> means;
  double within = 0.0;
  for (const auto& s : series) {
    const double mean = std::accumulate(s.begin(), s.end(), 0.0) / L;
    double ss = 0.0;
    for (double x : s) ss += (x - mean) * (x - mean);
    within += ss / (L - 1.0);
    means.push_back(mean);
  }
  within /= m;
  const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= L / (m - 1.0);
  // Treat values at rounding level as zero.
  const double scale = 1e-24 * (1.0 + grand * grand);
  if (within <= scale) {
    return between <= scale * L ? 1.0
                                : std::numeric_limits<double>::infinity();
  }
  return std::sqrt(((L - 1.0) / L * within + between / L) / within);
}

std::optional<std::size_t> convergence_iteration(
    const std::vector<std::vector<double>>& series, double threshold,
    std::size_t min_iters, std::size_t step) {
  if (series.size() < 2) return std::nullopt;
  const std::size_t len = series.front().size();
  for (std::size_t t = std::max<std::size_t>(min_iters, 4); t < len;
       t += std::max<std::size_t>(step, 1)) {
    std::vector<std::vector<double>> window;
    for (const auto& s : series) {
      window.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(t / 2),
                          s.begin() + static_cast<std::ptrdiff_t>(t + 1));
    }
    if (gelman_rubin(window) < threshold) return t;
  }
  return std::nullopt;
}

std::vector<int> posterior_tau_estimate(std::span<const ChainTrace> traces,
                                        std::size_t burn_in,
                                        std::span<const int> tau_ref) {
  if (traces.empty()) {
    throw Error(Errc::kInvalidArgument, "no traces to summarize");
  }
  const int K = traces.front().K;
  const std::size_t n = tau_ref.size();
  std::vector<long> votes(n * static_cast<std::size_t>(K), 0);
  std::size_t used = 0;
  for (const auto& trace : traces) {
    for (std::size_t s = 0; s < trace.tau_samples.size(); ++s) {
      if (trace.sample_iterations[s] < burn_in) continue;
      const auto& sample = trace.tau_samples[s];
      const AlignmentResult align = misassignment_rate(sample, tau_ref, K);
      for (std::size_t i = 0; i < n; ++i) {
        ++votes[i * K + align.permutation[static_cast<std::size_t>(sample[i])]];
      }
      ++used;
    }
  }
  if (used == 0) {
    throw Error(Errc::kInvalidArgument, "burn-in leaves no samples");
  }
  std::vector<int> estimate(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long* v = votes.data() + i * K;
    estimate[i] = static_cast<int>(std::max_element(v, v + K) - v);
  }
  return estimate;
}

double paired_sign_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::kInvalidArgument, "paired samples differ in length");
  }
  long wins = 0, losses = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) ++wins;
    if (a[i] > b[i]) ++losses;
  }
  const long m = wins + losses;
  if (m == 0) throw Error(Errc::kAllTies, "every pair is tied");
  const long low = std::min(wins, losses);
  // P(X <= low), X ~ Binomial(m, 1/2), summed in log space.
  const double log_half_m = static_cast<double>(m) * std::log(0.5);
  double tail = 0.0;
  for (long k = 0; k <= low; ++k) {
    const double log_choose = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) -
                              std::lgamma(m - k + 1.0);
    tail += std::exp(log_choose + log_half_m);
  }
  return std::min(1.0, 2.0 * tail);
}

SummaryStats summarize(std::span<const double> values) {
  SummaryStats s;
  s.count = values.size();
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[mid]
                                    : 0.5 * (sorted[mid - 1] + sorted[mid]);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.se = std::sqrt(ss / (n - 1.0) / n);
  }
  s.ci_low = s.mean - 1.96 * s.se;
  s.ci_high = s.mean + 1.96 * s.se;
  return s;
}

}  // namespace sbm_eb
