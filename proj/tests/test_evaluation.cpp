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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "doctest.h"
#include "sbm_eb/errors.hpp"
#include "sbm_eb/evaluation.hpp"
#include "sbm_eb/mcmc.hpp"
#include "sbm_eb/model.hpp"

using namespace sbm_eb;

namespace {

std::vector<int> random_labels(std::size_t n, int K, Rng& rng) {
  std::uniform_int_distribution<int> pick(0, K - 1);
  std::vector<int> tau(n);
  for (int& t : tau) t = pick(rng);
  return tau;
}

std::vector<int> relabel(const std::vector<int>& tau, const std::vector<int>& perm) {
  std::vector<int> out(tau.size());
  for (std::size_t i = 0; i < tau.size(); ++i) out[i] = perm[static_cast<std::size_t>(tau[i])];
  return out;
}

ChainTrace trace_of(const std::vector<std::vector<int>>& samples, int K) {
  ChainTrace tr;
  tr.K = K;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    tr.sample_iterations.push_back(s);
    tr.tau_samples.push_back(samples[s]);
  }
  return tr;
}

}  // namespace

TEST_CASE("misassignment examples") {
  const std::vector<int> truth{0, 0, 0, 1, 1, 1};
  const auto same = misassignment_rate(truth, truth, 2);
  CHECK(same.error == 0.0);
  CHECK(same.permutation == std::vector<int>{0, 1});

  const std::vector<int> swapped{1, 1, 1, 0, 0, 0};
  const auto sw = misassignment_rate(swapped, truth, 2);
  CHECK(sw.error == 0.0);
  CHECK(sw.permutation == std::vector<int>{1, 0});

  const std::vector<int> est{0, 0, 1, 1, 1, 0};
  const auto r = misassignment_rate(est, truth, 2);
  CHECK(r.error == doctest::Approx(2.0 / 6.0));
  CHECK(r.confusion == std::vector<std::vector<long>>{{2, 1}, {1, 2}});
}

TEST_CASE("misassignment invariances") {
  Rng rng(51);
  for (int K : {2, 3, 5, 9}) {
    const auto truth = random_labels(300, K, rng);
    auto est = truth;
    for (int i = 0; i < 60; ++i) est[static_cast<std::size_t>(i * 5)] = rng() % K;
    std::vector<int> perm(static_cast<std::size_t>(K));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double base = misassignment_rate(est, truth, K).error;
    const auto one = misassignment_rate(relabel(est, perm), truth, K);
    CHECK(one.error == doctest::Approx(base));
    CHECK(misassignment_rate(relabel(est, perm), relabel(truth, perm), K).error ==
          doctest::Approx(base));
    // The reported error is the one of the returned permutation.
    long matched = 0;
    for (int k = 0; k < K; ++k) {
      matched += one.confusion[static_cast<std::size_t>(k)]
                              [static_cast<std::size_t>(one.permutation[static_cast<std::size_t>(k)])];
    }
    CHECK(one.error == doctest::Approx(1.0 - matched / 300.0));
  }
}

TEST_CASE("random labels miss about 1 - 1/K") {
  Rng rng(52);
  for (int K : {2, 3, 4}) {
    const auto a = random_labels(10000, K, rng);
    const auto b = random_labels(10000, K, rng);
    const double err = misassignment_rate(a, b, K).error;
    // Maximizing over permutations only shaves a few standard errors.
    CHECK(err <= 1.0 - 1.0 / K + 1e-12);
    CHECK(err > 1.0 - 1.0 / K - 0.03);
  }
}

TEST_CASE("Hungarian assignment agrees with brute force") {
  Rng rng(53);
  std::uniform_int_distribution<long> w(0, 50);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + trial % 7;
    std::vector<std::vector<long>> m(static_cast<std::size_t>(K),
                                     std::vector<long>(static_cast<std::size_t>(K)));
    for (auto& row : m) {
      for (long& x : row) x = w(rng);
    }
    auto value = [&](const std::vector<int>& p) {
      long s = 0;
      for (int k = 0; k < K; ++k) s += m[static_cast<std::size_t>(k)][static_cast<std::size_t>(p[static_cast<std::size_t>(k)])];
      return s;
    };
    std::vector<int> p(static_cast<std::size_t>(K));
    std::iota(p.begin(), p.end(), 0);
    long best = 0;
    do best = std::max(best, value(p));
    while (std::next_permutation(p.begin(), p.end()));
    const auto h = hungarian_max(m);
    std::vector<int> sorted = h;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> ident(static_cast<std::size_t>(K));
    std::iota(ident.begin(), ident.end(), 0);
    CHECK(sorted == ident);
    CHECK(value(h) == best);
  }
}

TEST_CASE("large K uses the assignment solver") {
  Rng rng(54);
  const int K = 12;
  const auto truth = random_labels(600, K, rng);
  std::vector<int> perm(K);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  CHECK(misassignment_rate(relabel(truth, perm), truth, K).error == 0.0);
}

TEST_CASE("Gelman-Rubin special cases") {
  CHECK(gelman_rubin({{0.3, 0.3, 0.3, 0.3}, {0.3, 0.3, 0.3, 0.3}}) == 1.0);
  CHECK(gelman_rubin({{0, 0, 0, 0}, {1, 1, 1, 1}}) ==
        std::numeric_limits<double>::infinity());
  // W = 1/60, B = 4 * (0.05^2 + 0.05^2) / 1 = 0.02.
  CHECK(gelman_rubin({{0.1, 0.2, 0.3, 0.4}, {0.2, 0.3, 0.4, 0.5}}) ==
        doctest::Approx(std::sqrt(1.05)).epsilon(1e-12));
  // Identical non-constant chains have B = 0, so R = sqrt((L - 1) / L).
  CHECK(gelman_rubin({{1, 2, 3, 4}, {1, 2, 3, 4}}) ==
        doctest::Approx(std::sqrt(0.75)));

  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kInvalidArgument;
  };
  CHECK(code_of([] { gelman_rubin({{1, 2, 3}}); }) == Errc::kInsufficientLength);
  CHECK(code_of([] { gelman_rubin({{1}, {2}}); }) == Errc::kInsufficientLength);
  CHECK(code_of([] { gelman_rubin({{1, 2}, {2, 3, 4}}); }) ==
        Errc::kInsufficientLength);
}

TEST_CASE("Gelman-Rubin on independent chains") {
  Rng rng(55);
  std::normal_distribution<double> z;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<double>> chains(2, std::vector<double>(5000));
    for (auto& c : chains) {
      for (double& x : c) x = z(rng);
    }
    const double r = gelman_rubin(chains);
    CHECK(r >= 0.98);
    CHECK(r <= 1.1);
  }
}

TEST_CASE("convergence iteration") {
  // Two chains start far apart and meet at t = 300.
  std::vector<std::vector<double>> series(2, std::vector<double>(1000));
  Rng rng(56);
  std::normal_distribution<double> z(0.0, 0.01);
  for (std::size_t t = 0; t < 1000; ++t) {
    series[0][t] = (t < 300 ? 0.9 : 0.2) + z(rng);
    series[1][t] = 0.2 + z(rng);
  }
  const auto it = convergence_iteration(series);
  REQUIRE(it.has_value());
  CHECK(*it > 300);
  CHECK(*it % 50 == 0);
  CHECK_FALSE(convergence_iteration({series[0]}).has_value());
}

TEST_CASE("posterior point estimate") {
  const std::vector<int> t0{0, 1, 1, 0, 1};
  SUBCASE("constant trace returns the aligned sample") {
    const ChainTrace tr = trace_of({t0, t0, t0}, 2);
    CHECK(posterior_tau_estimate(std::span(&tr, 1), 0, t0) == t0);
    // Against a label-swapped reference the estimate comes back swapped.
    const std::vector<int> ref = relabel(t0, {1, 0});
    CHECK(posterior_tau_estimate(std::span(&tr, 1), 0, ref) == ref);
  }
  SUBCASE("ties go to the lower block") {
    std::vector<int> t1 = t0;
    t1[0] = 1;
    const ChainTrace tr = trace_of({t0, t1}, 2);
    const auto est = posterior_tau_estimate(std::span(&tr, 1), 0, t0);
    CHECK(est == t0);
    const ChainTrace rev = trace_of({t1, t0}, 2);
    CHECK(posterior_tau_estimate(std::span(&rev, 1), 0, t0)[0] == 0);
  }
  SUBCASE("burn-in drops early samples") {
    std::vector<int> t1 = t0;
    t1[2] = 0;
    const ChainTrace tr = trace_of({t1, t1, t0}, 2);
    CHECK(posterior_tau_estimate(std::span(&tr, 1), 2, t0) == t0);
    CHECK_THROWS_AS(posterior_tau_estimate(std::span(&tr, 1), 3, t0), Error);
  }
}

TEST_CASE("posterior estimate on an enumerable instance") {
  Eigen::MatrixXd B(2, 2);
  B << 0.42, 0.42, 0.42, 0.5;
  const SbmParams truth = SbmParams::from_block_matrix(B, Eigen::Vector2d(0.6, 0.4), 2);
  Rng rng(57);
  const auto tau = sample_block_memberships(8, truth.rho, rng);
  const AdjacencyMatrix A = sample_rdpg(latent_matrix(truth.nu, tau), rng);

  // Brute-force marginals P(tau_i = 1 | A).
  std::vector<double> marg(8, 0.0);
  double z = 0.0;
  for (unsigned b = 0; b < 256; ++b) {
    std::vector<int> t(8);
    double lp = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      t[i] = static_cast<int>((b >> i) & 1u);
      lp += std::log(truth.rho(t[i]));
    }
    const double w = std::exp(lp + log_likelihood(A, t, truth.nu));
    z += w;
    for (std::size_t i = 0; i < 8; ++i) marg[i] += w * t[i];
  }
  for (double& m : marg) m /= z;

  const PriorSpec prior = PriorSpec::exact(truth.nu, truth.rho);
  Schedule sched;
  sched.iters = 50000;
  const ChainTrace tr = run_chain(A, prior, ChainInit{}, sched, std::nullopt, 3);
  // Exact chains keep fixed block meaning, so align to the identity.
  std::vector<int> ref(8);
  for (std::size_t i = 0; i < 8; ++i) ref[i] = marg[i] > 0.5 ? 1 : 0;
  const auto est = posterior_tau_estimate(std::span(&tr, 1), 1000, ref);
  for (std::size_t i = 0; i < 8; ++i) {
    if (marg[i] > 0.6) CHECK(est[i] == 1);
    if (marg[i] < 0.4) CHECK(est[i] == 0);
  }
}

TEST_CASE("paired sign test") {
  std::vector<double> a(10, 0.1), b(10, 0.2);
  CHECK(paired_sign_test(a, b) == doctest::Approx(2.0 * std::pow(0.5, 10)));
  CHECK(paired_sign_test(b, a) == doctest::Approx(0.001953125));
  try {
    paired_sign_test(a, a);
    FAIL("expected AllTies");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kAllTies);
  }
  std::vector<double> c{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  std::vector<double> d{1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
  CHECK(paired_sign_test(c, d) == 1.0);
  // Ties are dropped: 3 wins out of 3 untied pairs.
  std::vector<double> e{0, 0, 0, 5, 5};
  std::vector<double> f{1, 1, 1, 5, 5};
  CHECK(paired_sign_test(e, f) == doctest::Approx(0.25));
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1, 2, 3, 4};
  const SummaryStats s = summarize(v);
  CHECK(s.count == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.median == 2.5);
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(s.ci_low == doctest::Approx(2.5 - 1.96 * s.se));
  CHECK(summarize(std::vector<double>{7, 1, 4}).median == 4.0);
  CHECK(summarize(std::vector<double>{}).count == 0);
}
