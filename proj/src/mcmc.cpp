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

#include "sbm_eb/mcmc.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sbm_eb/errors.hpp"
#include "sbm_eb/evaluation.hpp"
#include "sbm_eb/model.hpp"

namespace sbm_eb {
namespace {

void log_tables(const Eigen::MatrixXd& nu, Eigen::MatrixXd& log_p,
                Eigen::MatrixXd& log_q) {
  const Eigen::Index K = nu.rows();
  log_p.resize(K, K);
  log_q.resize(K, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < K; ++l) {
      const double p = clamp_probability(nu.row(k).dot(nu.row(l)));
      log_p(k, l) = std::log(p);
      log_q(k, l) = std::log1p(-p);
    }
  }
}

std::vector<int> block_counts(std::span<const int> tau, int K) {
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (int t : tau) {
    if (t < 0 || t >= K) {
      throw Error(Errc::kInvalidArgument,
                  "label " + std::to_string(t) + " outside [0, K)");
    }
    ++counts[static_cast<std::size_t>(t)];
  }
  return counts;
}

}  // namespace

McmcState McmcState::make(const AdjacencyMatrix& A, std::vector<int> tau,
                          Eigen::MatrixXd nu) {
  McmcState s;
  s.counts = block_counts(tau, static_cast<int>(nu.rows()));
  s.loglik = log_likelihood(A, tau, nu);
  s.tau = std::move(tau);
  s.nu = std::move(nu);
  return s;
}

double acceptance_probability(double loglik_proposed, double loglik_current) {
  const double diff = loglik_proposed - loglik_current;
  return diff >= 0.0 ? 1.0 : std::exp(diff);
}

BlockSampler::BlockSampler(const AdjacencyMatrix& A, const PriorSpec& prior,
                           McmcState state)
    : graph_(&A),
      prior_(&prior),
      state_(std::move(state)),
      K_(prior.K()),
      neighbors_(A.neighbor_lists()) {
  const std::size_t n = A.size();
  if (state_.tau.size() != n) {
    throw Error(Errc::kInvalidArgument, "tau length does not match graph");
  }
  if (state_.nu.rows() != K_ || state_.nu.cols() != prior.d()) {
    throw Error(Errc::kInvalidArgument, "nu shape does not match prior");
  }
  state_.counts = block_counts(state_.tau, K_);
  nbr_counts_.assign(n * static_cast<std::size_t>(K_), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j : neighbors_[i]) {
      ++nbr_counts_[i * K_ + state_.tau[static_cast<std::size_t>(j)]];
    }
  }
  if (prior.known_rho()) {
    log_rho_ = prior.rho().array().log().matrix();
  }
  set_nu(state_.nu);
  state_.loglik = loglik_for(block_edges(), log_p_, log_q_);
}

void BlockSampler::set_nu(const Eigen::MatrixXd& nu) {
  state_.nu = nu;
  log_tables(nu, log_p_, log_q_);
}

void BlockSampler::log_weights(std::size_t i, Eigen::VectorXd& out) const {
  const int current = state_.tau[i];
  const int* m = nbr_counts_.data() + i * K_;
  out.resize(K_);
  for (int k = 0; k < K_; ++k) {
    double w;
    if (prior_->known_rho()) {
      w = log_rho_(k);
    } else {
      // Gamma(theta_k + T_k) with vertex i placed in block k, divided by the
      // k-independent product over blocks without i:
      // Gamma(theta_k + c_k + 1) / Gamma(theta_k + c_k) = theta_k + c_k.
      const int others = state_.counts[static_cast<std::size_t>(k)] -
                         (k == current ? 1 : 0);
      w = std::log(prior_->theta()(k) + others);
    }
    for (int l = 0; l < K_; ++l) {
      const int others = state_.counts[static_cast<std::size_t>(l)] -
                         (l == current ? 1 : 0);
      w += m[l] * log_p_(k, l) + (others - m[l]) * log_q_(k, l);
    }
    out(k) = w;
  }
}

Eigen::VectorXd BlockSampler::tau_full_conditional(std::size_t i) const {
  Eigen::VectorXd w;
  log_weights(i, w);
  const double top = w.maxCoeff();
  Eigen::VectorXd p = (w.array() - top).exp().matrix();
  return p / p.sum();
}

void BlockSampler::sweep_tau(Rng& rng) {
  const std::size_t n = state_.tau.size();
  Eigen::VectorXd w(K_);
  for (std::size_t i = 0; i < n; ++i) {
    log_weights(i, w);
    const double top = w.maxCoeff();
    double total = 0.0;
    for (int k = 0; k < K_; ++k) {
      w(k) = std::exp(w(k) - top);
      total += w(k);
    }
    const double u = uniform01(rng) * total;
    int next = K_ - 1;
    double acc = 0.0;
    for (int k = 0; k < K_; ++k) {
      acc += w(k);
      if (u < acc) {
        next = k;
        break;
      }
    }
    const int current = state_.tau[i];
    if (next == current) continue;
    state_.tau[i] = next;
    --state_.counts[static_cast<std::size_t>(current)];
    ++state_.counts[static_cast<std::size_t>(next)];
    for (int j : neighbors_[i]) {
      int* row = nbr_counts_.data() + static_cast<std::size_t>(j) * K_;
      --row[current];
      ++row[next];
    }
  }
  state_.loglik = loglik_for(block_edges(), log_p_, log_q_);
}

BlockSampler::BlockEdges BlockSampler::block_edges() const {
  BlockEdges b;
  b.edges = Eigen::MatrixXd::Zero(K_, K_);
  b.pairs.resize(K_, K_);
  const std::size_t n = state_.tau.size();
  for (std::size_t i = 0; i < n; ++i) {
    const int k = state_.tau[i];
    const int* m = nbr_counts_.data() + i * K_;
    for (int l = 0; l < K_; ++l) b.edges(k, l) += m[l];
  }
  for (int k = 0; k < K_; ++k) {
    const double tk = state_.counts[static_cast<std::size_t>(k)];
    b.edges(k, k) /= 2.0;
    b.pairs(k, k) = tk * (tk - 1.0) / 2.0;
    for (int l = k + 1; l < K_; ++l) {
      b.pairs(k, l) = tk * state_.counts[static_cast<std::size_t>(l)];
    }
  }
  return b;
}

double BlockSampler::loglik_for(const BlockEdges& blocks,
                                const Eigen::MatrixXd& log_p,
                                const Eigen::MatrixXd& log_q) const {
  double total = 0.0;
  for (int k = 0; k < K_; ++k) {
    for (int l = k; l < K_; ++l) {
      const double e = blocks.edges(k, l);
      const double pairs = blocks.pairs(k, l);
      if (pairs == 0.0) continue;
      total += e * log_p(k, l) + (pairs - e) * log_q(k, l);
    }
  }
  return total;
}

bool BlockSampler::step_nu(Rng& rng) {
  if (prior_->kind() == ModelKind::kExact) {
    throw Error(Errc::kInvalidArgument, "the exact model has no nu step");
  }
  Eigen::MatrixXd proposal = draw_prior_nu(*prior_, rng).nu;
  Eigen::MatrixXd lp, lq;
  log_tables(proposal, lp, lq);
  const BlockEdges blocks = block_edges();
  const double proposed_ll = loglik_for(blocks, lp, lq);
  ++proposed_;
  const double alpha = acceptance_probability(proposed_ll, state_.loglik);
  // 1 - uniform01 lies in (0, 1], so alpha == 1 always accepts.
  if (1.0 - uniform01(rng) <= alpha) {
    state_.nu = std::move(proposal);
    log_p_ = std::move(lp);
    log_q_ = std::move(lq);
    state_.loglik = proposed_ll;
    ++accepted_;
    return true;
  }
  return false;
}

McmcState gibbs_update_tau(McmcState state, const AdjacencyMatrix& A,
                           const PriorSpec& prior, Rng& rng) {
  BlockSampler sampler(A, prior, std::move(state));
  sampler.sweep_tau(rng);
  return sampler.state();
}

McmcState metropolis_update_nu(McmcState state, const AdjacencyMatrix& A,
                               const PriorSpec& prior, Rng& rng,
                               bool* accepted) {
  BlockSampler sampler(A, prior, std::move(state));
  const bool ok = sampler.step_nu(rng);
  if (accepted != nullptr) *accepted = ok;
  return sampler.state();
}

ChainTrace run_chain(const AdjacencyMatrix& A, const PriorSpec& prior,
                     ChainInit init, const Schedule& schedule,
                     std::optional<std::span<const int>> truth,
                     std::uint64_t seed) {
  if (schedule.thin < 1) throw Error(Errc::kInvalidArgument, "thin must be >= 1");
  Rng rng(seed);
  const std::size_t n = A.size();
  const int K = prior.K();
  if (truth && truth->size() != n) {
    throw Error(Errc::kInvalidArgument, "truth length does not match graph");
  }

  Eigen::MatrixXd nu0;
  std::vector<int> tau0 = std::move(init.tau0);
  if (prior.kind() == ModelKind::kExact) {
    const auto& exact = std::get<ExactParams>(prior.params());
    nu0 = exact.nu;
    if (tau0.empty()) tau0 = sample_block_memberships(n, exact.rho, rng);
  } else {
    if (tau0.empty()) {
      throw Error(Errc::kInvalidArgument,
                  std::string(model_name(prior.kind())) +
                      " chains need an initial labeling");
    }
    nu0 = init.nu0.size() > 0 ? std::move(init.nu0) : sample_prior_nu(prior, rng);
  }

  ChainTrace trace;
  trace.model = prior.kind();
  trace.K = K;
  trace.seed = seed;
  McmcState start;
  start.tau = std::move(tau0);
  start.nu = std::move(nu0);
  BlockSampler sampler(A, prior, std::move(start));

  auto record = [&](std::size_t h) {
    const McmcState& s = sampler.state();
    if (truth) {
      trace.misassign_series.push_back(
          misassignment_rate(s.tau, *truth, K).error);
    }
    if (h >= schedule.burn_in && h % schedule.thin == 0) {
      trace.sample_iterations.push_back(h);
      trace.tau_samples.push_back(s.tau);
      trace.nu_samples.push_back(s.nu);
    }
  };

  record(0);
  for (std::size_t h = 1; h <= schedule.iters; ++h) {
    sampler.sweep_tau(rng);
    if (prior.kind() != ModelKind::kExact) sampler.step_nu(rng);
    record(h);
  }
  trace.accept_count = sampler.accepted();
  trace.propose_count = sampler.proposed();
  trace.final_state = sampler.state();
  return trace;
}

}  // namespace sbm_eb
