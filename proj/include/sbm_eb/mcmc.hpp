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

// Metropolis-Hastings-within-Gibbs posterior sampling of block labels tau and
// latent positions nu.
//
// Each iteration visits vertices 0..n-1 in order and redraws tau_i from its
// full conditional, then (except for the Exact model) proposes a whole new
// nu from the prior and accepts it with probability
// min{1, f(A | tau, nu') / f(A | tau, nu)}.

#ifndef SBM_EB_MCMC_HPP_
#define SBM_EB_MCMC_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/graph.hpp"
#include "sbm_eb/prior.hpp"
#include "sbm_eb/rng.hpp"

namespace sbm_eb {

struct McmcState {
  std::vector<int> tau;
  Eigen::MatrixXd nu;       // K x d
  std::vector<int> counts;  // T_k = #{i : tau_i = k}
  double loglik = 0.0;      // log f(A | tau, nu)

  // Builds a consistent state (counts and log-likelihood recomputed).
  static McmcState make(const AdjacencyMatrix& A, std::vector<int> tau,
                        Eigen::MatrixXd nu);
};

// min{1, exp(proposed - current)}.
double acceptance_probability(double loglik_proposed, double loglik_current);

// Holds the sampler caches for one chain: neighbor lists, per-vertex
// neighbor counts by block, and log-probability tables for the current nu.
class BlockSampler {
 public:
  BlockSampler(const AdjacencyMatrix& A, const PriorSpec& prior,
               McmcState state);

  // One Gibbs sweep over all vertices in index order.
  void sweep_tau(Rng& rng);

  // One independence-Metropolis step for nu using the prior as proposal.
  // Returns true if the proposal was accepted.
  bool step_nu(Rng& rng);

  // rho*_i: the full conditional of tau_i given every other label.
  Eigen::VectorXd tau_full_conditional(std::size_t i) const;

  const McmcState& state() const { return state_; }
  std::size_t accepted() const { return accepted_; }
  std::size_t proposed() const { return proposed_; }

 private:
  struct BlockEdges {
    Eigen::MatrixXd edges;  // E_kl, k <= l meaningful
    Eigen::MatrixXd pairs;  // N_kl
  };

  void set_nu(const Eigen::MatrixXd& nu);
  void log_weights(std::size_t i, Eigen::VectorXd& out) const;
  BlockEdges block_edges() const;
  double loglik_for(const BlockEdges& blocks, const Eigen::MatrixXd& log_p,
                    const Eigen::MatrixXd& log_q) const;

  const AdjacencyMatrix* graph_;
  const PriorSpec* prior_;
  McmcState state_;
  int K_;
  std::vector<std::vector<int>> neighbors_;
  std::vector<int> nbr_counts_;  // n x K, row-major
  Eigen::MatrixXd log_p_;
  Eigen::MatrixXd log_q_;
  Eigen::VectorXd log_rho_;
  std::size_t accepted_ = 0;
  std::size_t proposed_ = 0;
};

McmcState gibbs_update_tau(McmcState state, const AdjacencyMatrix& A,
                           const PriorSpec& prior, Rng& rng);

McmcState metropolis_update_nu(McmcState state, const AdjacencyMatrix& A,
                               const PriorSpec& prior, Rng& rng,
                               bool* accepted = nullptr);

struct Schedule {
  std::size_t iters = 10'000;
  std::size_t burn_in = 0;  // iterations before this are not stored
  std::size_t thin = 1;
};

struct ChainInit {
  std::vector<int> tau0;
  Eigen::MatrixXd nu0;  // ignored by Exact (uses the known nu)
};

struct ChainTrace {
  ModelKind model = ModelKind::kAsge;
  int K = 0;
  std::uint64_t seed = 0;
  std::vector<std::size_t> sample_iterations;
  std::vector<std::vector<int>> tau_samples;
  std::vector<Eigen::MatrixXd> nu_samples;
  std::size_t accept_count = 0;
  std::size_t propose_count = 0;
  std::vector<double> misassign_series;  // per iteration, 0..iters
  McmcState final_state;

  double accept_rate() const {
    return propose_count == 0 ? 0.0
                              : static_cast<double>(accept_count) /
                                    static_cast<double>(propose_count);
  }
};

// Initialization per model: Exact draws tau0 iid from rho when init.tau0 is
// empty; the other models require tau0 (the GMM labels). When init.nu0 is
// empty for Gold/ASGE/Flat, it is drawn from the prior.
ChainTrace run_chain(const AdjacencyMatrix& A, const PriorSpec& prior,
                     ChainInit init, const Schedule& schedule,
                     std::optional<std::span<const int>> truth,
                     std::uint64_t seed);

}  // namespace sbm_eb

#endif  // SBM_EB_MCMC_HPP_
