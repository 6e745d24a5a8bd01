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

// Stochastic blockmodel / random dot product graph generative model and the
// Bernoulli likelihood shared by every sampler.

#ifndef SBM_EB_MODEL_HPP_
#define SBM_EB_MODEL_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/graph.hpp"
#include "sbm_eb/rng.hpp"

namespace sbm_eb {

// Probabilities are clamped to [kProbabilityFloor, 1 - kProbabilityFloor]
// before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

// Blockmodel parameters. Labels are 0-based internally; files use 1..K.
struct SbmParams {
  int K = 0;
  int d = 0;
  Eigen::MatrixXd B;    // K x K
  Eigen::VectorXd rho;  // K
  Eigen::MatrixXd nu;   // K x d, B = nu nu^T

  // Validates B and rho and factors B into latent positions of dimension d.
  static SbmParams from_block_matrix(const Eigen::MatrixXd& B,
                                     const Eigen::VectorXd& rho, int d);

  // Takes latent positions as given; B is recomputed as nu nu^T.
  static SbmParams from_latent_positions(const Eigen::MatrixXd& nu,
                                         const Eigen::VectorXd& rho);

  // Expected edge density rho^T B rho.
  double expected_density() const { return rho.dot(B * rho); }
};

// Factor B = nu nu^T from the top-d eigenpairs of B, nu = U diag(lambda)^1/2,
// with each eigenvector's largest-magnitude entry made positive.
// Throws NotPSD or RankExceedsD.
Eigen::MatrixXd latent_positions_from_B(const Eigen::MatrixXd& B, int d);

void validate_block_proportions(const Eigen::VectorXd& rho);

enum class LatentKind { kPointMass, kDirichletMixture };

struct LatentSampler {
  LatentKind kind = LatentKind::kPointMass;
  Eigen::MatrixXd nu;   // K x d centers
  Eigen::VectorXd rho;  // K
  double r = 0.0;       // Dirichlet concentration (mixture only)
};

struct LatentMatrix {
  Eigen::MatrixXd X;          // n x d
  std::vector<int> tau_true;  // generating component per row
};

std::vector<int> sample_block_memberships(std::size_t n,
                                          const Eigen::VectorXd& rho, Rng& rng);

// Rows nu_{tau_i}.
Eigen::MatrixXd latent_matrix(const Eigen::MatrixXd& nu,
                              std::span<const int> tau);

LatentMatrix sample_latents(std::size_t n, const LatentSampler& sampler,
                            Rng& rng);

// X_i ~ sum_k rho_k Dirichlet(r nu_k). Throws InvalidConcentration.
LatentMatrix sample_dirichlet_mixture_latents(std::size_t n,
                                              const LatentSampler& sampler,
                                              Rng& rng);

enum class OutOfRangePolicy { kThrow, kClamp };

// A_ij ~ Bern(<X_i, X_j>) for i < j. With kThrow, a dot product outside
// [0, 1] raises ProbabilityOutOfRange; with kClamp it is clamped into [0, 1].
AdjacencyMatrix sample_rdpg(const Eigen::MatrixXd& X, Rng& rng,
                            OutOfRangePolicy policy = OutOfRangePolicy::kThrow);

// Edge probability after the clamping policy. Dot products that are not
// probabilities at all (NaN, or outside [0,1] by more than 1e-9) raise
// DegenerateProbability.
double clamp_probability(double p);

// sum_{i<j} A_ij log p_ij + (1 - A_ij) log(1 - p_ij), p_ij = <nu_tau_i,
// nu_tau_j>, natural log.
double log_likelihood(const AdjacencyMatrix& A, std::span<const int> tau,
                      const Eigen::MatrixXd& nu);

}  // namespace sbm_eb

#endif  // SBM_EB_MODEL_HPP_
