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

#include "sbm_eb/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sbm_eb/errors.hpp"
#include "sbm_eb/linalg.hpp"

namespace sbm_eb {
namespace {

constexpr double kEigenTol = 1e-8;

int draw_categorical(const Eigen::VectorXd& probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  const int K = static_cast<int>(probs.size());
  for (int k = 0; k < K; ++k) {
    acc += probs(k);
    if (u < acc) return k;
  }
  // Rounding left u above the total; take the last positive entry.
  for (int k = K - 1; k >= 0; --k) {
    if (probs(k) > 0) return k;
  }
  return K - 1;
}

}  // namespace

void validate_block_proportions(const Eigen::VectorXd& rho) {
  if (rho.size() == 0) {
    throw Error(Errc::kInvalidArgument, "rho is empty");
  }
  if ((rho.array() < 0.0).any() || std::abs(rho.sum() - 1.0) > 1e-9) {
    throw Error(Errc::kInvalidArgument, "rho is not on the simplex");
  }
}

Eigen::MatrixXd latent_positions_from_B(const Eigen::MatrixXd& B, int d) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "d must be >= 1");
  if (!is_symmetric(B, 1e-10)) {
    throw Error(Errc::kInvalidArgument, "B is not symmetric");
  }
  SymmetricEigen eig = symmetric_eigen(B);
  const Eigen::Index K = B.rows();
  if (eig.values(K - 1) < -kEigenTol) {
    throw Error(Errc::kNotPsd, "B has eigenvalue " +
                                   std::to_string(eig.values(K - 1)));
  }
  int positive = 0;
  for (Eigen::Index k = 0; k < K; ++k) {
    if (eig.values(k) > kEigenTol) ++positive;
  }
  if (positive > d) {
    throw Error(Errc::kRankExceedsD, "B has rank " + std::to_string(positive) +
                                         " > d = " + std::to_string(d));
  }
  canonicalize_column_signs(eig.vectors);
  Eigen::MatrixXd nu = Eigen::MatrixXd::Zero(K, d);
  const Eigen::Index keep = std::min<Eigen::Index>(K, d);
  for (Eigen::Index c = 0; c < keep; ++c) {
    nu.col(c) = eig.vectors.col(c) * std::sqrt(std::max(eig.values(c), 0.0));
  }
  return nu;
}

SbmParams SbmParams::from_block_matrix(const Eigen::MatrixXd& B,
                                       const Eigen::VectorXd& rho, int d) {
  if (B.rows() != B.cols() || B.rows() != rho.size()) {
    throw Error(Errc::kInvalidArgument, "B and rho dimensions disagree");
  }
  if ((B.array() < 0.0).any() || (B.array() > 1.0).any()) {
    throw Error(Errc::kInvalidArgument, "B entries must lie in [0,1]");
  }
  validate_block_proportions(rho);
  const Eigen::Index K = B.rows();
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = k + 1; l < K; ++l) {
      if ((B.row(k) - B.row(l)).cwiseAbs().maxCoeff() == 0.0) {
        throw Error(Errc::kInvalidArgument,
                    "rows of B must be pairwise distinct");
      }
    }
  }
  SbmParams p;
  p.K = static_cast<int>(K);
  p.d = d;
  p.B = B;
  p.rho = rho;
  p.nu = latent_positions_from_B(B, d);
  return p;
}

SbmParams SbmParams::from_latent_positions(const Eigen::MatrixXd& nu,
                                           const Eigen::VectorXd& rho) {
  if (nu.rows() != rho.size()) {
    throw Error(Errc::kInvalidArgument, "nu and rho dimensions disagree");
  }
  validate_block_proportions(rho);
  SbmParams p;
  p.K = static_cast<int>(nu.rows());
  p.d = static_cast<int>(nu.cols());
  p.nu = nu;
  p.rho = rho;
  p.B = nu * nu.transpose();
  return p;
}

std::vector<int> sample_block_memberships(std::size_t n,
                                          const Eigen::VectorXd& rho,
                                          Rng& rng) {
  validate_block_proportions(rho);
  std::vector<int> tau(n);
  for (auto& t : tau) t = draw_categorical(rho, rng);
  return tau;
}

Eigen::MatrixXd latent_matrix(const Eigen::MatrixXd& nu,
                              std::span<const int> tau) {
  Eigen::MatrixXd X(static_cast<Eigen::Index>(tau.size()), nu.cols());
  for (std::size_t i = 0; i < tau.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = nu.row(tau[i]);
  }
  return X;
}

LatentMatrix sample_latents(std::size_t n, const LatentSampler& sampler,
                            Rng& rng) {
  if (sampler.kind == LatentKind::kDirichletMixture) {
    return sample_dirichlet_mixture_latents(n, sampler, rng);
  }
  LatentMatrix out;
  out.tau_true = sample_block_memberships(n, sampler.rho, rng);
  out.X = latent_matrix(sampler.nu, out.tau_true);
  return out;
}

LatentMatrix sample_dirichlet_mixture_latents(std::size_t n,
                                              const LatentSampler& sampler,
                                              Rng& rng) {
  const Eigen::MatrixXd alpha = sampler.r * sampler.nu;
  if (!(sampler.r > 0.0) || (alpha.array() <= 0.0).any()) {
    throw Error(Errc::kInvalidConcentration,
                "every entry of r * nu_k must be positive");
  }
  LatentMatrix out;
  out.tau_true = sample_block_memberships(n, sampler.rho, rng);
  const Eigen::Index d = sampler.nu.cols();
  out.X.resize(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = out.tau_true[i];
    double total = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      std::gamma_distribution<double> gamma(alpha(k, j), 1.0);
      const double g = gamma(rng);
      out.X(static_cast<Eigen::Index>(i), j) = g;
      total += g;
    }
    out.X.row(static_cast<Eigen::Index>(i)) /= total;
  }
  return out;
}

AdjacencyMatrix sample_rdpg(const Eigen::MatrixXd& X, Rng& rng,
                            OutOfRangePolicy policy) {
  const Eigen::Index n = X.rows();
  AdjacencyMatrix A(static_cast<std::size_t>(n));
  // Gram matrix column by column keeps memory at O(n d).
  const Eigen::MatrixXd Xt = X.transpose();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double p = Xt.col(i).dot(Xt.col(j));
      if (p < 0.0 || p > 1.0) {
        if (policy == OutOfRangePolicy::kThrow &&
            (p < -1e-12 || p > 1.0 + 1e-12 || std::isnan(p))) {
          throw Error(Errc::kProbabilityOutOfRange,
                      "<X_" + std::to_string(i) + ", X_" + std::to_string(j) +
                          "> = " + std::to_string(p));
        }
        p = std::clamp(p, 0.0, 1.0);
      }
      if (uniform01(rng) < p) {
        A.add_edge(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
      }
    }
  }
  return A;
}

double clamp_probability(double p) {
  if (std::isnan(p) || p < -1e-9 || p > 1.0 + 1e-9) {
    throw Error(Errc::kDegenerateProbability,
                "dot product " + std::to_string(p) + " is not a probability");
  }
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

double log_likelihood(const AdjacencyMatrix& A, std::span<const int> tau,
                      const Eigen::MatrixXd& nu) {
  const std::size_t n = A.size();
  if (tau.size() != n) {
    throw Error(Errc::kInvalidArgument, "tau length does not match graph");
  }
  const Eigen::Index K = nu.rows();
  Eigen::MatrixXd log_p(K, K), log_q(K, K);
  for (Eigen::Index k = 0; k < K; ++k) {
    for (Eigen::Index l = 0; l < K; ++l) {
      const double p = clamp_probability(nu.row(k).dot(nu.row(l)));
      log_p(k, l) = std::log(p);
      log_q(k, l) = std::log1p(-p);
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto row = A.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      total += row[j] != 0 ? log_p(tau[i], tau[j]) : log_q(tau[i], tau[j]);
    }
  }
  return total;
}

}  // namespace sbm_eb
