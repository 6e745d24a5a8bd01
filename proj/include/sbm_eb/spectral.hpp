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

// Adjacency spectral embedding, uncentered principal components and the
// limiting covariance of embedded points under a point-mass latent
// distribution.
//
// The limiting covariance formula assumes the second moment matrix has
// distinct eigenvalues. It is computed regardless; with repeated eigenvalues
// the UPCA basis is only defined up to a rotation inside the eigenspace.

#ifndef SBM_EB_SPECTRAL_HPP_
#define SBM_EB_SPECTRAL_HPP_

#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/graph.hpp"

namespace sbm_eb {

struct EmbeddedPoints {
  Eigen::MatrixXd X_hat;        // n x d
  Eigen::VectorXd eigenvalues;  // retained spectrum, non-increasing
  int d = 0;
};

// X_hat = U_A S_A^{1/2} from the d algebraically largest eigenpairs.
// Throws InsufficientPositiveSpectrum if any retained eigenvalue is <= 1e-8.
EmbeddedPoints adjacency_spectral_embedding(const AdjacencyMatrix& A, int d);

// Same construction for an arbitrary symmetric matrix (e.g. P = X X^T).
EmbeddedPoints spectral_embedding(const Eigen::MatrixXd& symmetric, int d);

// Uncentered principal components: X_tilde = U_P S_P^{1/2} with P = X X^T,
// computed as X V from the eigenvectors V of X^T X.
Eigen::MatrixXd upca(const Eigen::MatrixXd& X);

// Population version of upca for point masses nu_k with weights w_k: rotates
// nu so that sum_k w_k nu_k nu_k^T is diagonal with non-increasing entries.
Eigen::MatrixXd upca_basis(const Eigen::MatrixXd& nu,
                           const Eigen::VectorXd& weights);

// Delta = sum_k rho_k nu_k nu_k^T.
Eigen::MatrixXd second_moment(const Eigen::MatrixXd& nu,
                              const Eigen::VectorXd& rho);

// Sigma_k = Delta^{-1} (sum_l rho_l nu_l nu_l^T (p_kl - p_kl^2)) Delta^{-1}
// with p_kl = <nu_k, nu_l>. Throws SingularDelta when cond(Delta) > 1e12.
Eigen::MatrixXd limiting_covariance(const Eigen::MatrixXd& nu,
                                    const Eigen::VectorXd& rho, int k);

struct TheoreticalMixture {
  Eigen::MatrixXd nu;  // UPCA basis
  Eigen::VectorXd rho;
  Eigen::MatrixXd delta;
  std::vector<Eigen::MatrixXd> sigmas;

  static TheoreticalMixture from(const Eigen::MatrixXd& nu,
                                 const Eigen::VectorXd& rho);
};

// Orthogonal Q minimizing ||source Q - target||_F.
Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& source,
                                 const Eigen::MatrixXd& target);

// ||source Q - target||_F for the optimal Q.
double procrustes_residual(const Eigen::MatrixXd& source,
                           const Eigen::MatrixXd& target);

}  // namespace sbm_eb

#endif  // SBM_EB_SPECTRAL_HPP_
