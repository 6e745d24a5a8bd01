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

// Full-covariance Gaussian mixture fitted by EM; supplies the empirical
// prior on latent positions and the initial block assignment.

#ifndef SBM_EB_GMM_HPP_
#define SBM_EB_GMM_HPP_

#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/prior.hpp"
#include "sbm_eb/rng.hpp"

namespace sbm_eb {

struct GmmOptions {
  int restarts = 10;
  int max_iters = 500;
  double tol = 1e-8;  // relative log-likelihood change
  double reg = 1e-9;  // ridge, as a fraction of trace(S)/d
};

struct GmmFit {
  Eigen::MatrixXd means;                     // K x d
  std::vector<Eigen::MatrixXd> covariances;  // K of d x d
  Eigen::VectorXd weights;                   // K
  Eigen::MatrixXd responsibilities;          // n x K
  std::vector<int> hard_labels;              // argmax responsibility
  std::vector<double> loglik_trace;          // one entry per E-step

  double loglik() const { return loglik_trace.back(); }
  int K() const { return static_cast<int>(means.rows()); }
};

// Best of `restarts` EM runs, each seeded by k-means++ followed by Lloyd
// iterations. Components are returned sorted by squared mean norm,
// ascending. Points are processed in a canonical (lexicographic) order, so
// permuting the input permutes the responsibilities and nothing else.
// Throws DegenerateCluster if every restart collapses a component below
// d+1 points of responsibility mass.
GmmFit fit_gmm(const Eigen::MatrixXd& points, int K, const GmmOptions& opts,
               Rng& rng);

// Argmax-responsibility labels of points under a given mixture. Throws
// NotPsd if a covariance is not positive definite.
std::vector<int> mixture_hard_labels(const Eigen::MatrixXd& points,
                                     const Eigen::VectorXd& weights,
                                     const Eigen::MatrixXd& means,
                                     const std::vector<Eigen::MatrixXd>& covs);

// ASGE prior with the fitted means and covariances as hyperparameters.
PriorSpec empirical_prior_from_fit(const GmmFit& fit, ConstraintMode mode);

}  // namespace sbm_eb

#endif  // SBM_EB_GMM_HPP_
