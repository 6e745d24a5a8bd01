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

// Small dense linear-algebra helpers shared by the embedding and the priors.

#ifndef SBM_EB_LINALG_HPP_
#define SBM_EB_LINALG_HPP_

#include <Eigen/Dense>

namespace sbm_eb {

struct SymmetricEigen {
  Eigen::VectorXd values;   // non-increasing
  Eigen::MatrixXd vectors;  // columns match `values`
};

// Full decomposition of a symmetric matrix, eigenvalues sorted
// non-increasing.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m);

// The `count` algebraically largest eigenpairs of a symmetric matrix
// (LAPACK dsyevr with an index range), sorted non-increasing.
SymmetricEigen top_symmetric_eigen(const Eigen::MatrixXd& m, int count);

// Flips each column so that its largest-magnitude entry is positive. Ties
// resolve to the first such entry.
void canonicalize_column_signs(Eigen::MatrixXd& vectors);

// Symmetric square root factor L with L L^T = cov. Uses Cholesky when the
// matrix is positive definite and an eigen-factor otherwise (negative
// eigenvalues are clipped to zero).
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov);

bool is_symmetric(const Eigen::MatrixXd& m, double tol);

}  // namespace sbm_eb

#endif  // SBM_EB_LINALG_HPP_
