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

#include "sbm_eb/linalg.hpp"

#include <lapacke.h>

#include <string>
#include <vector>

#include "sbm_eb/errors.hpp"

namespace sbm_eb {

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::kInvalidArgument, "symmetric eigensolver failed");
  }
  SymmetricEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SymmetricEigen top_symmetric_eigen(const Eigen::MatrixXd& m, int count) {
  const lapack_int n = static_cast<lapack_int>(m.rows());
  if (m.rows() != m.cols()) {
    throw Error(Errc::kInvalidArgument, "matrix is not square");
  }
  if (count < 1 || count > n) {
    throw Error(Errc::kInvalidArgument,
                "requested " + std::to_string(count) + " eigenpairs of a " +
                    std::to_string(n) + "x" + std::to_string(n) + " matrix");
  }
  Eigen::MatrixXd work = m;  // dsyevr destroys its input
  std::vector<double> w(static_cast<std::size_t>(n));
  Eigen::MatrixXd z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int il = n - count + 1;
  lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, il, n,
      0.0, &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count) {
    throw Error(Errc::kInvalidArgument,
                "dsyevr failed, info=" + std::to_string(info));
  }
  SymmetricEigen out;
  out.values.resize(count);
  out.vectors.resize(n, count);
  // dsyevr returns ascending order.
  for (int c = 0; c < count; ++c) {
    out.values(c) = w[static_cast<std::size_t>(count - 1 - c)];
    out.vectors.col(c) = z.col(count - 1 - c);
  }
  return out;
}

void canonicalize_column_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
      // Relative slack so that numerically tied entries resolve to the first.
      if (std::abs(vectors(r, c)) > best_abs * (1.0 + 1e-9)) {
        best_abs = std::abs(vectors(r, c));
        best = r;
      }
    }
    if (vectors.rows() > 0 && vectors(best, c) < 0) vectors.col(c) *= -1.0;
  }
}

Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& cov) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  SymmetricEigen eig = symmetric_eigen(cov);
  Eigen::VectorXd root = eig.values.cwiseMax(0.0).cwiseSqrt();
  return eig.vectors * root.asDiagonal();
}

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace sbm_eb
