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

#include "sbm_eb/spectral.hpp"

#include <cmath>
#include <string>

#include "sbm_eb/errors.hpp"
#include "sbm_eb/linalg.hpp"

namespace sbm_eb {
namespace {

constexpr double kSpectrumTol = 1e-8;

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

}  // namespace

EmbeddedPoints spectral_embedding(const Eigen::MatrixXd& symmetric, int d) {
  if (d < 1) throw Error(Errc::kInvalidArgument, "d must be >= 1");
  if (symmetric.rows() < d) {
    throw Error(Errc::kInsufficientPositiveSpectrum,
                "graph has fewer than d vertices");
  }
  SymmetricEigen eig = top_symmetric_eigen(symmetric, d);
  for (int c = 0; c < d; ++c) {
    if (eig.values(c) <= kSpectrumTol) {
      throw Error(Errc::kInsufficientPositiveSpectrum,
                  "eigenvalue " + std::to_string(c + 1) + " is " +
                      std::to_string(eig.values(c)));
    }
  }
  canonicalize_column_signs(eig.vectors);
  EmbeddedPoints out;
  out.d = d;
  out.eigenvalues = eig.values;
  out.X_hat = eig.vectors * eig.values.cwiseSqrt().asDiagonal();
  return out;
}

EmbeddedPoints adjacency_spectral_embedding(const AdjacencyMatrix& A, int d) {
  return spectral_embedding(A.to_dense(), d);
}

Eigen::MatrixXd upca(const Eigen::MatrixXd& X) {
  SymmetricEigen eig = symmetric_eigen(X.transpose() * X);
  Eigen::MatrixXd tilde = X * eig.vectors;
  canonicalize_column_signs(tilde);
  return tilde;
}

Eigen::MatrixXd upca_basis(const Eigen::MatrixXd& nu,
                           const Eigen::VectorXd& weights) {
  SymmetricEigen eig =
      symmetric_eigen(nu.transpose() * weights.asDiagonal() * nu);
  Eigen::MatrixXd tilde = nu * eig.vectors;
  canonicalize_column_signs(tilde);
  return tilde;
}

Eigen::MatrixXd second_moment(const Eigen::MatrixXd& nu,
                              const Eigen::VectorXd& rho) {
  return symmetrize(nu.transpose() * rho.asDiagonal() * nu);
}

Eigen::MatrixXd limiting_covariance(const Eigen::MatrixXd& nu,
                                    const Eigen::VectorXd& rho, int k) {
  if (k < 0 || k >= nu.rows() || nu.rows() != rho.size()) {
    throw Error(Errc::kInvalidArgument, "bad block index or dimensions");
  }
  const Eigen::MatrixXd delta = second_moment(nu, rho);
  const Eigen::VectorXd spectrum = symmetric_eigen(delta).values;
  const double lo = spectrum(spectrum.size() - 1);
  const double hi = spectrum(0);
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw Error(Errc::kSingularDelta,
                "second moment matrix is singular or ill-conditioned");
  }
  const Eigen::Index d = nu.cols();
  Eigen::MatrixXd middle = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index l = 0; l < nu.rows(); ++l) {
    const double p = nu.row(k).dot(nu.row(l));
    middle += rho(l) * (p - p * p) * nu.row(l).transpose() * nu.row(l);
  }
  const Eigen::MatrixXd inv = delta.inverse();
  return symmetrize(inv * middle * inv);
}

TheoreticalMixture TheoreticalMixture::from(const Eigen::MatrixXd& nu,
                                            const Eigen::VectorXd& rho) {
  TheoreticalMixture mix;
  mix.nu = upca_basis(nu, rho);
  mix.rho = rho;
  mix.delta = second_moment(mix.nu, rho);
  for (Eigen::Index k = 0; k < nu.rows(); ++k) {
    mix.sigmas.push_back(limiting_covariance(mix.nu, rho, static_cast<int>(k)));
  }
  return mix;
}

Eigen::MatrixXd procrustes_align(const Eigen::MatrixXd& source,
                                 const Eigen::MatrixXd& target) {
  if (source.rows() != target.rows() || source.cols() != target.cols()) {
    throw Error(Errc::kInvalidArgument, "procrustes dimensions disagree");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      source.transpose() * target, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

double procrustes_residual(const Eigen::MatrixXd& source,
                           const Eigen::MatrixXd& target) {
  return (source * procrustes_align(source, target) - target).norm();
}

}  // namespace sbm_eb
