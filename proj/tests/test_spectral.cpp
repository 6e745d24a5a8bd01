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

#include <cmath>

#include "doctest.h"
#include "sbm_eb/errors.hpp"
#include "sbm_eb/linalg.hpp"
#include "sbm_eb/model.hpp"
#include "sbm_eb/spectral.hpp"

using namespace sbm_eb;

namespace {

Eigen::MatrixXd random_orthogonal(int d, Rng& rng) {
  std::normal_distribution<double> z;
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

SbmParams two_block() {
  Eigen::MatrixXd B(2, 2);
  B << 0.42, 0.42, 0.42, 0.5;
  Eigen::VectorXd rho(2);
  rho << 0.6, 0.4;
  return SbmParams::from_block_matrix(B, rho, 2);
}

}  // namespace

TEST_CASE("full eigendecomposition reconstructs symmetric matrices") {
  Rng rng(21);
  std::normal_distribution<double> z;
  for (int n : {3, 17, 60, 200}) {
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = z(rng);
    m = (0.5 * (m + m.transpose())).eval();
    const SymmetricEigen e = symmetric_eigen(m);
    const Eigen::MatrixXd back =
        e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((back - m).norm() / m.norm() < 1e-8);
    for (Eigen::Index k = 1; k < n; ++k) CHECK(e.values(k - 1) >= e.values(k));

    const SymmetricEigen top = top_symmetric_eigen(m, 3);
    CHECK((top.values - e.values.head(3)).cwiseAbs().maxCoeff() < 1e-10);
    const Eigen::MatrixXd gram = top.vectors.transpose() * top.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-10);
  }
}

TEST_CASE("single-edge graph embeds at 1/sqrt(2)") {
  AdjacencyMatrix A(2);
  A.add_edge(0, 1);
  const EmbeddedPoints e = adjacency_spectral_embedding(A, 1);
  CHECK(e.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(std::abs(e.X_hat(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(e.X_hat(1, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  try {
    adjacency_spectral_embedding(A, 2);
    FAIL("expected InsufficientPositiveSpectrum");
  } catch (const Error& err) {
    CHECK(err.code() == Errc::kInsufficientPositiveSpectrum);
  }
}

TEST_CASE("noiseless embedding recovers the latent positions") {
  Rng rng(22);
  const SbmParams p = two_block();
  const auto tau = sample_block_memberships(300, p.rho, rng);
  const Eigen::MatrixXd X = latent_matrix(p.nu, tau);
  const EmbeddedPoints e = spectral_embedding(X * X.transpose(), 2);
  CHECK(procrustes_residual(e.X_hat, X) < 1e-8);
  CHECK(e.eigenvalues(0) >= e.eigenvalues(1));
  CHECK(e.eigenvalues(1) > 0.0);
}

TEST_CASE("uncentered principal components") {
  Rng rng(23);
  SUBCASE("orthogonal columns are a fixed point up to sign") {
    Eigen::MatrixXd X(4, 2);
    X << 1, 0, 0, 2, 0, 0, 0, 0;
    const Eigen::MatrixXd t = upca(X);
    CHECK((t * t.transpose() - X * X.transpose()).norm() < 1e-12);
    CHECK(std::abs(std::abs(t(1, 0)) - 2.0) < 1e-12);
    CHECK(std::abs(std::abs(t(0, 1)) - 1.0) < 1e-12);
  }
  SUBCASE("a repeated row stays repeated") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Ones(5, 1) * Eigen::RowVector2d(0.3, 0.4);
    const Eigen::MatrixXd t = upca(X);
    for (Eigen::Index i = 1; i < 5; ++i) CHECK((t.row(i) - t.row(0)).norm() < 1e-12);
  }
  SUBCASE("two-block positions with counts 600 and 400") {
    const SbmParams p = two_block();
    std::vector<int> tau(1000, 0);
    std::fill(tau.begin() + 600, tau.end(), 1);
    const Eigen::MatrixXd X = latent_matrix(p.nu, tau);
    const Eigen::MatrixXd t = upca(X);
    const Eigen::MatrixXd g = t.transpose() * t;
    CHECK(std::abs(g(0, 1)) < 1e-8);
    CHECK((t * t.transpose() - X * X.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXd basis = upca_basis(p.nu, p.rho);
    CHECK((basis.row(0) - t.row(0)).norm() < 1e-10);
  }
}

TEST_CASE("limiting covariance") {
  SUBCASE("scalar case") {
    Eigen::MatrixXd nu(1, 1);
    nu << std::sqrt(0.5);
    const Eigen::MatrixXd s = limiting_covariance(nu, Eigen::VectorXd::Ones(1), 0);
    CHECK(s(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  }
  SUBCASE("degenerate Bernoulli variance") {
    Eigen::MatrixXd nu = Eigen::MatrixXd::Identity(2, 2);
    Eigen::VectorXd rho(2);
    rho << 0.5, 0.5;
    CHECK(limiting_covariance(nu, rho, 0).norm() < 1e-15);
  }
  SUBCASE("symmetric positive semidefinite") {
    const SbmParams p = two_block();
    const TheoreticalMixture mix = TheoreticalMixture::from(p.nu, p.rho);
    for (const auto& s : mix.sigmas) {
      CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(symmetric_eigen(s).values.minCoeff() > -1e-10);
    }
    CHECK(std::abs(mix.delta(0, 1)) < 1e-12);
  }
  SUBCASE("singular second moment") {
    Eigen::MatrixXd nu(2, 2);
    nu << 0.5, 0.0, 0.6, 0.0;
    Eigen::VectorXd rho(2);
    rho << 0.5, 0.5;
    try {
      limiting_covariance(nu, rho, 0);
      FAIL("expected SingularDelta");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kSingularDelta);
    }
  }
}

TEST_CASE("Procrustes alignment") {
  Rng rng(24);
  std::normal_distribution<double> z;
  Eigen::MatrixXd S(5, 2);
  for (Eigen::Index i = 0; i < S.size(); ++i) S.data()[i] = z(rng);

  CHECK((procrustes_align(S, S) - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);

  const Eigen::MatrixXd R = random_orthogonal(2, rng);
  CHECK((procrustes_align(S, S * R) - R).norm() < 1e-10);

  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd T(5, 2);
    for (Eigen::Index i = 0; i < T.size(); ++i) T.data()[i] = z(rng);
    const Eigen::MatrixXd Q = procrustes_align(S, T);
    CHECK((Q.transpose() * Q - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);
    const double best = (S * Q - T).norm();
    for (int k = 0; k < 100; ++k) {
      CHECK(best <= (S * random_orthogonal(2, rng) - T).norm() + 1e-12);
    }
  }
}

TEST_CASE("embedding residuals are centred at n = 4000") {
  Rng rng(25);
  const SbmParams p = two_block();
  const TheoreticalMixture mix = TheoreticalMixture::from(p.nu, p.rho);
  const std::size_t n = 4000;
  const auto tau = sample_block_memberships(n, p.rho, rng);
  const Eigen::MatrixXd X = latent_matrix(mix.nu, tau);
  const AdjacencyMatrix A = sample_rdpg(X, rng, OutOfRangePolicy::kClamp);
  const Eigen::MatrixXd Xh = adjacency_spectral_embedding(A, 2).X_hat;
  const Eigen::MatrixXd R =
      std::sqrt(static_cast<double>(n)) * (Xh * procrustes_align(Xh, X) - X);
  for (int k = 0; k < 2; ++k) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(2);
    Eigen::RowVectorXd sq = Eigen::RowVectorXd::Zero(2);
    double count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (tau[i] != k) continue;
      sum += R.row(static_cast<Eigen::Index>(i));
      sq += R.row(static_cast<Eigen::Index>(i)).array().square().matrix();
      count += 1;
    }
    const Eigen::RowVectorXd mean = sum / count;
    for (int c = 0; c < 2; ++c) {
      const double var = sq(c) / count - mean(c) * mean(c);
      CHECK(std::abs(mean(c)) < 4.0 * std::sqrt(var / count));
    }
  }
}
