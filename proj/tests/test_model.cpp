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
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "sbm_eb/errors.hpp"
#include "sbm_eb/io.hpp"
#include "sbm_eb/model.hpp"
#include "sbm_eb/spectral.hpp"

using namespace sbm_eb;

namespace {

Eigen::MatrixXd two_block_B() {
  Eigen::MatrixXd B(2, 2);
  B << 0.42, 0.42, 0.42, 0.5;
  return B;
}

Eigen::VectorXd two_block_rho() {
  Eigen::VectorXd rho(2);
  rho << 0.6, 0.4;
  return rho;
}

bool is_valid_graph(const AdjacencyMatrix& A) {
  for (std::size_t i = 0; i < A.size(); ++i) {
    if (A.has_edge(i, i)) return false;
    for (std::size_t j = 0; j < A.size(); ++j) {
      if (A.has_edge(i, j) != A.has_edge(j, i)) return false;
      const auto v = A.row(i)[j];
      if (v != 0 && v != 1) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("adjacency matrix mutators keep the graph symmetric and hollow") {
  AdjacencyMatrix A(4);
  CHECK(A.add_edge(0, 1));
  CHECK_FALSE(A.add_edge(1, 0));
  CHECK(A.add_edge(2, 3));
  CHECK_THROWS_AS(A.add_edge(2, 2), Error);
  CHECK(A.edge_count() == 2);
  CHECK(A.degrees() == std::vector<std::size_t>{1, 1, 1, 1});
  CHECK(is_valid_graph(A));
  CHECK_FALSE(A.is_connected());
  CHECK(A.density() == doctest::Approx(2.0 / 6.0));

  std::vector<std::size_t> keep{0, 1};
  const AdjacencyMatrix sub = A.induced_subgraph(keep);
  CHECK(sub.size() == 2);
  CHECK(sub.has_edge(0, 1));
  CHECK(sub.is_connected());
}

TEST_CASE("from_edges collapses duplicates") {
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 0}, {1, 2}};
  std::size_t dup = 0;
  const AdjacencyMatrix A = AdjacencyMatrix::from_edges(3, edges, &dup);
  CHECK(dup == 1);
  CHECK(A.edge_count() == 2);
}

TEST_CASE("latent positions factor B") {
  SUBCASE("two-block model matches the published positions up to rotation") {
    const Eigen::MatrixXd nu = latent_positions_from_B(two_block_B(), 2);
    CHECK((nu * nu.transpose() - two_block_B()).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::MatrixXd published(2, 2);
    published << 0.5489, 0.3446, 0.3984, 0.5842;
    CHECK(procrustes_residual(nu, published) < 1e-3);
    // Largest-magnitude entry of each column is positive.
    for (Eigen::Index c = 0; c < 2; ++c) {
      Eigen::Index r;
      nu.col(c).cwiseAbs().maxCoeff(&r);
      CHECK(nu(r, c) > 0);
    }
  }
  SUBCASE("identity") {
    // Repeated eigenvalue: any column order is a valid factor.
    const Eigen::MatrixXd nu = latent_positions_from_B(Eigen::MatrixXd::Identity(2, 2), 2);
    const Eigen::MatrixXd a = nu.cwiseAbs();
    const Eigen::MatrixXd swapped = a.rowwise().reverse();
    CHECK(std::min((a - Eigen::MatrixXd::Identity(2, 2)).norm(),
                   (swapped - Eigen::MatrixXd::Identity(2, 2)).norm()) < 1e-12);
  }
  SUBCASE("three-block model") {
    Eigen::MatrixXd B(3, 3);
    B << 0.6, 0.4, 0.4, 0.4, 0.6, 0.4, 0.4, 0.4, 0.6;
    const Eigen::MatrixXd nu = latent_positions_from_B(B, 3);
    CHECK((nu * nu.transpose() - B).cwiseAbs().maxCoeff() < 1e-8);
    Eigen::MatrixXd published(3, 3);
    published << 0.68, 0.20, -0.30, 0.68, -0.36, -0.02, 0.68, 0.16, 0.33;
    CHECK(procrustes_residual(nu, published) < 0.02);
  }
  SUBCASE("rank below d pads with zeros") {
    Eigen::MatrixXd B = Eigen::MatrixXd::Constant(2, 2, 0.25);
    const Eigen::MatrixXd nu = latent_positions_from_B(B, 2);
    CHECK((nu * nu.transpose() - B).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("errors") {
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 0.1, 0.5, 0.5, 0.1;
    try {
      latent_positions_from_B(indefinite, 2);
      FAIL("expected NotPSD");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kNotPsd);
    }
    try {
      latent_positions_from_B(two_block_B(), 1);
      FAIL("expected RankExceedsD");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kRankExceedsD);
    }
  }
}

TEST_CASE("factoring nu nu^T recovers nu up to an orthogonal transform") {
  Rng rng(11);
  std::uniform_real_distribution<double> u(0.1, 0.6);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd nu(3, 2);
    for (Eigen::Index i = 0; i < nu.size(); ++i) nu.data()[i] = u(rng);
    const Eigen::MatrixXd back = latent_positions_from_B(nu * nu.transpose(), 2);
    CHECK(procrustes_residual(back, nu) < 1e-8);
  }
}

TEST_CASE("SbmParams validation") {
  CHECK_NOTHROW(SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2));
  Eigen::VectorXd bad_rho(2);
  bad_rho << 0.7, 0.4;
  CHECK_THROWS_AS(SbmParams::from_block_matrix(two_block_B(), bad_rho, 2), Error);
  Eigen::MatrixXd out_of_range = two_block_B();
  out_of_range(1, 1) = 1.5;
  CHECK_THROWS_AS(SbmParams::from_block_matrix(out_of_range, two_block_rho(), 2), Error);
  Eigen::MatrixXd repeated = Eigen::MatrixXd::Constant(2, 2, 0.3);
  CHECK_THROWS_AS(SbmParams::from_block_matrix(repeated, two_block_rho(), 2), Error);
  const SbmParams p = SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2);
  // 0.36 * 0.42 + 2 * 0.24 * 0.42 + 0.16 * 0.5
  CHECK(p.expected_density() == doctest::Approx(0.4328).epsilon(1e-12));
}

TEST_CASE("block memberships") {
  Rng rng(1);
  Eigen::VectorXd point(2);
  point << 1.0, 0.0;
  CHECK(sample_block_memberships(5, point, rng) == std::vector<int>(5, 0));

  const auto tau = sample_block_memberships(100000, two_block_rho(), rng);
  const double frac0 =
      static_cast<double>(std::count(tau.begin(), tau.end(), 0)) / tau.size();
  CHECK(std::abs(frac0 - 0.6) < 0.01);

  Eigen::VectorXd thirds = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  const auto tau3 = sample_block_memberships(300000, thirds, rng);
  for (int k = 0; k < 3; ++k) {
    const double f =
        static_cast<double>(std::count(tau3.begin(), tau3.end(), k)) / tau3.size();
    CHECK(std::abs(f - 1.0 / 3.0) < 0.01);
  }
}

TEST_CASE("point-mass latents reproduce their centres") {
  Rng rng(2);
  const SbmParams p = SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2);
  LatentSampler s{LatentKind::kPointMass, p.nu, p.rho, 0.0};
  const LatentMatrix lm = sample_latents(200, s, rng);
  for (Eigen::Index i = 0; i < lm.X.rows(); ++i) {
    CHECK(lm.X.row(i) == p.nu.row(lm.tau_true[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("random dot product graphs") {
  Rng rng(3);
  SUBCASE("zero latents give the empty graph") {
    const AdjacencyMatrix A = sample_rdpg(Eigen::MatrixXd::Zero(20, 2), rng);
    CHECK(A.edge_count() == 0);
  }
  SUBCASE("unit dot products give the complete graph") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(20, 2);
    X.col(0).setOnes();
    const AdjacencyMatrix A = sample_rdpg(X, rng);
    CHECK(A.edge_count() == 190);
  }
  SUBCASE("out-of-range dot products") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Constant(3, 1, 1.2);
    try {
      sample_rdpg(X, rng);
      FAIL("expected ProbabilityOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kProbabilityOutOfRange);
    }
    const AdjacencyMatrix A = sample_rdpg(X, rng, OutOfRangePolicy::kClamp);
    CHECK(A.edge_count() == 3);
  }
  SUBCASE("two-block density") {
    const SbmParams p = SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2);
    const auto tau = sample_block_memberships(1000, p.rho, rng);
    const AdjacencyMatrix A = sample_rdpg(latent_matrix(p.nu, tau), rng);
    CHECK(is_valid_graph(A));
    CHECK(std::abs(A.density() - 0.4328) < 0.01);
  }
}

TEST_CASE("mean density over seeds is within three standard errors") {
  const SbmParams p = SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2);
  std::vector<double> dens;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(99, {seed}));
    const auto tau = sample_block_memberships(200, p.rho, rng);
    dens.push_back(sample_rdpg(latent_matrix(p.nu, tau), rng).density());
  }
  const double mean = std::accumulate(dens.begin(), dens.end(), 0.0) / 50.0;
  double ss = 0.0;
  for (double d : dens) ss += (d - mean) * (d - mean);
  const double se = std::sqrt(ss / 49.0 / 50.0);
  CHECK(std::abs(mean - p.expected_density()) < 3.0 * se);
}

TEST_CASE("Dirichlet mixture latents") {
  Rng rng(4);
  SUBCASE("rows lie in the simplex") {
    Eigen::MatrixXd nu(2, 3);
    nu << 0.2, 0.3, 0.5, 0.6, 0.3, 0.1;
    LatentSampler s{LatentKind::kDirichletMixture, nu, two_block_rho(), 5.0};
    const LatentMatrix lm = sample_dirichlet_mixture_latents(500, s, rng);
    for (Eigen::Index i = 0; i < lm.X.rows(); ++i) {
      CHECK(std::abs(lm.X.row(i).sum() - 1.0) < 1e-12);
      CHECK(lm.X.row(i).minCoeff() >= 0.0);
    }
  }
  SUBCASE("large concentration approaches the centres") {
    Eigen::MatrixXd nu(2, 2);
    nu << 0.6, 0.4, 0.3, 0.7;
    LatentSampler s{LatentKind::kDirichletMixture, nu, two_block_rho(), 1e6};
    const LatentMatrix lm = sample_dirichlet_mixture_latents(2000, s, rng);
    double dist = 0.0;
    for (Eigen::Index i = 0; i < lm.X.rows(); ++i) {
      dist += (lm.X.row(i) - nu.row(lm.tau_true[static_cast<std::size_t>(i)])).norm();
    }
    CHECK(dist / 2000.0 < 0.01);
  }
  SUBCASE("Dirichlet(1,1) is uniform on the segment") {
    Eigen::MatrixXd nu(1, 2);
    nu << 0.5, 0.5;
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    LatentSampler s{LatentKind::kDirichletMixture, nu, one, 2.0};
    const LatentMatrix lm = sample_dirichlet_mixture_latents(10000, s, rng);
    const Eigen::RowVectorXd mean = lm.X.colwise().mean();
    CHECK(std::abs(mean(0) - 0.5) < 0.02);
    CHECK(std::abs(mean(1) - 0.5) < 0.02);
  }
  SUBCASE("non-positive concentration") {
    Eigen::MatrixXd nu(1, 2);
    nu << 0.5, 0.0;
    LatentSampler s{LatentKind::kDirichletMixture, nu, Eigen::VectorXd::Ones(1), 2.0};
    try {
      sample_dirichlet_mixture_latents(10, s, rng);
      FAIL("expected InvalidConcentration");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kInvalidConcentration);
    }
  }
}

TEST_CASE("log likelihood closed forms") {
  Eigen::MatrixXd half(1, 1);
  half << std::sqrt(0.5);
  const std::vector<int> tau3(3, 0);
  CHECK(log_likelihood(AdjacencyMatrix(3), tau3, half) ==
        doctest::Approx(3.0 * std::log(0.5)).epsilon(1e-14));
  AdjacencyMatrix complete(3);
  complete.add_edge(0, 1);
  complete.add_edge(0, 2);
  complete.add_edge(1, 2);
  CHECK(log_likelihood(complete, tau3, half) ==
        doctest::Approx(-2.0794415416798).epsilon(1e-12));
}

TEST_CASE("log likelihood on a four-vertex graph matches six hand-summed terms") {
  AdjacencyMatrix A(4);
  A.add_edge(0, 1);
  A.add_edge(2, 3);
  const std::vector<int> tau{0, 0, 1, 1};
  const Eigen::MatrixXd nu = latent_positions_from_B(two_block_B(), 2);
  // (0,1): edge within block 1; (2,3): edge within block 2; four absent
  // cross-block pairs.
  const double hand = std::log(0.42) + std::log(0.5) + 4.0 * std::log(1.0 - 0.42);
  CHECK(std::abs(log_likelihood(A, tau, nu) - hand) < 1e-12);
}

TEST_CASE("log likelihood is invariant to relabelling blocks") {
  Rng rng(5);
  const SbmParams p = SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2);
  const auto tau = sample_block_memberships(60, p.rho, rng);
  const AdjacencyMatrix A = sample_rdpg(latent_matrix(p.nu, tau), rng);
  std::vector<int> swapped(tau);
  for (int& t : swapped) t = 1 - t;
  Eigen::MatrixXd nu_swapped = p.nu.colwise().reverse();
  nu_swapped = p.nu;
  nu_swapped.row(0) = p.nu.row(1);
  nu_swapped.row(1) = p.nu.row(0);
  CHECK(log_likelihood(A, tau, p.nu) ==
        doctest::Approx(log_likelihood(A, swapped, nu_swapped)).epsilon(1e-12));
}

TEST_CASE("probability clamping") {
  CHECK(clamp_probability(0.0) == kProbabilityFloor);
  CHECK(clamp_probability(1.0) == 1.0 - kProbabilityFloor);
  CHECK(clamp_probability(1.0 + 1e-12) == 1.0 - kProbabilityFloor);
  CHECK_THROWS_AS(clamp_probability(1.1), Error);
  CHECK_THROWS_AS(clamp_probability(std::nan("")), Error);
}

TEST_CASE("graph files") {
  SUBCASE("path graph") {
    std::istringstream in("3 2\n0 1\n1 2\n");
    const GraphReadResult g = read_graph(in);
    CHECK(g.graph.degrees() == std::vector<std::size_t>{1, 2, 1});
    CHECK(g.warnings.empty());
  }
  SUBCASE("duplicate edge collapses with a warning") {
    std::istringstream in("# comment\n3 3\n0 1\n1 0  # again\n1 2\n");
    const GraphReadResult g = read_graph(in);
    CHECK(g.graph.edge_count() == 2);
    CHECK(g.duplicate_edges == 1);
    CHECK_FALSE(g.warnings.empty());
  }
  SUBCASE("self loop") {
    std::istringstream in("3 1\n1 1\n");
    try {
      read_graph(in);
      FAIL("expected SelfLoopRejected");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kSelfLoopRejected);
    }
  }
  SUBCASE("parse errors carry the line number") {
    std::istringstream in("3 2\n0 1\n1 x\n");
    try {
      read_graph(in);
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kParseError);
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream out_of_range("3 1\n0 3\n");
    CHECK_THROWS_AS(read_graph(out_of_range), Error);
  }
  SUBCASE("round trip") {
    Rng rng(6);
    const AdjacencyMatrix A =
        sample_rdpg(Eigen::MatrixXd::Constant(30, 1, std::sqrt(0.3)), rng);
    std::stringstream s;
    write_graph(s, A);
    CHECK(read_graph(s).graph == A);
  }
}

TEST_CASE("label, matrix and parameter files") {
  std::stringstream labels;
  write_labels(labels, std::vector<int>{0, 2, 1});
  CHECK(labels.str() == "1\n3\n2\n");
  CHECK(read_labels(labels) == std::vector<int>{0, 2, 1});
  std::istringstream zero("1\n0\n");
  CHECK_THROWS_AS(read_labels(zero), Error);

  Eigen::MatrixXd m(2, 2);
  m << 1.0 / 3.0, -2.5e-17, 7.0, 0.1;
  std::stringstream ms;
  write_matrix(ms, m);
  CHECK(read_matrix(ms) == m);
  std::istringstream ragged("1 2\n3\n");
  CHECK_THROWS_AS(read_matrix(ragged), Error);

  const SbmParams p = SbmParams::from_block_matrix(two_block_B(), two_block_rho(), 2);
  std::stringstream ps;
  write_params(ps, p);
  const SbmParams back = read_params(ps);
  CHECK(back.nu == p.nu);
  CHECK(back.rho == p.rho);
}
