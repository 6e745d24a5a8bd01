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

#include "sbm_eb/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "sbm_eb/errors.hpp"
#include "sbm_eb/linalg.hpp"
#include "sbm_eb/spectral.hpp"

namespace sbm_eb {
namespace {

Eigen::VectorXd default_theta(Eigen::VectorXd theta, int K) {
  if (theta.size() == 0) return Eigen::VectorXd::Ones(K);
  if (theta.size() != K || (theta.array() <= 0.0).any()) {
    throw Error(Errc::kInvalidArgument,
                "theta must have K strictly positive entries");
  }
  return theta;
}

void check_gaussian(const Eigen::MatrixXd& means,
                    const std::vector<Eigen::MatrixXd>& covs) {
  if (static_cast<Eigen::Index>(covs.size()) != means.rows()) {
    throw Error(Errc::kInvalidArgument, "one covariance per component needed");
  }
  for (const auto& c : covs) {
    if (c.rows() != means.cols() || !is_symmetric(c, 1e-10 * (1.0 + c.norm()))) {
      throw Error(Errc::kInvalidArgument,
                  "covariances must be symmetric d x d");
    }
  }
}

std::vector<Eigen::MatrixXd> factors_of(
    const std::vector<Eigen::MatrixXd>& covs) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(covs.size());
  for (const auto& c : covs) out.push_back(covariance_factor(c));
  return out;
}

Eigen::MatrixXd draw_unit_ball_rows(int K, int d, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd nu(K, d);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < d; ++j) nu(k, j) = normal(rng);
    const double norm = nu.row(k).norm();
    const double radius = std::pow(uniform01(rng), 1.0 / d);
    nu.row(k) *= norm > 0 ? radius / norm : 0.0;
  }
  return nu;
}

void sort_rows_by_norm(Eigen::MatrixXd& nu) {
  const Eigen::Index K = nu.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd sq = nu.rowwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return sq(a) < sq(b); });
  Eigen::MatrixXd sorted(K, nu.cols());
  for (Eigen::Index k = 0; k < K; ++k) sorted.row(k) = nu.row(order[k]);
  nu = std::move(sorted);
}

}  // namespace

const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kExact: return "exact";
    case ModelKind::kGold: return "gold";
    case ModelKind::kAsge: return "asge";
    case ModelKind::kFlat: return "flat";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  if (name == "exact") return ModelKind::kExact;
  if (name == "gold") return ModelKind::kGold;
  if (name == "asge") return ModelKind::kAsge;
  if (name == "flat") return ModelKind::kFlat;
  throw Error(Errc::kConfigError, "unknown model '" + name + "'");
}

const char* constraint_name(ConstraintMode mode) {
  return mode == ConstraintMode::kHomophilic ? "homophilic" : "box";
}

ConstraintMode parse_constraint_mode(const std::string& name) {
  if (name == "homophilic") return ConstraintMode::kHomophilic;
  if (name == "box") return ConstraintMode::kBox;
  throw Error(Errc::kConfigError, "unknown constraint mode '" + name + "'");
}

bool constraint_check(const Eigen::MatrixXd& nu, ConstraintMode mode) {
  const Eigen::Index K = nu.rows();
  const Eigen::MatrixXd gram = nu * nu.transpose();
  for (Eigen::Index i = 0; i < K; ++i) {
    for (Eigen::Index j = 0; j < K; ++j) {
      const double g = gram(i, j);
      if (g < -kConstraintTol || g > 1.0 + kConstraintTol) return false;
      if (mode == ConstraintMode::kHomophilic && g > gram(i, i) + kConstraintTol) {
        return false;
      }
    }
    if (mode == ConstraintMode::kHomophilic && i > 0 &&
        gram(i, i) < gram(i - 1, i - 1) - kConstraintTol) {
      return false;
    }
  }
  return true;
}

PriorSpec::PriorSpec(Params params, int K, int d, ConstraintMode mode,
                     Eigen::VectorXd theta)
    : params_(std::move(params)),
      K_(K),
      d_(d),
      mode_(mode),
      theta_(default_theta(std::move(theta), K)) {}

PriorSpec PriorSpec::exact(Eigen::MatrixXd nu, Eigen::VectorXd rho,
                           ConstraintMode mode) {
  validate_block_proportions(rho);
  if (rho.size() != nu.rows()) {
    throw Error(Errc::kInvalidArgument, "nu and rho dimensions disagree");
  }
  const int K = static_cast<int>(nu.rows());
  const int d = static_cast<int>(nu.cols());
  return PriorSpec(ExactParams{std::move(nu), std::move(rho)}, K, d, mode, {});
}

PriorSpec PriorSpec::gold(Eigen::MatrixXd nu_star,
                          std::vector<Eigen::MatrixXd> sigma_star,
                          Eigen::VectorXd rho, ConstraintMode mode) {
  check_gaussian(nu_star, sigma_star);
  validate_block_proportions(rho);
  const int K = static_cast<int>(nu_star.rows());
  const int d = static_cast<int>(nu_star.cols());
  auto factors = factors_of(sigma_star);
  PriorSpec p(GoldParams{std::move(nu_star), std::move(sigma_star),
                         std::move(rho)},
              K, d, mode, {});
  p.factors_ = std::move(factors);
  return p;
}

PriorSpec PriorSpec::asge(Eigen::MatrixXd mu_hat,
                          std::vector<Eigen::MatrixXd> sigma_hat,
                          ConstraintMode mode, Eigen::VectorXd theta) {
  check_gaussian(mu_hat, sigma_hat);
  const int K = static_cast<int>(mu_hat.rows());
  const int d = static_cast<int>(mu_hat.cols());
  auto factors = factors_of(sigma_hat);
  PriorSpec p(AsgeParams{std::move(mu_hat), std::move(sigma_hat)}, K, d, mode,
              std::move(theta));
  p.factors_ = std::move(factors);
  return p;
}

PriorSpec PriorSpec::flat(int K, int d, ConstraintMode mode,
                          Eigen::VectorXd theta) {
  if (K < 1 || d < 1) throw Error(Errc::kInvalidArgument, "K, d must be >= 1");
  return PriorSpec(FlatParams{K, d}, K, d, mode, std::move(theta));
}

PriorSpec PriorSpec::gold_for(const SbmParams& truth, std::size_t n,
                              ConstraintMode mode) {
  TheoreticalMixture mix = TheoreticalMixture::from(truth.nu, truth.rho);
  std::vector<Eigen::MatrixXd> scaled;
  for (const auto& s : mix.sigmas) scaled.push_back(s / static_cast<double>(n));
  return gold(mix.nu, std::move(scaled), truth.rho, mode);
}

ModelKind PriorSpec::kind() const {
  return static_cast<ModelKind>(params_.index());
}

bool PriorSpec::known_rho() const {
  return kind() == ModelKind::kExact || kind() == ModelKind::kGold;
}

const Eigen::VectorXd& PriorSpec::rho() const {
  if (const auto* e = std::get_if<ExactParams>(&params_)) return e->rho;
  if (const auto* g = std::get_if<GoldParams>(&params_)) return g->rho;
  throw Error(Errc::kInvalidArgument, "prior has no known rho");
}

const Eigen::MatrixXd& PriorSpec::gaussian_means() const {
  if (const auto* g = std::get_if<GoldParams>(&params_)) return g->nu_star;
  if (const auto* a = std::get_if<AsgeParams>(&params_)) return a->mu_hat;
  throw Error(Errc::kInvalidArgument, "prior is not Gaussian");
}

PriorDraw draw_truncated_gaussian(const Eigen::MatrixXd& means,
                                  const std::vector<Eigen::MatrixXd>& factors,
                                  ConstraintMode mode, Rng& rng,
                                  std::size_t budget) {
  std::normal_distribution<double> normal;
  const Eigen::Index K = means.rows();
  const Eigen::Index d = means.cols();
  Eigen::VectorXd z(d);
  PriorDraw draw;
  draw.nu.resize(K, d);
  while (draw.attempts < budget) {
    ++draw.attempts;
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index j = 0; j < d; ++j) z(j) = normal(rng);
      draw.nu.row(k) = means.row(k) + (factors[k] * z).transpose();
    }
    if (constraint_check(draw.nu, mode)) return draw;
  }
  throw Error(Errc::kRejectionBudgetExhausted,
              "no prior draw satisfied the constraint set");
}

PriorDraw draw_prior_nu(const PriorSpec& prior, Rng& rng, std::size_t budget) {
  switch (prior.kind()) {
    case ModelKind::kExact:
      throw Error(Errc::kInvalidArgument, "the exact model has no nu prior");
    case ModelKind::kGold:
    case ModelKind::kAsge:
      return draw_truncated_gaussian(prior.gaussian_means(),
                                     prior.gaussian_factors(),
                                     prior.constraint_mode(), rng, budget);
    case ModelKind::kFlat:
      break;
  }
  PriorDraw draw;
  while (draw.attempts < budget) {
    ++draw.attempts;
    draw.nu = draw_unit_ball_rows(prior.K(), prior.d(), rng);
    if (prior.constraint_mode() == ConstraintMode::kHomophilic) {
      sort_rows_by_norm(draw.nu);
    }
    if (constraint_check(draw.nu, prior.constraint_mode())) {
      for (Eigen::Index c = 0; c < draw.nu.cols(); ++c) {
        if (draw.nu.col(c).sum() < 0.0) draw.nu.col(c) *= -1.0;
      }
      return draw;
    }
  }
  throw Error(Errc::kRejectionBudgetExhausted,
              "no flat draw satisfied the constraint set");
}

}  // namespace sbm_eb
