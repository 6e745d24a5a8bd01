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

// Priors on the latent positions nu for the four sampling schemes (Exact,
// Gold, ASGE, Flat), the constraint set they are truncated to, and prior
// sampling by rejection.

#ifndef SBM_EB_PRIOR_HPP_
#define SBM_EB_PRIOR_HPP_

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/model.hpp"
#include "sbm_eb/rng.hpp"

namespace sbm_eb {

enum class ModelKind { kExact, kGold, kAsge, kFlat };

// kHomophilic: 0 <= <nu_i,nu_j> <= <nu_i,nu_i> <= 1 for all i,j and
//              <nu_i,nu_i> non-decreasing in i.
// kBox:        0 <= <nu_i,nu_j> <= 1 for all i,j.
enum class ConstraintMode { kHomophilic, kBox };

const char* model_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);
const char* constraint_name(ConstraintMode mode);
ConstraintMode parse_constraint_mode(const std::string& name);

// Slack on the closed inequalities, so that points constructed exactly on
// the boundary (e.g. true parameters with <nu_1,nu_2> = <nu_1,nu_1>) pass.
inline constexpr double kConstraintTol = 1e-12;

bool constraint_check(const Eigen::MatrixXd& nu, ConstraintMode mode);

struct ExactParams {
  Eigen::MatrixXd nu;
  Eigen::VectorXd rho;
};

// Truncated Gaussian centred at the true latent positions with the limiting
// covariances scaled by 1/n. rho is known, as for Exact.
struct GoldParams {
  Eigen::MatrixXd nu_star;
  std::vector<Eigen::MatrixXd> sigma_star;
  Eigen::VectorXd rho;
};

// Truncated Gaussian mixture fitted to the spectral embedding.
struct AsgeParams {
  Eigen::MatrixXd mu_hat;
  std::vector<Eigen::MatrixXd> sigma_hat;
};

// Uniform on the constraint set.
struct FlatParams {
  int K = 0;
  int d = 0;
};

class PriorSpec {
 public:
  using Params = std::variant<ExactParams, GoldParams, AsgeParams, FlatParams>;

  static PriorSpec exact(Eigen::MatrixXd nu, Eigen::VectorXd rho,
                         ConstraintMode mode = ConstraintMode::kHomophilic);
  static PriorSpec gold(Eigen::MatrixXd nu_star,
                        std::vector<Eigen::MatrixXd> sigma_star,
                        Eigen::VectorXd rho,
                        ConstraintMode mode = ConstraintMode::kHomophilic);
  static PriorSpec asge(Eigen::MatrixXd mu_hat,
                        std::vector<Eigen::MatrixXd> sigma_hat,
                        ConstraintMode mode = ConstraintMode::kHomophilic,
                        Eigen::VectorXd theta = {});
  static PriorSpec flat(int K, int d,
                        ConstraintMode mode = ConstraintMode::kHomophilic,
                        Eigen::VectorXd theta = {});

  // Gold prior for graphs on n vertices: nu* is the UPCA representative of
  // the true latent positions, Sigma*_k = Sigma_k / n.
  static PriorSpec gold_for(const SbmParams& truth, std::size_t n,
                            ConstraintMode mode = ConstraintMode::kHomophilic);

  ModelKind kind() const;
  int K() const { return K_; }
  int d() const { return d_; }
  const Eigen::VectorXd& theta() const { return theta_; }
  ConstraintMode constraint_mode() const { return mode_; }
  const Params& params() const { return params_; }

  // Exact and Gold use multinomial(rho) block weights; ASGE and Flat use the
  // Dirichlet(theta)-marginalized weights.
  bool known_rho() const;
  const Eigen::VectorXd& rho() const;

  // Gaussian centres and Cholesky-type factors (Gold, ASGE only).
  const Eigen::MatrixXd& gaussian_means() const;
  const std::vector<Eigen::MatrixXd>& gaussian_factors() const {
    return factors_;
  }

 private:
  PriorSpec(Params params, int K, int d, ConstraintMode mode,
            Eigen::VectorXd theta);

  Params params_;
  int K_ = 0;
  int d_ = 0;
  ConstraintMode mode_ = ConstraintMode::kHomophilic;
  Eigen::VectorXd theta_;
  std::vector<Eigen::MatrixXd> factors_;
};

inline constexpr std::size_t kRejectionBudget = 1'000'000;

struct PriorDraw {
  Eigen::MatrixXd nu;
  std::size_t attempts = 0;  // raw draws consumed, including the accepted one
};

// One draw from the (truncated) prior. Gaussian priors are truncated to the
// constraint set by rejection. The flat prior draws each row uniformly from
// the unit ball (which contains the constraint set), sorts rows by norm in
// homophilic mode, rejects points outside the set, and finally flips column
// signs so that every column sum is non-negative; the last two steps are
// measure-preserving relabelings under which the likelihood is invariant.
// Throws RejectionBudgetExhausted; not defined for Exact.
PriorDraw draw_prior_nu(const PriorSpec& prior, Rng& rng,
                        std::size_t budget = kRejectionBudget);

inline Eigen::MatrixXd sample_prior_nu(const PriorSpec& prior, Rng& rng) {
  return draw_prior_nu(prior, rng).nu;
}

// Draws from the truncated Gaussian N(means_k, cov_k) product; used to
// initialize the flat model from the ASGE prior.
PriorDraw draw_truncated_gaussian(const Eigen::MatrixXd& means,
                                  const std::vector<Eigen::MatrixXd>& factors,
                                  ConstraintMode mode, Rng& rng,
                                  std::size_t budget = kRejectionBudget);

}  // namespace sbm_eb

#endif  // SBM_EB_PRIOR_HPP_
