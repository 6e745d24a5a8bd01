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

// Replicate runner for the simulation studies and the bootstrap study on an
// observed graph.
//
// A replicate samples a graph, embeds it, fits the mixture, builds the
// priors, runs `chains` chains per sampling model and scores the posterior
// mode estimate against the generating labels. Errors are misassignment
// fractions minimized over label permutations.

#ifndef SBM_EB_EXPERIMENT_HPP_
#define SBM_EB_EXPERIMENT_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/config.hpp"
#include "sbm_eb/gmm.hpp"
#include "sbm_eb/graph.hpp"
#include "sbm_eb/mcmc.hpp"
#include "sbm_eb/model.hpp"
#include "sbm_eb/prior.hpp"

namespace sbm_eb {

enum class GeneratorKind { kSbm, kDirichletRdpg, kSparseSbm };

const char* generator_name(GeneratorKind kind);
GeneratorKind parse_generator_kind(const std::string& name);

// "gmm" is the mixture's hard labeling; the rest are posterior samplers.
inline constexpr const char* kGmmModel = "gmm";

struct McmcSettings {
  std::size_t iters = 10'000;
  std::size_t chains = 2;
  std::size_t thin = 1;
  std::optional<std::size_t> burn_in;  // empty: Gelman-Rubin rule
  double rhat_threshold = 1.1;
  double burn_in_fallback = 0.2;  // fraction of iters if never converged
};

struct ExperimentConfig {
  std::string name = "experiment";
  GeneratorKind generator = GeneratorKind::kSbm;
  Eigen::MatrixXd B;
  Eigen::VectorXd rho;
  Eigen::MatrixXd nu;  // optional; Dirichlet centers
  double r = 100.0;
  std::vector<std::size_t> n_values{500};
  std::size_t replicates = 100;
  std::vector<std::string> models{"exact", "gold", "asge", "flat", "gmm"};
  McmcSettings mcmc;
  int d = 2;
  int K = 2;
  std::uint64_t seed = 1;
  ConstraintMode constraint_mode = ConstraintMode::kHomophilic;
  GmmOptions gmm;

  // Throws ConfigError.
  void validate() const;
  // Point-mass parameters at a given n (B / sqrt(n) for sparse_sbm).
  SbmParams truth_at(std::size_t n) const;
};

ExperimentConfig experiment_config_from(const KeyValueConfig& kv);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct WikiConfig {
  std::string name = "wiki";
  std::filesystem::path graph_path;
  std::filesystem::path labels_path;
  std::size_t n_per_class = 100;
  std::size_t bootstrap_B = 200;
  int d = 3;
  int K = 3;
  std::uint64_t seed = 1;
  std::vector<std::string> models{"asge", "flat", "gmm"};
  McmcSettings mcmc;
  ConstraintMode constraint_mode = ConstraintMode::kBox;
  GmmOptions gmm;

  void validate() const;
};

// Relative paths in the file are resolved against `base_dir`.
WikiConfig wiki_config_from(const KeyValueConfig& kv,
                            const std::filesystem::path& base_dir = {});
WikiConfig load_wiki_config(const std::filesystem::path& path);

struct ModelOutcome {
  std::string model;
  double error = 0.0;
  double accept_rate = std::numeric_limits<double>::quiet_NaN();
  double rhat = std::numeric_limits<double>::quiet_NaN();
  std::size_t burn_in = 0;
  bool converged = false;
};

struct ReplicateResult {
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::vector<ModelOutcome> outcomes;
  std::optional<std::string> failure;
  std::vector<std::string> notes;

  const ModelOutcome* outcome(const std::string& model) const;
};

// Burn-in (fixed, Gelman-Rubin rule on the misassignment series, or the
// fallback fraction), post-burn-in R-hat, pooled acceptance rate and the
// error of the posterior mode estimate. Uses each trace's misassign_series
// when present, otherwise scores the stored samples.
ModelOutcome summarize_chains(std::span<const ChainTrace> traces,
                              std::span<const int> truth, int K,
                              const std::string& model,
                              const McmcSettings& mcmc);

struct PipelineOptions {
  int d = 2;
  int K = 2;
  std::vector<std::string> models;
  McmcSettings mcmc;
  ConstraintMode constraint_mode = ConstraintMode::kHomophilic;
  GmmOptions gmm;
};

// Embedding, mixture fit, priors, chains and scoring for one observed graph.
// `truth_params` is required by the exact and gold models.
std::vector<ModelOutcome> run_pipeline(
    const AdjacencyMatrix& A, std::span<const int> truth,
    const PipelineOptions& options,
    const std::optional<SbmParams>& truth_params, std::uint64_t seed);

// Permutation taking mixture label j to reference block perm[j], chosen to
// match the Gram matrices of the means and the reference positions (both are
// invariant to the rotation the embedding leaves free).
std::vector<int> align_by_gram(const Eigen::MatrixXd& means,
                               const Eigen::MatrixXd& reference);

// Graph and generating labels for replicate `rep` at size n.
struct SimulatedGraph {
  AdjacencyMatrix graph;
  std::vector<int> labels;
};
SimulatedGraph simulate_graph(const ExperimentConfig& config, std::size_t n,
                              std::uint64_t seed);

ReplicateResult run_replicate(const ExperimentConfig& config, std::size_t n,
                              std::size_t rep);

struct ExperimentResult {
  std::string name;
  std::vector<std::string> models;
  std::vector<ReplicateResult> replicates;  // sorted by (n, replicate)

  std::vector<std::size_t> n_values() const;
  std::vector<double> errors(std::size_t n, const std::string& model) const;
  // Errors of two models over replicates where both succeeded.
  std::pair<std::vector<double>, std::vector<double>> paired_errors(
      std::size_t n, const std::string& a, const std::string& b) const;
};

using ProgressFn = std::function<void(const ReplicateResult&)>;

// Worker count: SBM_EB_THREADS if set and positive, else the hardware
// concurrency.
std::size_t worker_threads();

// Runs fn(0..count-1) on at most `threads` workers.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::size_t threads = 0,
                                const ProgressFn& progress = {});

struct WikiData {
  AdjacencyMatrix graph;      // isolates removed
  std::vector<int> labels;    // 0-based
  std::vector<std::size_t> class_sizes;
  std::size_t isolates_removed = 0;
  Eigen::MatrixXd X_hat;
};

WikiData prepare_wiki_data(const WikiConfig& config);

ExperimentResult run_wiki_bootstrap(const WikiConfig& config,
                                    std::size_t threads = 0,
                                    const ProgressFn& progress = {});
ExperimentResult run_wiki_bootstrap(const WikiConfig& config,
                                    const WikiData& data,
                                    std::size_t threads = 0,
                                    const ProgressFn& progress = {});

// Writes <name>_replicates.csv, <name>_summary.json, <name>_plot.csv and
// <name>_failures.txt into out_dir.
void write_reports(const ExperimentResult& result,
                   const std::filesystem::path& out_dir);

}  // namespace sbm_eb

#endif  // SBM_EB_EXPERIMENT_HPP_
