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

#include "sbm_eb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "json.hpp"

#include "sbm_eb/errors.hpp"
#include "sbm_eb/evaluation.hpp"
#include "sbm_eb/io.hpp"
#include "sbm_eb/mcmc.hpp"
#include "sbm_eb/spectral.hpp"

namespace sbm_eb {
namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(Errc::kConfigError, what);
}

const std::vector<std::string>& known_models() {
  static const std::vector<std::string> models{"exact", "gold", "asge",
                                               "flat", kGmmModel};
  return models;
}

void validate_models(const std::vector<std::string>& models) {
  if (models.empty()) config_error("models must not be empty");
  for (const auto& m : models) {
    if (std::find(known_models().begin(), known_models().end(), m) ==
        known_models().end()) {
      config_error("unknown model '" + m + "'");
    }
  }
}

void validate_mcmc(const McmcSettings& mcmc) {
  if (mcmc.chains < 2) config_error("chains must be >= 2");
  if (mcmc.iters < 1) config_error("iters must be >= 1");
  if (mcmc.thin < 1) config_error("thin must be >= 1");
  if (mcmc.burn_in && *mcmc.burn_in >= mcmc.iters) {
    config_error("burn_in must be < iters");
  }
  if (!(mcmc.burn_in_fallback >= 0.0 && mcmc.burn_in_fallback < 1.0)) {
    config_error("burn_in_fallback must lie in [0, 1)");
  }
  if (!(mcmc.rhat_threshold > 1.0)) config_error("rhat_threshold must be > 1");
}

McmcSettings mcmc_from(const KeyValueConfig& kv) {
  McmcSettings m;
  auto non_negative = [&](const std::string& key, long long fallback) {
    const long long v = kv.get_int(key, fallback);
    if (v < 0) config_error(key + " must be non-negative");
    return static_cast<std::size_t>(v);
  };
  m.iters = non_negative("iters", static_cast<long long>(m.iters));
  m.chains = non_negative("chains", static_cast<long long>(m.chains));
  m.thin = non_negative("thin", static_cast<long long>(m.thin));
  if (auto b = kv.find("burn_in"); b && *b != "auto") {
    m.burn_in = non_negative("burn_in", 0);
  }
  m.rhat_threshold = kv.get_double("rhat_threshold", m.rhat_threshold);
  m.burn_in_fallback = kv.get_double("burn_in_fallback", m.burn_in_fallback);
  return m;
}

GmmOptions gmm_from(const KeyValueConfig& kv) {
  GmmOptions g;
  g.restarts = static_cast<int>(kv.get_int("gmm_restarts", g.restarts));
  g.max_iters = static_cast<int>(kv.get_int("gmm_max_iters", g.max_iters));
  g.tol = kv.get_double("gmm_tol", g.tol);
  g.reg = kv.get_double("gmm_reg", g.reg);
  if (g.restarts < 1 || g.max_iters < 1 || !(g.tol > 0) || !(g.reg >= 0)) {
    config_error("invalid gmm options");
  }
  return g;
}

std::vector<std::string> models_from(const KeyValueConfig& kv,
                                     std::vector<std::string> fallback) {
  return kv.has("models") ? kv.get_strings("models") : fallback;
}

int model_index(const std::string& model) {
  const auto& all = known_models();
  return static_cast<int>(std::find(all.begin(), all.end(), model) -
                          all.begin());
}

ModelOutcome run_sampler(const AdjacencyMatrix& A, std::span<const int> truth,
                         const PriorSpec& prior, const std::string& model,
                         ChainInit init, const McmcSettings& mcmc,
                         std::uint64_t seed) {
  Schedule schedule;
  schedule.iters = mcmc.iters;
  schedule.thin = mcmc.thin;
  schedule.burn_in = mcmc.burn_in.value_or(0);

  std::vector<ChainTrace> traces;
  for (std::size_t c = 0; c < mcmc.chains; ++c) {
    traces.push_back(run_chain(A, prior, init, schedule, truth,
                               derive_seed(seed, {c})));
  }

  return summarize_chains(traces, truth, prior.K(), model, mcmc);
}

std::string failure_text(const Error& e) {
  return e.what();
}

}  // namespace

ModelOutcome summarize_chains(std::span<const ChainTrace> traces,
                              std::span<const int> truth, int K,
                              const std::string& model,
                              const McmcSettings& mcmc) {
  if (traces.size() < 2) {
    throw Error(Errc::kInsufficientLength, "need at least two chains");
  }
  // series[c][s] is the error of chain c at iteration iteration_of[s].
  std::vector<std::vector<double>> series;
  std::vector<std::size_t> iteration_of;
  const ChainTrace& first = traces.front();
  const bool full = !first.misassign_series.empty();
  for (const auto& t : traces) {
    if (full) {
      series.push_back(t.misassign_series);
    } else {
      std::vector<double> s;
      for (const auto& tau : t.tau_samples) {
        s.push_back(misassignment_rate(tau, truth, K).error);
      }
      series.push_back(std::move(s));
    }
    if (series.back().size() != series.front().size() ||
        t.sample_iterations.size() != first.sample_iterations.size()) {
      throw Error(Errc::kInvalidArgument, "chains differ in length");
    }
  }
  if (first.tau_samples.empty()) {
    throw Error(Errc::kInsufficientLength, "chains hold no samples");
  }
  if (full) {
    iteration_of.resize(series.front().size());
    std::iota(iteration_of.begin(), iteration_of.end(), std::size_t{0});
  } else {
    iteration_of = first.sample_iterations;
  }

  ModelOutcome out;
  out.model = model;
  std::size_t start = 0;
  if (mcmc.burn_in) {
    out.burn_in = *mcmc.burn_in;
  } else if (auto t = convergence_iteration(series, mcmc.rhat_threshold)) {
    out.burn_in = iteration_of[*t];
    out.converged = true;
  } else {
    out.burn_in = static_cast<std::size_t>(
        std::floor(mcmc.burn_in_fallback *
                   static_cast<double>(iteration_of.back())));
  }
  while (start + 1 < iteration_of.size() && iteration_of[start] < out.burn_in) {
    ++start;
  }

  std::vector<std::vector<double>> window;
  for (const auto& s : series) {
    window.emplace_back(s.begin() + static_cast<std::ptrdiff_t>(start),
                        s.end());
  }
  if (window.front().size() >= 2) out.rhat = gelman_rubin(window);
  if (mcmc.burn_in) out.converged = out.rhat < mcmc.rhat_threshold;

  std::size_t accepted = 0, proposed = 0;
  for (const auto& t : traces) {
    accepted += t.accept_count;
    proposed += t.propose_count;
  }
  if (proposed > 0) {
    out.accept_rate =
        static_cast<double>(accepted) / static_cast<double>(proposed);
  }

  std::size_t ref = 0;
  while (ref + 1 < first.sample_iterations.size() &&
         first.sample_iterations[ref] < out.burn_in) {
    ++ref;
  }
  const std::vector<int> estimate =
      posterior_tau_estimate(traces, out.burn_in, first.tau_samples[ref]);
  out.error = misassignment_rate(estimate, truth, K).error;
  return out;
}

std::vector<int> align_by_gram(const Eigen::MatrixXd& means,
                               const Eigen::MatrixXd& reference) {
  const int K = static_cast<int>(means.rows());
  const Eigen::MatrixXd target = reference * reference.transpose();
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    // Label j is placed at block perm[j].
    Eigen::MatrixXd placed(K, means.cols());
    for (int j = 0; j < K; ++j) placed.row(perm[static_cast<std::size_t>(j)]) = means.row(j);
    const double cost = (placed * placed.transpose() - target).norm();
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

const char* generator_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kSbm: return "sbm";
    case GeneratorKind::kDirichletRdpg: return "dirichlet_rdpg";
    case GeneratorKind::kSparseSbm: return "sparse_sbm";
  }
  return "?";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "sbm") return GeneratorKind::kSbm;
  if (name == "dirichlet_rdpg") return GeneratorKind::kDirichletRdpg;
  if (name == "sparse_sbm") return GeneratorKind::kSparseSbm;
  config_error("unknown generator '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (name.empty()) config_error("name must not be empty");
  if (replicates < 1) config_error("replicates must be >= 1");
  if (K < 1 || d < 1) config_error("K and d must be >= 1");
  if (n_values.empty()) config_error("n_values must not be empty");
  for (std::size_t n : n_values) {
    if (n < static_cast<std::size_t>(std::max(K, d)) + 1) {
      config_error("every n must exceed max(K, d)");
    }
  }
  validate_models(models);
  validate_mcmc(mcmc);
  if (rho.size() != K) config_error("rho must have K entries");
  if (generator == GeneratorKind::kDirichletRdpg) {
    if (nu.rows() != K || nu.cols() != d) {
      config_error("dirichlet_rdpg needs nu with K rows and d columns");
    }
    if (!(r > 0.0)) config_error("r must be positive");
    for (const auto& m : models) {
      if (m == "exact" || m == "gold") {
        config_error("model '" + m + "' needs point-mass latent positions");
      }
    }
  } else if (B.rows() != K || B.cols() != K) {
    config_error("B must be K x K");
  }
  try {
    if (generator == GeneratorKind::kDirichletRdpg) {
      if ((nu.array() <= 0.0).any()) {
        throw Error(Errc::kInvalidConcentration,
                    "Dirichlet centers must be positive");
      }
      validate_block_proportions(rho);
    } else {
      (void)truth_at(n_values.front());
    }
  } catch (const Error& e) {
    config_error(failure_text(e));
  }
}

SbmParams ExperimentConfig::truth_at(std::size_t n) const {
  if (generator == GeneratorKind::kDirichletRdpg) {
    return SbmParams::from_latent_positions(nu, rho);
  }
  Eigen::MatrixXd b = B;
  if (generator == GeneratorKind::kSparseSbm) {
    b /= std::sqrt(static_cast<double>(n));
  }
  SbmParams p = SbmParams::from_block_matrix(b, rho, d);
  if (nu.size() > 0 && generator == GeneratorKind::kSbm) {
    // Explicit latent positions are used as given when they reproduce B.
    if ((nu * nu.transpose() - b).cwiseAbs().maxCoeff() > 1e-8) {
      throw Error(Errc::kInvalidArgument, "nu nu^T does not reproduce B");
    }
    p.nu = nu;
  }
  return p;
}

ExperimentConfig experiment_config_from(const KeyValueConfig& kv) {
  ExperimentConfig c;
  c.name = kv.get_string("name", c.name);
  c.generator = parse_generator_kind(kv.get_string("generator", "sbm"));
  if (!kv.has("rho")) config_error("missing key 'rho'");
  const auto rho = kv.get_doubles("rho");
  c.rho = Eigen::Map<const Eigen::VectorXd>(rho.data(),
                                            static_cast<Eigen::Index>(rho.size()));
  if (kv.has("B")) c.B = kv.get_matrix("B");
  if (kv.has("nu")) c.nu = kv.get_matrix("nu");
  c.r = kv.get_double("r", c.r);
  c.K = static_cast<int>(kv.get_int("K", c.rho.size()));
  c.d = static_cast<int>(
      kv.get_int("d", c.nu.size() > 0 ? c.nu.cols() : c.K));
  if (c.generator == GeneratorKind::kDirichletRdpg && c.nu.size() == 0 &&
      c.B.size() > 0) {
    try {
      c.nu = latent_positions_from_B(c.B, c.d);
    } catch (const Error& e) {
      config_error(failure_text(e));
    }
  }
  if (c.generator != GeneratorKind::kDirichletRdpg && c.B.size() == 0) {
    config_error("missing key 'B'");
  }
  if (kv.has("n_values")) {
    c.n_values.clear();
    for (long long n : kv.get_ints("n_values")) {
      if (n < 1) config_error("n_values must be positive");
      c.n_values.push_back(static_cast<std::size_t>(n));
    }
  }
  const long long reps = kv.get_int("replicates", 100);
  if (reps < 1) config_error("replicates must be >= 1");
  c.replicates = static_cast<std::size_t>(reps);
  c.models = models_from(kv, c.models);
  c.mcmc = mcmc_from(kv);
  c.seed = kv.get_seed("seed", c.seed);
  c.constraint_mode = parse_constraint_mode(
      kv.get_string("constraint_mode", constraint_name(c.constraint_mode)));
  c.gmm = gmm_from(kv);
  kv.reject_unused();
  c.validate();
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return experiment_config_from(KeyValueConfig::load(path));
}

void WikiConfig::validate() const {
  if (name.empty()) config_error("name must not be empty");
  if (graph_path.empty() || labels_path.empty()) {
    config_error("graph_path and labels_path are required");
  }
  if (n_per_class < 1) config_error("n_per_class must be >= 1");
  if (bootstrap_B < 1) config_error("bootstrap_B must be >= 1");
  if (K < 1 || d < 1) config_error("K and d must be >= 1");
  validate_models(models);
  for (const auto& m : models) {
    if (m == "exact" || m == "gold") {
      config_error("model '" + m + "' needs known latent positions");
    }
  }
  validate_mcmc(mcmc);
}

WikiConfig wiki_config_from(const KeyValueConfig& kv,
                            const std::filesystem::path& base_dir) {
  WikiConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  c.name = kv.get_string("name", c.name);
  if (auto p = kv.find("graph_path")) c.graph_path = resolve(*p);
  if (auto p = kv.find("labels_path")) c.labels_path = resolve(*p);
  const long long per = kv.get_int("n_per_class", 100);
  const long long boot = kv.get_int("bootstrap_B", 200);
  if (per < 1 || boot < 1) config_error("n_per_class and bootstrap_B must be >= 1");
  c.n_per_class = static_cast<std::size_t>(per);
  c.bootstrap_B = static_cast<std::size_t>(boot);
  c.d = static_cast<int>(kv.get_int("d", c.d));
  c.K = static_cast<int>(kv.get_int("K", c.K));
  c.seed = kv.get_seed("seed", c.seed);
  c.models = models_from(kv, c.models);
  c.mcmc = mcmc_from(kv);
  c.constraint_mode = parse_constraint_mode(
      kv.get_string("constraint_mode", constraint_name(c.constraint_mode)));
  c.gmm = gmm_from(kv);
  kv.reject_unused();
  c.validate();
  return c;
}

WikiConfig load_wiki_config(const std::filesystem::path& path) {
  return wiki_config_from(KeyValueConfig::load(path), path.parent_path());
}

const ModelOutcome* ReplicateResult::outcome(const std::string& model) const {
  for (const auto& o : outcomes) {
    if (o.model == model) return &o;
  }
  return nullptr;
}

std::vector<ModelOutcome> run_pipeline(
    const AdjacencyMatrix& A, std::span<const int> truth,
    const PipelineOptions& options,
    const std::optional<SbmParams>& truth_params, std::uint64_t seed) {
  const EmbeddedPoints emb = adjacency_spectral_embedding(A, options.d);
  Rng gmm_rng(derive_seed(seed, {0}));
  const GmmFit fit = fit_gmm(emb.X_hat, options.K, options.gmm, gmm_rng);
  const PriorSpec asge = empirical_prior_from_fit(fit, options.constraint_mode);

  std::vector<ModelOutcome> outcomes;
  for (const auto& model : options.models) {
    const std::uint64_t model_seed =
        derive_seed(seed, {1, static_cast<std::uint64_t>(model_index(model))});
    if (model == kGmmModel) {
      ModelOutcome o;
      o.model = model;
      o.error = misassignment_rate(fit.hard_labels, truth, options.K).error;
      outcomes.push_back(o);
      continue;
    }
    const ModelKind kind = parse_model_kind(model);
    if ((kind == ModelKind::kExact || kind == ModelKind::kGold) &&
        !truth_params) {
      throw Error(Errc::kInvalidArgument,
                  model + " needs the generating parameters");
    }
    ChainInit init;
    std::optional<PriorSpec> prior;
    switch (kind) {
      case ModelKind::kExact:
        prior = PriorSpec::exact(truth_params->nu, truth_params->rho,
                                 options.constraint_mode);
        break;
      case ModelKind::kGold: {
        prior = PriorSpec::gold_for(*truth_params, A.size(),
                                    options.constraint_mode);
        const auto& gold = std::get<GoldParams>(prior->params());
        const std::vector<int> perm = align_by_gram(fit.means, gold.nu_star);
        init.tau0.reserve(fit.hard_labels.size());
        for (int l : fit.hard_labels) {
          init.tau0.push_back(perm[static_cast<std::size_t>(l)]);
        }
        break;
      }
      case ModelKind::kAsge:
        prior = asge;
        init.tau0 = fit.hard_labels;
        break;
      case ModelKind::kFlat: {
        prior = PriorSpec::flat(options.K, options.d, options.constraint_mode);
        init.tau0 = fit.hard_labels;
        Rng init_rng(derive_seed(model_seed, {~0ULL}));
        init.nu0 = draw_truncated_gaussian(fit.means, asge.gaussian_factors(),
                                           options.constraint_mode, init_rng)
                       .nu;
        break;
      }
    }
    outcomes.push_back(run_sampler(A, truth, *prior, model, std::move(init),
                                   options.mcmc, model_seed));
  }
  return outcomes;
}

SimulatedGraph simulate_graph(const ExperimentConfig& config, std::size_t n,
                              std::uint64_t seed) {
  Rng rng(seed);
  SimulatedGraph out;
  if (config.generator == GeneratorKind::kDirichletRdpg) {
    LatentSampler sampler{LatentKind::kDirichletMixture, config.nu,
                          config.rho, config.r};
    LatentMatrix latents = sample_dirichlet_mixture_latents(n, sampler, rng);
    out.graph = sample_rdpg(latents.X, rng, OutOfRangePolicy::kThrow);
    out.labels = std::move(latents.tau_true);
  } else {
    const SbmParams truth = config.truth_at(n);
    out.labels = sample_block_memberships(n, truth.rho, rng);
    out.graph = sample_rdpg(latent_matrix(truth.nu, out.labels), rng,
                            OutOfRangePolicy::kClamp);
  }
  return out;
}

ReplicateResult run_replicate(const ExperimentConfig& config, std::size_t n,
                              std::size_t rep) {
  ReplicateResult result;
  result.n = n;
  result.replicate = rep;
  const std::uint64_t base = derive_seed(config.seed, {n, rep});
  try {
    const SimulatedGraph sim = simulate_graph(config, n, derive_seed(base, {0}));
    PipelineOptions options{config.d, config.K, config.models, config.mcmc,
                            config.constraint_mode, config.gmm};
    std::optional<SbmParams> truth;
    if (config.generator != GeneratorKind::kDirichletRdpg) {
      truth = config.truth_at(n);
    }
    result.outcomes = run_pipeline(sim.graph, sim.labels, options, truth,
                                   derive_seed(base, {1}));
  } catch (const Error& e) {
    result.failure = failure_text(e);
    result.outcomes.clear();
  }
  return result;
}

std::vector<std::size_t> ExperimentResult::n_values() const {
  std::vector<std::size_t> out;
  for (const auto& r : replicates) {
    if (std::find(out.begin(), out.end(), r.n) == out.end()) out.push_back(r.n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<double> ExperimentResult::errors(std::size_t n,
                                             const std::string& model) const {
  std::vector<double> out;
  for (const auto& r : replicates) {
    if (r.n != n) continue;
    if (const ModelOutcome* o = r.outcome(model)) out.push_back(o->error);
  }
  return out;
}

std::pair<std::vector<double>, std::vector<double>>
ExperimentResult::paired_errors(std::size_t n, const std::string& a,
                                const std::string& b) const {
  std::pair<std::vector<double>, std::vector<double>> out;
  for (const auto& r : replicates) {
    if (r.n != n) continue;
    const ModelOutcome* oa = r.outcome(a);
    const ModelOutcome* ob = r.outcome(b);
    if (oa == nullptr || ob == nullptr) continue;
    out.first.push_back(oa->error);
    out.second.push_back(ob->error);
  }
  return out;
}

std::size_t worker_threads() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SBM_EB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      config_error("SBM_EB_THREADS must be a positive integer");
    }
    return static_cast<std::size_t>(v);
  }
  return hw;
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

namespace {

ExperimentResult collect(std::string name, std::vector<std::string> models,
                         std::size_t count, std::size_t threads,
                         const ProgressFn& progress,
                         const std::function<ReplicateResult(std::size_t)>& run) {
  ExperimentResult result;
  result.name = std::move(name);
  result.models = std::move(models);
  result.replicates.resize(count);
  std::mutex mutex;
  parallel_for(count, threads == 0 ? worker_threads() : threads,
               [&](std::size_t i) {
                 ReplicateResult r = run(i);
                 std::lock_guard lock(mutex);
                 if (progress) progress(r);
                 result.replicates[i] = std::move(r);
               });
  std::sort(result.replicates.begin(), result.replicates.end(),
            [](const ReplicateResult& a, const ReplicateResult& b) {
              return std::tie(a.n, a.replicate) < std::tie(b.n, b.replicate);
            });
  return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::size_t threads,
                                const ProgressFn& progress) {
  config.validate();
  const std::size_t per_n = config.replicates;
  return collect(config.name, config.models, config.n_values.size() * per_n,
                 threads, progress, [&](std::size_t i) {
                   return run_replicate(config, config.n_values[i / per_n],
                                        i % per_n);
                 });
}

WikiData prepare_wiki_data(const WikiConfig& config) {
  LoadedGraph loaded = load_graph(config.graph_path, config.labels_path);
  if (loaded.K != config.K) {
    throw Error(Errc::kParseError,
                "labels use " + std::to_string(loaded.K) +
                    " classes, config K = " + std::to_string(config.K));
  }
  WikiData data;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < loaded.graph.size(); ++i) {
    if (loaded.graph.degree(i) > 0) keep.push_back(i);
  }
  data.isolates_removed = loaded.graph.size() - keep.size();
  data.graph = loaded.graph.induced_subgraph(keep);
  if (!data.graph.is_connected()) {
    throw Error(Errc::kDisconnectedSample,
                "graph is disconnected after removing isolated vertices");
  }
  data.class_sizes.assign(static_cast<std::size_t>(config.K), 0);
  for (std::size_t i : keep) {
    data.labels.push_back(loaded.labels[i]);
    ++data.class_sizes[static_cast<std::size_t>(loaded.labels[i])];
  }
  for (std::size_t k = 0; k < data.class_sizes.size(); ++k) {
    if (data.class_sizes[k] < config.n_per_class) {
      config_error("n_per_class exceeds the size of class " +
                   std::to_string(k + 1) + " (" +
                   std::to_string(data.class_sizes[k]) + ")");
    }
  }
  data.X_hat = adjacency_spectral_embedding(data.graph, config.d).X_hat;
  return data;
}

ExperimentResult run_wiki_bootstrap(const WikiConfig& config,
                                    std::size_t threads,
                                    const ProgressFn& progress) {
  config.validate();
  return run_wiki_bootstrap(config, prepare_wiki_data(config), threads,
                            progress);
}

ExperimentResult run_wiki_bootstrap(const WikiConfig& config,
                                    const WikiData& data, std::size_t threads,
                                    const ProgressFn& progress) {
  config.validate();
  std::vector<std::vector<std::size_t>> members(
      static_cast<std::size_t>(config.K));
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    members[static_cast<std::size_t>(data.labels[i])].push_back(i);
  }
  const std::size_t n = config.n_per_class * static_cast<std::size_t>(config.K);
  const PipelineOptions options{config.d, config.K, config.models, config.mcmc,
                                config.constraint_mode, config.gmm};
  return collect(config.name, config.models, config.bootstrap_B, threads,
                 progress, [&](std::size_t b) {
    ReplicateResult result;
    result.n = n;
    result.replicate = b;
    const std::uint64_t base = derive_seed(config.seed, {b});
    try {
      Rng rng(derive_seed(base, {0}));
      Eigen::MatrixXd X(static_cast<Eigen::Index>(n), data.X_hat.cols());
      std::vector<int> labels;
      labels.reserve(n);
      Eigen::Index row = 0;
      for (std::size_t k = 0; k < members.size(); ++k) {
        std::uniform_int_distribution<std::size_t> pick(0, members[k].size() - 1);
        for (std::size_t s = 0; s < config.n_per_class; ++s) {
          X.row(row++) = data.X_hat.row(
              static_cast<Eigen::Index>(members[k][pick(rng)]));
          labels.push_back(static_cast<int>(k));
        }
      }
      const AdjacencyMatrix A = sample_rdpg(X, rng, OutOfRangePolicy::kClamp);
      if (!A.is_connected()) {
        result.notes.push_back(
            std::string(errc_name(Errc::kDisconnectedSample)));
      }
      result.outcomes = run_pipeline(A, labels, options, std::nullopt,
                                     derive_seed(base, {1}));
    } catch (const Error& e) {
      result.failure = failure_text(e);
      result.outcomes.clear();
    }
    return result;
  });
}

namespace {

std::string csv_number(double v) {
  return std::isfinite(v) ? format_double(v) : std::string("NA");
}

nlohmann::json stats_json(const SummaryStats& s) {
  return {{"count", s.count}, {"mean", s.mean},     {"median", s.median},
          {"se", s.se},       {"ci_low", s.ci_low}, {"ci_high", s.ci_high}};
}

double mean_finite(const std::vector<double>& v) {
  double total = 0.0;
  std::size_t count = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      total += x;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN()
                    : total / static_cast<double>(count);
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void write_reports(const ExperimentResult& result,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string stem = (out_dir / result.name).string();

  std::ofstream csv(stem + "_replicates.csv");
  csv << "replicate,model,n,error,accept_rate,rhat\n";
  for (const auto& r : result.replicates) {
    for (const auto& o : r.outcomes) {
      csv << r.replicate << ',' << o.model << ',' << r.n << ','
          << format_double(o.error) << ',' << csv_number(o.accept_rate) << ','
          << csv_number(o.rhat) << '\n';
    }
  }

  std::ofstream failures(stem + "_failures.txt");
  std::size_t failure_count = 0;
  std::map<std::string, std::size_t> note_counts;
  for (const auto& r : result.replicates) {
    if (r.failure) {
      ++failure_count;
      failures << "n=" << r.n << " replicate=" << r.replicate << ' '
               << *r.failure << '\n';
    }
    for (const auto& note : r.notes) ++note_counts[note];
  }

  nlohmann::json summary;
  summary["name"] = result.name;
  summary["error_convention"] =
      "misassignment fraction minimized over label permutations";
  summary["replicates"] = result.replicates.size();
  summary["failures"] = failure_count;
  summary["notes"] = note_counts;
  summary["results"] = nlohmann::json::array();
  summary["sign_tests"] = nlohmann::json::array();

  std::ofstream plot(stem + "_plot.csv");
  plot << "n,model,mean,se,count\n";

  for (std::size_t n : result.n_values()) {
    nlohmann::json models;
    for (const auto& model : result.models) {
      const std::vector<double> errs = result.errors(n, model);
      if (errs.empty()) continue;
      const SummaryStats s = summarize(errs);
      std::vector<double> rhats, accepts;
      std::size_t converged = 0;
      for (const auto& r : result.replicates) {
        if (r.n != n) continue;
        if (const ModelOutcome* o = r.outcome(model)) {
          rhats.push_back(o->rhat);
          accepts.push_back(o->accept_rate);
          converged += o->converged ? 1 : 0;
        }
      }
      nlohmann::json entry = stats_json(s);
      if (model != kGmmModel) {
        entry["mean_rhat"] = number_or_null(mean_finite(rhats));
        entry["mean_accept_rate"] = number_or_null(mean_finite(accepts));
        entry["converged_fraction"] =
            static_cast<double>(converged) / static_cast<double>(errs.size());
      }
      models[model] = entry;
      plot << n << ',' << model << ',' << format_double(s.mean) << ','
           << format_double(s.se) << ',' << s.count << '\n';
    }
    summary["results"].push_back({{"n", n}, {"models", models}});

    for (std::size_t i = 0; i < result.models.size(); ++i) {
      for (std::size_t j = i + 1; j < result.models.size(); ++j) {
        const auto& a = result.models[i];
        const auto& b = result.models[j];
        const auto [ea, eb] = result.paired_errors(n, a, b);
        if (ea.empty()) continue;
        std::size_t a_lower = 0, b_lower = 0;
        for (std::size_t k = 0; k < ea.size(); ++k) {
          a_lower += ea[k] < eb[k] ? 1 : 0;
          b_lower += eb[k] < ea[k] ? 1 : 0;
        }
        nlohmann::json test{{"n", n},
                            {"a", a},
                            {"b", b},
                            {"a_lower", a_lower},
                            {"b_lower", b_lower},
                            {"ties", ea.size() - a_lower - b_lower}};
        try {
          test["p"] = paired_sign_test(ea, eb);
        } catch (const Error&) {
          test["p"] = nullptr;
        }
        summary["sign_tests"].push_back(test);
      }
    }
  }
  std::ofstream(stem + "_summary.json") << summary.dump(2) << '\n';
}

}  // namespace sbm_eb
