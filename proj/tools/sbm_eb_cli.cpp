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

// sbm-eb: command line driver.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sbm_eb/errors.hpp"
#include "sbm_eb/evaluation.hpp"
#include "sbm_eb/experiment.hpp"
#include "sbm_eb/gmm.hpp"
#include "sbm_eb/io.hpp"
#include "sbm_eb/mcmc.hpp"
#include "sbm_eb/spectral.hpp"

namespace fs = std::filesystem;
using namespace sbm_eb;

namespace {

constexpr int kConfigExit = 2;
constexpr int kDataExit = 3;
constexpr int kNumericExit = 4;

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(Errc::kParseError, "cannot write " + path.string());
  return out;
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

std::size_t thread_count(int flag) {
  return flag > 0 ? static_cast<std::size_t>(flag) : worker_threads();
}

void print_progress(const ReplicateResult& r) {
  std::cerr << "n=" << r.n << " replicate=" << r.replicate;
  if (r.failure) std::cerr << " failed: " << *r.failure;
  for (const auto& o : r.outcomes) {
    std::cerr << ' ' << o.model << '=' << format_double(o.error);
  }
  std::cerr << '\n';
}

void print_summary(const ExperimentResult& result) {
  for (std::size_t n : result.n_values()) {
    for (const auto& model : result.models) {
      const auto errs = result.errors(n, model);
      if (errs.empty()) continue;
      const SummaryStats s = summarize(errs);
      std::printf("n=%zu model=%s count=%zu mean=%.4f median=%.4f se=%.4f\n",
                  n, model.c_str(), s.count, s.mean, s.median, s.se);
    }
  }
}

// --- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out_dir = ".";
  std::size_t n = 0;
  std::size_t replicate = 0;
};

int run_simulate(const SimulateArgs& a) {
  const ExperimentConfig cfg = load_experiment_config(a.config);
  const std::size_t n = a.n > 0 ? a.n : cfg.n_values.front();
  const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, {n, a.replicate}), {0});
  const SimulatedGraph sim = simulate_graph(cfg, n, seed);
  const fs::path dir(a.out_dir);
  auto graph = open_output(dir / "graph.txt");
  write_graph(graph, sim.graph);
  auto labels = open_output(dir / "labels.txt");
  write_labels(labels, sim.labels);
  auto params = open_output(dir / "params.txt");
  write_params(params, cfg.truth_at(n));
  std::printf("n=%zu edges=%zu density=%.4f\n", n, sim.graph.edge_count(),
              sim.graph.density());
  return 0;
}

// --- embed ----------------------------------------------------------------

struct EmbedArgs {
  std::string graph;
  std::string out_dir = ".";
  int d = 2;
};

int run_embed(const EmbedArgs& a) {
  GraphReadResult g = read_graph_file(a.graph);
  log_warnings(g.warnings);
  const EmbeddedPoints emb = adjacency_spectral_embedding(g.graph, a.d);
  auto out = open_output(fs::path(a.out_dir) / "embedding.txt");
  write_matrix(out, emb.X_hat);
  std::printf("eigenvalues:");
  for (Eigen::Index k = 0; k < emb.eigenvalues.size(); ++k) {
    std::printf(" %.6g", emb.eigenvalues(k));
  }
  std::printf("\n");
  return 0;
}

// --- fit-gmm --------------------------------------------------------------

struct FitArgs {
  std::string embedding;
  std::string out_dir = ".";
  int K = 2;
  std::uint64_t seed = 1;
  GmmOptions opts;
};

int run_fit(const FitArgs& a) {
  const Eigen::MatrixXd X = read_matrix_file(a.embedding);
  Rng rng(a.seed);
  const GmmFit fit = fit_gmm(X, a.K, a.opts, rng);
  const fs::path dir(a.out_dir);
  auto prior = open_output(dir / "prior.txt");
  write_prior(prior, fit);
  auto labels = open_output(dir / "gmm_labels.txt");
  write_labels(labels, fit.hard_labels);
  std::printf("loglik=%.10g em_steps=%zu\n", fit.loglik(),
              fit.loglik_trace.size());
  return 0;
}

// --- sample-posterior -----------------------------------------------------

struct SampleArgs {
  std::string graph;
  std::string prior;
  std::string params;
  std::string truth;
  std::string init_labels;
  std::string out_dir = ".";
  std::string model = "asge";
  std::string constraint = "homophilic";
  std::size_t iters = 10'000;
  std::optional<std::size_t> burn_in;
  std::size_t thin = 1;
  std::size_t chains = 2;
  std::uint64_t seed = 1;
  std::size_t replicate = 0;
  int K = 0;
  int d = 0;
};

int run_sample(const SampleArgs& a) {
  GraphReadResult g = read_graph_file(a.graph);
  log_warnings(g.warnings);
  const AdjacencyMatrix& A = g.graph;
  const ModelKind kind = parse_model_kind(a.model);
  const ConstraintMode mode = parse_constraint_mode(a.constraint);

  std::optional<PriorFile> prior_file;
  if (!a.prior.empty()) prior_file = read_prior_file(a.prior);
  std::optional<SbmParams> params;
  if (!a.params.empty()) params = read_params_file(a.params);

  int K = a.K, d = a.d;
  if (prior_file) {
    K = static_cast<int>(prior_file->means.rows());
    d = static_cast<int>(prior_file->means.cols());
  } else if (params) {
    K = params->K;
    d = params->d;
  }
  if (K < 1 || d < 1) {
    throw Error(Errc::kConfigError,
                "give --prior, --params, or both --K and --d");
  }

  std::optional<PriorSpec> prior;
  switch (kind) {
    case ModelKind::kExact:
    case ModelKind::kGold:
      if (!params) {
        throw Error(Errc::kConfigError,
                    std::string(model_name(kind)) + " needs --params");
      }
      prior = kind == ModelKind::kExact
                  ? PriorSpec::exact(params->nu, params->rho, mode)
                  : PriorSpec::gold_for(*params, A.size(), mode);
      break;
    case ModelKind::kAsge:
      if (!prior_file) throw Error(Errc::kConfigError, "asge needs --prior");
      prior = PriorSpec::asge(prior_file->means, prior_file->covariances, mode);
      break;
    case ModelKind::kFlat:
      prior = PriorSpec::flat(K, d, mode);
      break;
  }

  ChainInit init;
  if (!a.init_labels.empty()) {
    init.tau0 = read_labels_file(a.init_labels);
  } else if (kind != ModelKind::kExact) {
    const EmbeddedPoints emb = adjacency_spectral_embedding(A, d);
    if (prior_file) {
      init.tau0 = mixture_hard_labels(emb.X_hat, prior_file->weights,
                                      prior_file->means,
                                      prior_file->covariances);
    } else {
      Rng rng(derive_seed(a.seed, {0}));
      const GmmFit fit = fit_gmm(emb.X_hat, K, GmmOptions{}, rng);
      init.tau0 = fit.hard_labels;
      if (kind == ModelKind::kGold) {
        const auto perm = align_by_gram(
            fit.means, std::get<GoldParams>(prior->params()).nu_star);
        for (int& l : init.tau0) l = perm[static_cast<std::size_t>(l)];
      }
    }
  }
  if (!init.tau0.empty()) {
    if (init.tau0.size() != A.size()) {
      throw Error(Errc::kParseError, "initial labels do not match the graph");
    }
    for (int l : init.tau0) {
      if (l >= K) throw Error(Errc::kParseError, "initial label exceeds K");
    }
  }
  if (kind == ModelKind::kFlat && prior_file) {
    const PriorSpec asge =
        PriorSpec::asge(prior_file->means, prior_file->covariances, mode);
    Rng rng(derive_seed(a.seed, {1}));
    init.nu0 = draw_truncated_gaussian(asge.gaussian_means(),
                                       asge.gaussian_factors(), mode, rng)
                   .nu;
  }

  std::vector<int> truth;
  if (!a.truth.empty()) {
    truth = read_labels_file(a.truth);
    if (truth.size() != A.size()) {
      throw Error(Errc::kParseError, "truth labels do not match the graph");
    }
  }
  std::optional<std::span<const int>> truth_view;
  if (!truth.empty()) truth_view = truth;

  Schedule schedule;
  schedule.iters = a.iters;
  schedule.thin = a.thin;
  schedule.burn_in = 0;
  const fs::path dir(a.out_dir);
  std::vector<ChainTrace> traces;
  for (std::size_t c = 0; c < a.chains; ++c) {
    ChainTrace t = run_chain(A, *prior, init, schedule, truth_view,
                             derive_seed(a.seed, {2, c}));
    auto out = open_output(dir / ("trace_" + std::string(model_name(kind)) +
                                  "_chain" + std::to_string(c) + ".txt"));
    write_trace(out, t,
                {{"chain", std::to_string(c)},
                 {"replicate", std::to_string(a.replicate)},
                 {"n", std::to_string(A.size())},
                 {"constraint", constraint_name(mode)}});
    traces.push_back(std::move(t));
  }

  nlohmann::json summary;
  summary["model"] = model_name(kind);
  summary["chains"] = a.chains;
  summary["iters"] = a.iters;
  std::size_t accepted = 0, proposed = 0;
  for (const auto& t : traces) {
    accepted += t.accept_count;
    proposed += t.propose_count;
  }
  summary["accept_rate"] =
      proposed > 0 ? nlohmann::json(static_cast<double>(accepted) /
                                    static_cast<double>(proposed))
                   : nlohmann::json(nullptr);
  if (!truth.empty() && a.chains >= 2) {
    McmcSettings mcmc;
    mcmc.iters = a.iters;
    mcmc.chains = a.chains;
    mcmc.thin = a.thin;
    mcmc.burn_in = a.burn_in;
    const ModelOutcome o = summarize_chains(traces, truth, K, a.model, mcmc);
    summary["burn_in"] = o.burn_in;
    summary["converged"] = o.converged;
    summary["rhat"] = std::isfinite(o.rhat) ? nlohmann::json(o.rhat)
                                            : nlohmann::json(nullptr);
    summary["error"] = o.error;
  }
  if (!truth.empty()) {
    summary["final_error"] =
        misassignment_rate(traces.front().final_state.tau, truth, K).error;
  }
  auto out = open_output(dir / "posterior_summary.json");
  out << summary.dump(2) << '\n';
  std::cout << summary.dump() << '\n';
  return 0;
}

// --- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::vector<std::string> traces;
  std::string truth;
  std::string out_dir = ".";
  std::string name = "evaluate";
  std::optional<std::size_t> burn_in;
};

std::size_t header_size(const TraceFile& t, const std::string& key,
                        std::size_t fallback) {
  const auto it = t.header.find(key);
  if (it == t.header.end()) return fallback;
  try {
    return std::stoull(it->second);
  } catch (const std::logic_error&) {
    throw Error(Errc::kParseError, "bad header value for '" + key + "'");
  }
}

int run_evaluate(const EvaluateArgs& a) {
  const std::vector<int> truth = read_labels_file(a.truth);
  int K = 0;
  for (int l : truth) K = std::max(K, l + 1);

  // (n, replicate, model) -> chains
  std::map<std::tuple<std::size_t, std::size_t, std::string>,
           std::vector<ChainTrace>>
      groups;
  std::vector<std::string> models;
  for (const auto& path : a.traces) {
    const TraceFile f = read_trace_file(path);
    if (f.tau_samples.empty()) {
      throw Error(Errc::kParseError, path + ": no samples");
    }
    if (f.tau_samples.front().size() != truth.size()) {
      throw Error(Errc::kParseError, path + ": length differs from truth");
    }
    ChainTrace t;
    const auto model_it = f.header.find("model");
    const std::string model =
        model_it == f.header.end() ? "unknown" : model_it->second;
    t.K = static_cast<int>(header_size(f, "K", static_cast<std::size_t>(K)));
    K = std::max(K, t.K);
    t.accept_count = header_size(f, "accept", 0);
    t.propose_count = header_size(f, "propose", 0);
    t.sample_iterations = f.sample_iterations;
    t.tau_samples = f.tau_samples;
    const std::size_t n = header_size(f, "n", truth.size());
    const std::size_t rep = header_size(f, "replicate", 0);
    groups[{n, rep, model}].push_back(std::move(t));
    if (std::find(models.begin(), models.end(), model) == models.end()) {
      models.push_back(model);
    }
  }

  ExperimentResult result;
  result.name = a.name;
  result.models = models;
  std::map<std::pair<std::size_t, std::size_t>, ReplicateResult> reps;
  for (auto& [key, traces] : groups) {
    const auto& [n, rep, model] = key;
    McmcSettings mcmc;
    mcmc.burn_in = a.burn_in;
    ReplicateResult& r = reps[{n, rep}];
    r.n = n;
    r.replicate = rep;
    r.outcomes.push_back(summarize_chains(traces, truth, K, model, mcmc));
  }
  for (auto& [key, r] : reps) result.replicates.push_back(std::move(r));
  write_reports(result, a.out_dir);
  print_summary(result);
  return 0;
}

// --- experiment / wiki ----------------------------------------------------

struct StudyArgs {
  std::string config;
  std::string out_dir = ".";
  int threads = 0;
  bool quiet = false;
};

int run_study(const StudyArgs& a) {
  const ExperimentConfig cfg = load_experiment_config(a.config);
  const ProgressFn progress =
      a.quiet ? ProgressFn{} : ProgressFn(print_progress);
  const ExperimentResult result =
      run_experiment(cfg, thread_count(a.threads), progress);
  write_reports(result, a.out_dir);
  print_summary(result);
  return 0;
}

int run_wiki(const StudyArgs& a) {
  const WikiConfig cfg = load_wiki_config(a.config);
  const WikiData data = prepare_wiki_data(cfg);
  std::cerr << "vertices=" << data.graph.size()
            << " isolates_removed=" << data.isolates_removed << '\n';
  const ProgressFn progress =
      a.quiet ? ProgressFn{} : ProgressFn(print_progress);
  const ExperimentResult result =
      run_wiki_bootstrap(cfg, data, thread_count(a.threads), progress);
  write_reports(result, a.out_dir);
  print_summary(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Empirical Bayes block membership estimation for stochastic "
               "blockmodels",
               "sbm-eb"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample one graph from an experiment config");
  simulate->add_option("--config", sim.config, "Experiment config")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out-dir", sim.out_dir);
  simulate->add_option("--n", sim.n, "Vertex count (default: first of n_values)");
  simulate->add_option("--replicate", sim.replicate);

  EmbedArgs emb;
  auto* embed = app.add_subcommand("embed", "Adjacency spectral embedding");
  embed->set_config("--config");
  embed->add_option("--graph", emb.graph)->required();
  embed->add_option("--d", emb.d)->check(CLI::PositiveNumber);
  embed->add_option("--out-dir", emb.out_dir);

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit-gmm", "Fit a Gaussian mixture to an embedding");
  fitc->set_config("--config");
  fitc->add_option("--embedding", fit.embedding)->required();
  fitc->add_option("--K", fit.K)->check(CLI::PositiveNumber);
  fitc->add_option("--seed", fit.seed);
  fitc->add_option("--restarts", fit.opts.restarts)->check(CLI::PositiveNumber);
  fitc->add_option("--max-iters", fit.opts.max_iters)->check(CLI::PositiveNumber);
  fitc->add_option("--tol", fit.opts.tol)->check(CLI::PositiveNumber);
  fitc->add_option("--out-dir", fit.out_dir);

  SampleArgs smp;
  auto* sample = app.add_subcommand("sample-posterior", "Run Metropolis-within-Gibbs chains");
  sample->set_config("--config");
  sample->add_option("--graph", smp.graph)->required();
  sample->add_option("--prior", smp.prior, "Prior file from fit-gmm");
  sample->add_option("--params", smp.params, "True parameter file (exact, gold)");
  sample->add_option("--truth", smp.truth, "True labels");
  sample->add_option("--init-labels", smp.init_labels);
  sample->add_option("--model", smp.model)->check(CLI::IsMember({"exact", "gold", "asge", "flat"}));
  sample->add_option("--constraint", smp.constraint)->check(CLI::IsMember({"homophilic", "box"}));
  sample->add_option("--iters", smp.iters);
  sample->add_option("--burn-in", smp.burn_in);
  sample->add_option("--thin", smp.thin)->check(CLI::PositiveNumber);
  sample->add_option("--chains", smp.chains)->check(CLI::PositiveNumber);
  sample->add_option("--seed", smp.seed);
  sample->add_option("--replicate", smp.replicate);
  sample->add_option("--K", smp.K);
  sample->add_option("--d", smp.d);
  sample->add_option("--out-dir", smp.out_dir);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score trace files against true labels");
  evaluate->set_config("--config");
  evaluate->add_option("--traces", ev.traces)->required();
  evaluate->add_option("--truth", ev.truth)->required();
  evaluate->add_option("--name", ev.name);
  evaluate->add_option("--burn-in", ev.burn_in);
  evaluate->add_option("--out-dir", ev.out_dir);

  StudyArgs study;
  auto* experiment = app.add_subcommand("experiment", "Run a simulation study");
  experiment->add_option("--config", study.config)->required()->check(CLI::ExistingFile);
  experiment->add_option("--out-dir", study.out_dir);
  experiment->add_option("--threads", study.threads, "Overrides SBM_EB_THREADS");
  experiment->add_flag("--quiet", study.quiet);

  StudyArgs wk;
  auto* wiki = app.add_subcommand("wiki", "Bootstrap study on an observed labelled graph");
  wiki->add_option("--config", wk.config)->required()->check(CLI::ExistingFile);
  wiki->add_option("--out-dir", wk.out_dir);
  wiki->add_option("--threads", wk.threads, "Overrides SBM_EB_THREADS");
  wiki->add_flag("--quiet", wk.quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigExit;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*embed) return run_embed(emb);
    if (*fitc) return run_fit(fit);
    if (*sample) return run_sample(smp);
    if (*evaluate) return run_evaluate(ev);
    if (*experiment) return run_study(study);
    if (*wiki) return run_wiki(wk);
  } catch (const Error& e) {
    std::cerr << "sbm-eb: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "sbm-eb: " << e.what() << '\n';
    return kDataExit;
  } catch (const std::exception& e) {
    std::cerr << "sbm-eb: " << e.what() << '\n';
    return kNumericExit;
  }
  return 0;
}
