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

#include "sbm_eb/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "sbm_eb/errors.hpp"

namespace sbm_eb {
namespace {

struct Params {
  Eigen::MatrixXd means;
  std::vector<Eigen::MatrixXd> covs;
  Eigen::VectorXd weights;
};

// Returns false if a component is degenerate.
bool m_step(const Eigen::MatrixXd& x, const Eigen::MatrixXd& resp,
            double reg, Params& p) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index K = resp.cols();
  p.means.resize(K, d);
  p.covs.assign(static_cast<std::size_t>(K), Eigen::MatrixXd());
  p.weights.resize(K);
  for (Eigen::Index k = 0; k < K; ++k) {
    const double mass = resp.col(k).sum();
    if (!(mass >= static_cast<double>(d + 1))) return false;
    const Eigen::RowVectorXd mean = (resp.col(k).transpose() * x) / mass;
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd cov =
        (centered.transpose() * resp.col(k).asDiagonal() * centered) / mass;
    cov = (0.5 * (cov + cov.transpose())).eval();
    cov.diagonal().array() += reg * cov.trace() / static_cast<double>(d);
    p.means.row(k) = mean;
    p.covs[static_cast<std::size_t>(k)] = std::move(cov);
    p.weights(k) = mass / static_cast<double>(n);
  }
  return true;
}

// Fills resp with responsibilities and returns the mixture log-likelihood,
// or nullopt if a covariance is not positive definite.
std::optional<double> e_step(const Eigen::MatrixXd& x, const Params& p,
                             Eigen::MatrixXd& resp) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  const Eigen::Index K = p.means.rows();
  Eigen::MatrixXd logd(n, K);
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (Eigen::Index k = 0; k < K; ++k) {
    Eigen::LLT<Eigen::MatrixXd> llt(p.covs[static_cast<std::size_t>(k)]);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Eigen::MatrixXd L = llt.matrixL();
    double logdet = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) logdet += 2.0 * std::log(L(j, j));
    if (!std::isfinite(logdet)) return std::nullopt;
    const Eigen::MatrixXd centered =
        (x.rowwise() - p.means.row(k)).transpose();
    const Eigen::MatrixXd z = llt.matrixL().solve(centered);
    const Eigen::VectorXd maha = z.colwise().squaredNorm().transpose();
    logd.col(k) = (-0.5 * (maha.array() + logdet + d * log2pi) +
                   std::log(p.weights(k)))
                      .matrix();
  }
  resp.resize(n, K);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = logd.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (logd.row(i).array() - m).exp().matrix();
    const double s = e.sum();
    resp.row(i) = e / s;
    total += m + std::log(s);
  }
  return total;
}

// k-means++ seeding followed by Lloyd iterations; returns hard labels.
std::vector<int> kmeans_init(const Eigen::MatrixXd& x, int K, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(K, x.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centers.row(0) = x.row(first(rng));
  Eigen::VectorXd dist2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < K; ++c) {
    const double total = dist2.sum();
    Eigen::Index pick = 0;
    if (total > 0) {
      const double u = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2(i);
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    centers.row(c) = x.row(pick);
    dist2 = dist2.cwiseMin(
        (x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      (centers.rowwise() - x.row(i)).rowwise().squaredNorm().minCoeff(&best);
      if (labels[static_cast<std::size_t>(i)] != best) {
        labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(K, x.cols());
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(K);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(labels[static_cast<std::size_t>(i)]) += x.row(i);
      counts(labels[static_cast<std::size_t>(i)]) += 1.0;
    }
    for (int c = 0; c < K; ++c) {
      if (counts(c) > 0) centers.row(c) = sums.row(c) / counts(c);
    }
  }
  return labels;
}

struct RunResult {
  Params params;
  Eigen::MatrixXd resp;
  std::vector<double> trace;
};

std::optional<RunResult> run_em(const Eigen::MatrixXd& x, int K,
                                const GmmOptions& opts, Rng& rng) {
  const Eigen::Index n = x.rows();
  std::vector<int> labels = kmeans_init(x, K, rng);
  RunResult run;
  run.resp = Eigen::MatrixXd::Zero(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    run.resp(i, labels[static_cast<std::size_t>(i)]) = 1.0;
  }
  if (!m_step(x, run.resp, opts.reg, run.params)) return std::nullopt;
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::optional<double> ll = e_step(x, run.params, run.resp);
    if (!ll || !std::isfinite(*ll)) return std::nullopt;
    run.trace.push_back(*ll);
    const std::size_t t = run.trace.size();
    if (t >= 2 && std::abs(run.trace[t - 1] - run.trace[t - 2]) <=
                      opts.tol * std::abs(run.trace[t - 1])) {
      break;
    }
    if (iter + 1 == opts.max_iters) break;
    if (!m_step(x, run.resp, opts.reg, run.params)) return std::nullopt;
  }
  return run;
}

}  // namespace

GmmFit fit_gmm(const Eigen::MatrixXd& points, int K, const GmmOptions& opts,
               Rng& rng) {
  const Eigen::Index n = points.rows();
  const Eigen::Index d = points.cols();
  if (K < 1 || d < 1 || n < K) {
    throw Error(Errc::kInvalidArgument,
                "fit_gmm needs K >= 1, d >= 1 and n >= K");
  }
  if (opts.restarts < 1 || opts.max_iters < 1) {
    throw Error(Errc::kInvalidArgument, "restarts and max_iters must be >= 1");
  }

  // Canonical order: lexicographic on coordinates.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     for (Eigen::Index j = 0; j < d; ++j) {
                       if (points(a, j) != points(b, j)) {
                         return points(a, j) < points(b, j);
                       }
                     }
                     return false;
                   });
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    x.row(i) = points.row(order[static_cast<std::size_t>(i)]);
  }

  const std::uint64_t base = rng();
  std::optional<RunResult> best;
  for (int r = 0; r < opts.restarts; ++r) {
    Rng restart_rng(derive_seed(base, {static_cast<std::uint64_t>(r)}));
    std::optional<RunResult> run = run_em(x, K, opts, restart_rng);
    if (run && (!best || run->trace.back() > best->trace.back())) {
      best = std::move(run);
    }
  }
  if (!best) {
    throw Error(Errc::kDegenerateCluster,
                "every EM restart produced a degenerate component");
  }

  // Sort components by squared mean norm, ascending.
  std::vector<int> comp(static_cast<std::size_t>(K));
  std::iota(comp.begin(), comp.end(), 0);
  const Eigen::VectorXd sq = best->params.means.rowwise().squaredNorm();
  std::stable_sort(comp.begin(), comp.end(),
                   [&](int a, int b) { return sq(a) < sq(b); });

  GmmFit fit;
  fit.means.resize(K, d);
  fit.weights.resize(K);
  fit.responsibilities.resize(n, K);
  for (int c = 0; c < K; ++c) {
    const int src = comp[static_cast<std::size_t>(c)];
    fit.means.row(c) = best->params.means.row(src);
    fit.covariances.push_back(best->params.covs[static_cast<std::size_t>(src)]);
    fit.weights(c) = best->params.weights(src);
    for (Eigen::Index i = 0; i < n; ++i) {
      fit.responsibilities(order[static_cast<std::size_t>(i)], c) =
          best->resp(i, src);
    }
  }
  fit.hard_labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index arg = 0;
    fit.responsibilities.row(i).maxCoeff(&arg);
    fit.hard_labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  fit.loglik_trace = std::move(best->trace);
  return fit;
}

std::vector<int> mixture_hard_labels(const Eigen::MatrixXd& points,
                                     const Eigen::VectorXd& weights,
                                     const Eigen::MatrixXd& means,
                                     const std::vector<Eigen::MatrixXd>& covs) {
  if (weights.size() != means.rows() ||
      covs.size() != static_cast<std::size_t>(means.rows()) ||
      points.cols() != means.cols()) {
    throw Error(Errc::kInvalidArgument, "mixture shapes do not match");
  }
  Params p{means, covs, weights};
  Eigen::MatrixXd resp;
  if (!e_step(points, p, resp)) {
    throw Error(Errc::kNotPsd, "mixture covariance is not positive definite");
  }
  std::vector<int> labels(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    Eigen::Index k;
    resp.row(i).maxCoeff(&k);
    labels[static_cast<std::size_t>(i)] = static_cast<int>(k);
  }
  return labels;
}

PriorSpec empirical_prior_from_fit(const GmmFit& fit, ConstraintMode mode) {
  return PriorSpec::asge(fit.means, fit.covariances, mode);
}

}  // namespace sbm_eb
