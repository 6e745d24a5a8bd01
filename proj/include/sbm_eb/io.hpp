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

// Text file formats. All formats are whitespace-delimited and allow '#'
// comments.
//
//   graph:   line 1 "n m", then m lines "i j" (0-based, i < j)
//   labels:  n lines, one integer in 1..K
//   matrix:  one row per line (embeddings), 17 significant digits
//   prior:   "K d", then per component: weight, mean row, d covariance rows
//   params:  "K d", then rho, then K rows of nu
//   trace:   "# key=value" header lines, then one row of labels (1..K) per
//            retained iteration

#ifndef SBM_EB_IO_HPP_
#define SBM_EB_IO_HPP_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sbm_eb/gmm.hpp"
#include "sbm_eb/graph.hpp"
#include "sbm_eb/mcmc.hpp"
#include "sbm_eb/model.hpp"

namespace sbm_eb {

struct GraphReadResult {
  AdjacencyMatrix graph;
  std::size_t duplicate_edges = 0;
  std::vector<std::string> warnings;
};

GraphReadResult read_graph(std::istream& in);
GraphReadResult read_graph_file(const std::filesystem::path& path);
void write_graph(std::ostream& out, const AdjacencyMatrix& A);

// Returns 0-based labels; the file holds 1..K.
std::vector<int> read_labels(std::istream& in);
std::vector<int> read_labels_file(const std::filesystem::path& path);
void write_labels(std::ostream& out, std::span<const int> labels);

Eigen::MatrixXd read_matrix(std::istream& in);
Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const Eigen::MatrixXd& m);

struct PriorFile {
  Eigen::VectorXd weights;
  Eigen::MatrixXd means;
  std::vector<Eigen::MatrixXd> covariances;
};

PriorFile read_prior(std::istream& in);
PriorFile read_prior_file(const std::filesystem::path& path);
void write_prior(std::ostream& out, const GmmFit& fit);

SbmParams read_params(std::istream& in);
SbmParams read_params_file(const std::filesystem::path& path);
void write_params(std::ostream& out, const SbmParams& params);

struct TraceFile {
  std::map<std::string, std::string> header;
  std::vector<std::size_t> sample_iterations;
  std::vector<std::vector<int>> tau_samples;  // 0-based
};

void write_trace(std::ostream& out, const ChainTrace& trace,
                 const std::map<std::string, std::string>& extra_header);
TraceFile read_trace(std::istream& in);
TraceFile read_trace_file(const std::filesystem::path& path);

struct LoadedGraph {
  AdjacencyMatrix graph;
  std::vector<int> labels;  // 0-based
  int K = 0;
  std::vector<std::string> warnings;
};

// Reads a graph and its label file and checks that they agree on n.
LoadedGraph load_graph(const std::filesystem::path& graph_path,
                       const std::filesystem::path& labels_path);

// Formats with 17 significant digits.
std::string format_double(double v);

}  // namespace sbm_eb

#endif  // SBM_EB_IO_HPP_
