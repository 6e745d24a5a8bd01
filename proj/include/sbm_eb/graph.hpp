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

#ifndef SBM_EB_GRAPH_HPP_
#define SBM_EB_GRAPH_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sbm_eb {

// Simple undirected graph stored as a dense symmetric byte matrix.
// Symmetry, hollowness and binarity hold by construction: the only mutator
// sets both (i,j) and (j,i) and rejects self loops.
class AdjacencyMatrix {
 public:
  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(std::size_t n) : n_(n), bits_(n * n, 0) {}

  // Builds from 0-based endpoint pairs. Duplicate edges collapse; the number
  // of collapsed duplicates is written to *duplicates when non-null.
  static AdjacencyMatrix from_edges(
      std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges,
      std::size_t* duplicates = nullptr);

  std::size_t size() const { return n_; }

  bool has_edge(std::size_t i, std::size_t j) const {
    return bits_[i * n_ + j] != 0;
  }

  // Returns false if the edge was already present. Throws SelfLoopRejected
  // when i == j.
  bool add_edge(std::size_t i, std::size_t j);

  std::span<const std::uint8_t> row(std::size_t i) const {
    return {bits_.data() + i * n_, n_};
  }

  std::size_t edge_count() const;
  std::size_t degree(std::size_t i) const;
  std::vector<std::size_t> degrees() const;
  double density() const;

  // Sorted neighbor lists.
  std::vector<std::vector<int>> neighbor_lists() const;

  // Edge list (i < j), row-major order.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  Eigen::MatrixXd to_dense() const;

  AdjacencyMatrix induced_subgraph(std::span<const std::size_t> vertices) const;

  bool is_connected() const;

  friend bool operator==(const AdjacencyMatrix&,
                         const AdjacencyMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace sbm_eb

#endif  // SBM_EB_GRAPH_HPP_
