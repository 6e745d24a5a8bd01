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

#include "sbm_eb/graph.hpp"

#include <numeric>
#include <queue>
#include <string>

#include "sbm_eb/errors.hpp"

namespace sbm_eb {

AdjacencyMatrix AdjacencyMatrix::from_edges(
    std::size_t n, std::span<const std::pair<std::size_t, std::size_t>> edges,
    std::size_t* duplicates) {
  AdjacencyMatrix a(n);
  std::size_t dup = 0;
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw Error(Errc::kInvalidArgument,
                  "edge (" + std::to_string(i) + "," + std::to_string(j) +
                      ") out of range for n=" + std::to_string(n));
    }
    if (!a.add_edge(i, j)) ++dup;
  }
  if (duplicates != nullptr) *duplicates = dup;
  return a;
}

bool AdjacencyMatrix::add_edge(std::size_t i, std::size_t j) {
  if (i == j) {
    throw Error(Errc::kSelfLoopRejected,
                "self loop at vertex " + std::to_string(i));
  }
  std::uint8_t& e = bits_[i * n_ + j];
  if (e != 0) return false;
  e = 1;
  bits_[j * n_ + i] = 1;
  return true;
}

std::size_t AdjacencyMatrix::edge_count() const {
  std::size_t total = 0;
  for (std::uint8_t b : bits_) total += b;
  return total / 2;
}

std::size_t AdjacencyMatrix::degree(std::size_t i) const {
  auto r = row(i);
  return static_cast<std::size_t>(std::accumulate(r.begin(), r.end(), 0));
}

std::vector<std::size_t> AdjacencyMatrix::degrees() const {
  std::vector<std::size_t> deg(n_);
  for (std::size_t i = 0; i < n_; ++i) deg[i] = degree(i);
  return deg;
}

double AdjacencyMatrix::density() const {
  if (n_ < 2) return 0.0;
  return static_cast<double>(edge_count()) /
         (static_cast<double>(n_) * static_cast<double>(n_ - 1) / 2.0);
}

std::vector<std::vector<int>> AdjacencyMatrix::neighbor_lists() const {
  std::vector<std::vector<int>> nbrs(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::uint8_t* r = bits_.data() + i * n_;
    for (std::size_t j = 0; j < n_; ++j) {
      if (r[j] != 0) nbrs[i].push_back(static_cast<int>(j));
    }
  }
  return nbrs;
}

std::vector<std::pair<std::size_t, std::size_t>> AdjacencyMatrix::edges()
    const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      if (has_edge(i, j)) out.emplace_back(i, j);
    }
  }
  return out;
}

Eigen::MatrixXd AdjacencyMatrix::to_dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t i = 0; i < n_; ++i) m(i, j) = bits_[i * n_ + j];
  }
  return m;
}

AdjacencyMatrix AdjacencyMatrix::induced_subgraph(
    std::span<const std::size_t> vertices) const {
  AdjacencyMatrix sub(vertices.size());
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    for (std::size_t b = a + 1; b < vertices.size(); ++b) {
      if (vertices[a] != vertices[b] && has_edge(vertices[a], vertices[b])) {
        sub.add_edge(a, b);
      }
    }
  }
  return sub;
}

bool AdjacencyMatrix::is_connected() const {
  if (n_ <= 1) return true;
  std::vector<char> seen(n_, 0);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!q.empty()) {
    std::size_t u = q.front();
    q.pop();
    const std::uint8_t* r = bits_.data() + u * n_;
    for (std::size_t v = 0; v < n_; ++v) {
      if (r[v] != 0 && seen[v] == 0) {
        seen[v] = 1;
        ++reached;
        q.push(v);
      }
    }
  }
  return reached == n_;
}

}  // namespace sbm_eb
