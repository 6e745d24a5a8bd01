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

#include "sbm_eb/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "sbm_eb/errors.hpp"

namespace sbm_eb {
namespace {

// Line reader that strips comments, skips blank lines and tracks line
// numbers for error messages.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) {
        line.erase(hash);
      }
      std::istringstream ss(line);
      tokens.clear();
      std::string tok;
      while (ss >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::kParseError,
                "line " + std::to_string(line_no_) + ": " + what);
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

long long parse_int(const LineReader& r, const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    r.fail("expected an integer, got '" + s + "'");
  }
  return v;
}

double parse_double(const LineReader& r, const std::string& s) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) r.fail("expected a number, got '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    r.fail("expected a number, got '" + s + "'");
  }
}

Eigen::RowVectorXd parse_row(const LineReader& r,
                             const std::vector<std::string>& tokens,
                             Eigen::Index expected) {
  if (expected >= 0 && static_cast<Eigen::Index>(tokens.size()) != expected) {
    r.fail("expected " + std::to_string(expected) + " values, got " +
           std::to_string(tokens.size()));
  }
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(tokens.size()));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    row(static_cast<Eigen::Index>(i)) = parse_double(r, tokens[i]);
  }
  return row;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kParseError, "cannot open " + path.string());
  }
  return in;
}

void write_row(std::ostream& out, const Eigen::RowVectorXd& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j > 0) out << ' ';
    out << format_double(row(j));
  }
  out << '\n';
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GraphReadResult read_graph(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok)) reader.fail("missing header 'n m'");
  if (tok.size() != 2) reader.fail("header must be 'n m'");
  const long long n = parse_int(reader, tok[0]);
  const long long m = parse_int(reader, tok[1]);
  if (n < 0 || m < 0) reader.fail("negative counts in header");
  GraphReadResult result;
  result.graph = AdjacencyMatrix(static_cast<std::size_t>(n));
  long long seen = 0;
  while (reader.next(tok)) {
    if (tok.size() != 2) reader.fail("edge lines must be 'i j'");
    const long long i = parse_int(reader, tok[0]);
    const long long j = parse_int(reader, tok[1]);
    if (i < 0 || j < 0 || i >= n || j >= n) {
      reader.fail("endpoint out of range [0, " + std::to_string(n) + ")");
    }
    if (i == j) {
      throw Error(Errc::kSelfLoopRejected,
                  "line " + std::to_string(reader.line_no()) +
                      ": self loop at vertex " + std::to_string(i));
    }
    if (!result.graph.add_edge(static_cast<std::size_t>(i),
                               static_cast<std::size_t>(j))) {
      ++result.duplicate_edges;
      result.warnings.push_back("line " + std::to_string(reader.line_no()) +
                                ": duplicate edge " + std::to_string(i) + " " +
                                std::to_string(j) + " collapsed");
    }
    ++seen;
  }
  if (seen != m) {
    result.warnings.push_back("header declares " + std::to_string(m) +
                              " edges, file lists " + std::to_string(seen));
  }
  return result;
}

GraphReadResult read_graph_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_graph(in);
}

void write_graph(std::ostream& out, const AdjacencyMatrix& A) {
  const auto edges = A.edges();
  out << A.size() << ' ' << edges.size() << '\n';
  for (const auto& [i, j] : edges) out << i << ' ' << j << '\n';
}

std::vector<int> read_labels(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tok;
  std::vector<int> labels;
  while (reader.next(tok)) {
    if (tok.size() != 1) reader.fail("expected one label per line");
    const long long v = parse_int(reader, tok[0]);
    if (v < 1) reader.fail("labels must be >= 1");
    labels.push_back(static_cast<int>(v - 1));
  }
  return labels;
}

std::vector<int> read_labels_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_labels(in);
}

void write_labels(std::ostream& out, std::span<const int> labels) {
  for (int l : labels) out << (l + 1) << '\n';
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tok;
  std::vector<Eigen::RowVectorXd> rows;
  Eigen::Index cols = -1;
  while (reader.next(tok)) {
    rows.push_back(parse_row(reader, tok, cols));
    cols = rows.back().size();
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    std::max<Eigen::Index>(cols, 0));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = rows[i];
  }
  return m;
}

Eigen::MatrixXd read_matrix_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) write_row(out, m.row(i));
}

PriorFile read_prior(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2) reader.fail("expected 'K d'");
  const long long K = parse_int(reader, tok[0]);
  const long long d = parse_int(reader, tok[1]);
  if (K < 1 || d < 1) reader.fail("K and d must be >= 1");
  PriorFile p;
  p.weights.resize(K);
  p.means.resize(K, d);
  for (long long k = 0; k < K; ++k) {
    if (!reader.next(tok)) reader.fail("missing weight");
    p.weights(k) = parse_row(reader, tok, 1)(0);
    if (!reader.next(tok)) reader.fail("missing mean");
    p.means.row(k) = parse_row(reader, tok, d);
    Eigen::MatrixXd cov(d, d);
    for (long long r = 0; r < d; ++r) {
      if (!reader.next(tok)) reader.fail("missing covariance row");
      cov.row(r) = parse_row(reader, tok, d);
    }
    p.covariances.push_back(std::move(cov));
  }
  return p;
}

PriorFile read_prior_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_prior(in);
}

void write_prior(std::ostream& out, const GmmFit& fit) {
  out << fit.means.rows() << ' ' << fit.means.cols() << '\n';
  for (Eigen::Index k = 0; k < fit.means.rows(); ++k) {
    out << format_double(fit.weights(k)) << '\n';
    write_row(out, fit.means.row(k));
    write_matrix(out, fit.covariances[static_cast<std::size_t>(k)]);
  }
}

SbmParams read_params(std::istream& in) {
  LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 2) reader.fail("expected 'K d'");
  const long long K = parse_int(reader, tok[0]);
  const long long d = parse_int(reader, tok[1]);
  if (K < 1 || d < 1) reader.fail("K and d must be >= 1");
  if (!reader.next(tok)) reader.fail("missing rho");
  Eigen::VectorXd rho = parse_row(reader, tok, K).transpose();
  Eigen::MatrixXd nu(K, d);
  for (long long k = 0; k < K; ++k) {
    if (!reader.next(tok)) reader.fail("missing nu row");
    nu.row(k) = parse_row(reader, tok, d);
  }
  try {
    return SbmParams::from_latent_positions(nu, rho);
  } catch (const Error& e) {
    reader.fail(e.what());
  }
}

SbmParams read_params_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_params(in);
}

void write_params(std::ostream& out, const SbmParams& params) {
  out << params.K << ' ' << params.d << '\n';
  write_row(out, params.rho.transpose());
  write_matrix(out, params.nu);
}

void write_trace(std::ostream& out, const ChainTrace& trace,
                 const std::map<std::string, std::string>& extra_header) {
  std::map<std::string, std::string> header = extra_header;
  header["model"] = model_name(trace.model);
  header["K"] = std::to_string(trace.K);
  header["seed"] = std::to_string(trace.seed);
  header["accept"] = std::to_string(trace.accept_count);
  header["propose"] = std::to_string(trace.propose_count);
  std::string iters;
  for (std::size_t s = 0; s < trace.sample_iterations.size(); ++s) {
    if (s > 0) iters += ',';
    iters += std::to_string(trace.sample_iterations[s]);
  }
  // Compress arithmetic progressions to first:step:count.
  const auto& it = trace.sample_iterations;
  bool arithmetic = it.size() >= 2;
  for (std::size_t s = 2; arithmetic && s < it.size(); ++s) {
    arithmetic = it[s] - it[s - 1] == it[1] - it[0];
  }
  if (arithmetic) {
    iters = std::to_string(it[0]) + ":" + std::to_string(it[1] - it[0]) + ":" +
            std::to_string(it.size());
  }
  header["iterations"] = iters;
  for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
  for (const auto& tau : trace.tau_samples) {
    for (std::size_t i = 0; i < tau.size(); ++i) {
      if (i > 0) out << ' ';
      out << (tau[i] + 1);
    }
    out << '\n';
  }
}

TraceFile read_trace(std::istream& in) {
  TraceFile t;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw Error(Errc::kParseError,
                "line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("# ", 0) == 0) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        t.header[line.substr(2, eq - 2)] = line.substr(eq + 1);
      }
      continue;
    }
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<int> row;
    long long v;
    while (ss >> v) {
      if (v < 1) fail("labels must be >= 1");
      row.push_back(static_cast<int>(v - 1));
    }
    if (!ss.eof()) fail("non-integer label");
    if (row.empty()) continue;
    if (!t.tau_samples.empty() && row.size() != t.tau_samples.front().size()) {
      fail("rows differ in length");
    }
    t.tau_samples.push_back(std::move(row));
  }
  const std::size_t count = t.tau_samples.size();
  const auto it = t.header.find("iterations");
  if (it == t.header.end() || it->second.empty()) {
    for (std::size_t s = 0; s < count; ++s) t.sample_iterations.push_back(s);
  } else if (it->second.find(':') != std::string::npos) {
    std::size_t first = 0, step = 0, total = 0;
    char c1 = 0, c2 = 0;
    std::istringstream ss(it->second);
    if (!(ss >> first >> c1 >> step >> c2 >> total) || total != count) {
      fail("iterations header does not match rows");
    }
    for (std::size_t s = 0; s < count; ++s) {
      t.sample_iterations.push_back(first + s * step);
    }
  } else {
    std::istringstream ss(it->second);
    std::string part;
    while (std::getline(ss, part, ',')) {
      t.sample_iterations.push_back(std::stoull(part));
    }
    if (t.sample_iterations.size() != count) {
      fail("iterations header does not match rows");
    }
  }
  return t;
}

TraceFile read_trace_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_trace(in);
}

LoadedGraph load_graph(const std::filesystem::path& graph_path,
                       const std::filesystem::path& labels_path) {
  GraphReadResult g = read_graph_file(graph_path);
  LoadedGraph out;
  out.labels = read_labels_file(labels_path);
  if (out.labels.size() != g.graph.size()) {
    throw Error(Errc::kParseError,
                labels_path.string() + ": " +
                    std::to_string(out.labels.size()) + " labels for " +
                    std::to_string(g.graph.size()) + " vertices");
  }
  for (int l : out.labels) out.K = std::max(out.K, l + 1);
  out.graph = std::move(g.graph);
  out.warnings = std::move(g.warnings);
  return out;
}

}  // namespace sbm_eb
