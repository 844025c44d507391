#include "degldp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace degldp {

int Graph::degree(Index i) const {
  return static_cast<int>(adj.row(i).cast<int>().sum());
}

std::size_t Graph::edge_count() const {
  return static_cast<std::size_t>(adj.cast<long>().sum()) / 2;
}

void Graph::add_edge(Index i, Index j) {
  if (i < 0 || j < 0 || i >= n() || j >= n())
    throw std::invalid_argument("add_edge: vertex id out of range");
  if (i == j) throw std::invalid_argument("add_edge: self-loop");
  adj(i, j) = 1;
  adj(j, i) = 1;
}

Graph empty_graph(Index n) {
  if (n < 0) throw std::invalid_argument("empty_graph: negative size");
  Graph g;
  g.adj = BitMatrix::Zero(n, n);
  return g;
}

Graph generate_er(Index n, double p, RandomSource& rng) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("generate_er: p outside [0, 1]");
  Graph g = empty_graph(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (rng.next_bernoulli(p)) {
        g.adj(i, j) = 1;
        g.adj(j, i) = 1;
      }
    }
  }
  return g;
}

Eigen::VectorXi degrees(const Graph& g) {
  return g.adj.cast<int>().rowwise().sum();
}

int degree_percentile(const Eigen::VectorXi& degs, double k) {
  if (degs.size() == 0)
    throw std::invalid_argument("degree_percentile: empty degree vector");
  if (!(k > 0.0 && k <= 100.0))
    throw std::invalid_argument("degree_percentile: k outside (0, 100]");
  std::vector<int> sorted(degs.data(), degs.data() + degs.size());
  std::sort(sorted.begin(), sorted.end());
  const double exact = k * static_cast<double>(sorted.size()) / 100.0;
  auto rank = static_cast<std::size_t>(std::ceil(exact));
  if (rank < 1) rank = 1;
  if (rank > sorted.size()) rank = sorted.size();
  return sorted[rank - 1];
}

Graph load_edge_list(std::istream& in, EdgeListStats* stats) {
  std::unordered_map<std::string, Index> ids;
  std::vector<std::pair<Index, Index>> edges;
  EdgeListStats local;

  auto id_of = [&](const std::string& label) {
    auto [it, inserted] = ids.emplace(label, static_cast<Index>(ids.size()));
    (void)inserted;
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;  // blank line
    if (a[0] == '#') continue;
    if (!(ls >> b) || (ls >> extra))
      throw std::runtime_error("edge list line " + std::to_string(lineno) +
                               ": expected exactly two node labels");
    const Index u = id_of(a);
    const Index v = id_of(b);
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    edges.emplace_back(u, v);
  }

  Graph g = empty_graph(static_cast<Index>(ids.size()));
  for (auto [u, v] : edges) {
    if (g.adj(u, v)) {
      ++local.duplicate_edges;
    } else {
      g.adj(u, v) = 1;
      g.adj(v, u) = 1;
    }
  }
  if (stats) *stats = local;
  return g;
}

Graph load_edge_list_file(const std::string& path, EdgeListStats* stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return load_edge_list(in, stats);
}

void write_edge_list(std::ostream& out, const Graph& g,
                     const std::string& header) {
  out << "# " << header << "\n";
  for (Index i = 0; i < g.n(); ++i)
    for (Index j = i + 1; j < g.n(); ++j)
      if (g.adj(i, j)) out << i << " " << j << "\n";
}

std::vector<Index> sample_without_replacement(std::vector<Index> pool,
                                              std::size_t k,
                                              RandomSource& rng) {
  if (k > pool.size())
    throw std::invalid_argument(
        "sample_without_replacement: k exceeds pool size");
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.next_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace degldp
