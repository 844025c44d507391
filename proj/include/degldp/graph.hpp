#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "degldp/random.hpp"

namespace degldp {

using Index = Eigen::Index;
using BitMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;
using BitRow = Eigen::Matrix<std::uint8_t, 1, Eigen::Dynamic>;

// Undirected simple graph on vertices 0..n-1, stored as a dense symmetric
// 0/1 adjacency matrix with a zero diagonal.
struct Graph {
  BitMatrix adj;

  Index n() const { return adj.rows(); }
  bool has_edge(Index i, Index j) const { return adj(i, j) != 0; }
  int degree(Index i) const;
  std::size_t edge_count() const;

  // Keeps the matrix symmetric; rejects self-loops and out-of-range ids.
  void add_edge(Index i, Index j);
};

Graph empty_graph(Index n);

// Erdos-Renyi G(n, p). Consumes exactly one draw per unordered pair,
// iterating pairs in (i, j), i < j lexicographic order, regardless of p, so
// a given (seed, n) always advances the stream identically.
Graph generate_er(Index n, double p, RandomSource& rng);

Eigen::VectorXi degrees(const Graph& g);

// k-th percentile of a degree multiset: sort ascending, take the 1-based
// rank ceil(k*n/100). k must lie in (0, 100].
int degree_percentile(const Eigen::VectorXi& degs, double k);

struct EdgeListStats {
  std::size_t self_loops_dropped = 0;
  std::size_t duplicate_edges = 0;
};

// Edge-list text format: one edge per line as two whitespace-separated node
// labels; lines whose first non-blank character is '#' are comments. Labels
// are arbitrary tokens mapped to 0..n-1 in first-seen order. Duplicate edges
// collapse and self-loops are dropped; both are counted in stats. A line
// with any other token count is a parse error (reported with its line
// number).
Graph load_edge_list(std::istream& in, EdgeListStats* stats = nullptr);
Graph load_edge_list_file(const std::string& path,
                          EdgeListStats* stats = nullptr);

// Writes "# <header>" then one "i j" line per edge, i < j ascending.
void write_edge_list(std::ostream& out, const Graph& g,
                     const std::string& header);

// First k entries of a uniform permutation of pool (partial Fisher-Yates);
// k must not exceed the pool size.
std::vector<Index> sample_without_replacement(std::vector<Index> pool,
                                              std::size_t k,
                                              RandomSource& rng);

}  // namespace degldp
