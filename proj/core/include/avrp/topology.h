#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace avrp {

using Cost = std::int64_t;

struct Link {
  int u = 0;
  int v = 0;
  Cost cost = 1;

  friend bool operator==(const Link&, const Link&) = default;
};

// Undirected server network. Links are stored with u < v.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int node_count);

  int node_count() const { return node_count_; }
  std::span<const Link> links() const { return links_; }
  std::span<Link> mutable_links() { return links_; }

  // Throws ParameterError on self-loops, duplicates, out-of-range ids or
  // non-positive cost.
  void add_link(int u, int v, Cost cost);
  bool has_link(int u, int v) const;

  bool is_connected() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  int node_count_ = 0;
  std::vector<Link> links_;
};

// Symmetric all-pairs per-byte communication cost. Row-major, dense.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(int size) : size_(size), data_(size * size, 0) {}

  int size() const { return size_; }
  Cost operator()(int i, int j) const { return data_[i * size_ + j]; }
  Cost& operator()(int i, int j) { return data_[i * size_ + j]; }
  std::span<const Cost> row(int i) const {
    return {data_.data() + static_cast<std::size_t>(i) * size_,
            static_cast<std::size_t>(size_)};
  }

  // Returns an empty string when symmetry, zero diagonal, positive
  // off-diagonal and the triangle inequality all hold, else the first
  // violation found.
  std::string check_invariants() const;

  friend bool operator==(const CostMatrix&, const CostMatrix&) = default;

 private:
  int size_ = 0;
  std::vector<Cost> data_;
};

// Barabasi-Albert preferential attachment. Grows from a two-node seed joined
// by one link; each new node attaches to min(m_links, existing) distinct
// nodes drawn with probability proportional to degree. All links get cost 1;
// see assign_link_costs.
Graph generate_ba_topology(int n, int m_links, std::uint64_t seed);

// Replaces every link cost with an integer drawn uniformly from [lo, hi].
Graph assign_link_costs(Graph g, Cost lo, Cost hi, std::uint64_t seed);

// Floyd-Warshall over the link costs. Throws ConnectivityError if some pair
// is unreachable.
CostMatrix all_pairs_shortest_paths(const Graph& g);

// Dijkstra from one source; unreachable nodes get -1.
std::vector<Cost> single_source_costs(const Graph& g, int source);

// {"nodes": M, "edges": [[u, v, cost], ...]}
std::string topology_to_json(const Graph& g);
Graph topology_from_json(const std::string& text);

// One CSV row per source node, no header.
void write_cost_matrix_csv(const CostMatrix& l, std::ostream& out);

}  // namespace avrp
