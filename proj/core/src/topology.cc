#include "avrp/topology.h"

#include <algorithm>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>

#include <nlohmann/json.hpp>

#include "avrp/error.h"
#include "avrp/rng.h"

namespace avrp {

namespace {

constexpr Cost kUnreachable = std::numeric_limits<Cost>::max() / 4;

}  // namespace

Graph::Graph(int node_count) : node_count_(node_count) {
  if (node_count < 1) throw ParameterError("graph needs at least one node");
}

void Graph::add_link(int u, int v, Cost cost) {
  if (u < 0 || v < 0 || u >= node_count_ || v >= node_count_) {
    throw ParameterError("link endpoint out of range");
  }
  if (u == v) throw ParameterError("self-loop on node " + std::to_string(u));
  if (cost <= 0) throw ParameterError("link cost must be positive");
  if (has_link(u, v)) {
    throw ParameterError("duplicate link " + std::to_string(u) + "-" +
                         std::to_string(v));
  }
  links_.push_back({std::min(u, v), std::max(u, v), cost});
}

bool Graph::has_link(int u, int v) const {
  const int a = std::min(u, v);
  const int b = std::max(u, v);
  return std::any_of(links_.begin(), links_.end(),
                     [&](const Link& e) { return e.u == a && e.v == b; });
}

bool Graph::is_connected() const {
  if (node_count_ <= 1) return true;
  std::vector<int> parent(node_count_);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = node_count_;
  for (const Link& e : links_) {
    const int a = find(e.u);
    const int b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

std::string CostMatrix::check_invariants() const {
  const int m = size_;
  for (int i = 0; i < m; ++i) {
    if ((*this)(i, i) != 0) return "nonzero diagonal at " + std::to_string(i);
    for (int j = 0; j < m; ++j) {
      if ((*this)(i, j) != (*this)(j, i)) {
        return "asymmetric at (" + std::to_string(i) + "," +
               std::to_string(j) + ")";
      }
      if (i != j && (*this)(i, j) <= 0) {
        return "non-positive cost at (" + std::to_string(i) + "," +
               std::to_string(j) + ")";
      }
    }
  }
  for (int h = 0; h < m; ++h) {
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        if ((*this)(i, j) > (*this)(i, h) + (*this)(h, j)) {
          return "triangle inequality broken at (" + std::to_string(i) + "," +
                 std::to_string(h) + "," + std::to_string(j) + ")";
        }
      }
    }
  }
  return {};
}

Graph generate_ba_topology(int n, int m_links, std::uint64_t seed) {
  if (n < 1) throw ParameterError("BA topology: n must be >= 1");
  if (m_links < 1) throw ParameterError("BA topology: m_links must be >= 1");
  if (n > 1 && m_links >= n) {
    throw ParameterError("BA topology: m_links must be < n");
  }
  Graph g(n);
  if (n == 1) return g;

  Rng rng(seed);
  std::vector<int> degree(n, 0);
  g.add_link(0, 1, 1);
  degree[0] = degree[1] = 1;
  Cost total_degree = 2;

  std::vector<int> chosen;
  for (int node = 2; node < n; ++node) {
    const int wanted = std::min(m_links, node);
    chosen.clear();
    Cost pool = total_degree;
    // Sampling without replacement: a chosen target leaves the pool.
    while (static_cast<int>(chosen.size()) < wanted) {
      Cost ticket = rng.uniform_int(0, pool - 1);
      int target = 0;
      for (; target < node; ++target) {
        if (std::find(chosen.begin(), chosen.end(), target) != chosen.end()) {
          continue;
        }
        if (ticket < degree[target]) break;
        ticket -= degree[target];
      }
      chosen.push_back(target);
      pool -= degree[target];
    }
    for (int target : chosen) {
      g.add_link(target, node, 1);
      ++degree[target];
      ++degree[node];
      total_degree += 2;
    }
  }
  return g;
}

Graph assign_link_costs(Graph g, Cost lo, Cost hi, std::uint64_t seed) {
  if (lo <= 0) throw ParameterError("link cost lower bound must be positive");
  if (lo > hi) throw ParameterError("link cost range is empty");
  Rng rng(seed);
  for (Link& e : g.mutable_links()) e.cost = rng.uniform_int(lo, hi);
  return g;
}

CostMatrix all_pairs_shortest_paths(const Graph& g) {
  const int m = g.node_count();
  if (!g.is_connected()) {
    throw ConnectivityError("topology is disconnected");
  }
  CostMatrix l(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) l(i, j) = i == j ? 0 : kUnreachable;
  }
  for (const Link& e : g.links()) {
    if (e.cost <= 0) throw ParameterError("link cost must be positive");
    l(e.u, e.v) = std::min(l(e.u, e.v), e.cost);
    l(e.v, e.u) = l(e.u, e.v);
  }
  for (int h = 0; h < m; ++h) {
    for (int i = 0; i < m; ++i) {
      const Cost ih = l(i, h);
      if (ih == kUnreachable) continue;
      for (int j = 0; j < m; ++j) {
        const Cost through = ih + l(h, j);
        if (through < l(i, j)) l(i, j) = through;
      }
    }
  }
  return l;
}

std::vector<Cost> single_source_costs(const Graph& g, int source) {
  const int m = g.node_count();
  if (source < 0 || source >= m) throw ParameterError("source out of range");
  std::vector<std::vector<std::pair<int, Cost>>> adjacency(m);
  for (const Link& e : g.links()) {
    adjacency[e.u].emplace_back(e.v, e.cost);
    adjacency[e.v].emplace_back(e.u, e.cost);
  }
  std::vector<Cost> dist(m, -1);
  using Entry = std::pair<Cost, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  frontier.emplace(0, source);
  while (!frontier.empty()) {
    auto [d, u] = frontier.top();
    frontier.pop();
    if (dist[u] >= 0) continue;
    dist[u] = d;
    for (auto [v, c] : adjacency[u]) {
      if (dist[v] < 0) frontier.emplace(d + c, v);
    }
  }
  return dist;
}

std::string topology_to_json(const Graph& g) {
  nlohmann::json doc;
  doc["nodes"] = g.node_count();
  doc["edges"] = nlohmann::json::array();
  for (const Link& e : g.links()) {
    doc["edges"].push_back({e.u, e.v, e.cost});
  }
  return doc.dump(2) + "\n";
}

Graph topology_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("topology JSON: ") + e.what(), 0);
  }
  try {
    Graph g(doc.at("nodes").get<int>());
    for (const auto& edge : doc.at("edges")) {
      if (!edge.is_array() || edge.size() != 3) {
        throw ParseError("topology edge must be [u, v, cost]", 0);
      }
      g.add_link(edge[0].get<int>(), edge[1].get<int>(), edge[2].get<Cost>());
    }
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("topology JSON: ") + e.what(), 0);
  }
}

void write_cost_matrix_csv(const CostMatrix& l, std::ostream& out) {
  for (int i = 0; i < l.size(); ++i) {
    for (int j = 0; j < l.size(); ++j) {
      if (j > 0) out << ',';
      out << l(i, j);
    }
    out << '\n';
  }
}

}  // namespace avrp
