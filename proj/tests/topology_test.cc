#include "avrp/topology.h"

#include <sstream>

#include <gtest/gtest.h>

#include "avrp/error.h"
#include "avrp/rng.h"

namespace avrp {
namespace {

TEST(BaTopology, SingleNodeHasNoLinks) {
  const Graph g = generate_ba_topology(1, 1, 7);
  EXPECT_EQ(g.node_count(), 1);
  EXPECT_TRUE(g.links().empty());
}

TEST(BaTopology, TwoNodesAreJoined) {
  const Graph g = generate_ba_topology(2, 1, 7);
  ASSERT_EQ(g.links().size(), 1u);
  EXPECT_EQ(g.links()[0].u, 0);
  EXPECT_EQ(g.links()[0].v, 1);
}

TEST(BaTopology, FiftyNodeTreeWithOneLinkPerNode) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const Graph g = generate_ba_topology(50, 1, seed);
    EXPECT_EQ(g.links().size(), 49u);
    EXPECT_TRUE(g.is_connected());
  }
}

TEST(BaTopology, TreePropertyForAllSizes) {
  for (int n = 1; n <= 40; ++n) {
    const Graph g = generate_ba_topology(n, 1, 1000 + n);
    EXPECT_EQ(static_cast<int>(g.links().size()), n - 1) << n;
    EXPECT_TRUE(g.is_connected()) << n;
  }
}

TEST(BaTopology, DenserAttachmentHasNoDuplicates) {
  // add_link rejects duplicates, so surviving construction is the check.
  const Graph g = generate_ba_topology(30, 3, 5);
  EXPECT_TRUE(g.is_connected());
  // 1 seed link, node 2 attaches to 2, every later node to 3.
  EXPECT_EQ(g.links().size(), 1u + 2u + 27u * 3u);
}

TEST(BaTopology, DeterministicPerSeed) {
  EXPECT_EQ(generate_ba_topology(50, 2, 11), generate_ba_topology(50, 2, 11));
  EXPECT_NE(generate_ba_topology(50, 1, 11), generate_ba_topology(50, 1, 12));
}

TEST(BaTopology, RejectsBadParameters) {
  EXPECT_THROW(generate_ba_topology(0, 1, 1), ParameterError);
  EXPECT_THROW(generate_ba_topology(5, 0, 1), ParameterError);
  EXPECT_THROW(generate_ba_topology(5, 5, 1), ParameterError);
}

TEST(LinkCosts, DegenerateRange) {
  const Graph g = assign_link_costs(generate_ba_topology(20, 1, 3), 5, 5, 9);
  for (const Link& e : g.links()) EXPECT_EQ(e.cost, 5);
}

TEST(LinkCosts, DeterministicPerSeed) {
  const Graph base = generate_ba_topology(50, 1, 3);
  EXPECT_EQ(assign_link_costs(base, 1, 10, 4), assign_link_costs(base, 1, 10, 4));
}

TEST(LinkCosts, EmpiricalMeanOfUniformOneToTen) {
  // 10^4 links: a tree on 10001 nodes.
  const Graph g = assign_link_costs(generate_ba_topology(10001, 1, 8), 1, 10, 21);
  ASSERT_EQ(g.links().size(), 10000u);
  double sum = 0.0;
  for (const Link& e : g.links()) {
    ASSERT_GE(e.cost, 1);
    ASSERT_LE(e.cost, 10);
    sum += static_cast<double>(e.cost);
  }
  const double mean = sum / 10000.0;
  EXPECT_GE(mean, 5.0);
  EXPECT_LE(mean, 6.0);
}

TEST(LinkCosts, RejectsNonPositiveLowerBound) {
  const Graph g = generate_ba_topology(3, 1, 1);
  EXPECT_THROW(assign_link_costs(g, 0, 10, 1), ParameterError);
  EXPECT_THROW(assign_link_costs(g, 4, 3, 1), ParameterError);
}

TEST(ShortestPaths, SingleNode) {
  const CostMatrix l = all_pairs_shortest_paths(Graph(1));
  ASSERT_EQ(l.size(), 1);
  EXPECT_EQ(l(0, 0), 0);
}

TEST(ShortestPaths, PathGraph) {
  Graph g(3);
  g.add_link(0, 1, 2);
  g.add_link(1, 2, 3);
  const CostMatrix l = all_pairs_shortest_paths(g);
  const Cost expected[3][3] = {{0, 2, 5}, {2, 0, 3}, {5, 3, 0}};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) EXPECT_EQ(l(i, j), expected[i][j]);
  }
}

TEST(ShortestPaths, DisconnectedGraphIsRejected) {
  Graph g(3);
  g.add_link(0, 1, 1);
  EXPECT_THROW(all_pairs_shortest_paths(g), ConnectivityError);
}

TEST(ShortestPaths, DenseAndPerSourceAgreeOnRandomGraphs) {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    Graph g(12);
    for (int v = 1; v < 12; ++v) {
      g.add_link(static_cast<int>(rng.uniform_int(0, v - 1)), v,
                 rng.uniform_int(1, 10));
    }
    for (int e = 0; e < 15; ++e) {
      const int u = static_cast<int>(rng.uniform_int(0, 11));
      const int v = static_cast<int>(rng.uniform_int(0, 11));
      if (u != v && !g.has_link(u, v)) g.add_link(u, v, rng.uniform_int(1, 10));
    }
    const CostMatrix l = all_pairs_shortest_paths(g);
    EXPECT_EQ(l.check_invariants(), "");
    for (int s = 0; s < 12; ++s) {
      const std::vector<Cost> row = single_source_costs(g, s);
      for (int t = 0; t < 12; ++t) ASSERT_EQ(l(s, t), row[t]);
    }
  }
}

TEST(ShortestPaths, GeneratedTopologiesSatisfyInvariants) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g =
        assign_link_costs(generate_ba_topology(50, 1 + seed % 3, seed), 1, 10, seed);
    EXPECT_EQ(all_pairs_shortest_paths(g).check_invariants(), "");
  }
}

TEST(TopologyJson, RoundTrip) {
  const Graph g = assign_link_costs(generate_ba_topology(25, 2, 3), 1, 10, 4);
  EXPECT_EQ(topology_from_json(topology_to_json(g)), g);
}

TEST(TopologyJson, RejectsMalformedDocuments) {
  EXPECT_THROW(topology_from_json("{"), ParseError);
  EXPECT_THROW(topology_from_json(R"({"nodes": 2, "edges": [[0, 1]]})"),
               ParseError);
  EXPECT_THROW(topology_from_json(R"({"nodes": 2, "edges": [[0, 0, 1]]})"),
               ParameterError);
}

TEST(CostMatrixCsv, OneRowPerSource) {
  Graph g(3);
  g.add_link(0, 1, 2);
  g.add_link(1, 2, 3);
  std::ostringstream out;
  write_cost_matrix_csv(all_pairs_shortest_paths(g), out);
  EXPECT_EQ(out.str(), "0,2,5\n2,0,3\n5,3,0\n");
}

}  // namespace
}  // namespace avrp
