#include "avrp/model.h"

#include <gtest/gtest.h>

#include "avrp/error.h"
#include "avrp/rng.h"
#include "support/oracle.h"

namespace avrp {
namespace {

using oracle::micro_instance;

TEST(ValidatePlacement, PrimaryOnlyIsValid) {
  const auto t = micro_instance();
  const auto x = primary_only_placement(t.scenario.servers, t.scenario.objects);
  EXPECT_TRUE(validate_placement(x, t.scenario.servers, t.scenario.objects).empty());
}

TEST(ValidatePlacement, StorageOverflowIsReported) {
  auto t = micro_instance();
  t.scenario.servers.capacities[0] = 25;
  auto x = primary_only_placement(t.scenario.servers, t.scenario.objects);
  x(0, 1) = 1;
  const auto report =
      validate_placement(x, t.scenario.servers, t.scenario.objects);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].kind, Violation::Kind::kStorage);
  EXPECT_EQ(report[0].index, 0);
}

TEST(ValidatePlacement, MissingPrimaryIsReported) {
  const auto t = micro_instance();
  auto x = primary_only_placement(t.scenario.servers, t.scenario.objects);
  x(2, 1) = 0;
  const auto report =
      validate_placement(x, t.scenario.servers, t.scenario.objects);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_EQ(report[0].kind, Violation::Kind::kPrimary);
  EXPECT_EQ(report[0].index, 1);
}

TEST(ValidatePlacement, DimensionMismatchIsStructural) {
  const auto t = micro_instance();
  ReplicationMatrix x(2, 2);
  EXPECT_THROW(validate_placement(x, t.scenario.servers, t.scenario.objects),
               StructuralError);
}

TEST(PrimaryOnly, OneReplicaPerObject) {
  const auto t = micro_instance();
  const auto x = primary_only_placement(t.scenario.servers, t.scenario.objects);
  EXPECT_EQ(x.replicators(0), std::vector<int>{0});
  EXPECT_EQ(x.replicators(1), std::vector<int>{2});
  EXPECT_EQ(x.total_replicas(), 2);
}

TEST(PrimaryOnly, PrimaryMustFit) {
  auto t = micro_instance();
  t.scenario.servers.capacities[2] = 19;
  EXPECT_THROW(primary_only_placement(t.scenario.servers, t.scenario.objects),
               CapacityError);
}

TEST(PrimaryOnly, AlwaysValidWhenPrimariesFit) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = oracle::random_instance(rng, 1, 8, 1, 12);
    const auto x =
        primary_only_placement(inst.scenario.servers, inst.scenario.objects);
    EXPECT_EQ(x.total_replicas(), inst.scenario.objects.size());
    EXPECT_TRUE(
        validate_placement(x, inst.scenario.servers, inst.scenario.objects)
            .empty());
  }
}

TEST(NearestReplicator, ReplicatorServesItself) {
  const auto t = micro_instance();
  const auto x = primary_only_placement(t.scenario.servers, t.scenario.objects);
  EXPECT_EQ(nearest_replicator(x, t.costs, 0, 0), 0);
  EXPECT_EQ(nearest_replicator(x, t.costs, 1, 1), 2);
}

TEST(NearestReplicator, PicksCheapestReplicator) {
  const auto t = micro_instance();
  auto x = primary_only_placement(t.scenario.servers, t.scenario.objects);
  x(0, 1) = 1;
  EXPECT_EQ(nearest_replicator(x, t.costs, 1, 1), 0);  // 2 beats 3
}

TEST(NearestReplicator, TiesGoToLowestId) {
  Graph g(3);
  g.add_link(0, 1, 4);
  g.add_link(1, 2, 4);
  const CostMatrix l = all_pairs_shortest_paths(g);
  ReplicationMatrix x(3, 1);
  x(0, 0) = x(2, 0) = 1;
  EXPECT_EQ(nearest_replicator(x, l, 1, 0), 0);
}

TEST(NearestReplicator, EmptyColumnIsStructural) {
  const auto t = micro_instance();
  ReplicationMatrix x(3, 2);
  EXPECT_THROW(nearest_replicator(x, t.costs, 0, 0), StructuralError);
}

class PlacementStateTest : public ::testing::Test {
 protected:
  oracle::MicroInstance t = micro_instance();
  PlacementState state{
      t.costs, t.scenario.servers, t.scenario.objects,
      primary_only_placement(t.scenario.servers, t.scenario.objects)};
};

TEST_F(PlacementStateTest, AddUpdatesNearestColumn) {
  state.add_replica(0, 1);
  EXPECT_EQ(state.nearest()(0, 1), 0);
  EXPECT_EQ(state.nearest()(1, 1), 0);
  EXPECT_EQ(state.nearest()(2, 1), 2);
  EXPECT_EQ(state.nearest()(1, 0), 0);  // other column untouched
  EXPECT_EQ(state.used_storage(0), 30);
  EXPECT_EQ(state.replica_count(1), 2);
}

TEST_F(PlacementStateTest, AddThenRemoveRestoresIndex) {
  const NearestIndex before = state.nearest();
  state.add_replica(1, 0);
  state.remove_replica(1, 0);
  EXPECT_EQ(state.nearest(), before);
}

TEST_F(PlacementStateTest, FullColumnServesLocally) {
  state.add_replica(0, 1);
  state.add_replica(1, 1);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(state.nearest()(i, 1), i);
}

TEST_F(PlacementStateTest, RemoveFallsBackToRemainingReplicator) {
  state.add_replica(0, 1);
  const auto changes = state.remove_replica(0, 1);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(state.nearest()(i, 1), 2);
  EXPECT_EQ(changes.size(), 2u);
}

TEST_F(PlacementStateTest, PreconditionsAreEnforced) {
  EXPECT_THROW(state.remove_replica(1, 1), PreconditionError);
  EXPECT_THROW(state.remove_replica(2, 1), ConstraintError);
  EXPECT_THROW(state.add_replica(0, 0), PreconditionError);
}

TEST_F(PlacementStateTest, AddRespectsFreeStorage) {
  state.add_replica(0, 1);  // S0 now full (10 + 20)
  EXPECT_FALSE(state.has_space_for(0, 1));
  PlacementState tight(t.costs, t.scenario.servers, t.scenario.objects,
                       state.x());
  EXPECT_EQ(tight.free_storage(0), 0);
}

TEST(PlacementStateProperty, IncrementalIndexMatchesRebuild) {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    auto inst = oracle::random_instance(rng, 2, 9, 1, 8);
    // Room for every replica so adds never hit capacity.
    for (Size& c : inst.scenario.servers.capacities) c = 1000;
    PlacementState state(
        inst.costs, inst.scenario.servers, inst.scenario.objects,
        primary_only_placement(inst.scenario.servers, inst.scenario.objects));
    const int m = state.server_count();
    const int n = state.object_count();
    for (int step = 0; step < 60; ++step) {
      const int i = static_cast<int>(rng.uniform_int(0, m - 1));
      const int k = static_cast<int>(rng.uniform_int(0, n - 1));
      if (state.x().hosts(i, k)) {
        if (inst.scenario.objects.primaries[k] == i) continue;
        state.remove_replica(i, k);
      } else {
        state.add_replica(i, k);
      }
      const auto x = oracle::to_matrix(state.x());
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < n; ++b) {
          ASSERT_EQ(state.nearest()(a, b),
                    oracle::brute_nearest(x, inst.costs, a, b));
          if (x[a][b]) ASSERT_EQ(state.nearest()(a, b), a);
        }
      }
    }
  }
}

TEST(ScenarioJson, RoundTripPreservesEverything) {
  const auto t = micro_instance();
  const Scenario back = scenario_from_json(scenario_to_json(t.scenario));
  EXPECT_EQ(back.servers.capacities, t.scenario.servers.capacities);
  EXPECT_EQ(back.servers.failure_probs, t.scenario.servers.failure_probs);
  EXPECT_EQ(back.objects.sizes, t.scenario.objects.sizes);
  EXPECT_EQ(back.objects.primaries, t.scenario.objects.primaries);
  EXPECT_EQ(back.traffic, t.scenario.traffic);
}

TEST(ScenarioJson, RejectsBadInput) {
  EXPECT_THROW(scenario_from_json("[]"), ParseError);
  EXPECT_THROW(
      scenario_from_json(R"({"capacities":[1],"failure_probs":[1.0],)"
                         R"("sizes":[1],"primaries":[0],"traffic":[[0]]})"),
      ParameterError);
}

TEST(PlacementJson, SortedReplicatorLists) {
  ReplicationMatrix x(3, 2);
  x(2, 0) = x(0, 0) = x(1, 1) = 1;
  EXPECT_EQ(placement_to_json(x),
            R"({"objects":[{"id":0,"replicators":[0,2]},{"id":1,"replicators":[1]}]})"
            "\n");
  EXPECT_EQ(placement_from_json(placement_to_json(x), 3, 2), x);
  EXPECT_THROW(placement_from_json(R"({"objects":[{"id":5,"replicators":[]}]})", 3, 2),
               StructuralError);
}

}  // namespace
}  // namespace avrp
