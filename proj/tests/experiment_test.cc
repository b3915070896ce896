#include "avrp/experiment.h"

#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "avrp/error.h"
#include "support/oracle.h"

namespace avrp {
namespace {

TEST(CapacityPolicy, Parsing) {
  EXPECT_EQ(parse_capacity_policy("scenario").kind,
            CapacityPolicy::Kind::kScenario);
  EXPECT_EQ(parse_capacity_policy("unbounded").kind,
            CapacityPolicy::Kind::kUnbounded);
  const CapacityPolicy slack = parse_capacity_policy("slack:2.5");
  EXPECT_EQ(slack.kind, CapacityPolicy::Kind::kSlack);
  EXPECT_EQ(slack.factor, 2.5);
  EXPECT_EQ(parse_capacity_policy("slack").factor, 1.5);
  EXPECT_EQ(to_string(slack), "slack:2.5");
  EXPECT_THROW(parse_capacity_policy("slack:x"), ParameterError);
  EXPECT_THROW(parse_capacity_policy("slack:-1"), ParameterError);
  EXPECT_THROW(parse_capacity_policy("tight"), ParameterError);
}

TEST(CapacityPolicy, Values) {
  ObjectCatalog objects;
  objects.sizes = {10, 20, 30};
  objects.primaries = {0, 0, 2};
  const std::vector<Size> stored = {7, 8, 9};

  EXPECT_EQ(capacities_for({CapacityPolicy::Kind::kScenario}, objects, stored, 3),
            stored);
  EXPECT_EQ(capacities_for({CapacityPolicy::Kind::kUnbounded}, objects, stored, 1),
            (std::vector<Size>{60, 60, 60}));

  const CapacityPolicy slack{CapacityPolicy::Kind::kSlack, 1.5};
  // cap 1: primaries only, empty servers still get one unit
  EXPECT_EQ(capacities_for(slack, objects, stored, 1),
            (std::vector<Size>{30, 1, 30}));
  // cap 2: 1.5 * 60 * 1 / 3 = 30 extra each
  EXPECT_EQ(capacities_for(slack, objects, stored, 2),
            (std::vector<Size>{60, 30, 60}));
  // unlimited counts as M
  EXPECT_EQ(capacities_for(slack, objects, stored, kUnlimitedReplicas),
            capacities_for(slack, objects, stored, 3));
}

TEST(Caps, Parsing) {
  EXPECT_EQ(parse_caps("1..5"), (std::vector<int>{1, 2, 3, 4, 5}));
  EXPECT_EQ(parse_caps("1,2,4"), (std::vector<int>{1, 2, 4}));
  EXPECT_EQ(parse_caps("1,3,unlimited"),
            (std::vector<int>{1, 3, kUnlimitedReplicas}));
  EXPECT_THROW(parse_caps("2..5"), ParameterError);
  EXPECT_THROW(parse_caps("1,3,2"), ParameterError);
  EXPECT_THROW(parse_caps("1,,2"), ParameterError);
  EXPECT_THROW(parse_caps("0..3"), ParameterError);
  EXPECT_EQ(format_cap(kUnlimitedReplicas), "unlimited");
  EXPECT_EQ(parse_cap("unlimited"), kUnlimitedReplicas);
}

TEST(ResultRow, Formatting) {
  ResultRow row;
  row.algorithm = Algorithm::kGg;
  row.cap = 3;
  row.seed = 42;
  row.c_old = 490;
  row.c_new = 70;
  row.impl_cost = 120;
  row.benefit_total = 300.0;
  row.flips = 2;
  row.evictions = 0;
  row.min_avail_old = 0.8;
  row.min_avail_new = 0.98;
  row.runtime_ms = 1.23456;
  EXPECT_EQ(format_row(row),
            "gg,3,42,490,70,120,300.000000,2,0,0.800000000000,"
            "0.980000000000,1.235");
  EXPECT_EQ(format_row(row, false),
            "gg,3,42,490,70,120,300.000000,2,0,0.800000000000,"
            "0.980000000000,0.000");

  std::ostringstream csv;
  write_results_csv({row}, csv, false);
  EXPECT_EQ(csv.str(), std::string(kResultsHeader) + "\n" +
                           format_row(row, false) + "\n");
}

TEST(RunCell, MicroInstance) {
  const auto t = oracle::micro_instance();
  const CellOutput out =
      run_cell(t.costs, t.scenario, Algorithm::kAagg, kUnlimitedReplicas,
               {CapacityPolicy::Kind::kScenario}, SolverConfig{}, 1);
  EXPECT_EQ(out.row.c_old, 490);
  EXPECT_EQ(out.row.c_new, 70);
  EXPECT_EQ(out.row.impl_cost, 120);
  EXPECT_EQ(out.row.flips, 2);
  EXPECT_EQ(out.row.evictions, 0);
  EXPECT_NEAR(out.row.min_avail_old, 0.9, 1e-12);
  // O1 on {S0,S1}: 1 - 0.1*0.2; O2 on {S2,S1}: 1 - 0.01*0.2
  EXPECT_NEAR(out.row.min_avail_new, 0.98, 1e-12);
}

GeneratedExperiment small_experiment(std::uint64_t seed) {
  ExperimentConfig config;
  config.nodes = 12;
  config.objects = 60;
  config.size_lo = 10;
  config.size_hi = 50;
  config.traffic.total_volume = 1'000'000;
  config.seed = seed;
  return generate_experiment(config);
}

TEST(GenerateExperiment, DeterministicPerSeed) {
  const auto a = small_experiment(9);
  const auto b = small_experiment(9);
  const auto c = small_experiment(10);
  EXPECT_EQ(topology_to_json(a.topology), topology_to_json(b.topology));
  EXPECT_EQ(scenario_to_json(a.scenario), scenario_to_json(b.scenario));
  EXPECT_NE(scenario_to_json(a.scenario), scenario_to_json(c.scenario));
  EXPECT_TRUE(a.notes.empty());
}

TEST(RunSweep, OrderingAndDeterminism) {
  const auto e = small_experiment(4);
  const std::vector<Algorithm> algs = {Algorithm::kGg, Algorithm::kAagg};
  const std::vector<int> caps = {1, 2, 3};
  const CapacityPolicy policy{CapacityPolicy::Kind::kSlack, 1.5};
  const auto rows =
      run_sweep(e.costs, e.scenario, algs, caps, policy, SolverConfig{}, 4, 1);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0].algorithm, Algorithm::kAagg);
  EXPECT_EQ(rows[3].algorithm, Algorithm::kGg);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    EXPECT_EQ(rows[r].cap, caps[r % 3]);
    EXPECT_LE(rows[r].c_new, rows[r].c_old);
  }
  EXPECT_EQ(rows[0].impl_cost, 0);
  EXPECT_EQ(rows[3].impl_cost, 0);

  const auto threaded =
      run_sweep(e.costs, e.scenario, algs, caps, policy, SolverConfig{}, 4, 3);
  std::ostringstream one;
  std::ostringstream many;
  write_results_csv(rows, one, false);
  write_results_csv(threaded, many, false);
  EXPECT_EQ(one.str(), many.str());
}

TEST(Inspect, ReportsViolations) {
  const auto t = oracle::micro_instance();
  ReplicationMatrix x = primary_only_placement(t.scenario.servers,
                                               t.scenario.objects);
  InspectReport ok = inspect_placement(x, t.costs, t.scenario);
  EXPECT_TRUE(ok.valid());
  EXPECT_EQ(ok.cost.total, 490);
  EXPECT_EQ(ok.replica_histogram.at(1), 2);

  x(0, 0) = 0;  // drop a primary
  x(0, 1) = 1;
  x(1, 1) = 1;
  x(1, 0) = 1;
  Scenario tight = t.scenario;
  tight.servers.capacities[1] = 25;
  const InspectReport bad = inspect_placement(x, t.costs, tight);
  EXPECT_FALSE(bad.valid());
  EXPECT_GE(bad.violations.size(), 2u);
  EXPECT_NE(format_inspect_text(bad).find("primary"), std::string::npos);
  EXPECT_NO_THROW(nlohmann::json::parse(format_inspect_json(bad)));
}

}  // namespace
}  // namespace avrp
