#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avrp/costs.h"
#include "avrp/heuristics.h"
#include "avrp/model.h"
#include "avrp/topology.h"
#include "avrp/workload.h"

namespace avrp {

// How server capacities are set for a run.
//  kScenario:  keep the capacities stored in the scenario.
//  kSlack:     capacity_i = primaries on i + factor * sum(sizes) * (cap-1) / M
//              (an unlimited cap counts as M), at least 1.
//  kUnbounded: every server can hold every object.
struct CapacityPolicy {
  enum class Kind { kScenario, kSlack, kUnbounded };
  Kind kind = Kind::kSlack;
  double factor = 1.5;
};

// "scenario", "unbounded", "slack" or "slack:F".
CapacityPolicy parse_capacity_policy(std::string_view text);
std::string to_string(const CapacityPolicy& policy);

std::vector<Size> capacities_for(const CapacityPolicy& policy,
                                 const ObjectCatalog& objects,
                                 std::span<const Size> scenario_capacities,
                                 int cap);

struct ExperimentConfig {
  int nodes = 50;
  int m_links = 1;
  Cost cost_lo = 1;
  Cost cost_hi = 10;
  int objects = 1000;
  Size size_lo = 1000;
  Size size_hi = 5000;
  TrafficModel traffic;  // seed is overwritten from the master seed
  std::optional<std::string> trace_path;
  std::optional<TraceHorizon> trace_horizon;
  double f_max = kDefaultMaxFailureProb;
  AvailabilityDistribution synthetic{AvailabilityDistribution::Kind::kUniform,
                                     0.0, 0.2};
  CapacityPolicy capacity;
  int capacity_cap = 5;  // cap used to size capacities of generated files
  std::uint64_t seed = 42;

  void validate() const;
};

struct GeneratedExperiment {
  Graph topology;
  CostMatrix costs;
  Scenario scenario;
  std::vector<std::string> notes;  // e.g. trace node folding
};

// Every random input draws from its own stream of config.seed (see
// derive_seed).
GeneratedExperiment generate_experiment(const ExperimentConfig& config);

struct ResultRow {
  Algorithm algorithm = Algorithm::kAagg;
  int cap = kUnlimitedReplicas;
  std::uint64_t seed = 0;
  Cost c_old = 0;
  Cost c_new = 0;
  Cost impl_cost = 0;
  double benefit_total = 0.0;
  int flips = 0;
  int evictions = 0;
  double min_avail_old = 0.0;
  double min_avail_new = 0.0;
  double runtime_ms = 0.0;
};

inline constexpr std::string_view kResultsHeader =
    "algorithm,cap,seed,c_old,c_new,impl_cost,benefit_total,flips,evictions,"
    "min_avail_old,min_avail_new,runtime_ms";

std::string format_cap(int cap);
int parse_cap(std::string_view text);  // integer >= 1 or "unlimited"

// "1..5" or "1,2,4"; must start at 1 and be strictly increasing.
std::vector<int> parse_caps(std::string_view text);

// One CSV line without trailing newline. With record_runtime = false the
// runtime column is written as 0 so the line is reproducible.
std::string format_row(const ResultRow& row, bool record_runtime = true);

double min_object_availability(const ReplicationMatrix& x,
                               std::span<const double> failure_probs,
                               AvailabilitySemantics semantics);

struct CellOutput {
  ResultRow row;
  PlacementResult result;
  Scenario scenario;  // with the capacities actually used
};

// Solves one (algorithm, cap) cell. x_old defaults to primaries only.
// solver.algorithm and max_replicas_per_object are taken from the
// arguments; the random-object order uses derive_seed(seed, kSolver).
CellOutput run_cell(const CostMatrix& costs, const Scenario& scenario,
                    Algorithm algorithm, int cap, const CapacityPolicy& policy,
                    const SolverConfig& solver, std::uint64_t seed,
                    const std::optional<ReplicationMatrix>& x_old = {});

// All algorithm x cap cells from the primary-only placement, rows sorted by
// (algorithm, cap). Cells run on up to `jobs` threads.
std::vector<ResultRow> run_sweep(const CostMatrix& costs,
                                 const Scenario& scenario,
                                 std::vector<Algorithm> algorithms,
                                 std::vector<int> caps,
                                 const CapacityPolicy& policy,
                                 const SolverConfig& solver,
                                 std::uint64_t seed, int jobs = 1);

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out,
                       bool record_runtime = true);

// gnuplot script plotting impl_cost against cap, one line per algorithm.
std::string sweep_gnuplot_script(const std::string& csv_name,
                                 const std::vector<Algorithm>& algorithms);

struct InspectReport {
  std::vector<Violation> violations;
  CostReport cost;
  std::vector<double> availability;
  std::map<int, int> replica_histogram;  // replica count -> objects

  bool valid() const { return violations.empty(); }
};

InspectReport inspect_placement(const ReplicationMatrix& x,
                                const CostMatrix& costs,
                                const Scenario& scenario,
                                AvailabilitySemantics semantics =
                                    AvailabilitySemantics::kCorrected);

std::string format_inspect_text(const InspectReport& report);
std::string format_inspect_json(const InspectReport& report);

}  // namespace avrp
