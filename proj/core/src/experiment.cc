#include "avrp/experiment.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <future>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "avrp/error.h"
#include "avrp/rng.h"

namespace avrp {

namespace {

int parse_positive_int(std::string_view text, std::string_view what) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 1) {
    throw ParameterError(std::string(what) + " must be a positive integer, got '" +
                         std::string(text) + "'");
  }
  return value;
}

}  // namespace

CapacityPolicy parse_capacity_policy(std::string_view text) {
  CapacityPolicy policy;
  if (text == "scenario") {
    policy.kind = CapacityPolicy::Kind::kScenario;
  } else if (text == "unbounded") {
    policy.kind = CapacityPolicy::Kind::kUnbounded;
  } else if (text == "slack") {
    policy.kind = CapacityPolicy::Kind::kSlack;
  } else if (text.substr(0, 6) == "slack:") {
    policy.kind = CapacityPolicy::Kind::kSlack;
    const std::string_view number = text.substr(6);
    const auto [ptr, ec] = std::from_chars(
        number.data(), number.data() + number.size(), policy.factor);
    if (ec != std::errc() || ptr != number.data() + number.size() ||
        !(policy.factor >= 0.0)) {
      throw ParameterError("bad slack factor '" + std::string(number) + "'");
    }
  } else {
    throw ParameterError("capacity policy must be scenario, unbounded or "
                         "slack[:F], got '" +
                         std::string(text) + "'");
  }
  return policy;
}

std::string to_string(const CapacityPolicy& policy) {
  switch (policy.kind) {
    case CapacityPolicy::Kind::kScenario:
      return "scenario";
    case CapacityPolicy::Kind::kUnbounded:
      return "unbounded";
    case CapacityPolicy::Kind::kSlack:
      return fmt::format("slack:{}", policy.factor);
  }
  return "?";
}

std::vector<Size> capacities_for(const CapacityPolicy& policy,
                                 const ObjectCatalog& objects,
                                 std::span<const Size> scenario_capacities,
                                 int cap) {
  const int m = static_cast<int>(scenario_capacities.size());
  if (policy.kind == CapacityPolicy::Kind::kScenario) {
    return {scenario_capacities.begin(), scenario_capacities.end()};
  }
  Size total = 0;
  for (Size s : objects.sizes) total += s;
  if (policy.kind == CapacityPolicy::Kind::kUnbounded) {
    return std::vector<Size>(m, std::max<Size>(total, 1));
  }
  const int effective_cap = cap == kUnlimitedReplicas ? m : std::min(cap, m);
  const double extra = policy.factor * static_cast<double>(total) *
                       static_cast<double>(effective_cap - 1) /
                       static_cast<double>(m);
  std::vector<Size> caps(m, static_cast<Size>(extra));
  for (int k = 0; k < objects.size(); ++k) {
    caps[objects.primaries[k]] += objects.sizes[k];
  }
  for (Size& c : caps) c = std::max<Size>(c, 1);
  return caps;
}

void ExperimentConfig::validate() const {
  if (nodes < 1) throw ParameterError("--nodes must be >= 1");
  if (objects < 1) throw ParameterError("--objects must be >= 1");
  if (capacity_cap < 1) throw ParameterError("capacity cap must be >= 1");
  traffic.validate();
  synthetic.validate();
}

GeneratedExperiment generate_experiment(const ExperimentConfig& config) {
  config.validate();
  GeneratedExperiment out;
  out.topology = assign_link_costs(
      generate_ba_topology(config.nodes, config.m_links,
                           derive_seed(config.seed, Stream::kTopology)),
      config.cost_lo, config.cost_hi,
      derive_seed(config.seed, Stream::kLinkCosts));
  out.costs = all_pairs_shortest_paths(out.topology);

  Scenario& s = out.scenario;
  s.objects = generate_object_catalog(
      config.objects, config.size_lo, config.size_hi, config.nodes,
      derive_seed(config.seed, Stream::kCatalog));
  TrafficModel traffic = config.traffic;
  traffic.seed = derive_seed(config.seed, Stream::kTraffic);
  s.traffic = generate_traffic(traffic, config.nodes, config.objects,
                               s.objects.sizes);

  if (config.trace_path) {
    FailureTrace trace =
        load_failure_trace(*config.trace_path, config.trace_horizon);
    const bool needs_fold = std::any_of(
        trace.records.begin(), trace.records.end(),
        [&](const TraceRecord& r) { return r.node >= config.nodes; });
    if (needs_fold) {
      trace = fold_trace_nodes(std::move(trace), config.nodes);
      out.notes.push_back(fmt::format(
          "trace node ids folded modulo {} onto topology nodes", config.nodes));
    }
    s.servers.failure_probs =
        estimate_availability(trace, config.nodes, config.f_max);
  } else {
    s.servers.failure_probs =
        synthetic_availability(config.nodes, config.synthetic,
                               derive_seed(config.seed, Stream::kAvailability));
  }
  const std::vector<Size> placeholder(config.nodes, 1);
  CapacityPolicy policy = config.capacity;
  if (policy.kind == CapacityPolicy::Kind::kScenario) {
    policy.kind = CapacityPolicy::Kind::kSlack;
  }
  s.servers.capacities =
      capacities_for(policy, s.objects, placeholder, config.capacity_cap);
  s.validate();
  return out;
}

std::string format_cap(int cap) {
  return cap == kUnlimitedReplicas ? "unlimited" : std::to_string(cap);
}

int parse_cap(std::string_view text) {
  if (text == "unlimited") return kUnlimitedReplicas;
  return parse_positive_int(text, "cap");
}

std::vector<int> parse_caps(std::string_view text) {
  std::vector<int> caps;
  const auto dots = text.find("..");
  if (dots != std::string_view::npos) {
    const int lo = parse_positive_int(text.substr(0, dots), "caps");
    const int hi = parse_positive_int(text.substr(dots + 2), "caps");
    for (int c = lo; c <= hi; ++c) caps.push_back(c);
  } else {
    std::size_t begin = 0;
    while (begin <= text.size()) {
      const auto end = text.find(',', begin);
      caps.push_back(parse_cap(text.substr(begin, end - begin)));
      if (end == std::string_view::npos) break;
      begin = end + 1;
    }
  }
  if (caps.empty() || caps.front() != 1) {
    throw ParameterError("caps must start at 1");
  }
  for (std::size_t idx = 1; idx < caps.size(); ++idx) {
    if (caps[idx] <= caps[idx - 1]) {
      throw ParameterError("caps must be strictly increasing");
    }
  }
  return caps;
}

std::string format_row(const ResultRow& row, bool record_runtime) {
  return fmt::format("{},{},{},{},{},{},{:.6f},{},{},{:.12f},{:.12f},{:.3f}",
                     to_string(row.algorithm), format_cap(row.cap), row.seed,
                     row.c_old, row.c_new, row.impl_cost, row.benefit_total,
                     row.flips, row.evictions, row.min_avail_old,
                     row.min_avail_new, record_runtime ? row.runtime_ms : 0.0);
}

double min_object_availability(const ReplicationMatrix& x,
                               std::span<const double> failure_probs,
                               AvailabilitySemantics semantics) {
  double lowest = 1.0;
  for (int k = 0; k < x.cols(); ++k) {
    lowest =
        std::min(lowest, object_availability(k, x, failure_probs, semantics));
  }
  return lowest;
}

CellOutput run_cell(const CostMatrix& costs, const Scenario& scenario,
                    Algorithm algorithm, int cap, const CapacityPolicy& policy,
                    const SolverConfig& solver, std::uint64_t seed,
                    const std::optional<ReplicationMatrix>& x_old) {
  CellOutput out;
  out.scenario = scenario;
  out.scenario.servers.capacities = capacities_for(
      policy, scenario.objects, scenario.servers.capacities, cap);

  SolverConfig config = solver;
  config.algorithm = algorithm;
  config.max_replicas_per_object = cap;
  config.seed = derive_seed(seed, Stream::kSolver);

  const ReplicationMatrix start =
      x_old ? *x_old
            : primary_only_placement(out.scenario.servers,
                                     out.scenario.objects);
  const auto t0 = std::chrono::steady_clock::now();
  out.result = solve({costs, out.scenario, start}, config);
  const auto t1 = std::chrono::steady_clock::now();

  const auto& f = out.scenario.servers.failure_probs;
  ResultRow& row = out.row;
  row.algorithm = algorithm;
  row.cap = cap;
  row.seed = seed;
  row.c_old = out.result.c_old;
  row.c_new = out.result.c_new;
  row.impl_cost = out.result.impl_cost_total;
  row.benefit_total = out.result.benefit_total;
  row.flips = out.result.flips();
  row.evictions = out.result.evictions();
  row.min_avail_old =
      min_object_availability(start, f, config.availability_semantics);
  row.min_avail_new = min_object_availability(out.result.x_new, f,
                                              config.availability_semantics);
  row.runtime_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  return out;
}

std::vector<ResultRow> run_sweep(const CostMatrix& costs,
                                 const Scenario& scenario,
                                 std::vector<Algorithm> algorithms,
                                 std::vector<int> caps,
                                 const CapacityPolicy& policy,
                                 const SolverConfig& solver,
                                 std::uint64_t seed, int jobs) {
  std::sort(algorithms.begin(), algorithms.end());
  algorithms.erase(std::unique(algorithms.begin(), algorithms.end()),
                   algorithms.end());
  std::sort(caps.begin(), caps.end());

  struct Cell {
    Algorithm algorithm;
    int cap;
  };
  std::vector<Cell> cells;
  for (Algorithm a : algorithms) {
    for (int c : caps) cells.push_back({a, c});
  }
  std::vector<ResultRow> rows(cells.size());
  jobs = std::max(1, jobs);
  // Each cell owns its solver state; rows land in their fixed slot.
  for (std::size_t begin = 0; begin < cells.size(); begin += jobs) {
    std::vector<std::future<ResultRow>> batch;
    const std::size_t end = std::min(cells.size(), begin + jobs);
    for (std::size_t idx = begin; idx < end; ++idx) {
      batch.push_back(std::async(
          jobs > 1 ? std::launch::async : std::launch::deferred, [&, idx] {
            return run_cell(costs, scenario, cells[idx].algorithm,
                            cells[idx].cap, policy, solver, seed)
                .row;
          }));
    }
    for (std::size_t idx = begin; idx < end; ++idx) {
      rows[idx] = batch[idx - begin].get();
    }
  }
  return rows;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& out,
                       bool record_runtime) {
  out << kResultsHeader << '\n';
  for (const ResultRow& row : rows) {
    out << format_row(row, record_runtime) << '\n';
  }
}

std::string sweep_gnuplot_script(const std::string& csv_name,
                                 const std::vector<Algorithm>& algorithms) {
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key top left\n"
     << "set xlabel 'replicas per object'\n"
     << "set ylabel 'schedule (implementation) cost'\n"
     << "set terminal pngcairo size 800,500\n"
     << "set output 'sweep.png'\n"
     << "plot ";
  for (std::size_t idx = 0; idx < algorithms.size(); ++idx) {
    const std::string name(to_string(algorithms[idx]));
    if (idx > 0) gp << ", \\\n     ";
    gp << "'" << csv_name << "' using ($1 eq '" << name
       << "' ? $2 : 1/0):6 with linespoints title '" << name << "'";
  }
  gp << '\n';
  return gp.str();
}

InspectReport inspect_placement(const ReplicationMatrix& x,
                                const CostMatrix& costs,
                                const Scenario& scenario,
                                AvailabilitySemantics semantics) {
  InspectReport report;
  report.violations =
      validate_placement(x, scenario.servers, scenario.objects);
  for (int k = 0; k < x.cols(); ++k) {
    ++report.replica_histogram[x.replica_count(k)];
  }
  // Cost and availability are undefined for objects without replicators.
  for (int k = 0; k < x.cols(); ++k) {
    if (x.replica_count(k) == 0) return report;
  }
  report.cost =
      total_access_cost(build_nearest_index(x, costs), scenario.traffic, costs);
  for (int k = 0; k < x.cols(); ++k) {
    report.availability.push_back(object_availability(
        k, x, scenario.servers.failure_probs, semantics));
  }
  return report;
}

std::string format_inspect_text(const InspectReport& report) {
  std::ostringstream out;
  out << "valid: " << (report.valid() ? "yes" : "no") << '\n';
  for (const Violation& v : report.violations) {
    out << "  violation ("
        << (v.kind == Violation::Kind::kStorage ? "storage" : "primary")
        << "): " << v.message << '\n';
  }
  if (!report.availability.empty()) {
    out << "access cost: " << report.cost.total << '\n';
    const auto [lo, hi] = std::minmax_element(report.availability.begin(),
                                              report.availability.end());
    out << fmt::format("object availability: min {:.12f} max {:.12f}\n", *lo,
                       *hi);
  }
  out << "replicas per object:\n";
  for (const auto& [count, objects] : report.replica_histogram) {
    out << "  " << count << ": " << objects << '\n';
  }
  return out.str();
}

std::string format_inspect_json(const InspectReport& report) {
  nlohmann::json doc;
  doc["valid"] = report.valid();
  auto violations = nlohmann::json::array();
  for (const Violation& v : report.violations) {
    violations.push_back(
        {{"constraint",
          v.kind == Violation::Kind::kStorage ? "storage" : "primary"},
         {"index", v.index},
         {"message", v.message}});
  }
  doc["violations"] = std::move(violations);
  if (!report.availability.empty()) {
    doc["access_cost"] = report.cost.total;
    doc["per_object_cost"] = report.cost.per_object;
    doc["availability"] = report.availability;
  }
  auto histogram = nlohmann::json::object();
  for (const auto& [count, objects] : report.replica_histogram) {
    histogram[std::to_string(count)] = objects;
  }
  doc["replica_histogram"] = std::move(histogram);
  return doc.dump(2) + "\n";
}

}  // namespace avrp
