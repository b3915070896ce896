#include "commands.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif
#include <fmt/format.h>

#include "avrp/error.h"
#include "avrp/experiment.h"

namespace avrp::cli {

namespace fs = std::filesystem;

namespace {

// A flag value that parsed as a string but names nothing we know.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename F>
auto flag_value(F&& parse) -> decltype(parse()) {
  try {
    return parse();
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + dir.string() + "'");
  }
}

// Raw flag values for the scenario generator. Strings are parsed after
// CLI11 is done so that bad names map to usage errors.
struct GeneratorFlags {
  ExperimentConfig config;
  std::string traffic = "zipf";
  std::string trace;
  std::string trace_horizon;
  std::string synthetic = "uniform:0:0.2";
  std::string capacity_policy = "slack:1.5";
};

void add_generator_flags(CLI::App* cmd, GeneratorFlags& g) {
  ExperimentConfig& c = g.config;
  cmd->add_option("--nodes", c.nodes, "Number of servers")
      ->capture_default_str();
  cmd->add_option("--m-links", c.m_links,
                  "Links added per node by preferential attachment")
      ->capture_default_str();
  cmd->add_option("--cost-lo", c.cost_lo, "Smallest link cost")
      ->capture_default_str();
  cmd->add_option("--cost-hi", c.cost_hi, "Largest link cost")
      ->capture_default_str();
  cmd->add_option("--objects", c.objects, "Number of objects")
      ->capture_default_str();
  cmd->add_option("--size-lo", c.size_lo, "Smallest object size")
      ->capture_default_str();
  cmd->add_option("--size-hi", c.size_hi, "Largest object size")
      ->capture_default_str();
  cmd->add_option("--traffic", g.traffic, "Traffic model: uniform or zipf")
      ->capture_default_str();
  cmd->add_option("--zipf-skew", c.traffic.zipf_skew, "Zipf exponent")
      ->capture_default_str();
  cmd->add_option("--traffic-volume", c.traffic.total_volume,
                  "Total bytes requested over all servers and objects")
      ->capture_default_str();
  auto* trace = cmd->add_option("--trace", g.trace,
                                "Failure trace CSV (node_id,start,end,state)");
  cmd->add_option("--trace-horizon", g.trace_horizon,
                  "Observation window T0:T1 for the trace")
      ->needs(trace);
  cmd->add_option("--max-failure-prob", c.f_max,
                  "Upper clamp for trace-derived failure probabilities")
      ->capture_default_str();
  cmd->add_option("--synthetic-availability", g.synthetic,
                  "constant:F or uniform:LO:HI failure probabilities")
      ->capture_default_str()
      ->excludes(trace);
  cmd->add_option("--capacity-cap", c.capacity_cap,
                  "Replica cap used to size the generated capacities")
      ->capture_default_str();
}

TraceHorizon parse_horizon(const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) throw std::invalid_argument(text);
    std::size_t used_start = 0;
    std::size_t used_end = 0;
    const std::string start_text = text.substr(0, colon);
    const std::string end_text = text.substr(colon + 1);
    TraceHorizon h{std::stod(start_text, &used_start),
                   std::stod(end_text, &used_end)};
    if (used_start != start_text.size() || used_end != end_text.size()) {
      throw std::invalid_argument(text);
    }
    return h;
  } catch (const std::logic_error&) {
    throw UsageError("--trace-horizon expects T0:T1, got '" + text + "'");
  }
}

ExperimentConfig resolve(const GeneratorFlags& g, std::uint64_t seed) {
  ExperimentConfig c = g.config;
  c.seed = seed;
  c.traffic.kind = flag_value([&] { return parse_traffic_kind(g.traffic); });
  c.synthetic = flag_value(
      [&] { return parse_availability_distribution(g.synthetic); });
  c.capacity =
      flag_value([&] { return parse_capacity_policy(g.capacity_policy); });
  if (!g.trace.empty()) {
    c.trace_path = g.trace;
    if (!g.trace_horizon.empty()) c.trace_horizon = parse_horizon(g.trace_horizon);
  }
  return c;
}

struct SolverFlags {
  std::string algorithm = "aagg";
  std::string cap = "unlimited";
  std::string scope = "focal_object";
  std::string semantics = "corrected";
};

void add_solver_flags(CLI::App* cmd, SolverFlags& s) {
  cmd->add_option("--availability-scope", s.scope,
                  "focal_object or all_changed_objects")
      ->capture_default_str();
  cmd->add_option("--availability-semantics", s.semantics,
                  "corrected or literal")
      ->capture_default_str();
}

SolverConfig resolve(const SolverFlags& s) {
  SolverConfig config;
  config.algorithm = flag_value([&] { return parse_algorithm(s.algorithm); });
  config.max_replicas_per_object = flag_value([&] { return parse_cap(s.cap); });
  config.availability_scope =
      flag_value([&] { return parse_availability_scope(s.scope); });
  config.availability_semantics =
      flag_value([&] { return parse_availability_semantics(s.semantics); });
  return config;
}

std::vector<Algorithm> parse_algorithms(const std::string& text) {
  std::vector<Algorithm> algorithms;
  std::size_t begin = 0;
  while (true) {
    const auto end = text.find(',', begin);
    const std::string name = text.substr(begin, end - begin);
    algorithms.push_back(flag_value([&] { return parse_algorithm(name); }));
    if (end == std::string::npos) break;
    begin = end + 1;
  }
  return algorithms;
}

struct LoadedScenario {
  Graph topology;
  CostMatrix costs;
  Scenario scenario;
};

LoadedScenario load_scenario(const std::string& topology_path,
                             const std::string& scenario_path) {
  LoadedScenario s;
  s.topology = topology_from_json(read_file(topology_path));
  s.scenario = scenario_from_json(read_file(scenario_path));
  if (s.scenario.servers.size() != s.topology.node_count()) {
    throw StructuralError(fmt::format(
        "scenario has {} servers but the topology has {} nodes",
        s.scenario.servers.size(), s.topology.node_count()));
  }
  s.costs = all_pairs_shortest_paths(s.topology);
  return s;
}

void write_rows(std::ostream& out, const std::vector<ResultRow>& rows,
                bool record_runtime) {
  out << kResultsHeader << '\n';
  for (const ResultRow& row : rows) out << format_row(row, record_runtime) << '\n';
}

// gen ----------------------------------------------------------------------

struct GenCommand {
  GeneratorFlags generator;
  std::uint64_t seed = 42;
  std::string out_dir;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "gen", "Generate a topology and scenario from a master seed");
    add_generator_flags(cmd, generator);
    cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
    cmd->add_option("--out", out_dir, "Output directory")->required();
  }

  int run(std::ostream& out, std::ostream& err) const {
    const ExperimentConfig config = resolve(generator, seed);
    const GeneratedExperiment e = generate_experiment(config);
    for (const std::string& note : e.notes) err << "note: " << note << '\n';
    ensure_directory(out_dir);
    const fs::path dir(out_dir);
    write_file(dir / "topology.json", topology_to_json(e.topology));
    write_file(dir / "scenario.json", scenario_to_json(e.scenario));
    out << fmt::format("wrote {} and {} ({} servers, {} objects)\n",
                       (dir / "topology.json").string(),
                       (dir / "scenario.json").string(),
                       e.scenario.servers.size(), e.scenario.objects.size());
    return kOk;
  }
};

// solve --------------------------------------------------------------------

struct SolveCommand {
  std::string topology_path;
  std::string scenario_path;
  std::string x_old_path;
  SolverFlags solver;
  std::string capacity_policy = "scenario";
  std::uint64_t seed = 42;
  std::string out_dir;
  bool no_runtime = false;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "solve", "Run one placement algorithm on a scenario");
    cmd->add_option("--topology", topology_path, "Topology JSON")->required();
    cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    cmd->add_option("--x-old", x_old_path,
                    "Current placement JSON (default: primaries only)");
    cmd->add_option("--alg", solver.algorithm, "aagg, aagro, gg or gro")
        ->capture_default_str();
    cmd->add_option("--cap", solver.cap,
                    "Replicas per object, counting the primary, or unlimited")
        ->capture_default_str();
    add_solver_flags(cmd, solver);
    cmd->add_option("--capacity-policy", capacity_policy,
                    "scenario, unbounded or slack[:F]")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for the random object order")
        ->capture_default_str();
    cmd->add_option("--out", out_dir,
                    "Directory for placement.json, result.json and result.csv");
    cmd->add_flag("--no-runtime", no_runtime,
                  "Write runtime_ms as 0 for reproducible output");
  }

  int run(std::ostream& out, std::ostream&) const {
    const SolverConfig config = resolve(solver);
    const CapacityPolicy policy =
        flag_value([&] { return parse_capacity_policy(capacity_policy); });
    const LoadedScenario s = load_scenario(topology_path, scenario_path);
    std::optional<ReplicationMatrix> x_old;
    if (!x_old_path.empty()) {
      x_old = placement_from_json(read_file(x_old_path),
                                  s.scenario.servers.size(),
                                  s.scenario.objects.size());
    }
    const CellOutput cell =
        run_cell(s.costs, s.scenario, config.algorithm,
                 config.max_replicas_per_object, policy, config, seed, x_old);

    if (!out_dir.empty()) {
      ensure_directory(out_dir);
      const fs::path dir(out_dir);
      write_file(dir / "placement.json", placement_to_json(cell.result.x_new));
      write_file(dir / "result.json", to_json(cell.result, config.algorithm));
      std::ostringstream csv;
      write_rows(csv, {cell.row}, !no_runtime);
      write_file(dir / "result.csv", csv.str());
    }
    write_rows(out, {cell.row}, !no_runtime);
    return kOk;
  }
};

// sweep --------------------------------------------------------------------

struct SweepCommand {
  GeneratorFlags generator;
  std::string topology_path;
  std::string scenario_path;
  SolverFlags solver;
  std::string algorithms = "aagg,gg";
  std::string caps = "1..5";
  std::string capacity_policy = "slack:1.5";
  std::uint64_t seed = 42;
  int jobs = 1;
  std::string out_dir = ".";
  bool no_runtime = false;

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "sweep", "Solve every algorithm x cap cell from primaries only");
    add_generator_flags(cmd, generator);
    auto* topology =
        cmd->add_option("--topology", topology_path, "Topology JSON");
    auto* scenario =
        cmd->add_option("--scenario", scenario_path, "Scenario JSON");
    topology->needs(scenario);
    scenario->needs(topology);
    cmd->add_option("--algs", algorithms, "Comma separated algorithm list")
        ->capture_default_str();
    cmd->add_option("--caps", caps, "1..K or a comma list starting at 1")
        ->capture_default_str();
    add_solver_flags(cmd, solver);
    cmd->add_option("--capacity-policy", capacity_policy,
                    "scenario, unbounded or slack[:F]")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "Master seed")->capture_default_str();
    cmd->add_option("--jobs", jobs, "Cells solved in parallel")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out_dir,
                    "Directory for results.csv and sweep.gp")
        ->capture_default_str();
    cmd->add_flag("--no-runtime", no_runtime,
                  "Write runtime_ms as 0 for byte-identical reruns");
  }

  int run(std::ostream& out, std::ostream& err) const {
    const SolverConfig config = resolve(solver);
    const std::vector<Algorithm> algs = parse_algorithms(algorithms);
    const std::vector<int> cap_list = flag_value([&] { return parse_caps(caps); });
    const CapacityPolicy policy =
        flag_value([&] { return parse_capacity_policy(capacity_policy); });

    LoadedScenario s;
    if (!topology_path.empty()) {
      s = load_scenario(topology_path, scenario_path);
    } else {
      const GeneratedExperiment e =
          generate_experiment(resolve(generator, seed));
      for (const std::string& note : e.notes) err << "note: " << note << '\n';
      s.topology = e.topology;
      s.costs = e.costs;
      s.scenario = e.scenario;
    }
    const std::vector<ResultRow> rows = run_sweep(
        s.costs, s.scenario, algs, cap_list, policy, config, seed, jobs);

    ensure_directory(out_dir);
    const fs::path dir(out_dir);
    std::ostringstream csv;
    write_results_csv(rows, csv, !no_runtime);
    write_file(dir / "results.csv", csv.str());
    write_file(dir / "sweep.gp", sweep_gnuplot_script("results.csv", algs));
    out << csv.str();
    return kOk;
  }
};

// inspect ------------------------------------------------------------------

struct InspectCommand {
  std::string placement_path;
  std::string topology_path;
  std::string scenario_path;
  std::string semantics = "corrected";
  std::string format = "text";

  void attach(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand(
        "inspect", "Check a placement and report cost and availability");
    cmd->add_option("--placement", placement_path, "Placement JSON")
        ->required();
    cmd->add_option("--topology", topology_path, "Topology JSON")->required();
    cmd->add_option("--scenario", scenario_path, "Scenario JSON")->required();
    cmd->add_option("--availability-semantics", semantics,
                    "corrected or literal")
        ->capture_default_str();
    cmd->add_option("--format", format, "text or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"text", "json"}));
  }

  int run(std::ostream& out, std::ostream&) const {
    const AvailabilitySemantics sem =
        flag_value([&] { return parse_availability_semantics(semantics); });
    const LoadedScenario s = load_scenario(topology_path, scenario_path);
    const ReplicationMatrix x =
        placement_from_json(read_file(placement_path),
                            s.scenario.servers.size(),
                            s.scenario.objects.size());
    const InspectReport report = inspect_placement(x, s.costs, s.scenario, sem);
    out << (format == "json" ? format_inspect_json(report)
                             : format_inspect_text(report));
    return report.valid() ? kOk : kValidationFailure;
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Availability-aware replica placement experiments", "avrp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "avrp 0.1.0");

  GenCommand gen;
  SolveCommand solve;
  SweepCommand sweep;
  InspectCommand inspect;
  gen.attach(app);
  solve.attach(app);
  sweep.attach(app);
  inspect.attach(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (app.got_subcommand("gen")) return gen.run(out, err);
    if (app.got_subcommand("solve")) return solve.run(out, err);
    if (app.got_subcommand("sweep")) return sweep.run(out, err);
    return inspect.run(out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

}  // namespace avrp::cli
