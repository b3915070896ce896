#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "avrp/model.h"

namespace avrp {

// Sizes uniform in [size_lo, size_hi], primaries uniform over servers.
ObjectCatalog generate_object_catalog(int n_objects, Size size_lo,
                                      Size size_hi, int n_servers,
                                      std::uint64_t seed);

enum class TrafficKind { kUniform, kZipf };

struct TrafficModel {
  TrafficKind kind = TrafficKind::kZipf;
  double zipf_skew = 0.8;
  Bytes total_volume = 1'000'000'000;
  std::uint64_t seed = 0;

  void validate() const;
};

std::string_view to_string(TrafficKind kind);
TrafficKind parse_traffic_kind(std::string_view name);

// Entries always sum to exactly total_volume.
//  uniform: total_volume / (M N) per cell; the remainder goes one byte at a
//           time to seeded random cells.
//  zipf:    object popularity proportional to rank^-skew over a seeded
//           rank permutation; column totals by largest remainder, each
//           column split evenly across servers (remainder bytes to a seeded
//           rotation of servers).
TrafficMatrix generate_traffic(const TrafficModel& model, int n_servers,
                               int n_objects, std::span<const Size> sizes);

enum class NodeState { kUp, kDown };

struct TraceRecord {
  int node = 0;
  double start = 0.0;  // seconds
  double end = 0.0;
  NodeState state = NodeState::kUp;
};

struct FailureTrace {
  std::vector<TraceRecord> records;
  // Observation window shared by every node. Time not covered by a record
  // counts as up.
  double horizon_start = 0.0;
  double horizon_end = 0.0;
};

struct TraceHorizon {
  double start;
  double end;
};

// CSV with header `node_id,start,end,state`, state in {up, down}. Lines
// starting with '#' are comments; `# horizon: T0 T1` fixes the window.
// Without a window (from the file or `horizon`) the window spans all
// records. An explicit `horizon` overrides the file. Throws ParseError
// (with line number) on malformed lines, negative durations or overlapping
// intervals of one node.
FailureTrace parse_failure_trace(std::istream& in,
                                 std::optional<TraceHorizon> horizon = {});
FailureTrace load_failure_trace(const std::string& path,
                                std::optional<TraceHorizon> horizon = {});

inline constexpr double kDefaultMaxFailureProb = 0.99;

// f_i = downtime_i / window, clamped to [0, f_max]. Nodes without records
// get 0. Throws ParameterError for node ids outside [0, n_servers).
std::vector<double> estimate_availability(
    const FailureTrace& trace, int n_servers,
    double f_max = kDefaultMaxFailureProb);

// Renumbers trace nodes as id mod n_servers so a trace with more hosts than
// the topology can still be used. Folded nodes may overlap; estimation uses
// the union of their down intervals.
FailureTrace fold_trace_nodes(FailureTrace trace, int n_servers);

struct AvailabilityDistribution {
  enum class Kind { kConstant, kUniform };
  Kind kind = Kind::kUniform;
  double lo = 0.0;  // kConstant uses lo
  double hi = 0.0;

  void validate() const;
};

// "constant:F" or "uniform:LO:HI".
AvailabilityDistribution parse_availability_distribution(std::string_view spec);
std::string to_string(const AvailabilityDistribution& d);

std::vector<double> synthetic_availability(
    int n_servers, const AvailabilityDistribution& distribution,
    std::uint64_t seed);

}  // namespace avrp
