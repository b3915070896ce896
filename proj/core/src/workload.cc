#include "avrp/workload.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "avrp/error.h"
#include "avrp/rng.h"

namespace avrp {

ObjectCatalog generate_object_catalog(int n_objects, Size size_lo,
                                      Size size_hi, int n_servers,
                                      std::uint64_t seed) {
  if (n_objects < 0) throw ParameterError("object count must be >= 0");
  if (size_lo <= 0 || size_lo > size_hi) {
    throw ParameterError("object size range must satisfy 0 < lo <= hi");
  }
  if (n_servers < 1) throw ParameterError("need at least one server");
  Rng rng(seed);
  ObjectCatalog catalog;
  catalog.sizes.reserve(n_objects);
  catalog.primaries.reserve(n_objects);
  for (int k = 0; k < n_objects; ++k) {
    catalog.sizes.push_back(rng.uniform_int(size_lo, size_hi));
    catalog.primaries.push_back(
        static_cast<int>(rng.uniform_int(0, n_servers - 1)));
  }
  return catalog;
}

void TrafficModel::validate() const {
  if (!(zipf_skew >= 0.0) || !std::isfinite(zipf_skew)) {
    throw ParameterError("zipf skew must be a finite value >= 0");
  }
  if (total_volume <= 0) throw ParameterError("total volume must be > 0");
}

std::string_view to_string(TrafficKind kind) {
  return kind == TrafficKind::kUniform ? "uniform" : "zipf";
}

TrafficKind parse_traffic_kind(std::string_view name) {
  if (name == "uniform") return TrafficKind::kUniform;
  if (name == "zipf") return TrafficKind::kZipf;
  throw ParameterError("unknown traffic model '" + std::string(name) + "'");
}

namespace {

std::vector<Bytes> zipf_column_totals(const TrafficModel& model, int n_objects,
                                      Rng& rng) {
  std::vector<int> object_at_rank(n_objects);
  std::iota(object_at_rank.begin(), object_at_rank.end(), 0);
  for (int pos = n_objects - 1; pos > 0; --pos) {
    std::swap(object_at_rank[pos], object_at_rank[rng.uniform_int(0, pos)]);
  }
  std::vector<double> weight(n_objects);
  double norm = 0.0;
  for (int rank = 0; rank < n_objects; ++rank) {
    weight[rank] = std::pow(static_cast<double>(rank + 1), -model.zipf_skew);
    norm += weight[rank];
  }
  const double volume = static_cast<double>(model.total_volume);
  std::vector<Bytes> totals(n_objects);
  std::vector<std::pair<double, int>> remainders(n_objects);
  Bytes assigned = 0;
  for (int rank = 0; rank < n_objects; ++rank) {
    const double share = volume * weight[rank] / norm;
    const Bytes whole = static_cast<Bytes>(std::floor(share));
    totals[rank] = whole;
    assigned += whole;
    remainders[rank] = {share - static_cast<double>(whole), rank};
  }
  Bytes left = model.total_volume - assigned;
  // Floating error can push the floor sum slightly off; left stays small.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int idx = 0; left > 0; idx = (idx + 1) % n_objects, --left) {
    ++totals[remainders[idx].second];
  }
  for (int idx = n_objects - 1; left < 0; idx = (idx + n_objects - 1) % n_objects) {
    const int rank = remainders[idx].second;
    if (totals[rank] > 0) {
      --totals[rank];
      ++left;
    }
  }
  std::vector<Bytes> by_object(n_objects);
  for (int rank = 0; rank < n_objects; ++rank) {
    by_object[object_at_rank[rank]] = totals[rank];
  }
  return by_object;
}

}  // namespace

TrafficMatrix generate_traffic(const TrafficModel& model, int n_servers,
                               int n_objects, std::span<const Size> sizes) {
  model.validate();
  if (n_servers < 1 || n_objects < 1) {
    throw ParameterError("traffic needs at least one server and one object");
  }
  if (static_cast<int>(sizes.size()) != n_objects) {
    throw StructuralError("sizes do not match the object count");
  }
  Rng rng(model.seed);
  TrafficMatrix r(n_servers, n_objects, 0);

  if (model.kind == TrafficKind::kUniform) {
    const Bytes cells = static_cast<Bytes>(n_servers) * n_objects;
    const Bytes base = model.total_volume / cells;
    Bytes extra = model.total_volume % cells;
    std::vector<Bytes> order(cells);
    std::iota(order.begin(), order.end(), 0);
    for (Bytes pos = 0; pos < extra; ++pos) {
      std::swap(order[pos], order[rng.uniform_int(pos, cells - 1)]);
    }
    for (int i = 0; i < n_servers; ++i) {
      for (int k = 0; k < n_objects; ++k) r(i, k) = base;
    }
    for (Bytes pos = 0; pos < extra; ++pos) {
      r(static_cast<int>(order[pos] / n_objects),
        static_cast<int>(order[pos] % n_objects)) += 1;
    }
    return r;
  }

  const std::vector<Bytes> totals = zipf_column_totals(model, n_objects, rng);
  for (int k = 0; k < n_objects; ++k) {
    const Bytes base = totals[k] / n_servers;
    const Bytes extra = totals[k] % n_servers;
    const int offset = static_cast<int>(rng.uniform_int(0, n_servers - 1));
    for (int i = 0; i < n_servers; ++i) r(i, k) = base;
    for (Bytes j = 0; j < extra; ++j) {
      r(static_cast<int>((offset + j) % n_servers), k) += 1;
    }
  }
  return r;
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = line.find(sep, begin);
    fields.push_back(line.substr(begin, end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_time(std::string_view text, int line_no) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw ParseError("bad time value '" + std::string(text) + "'", line_no);
  }
  return value;
}

double parse_probability(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParameterError("bad probability '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

FailureTrace parse_failure_trace(std::istream& in,
                                 std::optional<TraceHorizon> horizon) {
  FailureTrace trace;
  std::optional<TraceHorizon> file_horizon;
  std::string raw;
  int line_no = 0;
  bool header_seen = false;
  std::map<int, std::vector<std::pair<TraceRecord, int>>> per_node;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const std::string_view body = trim(line.substr(1));
      constexpr std::string_view kKey = "horizon:";
      if (body.substr(0, kKey.size()) == kKey) {
        std::istringstream values{std::string(body.substr(kKey.size()))};
        double t0 = 0.0;
        double t1 = 0.0;
        if (!(values >> t0 >> t1) || !(t1 > t0)) {
          throw ParseError("bad horizon directive", line_no);
        }
        file_horizon = TraceHorizon{t0, t1};
      }
      continue;
    }
    if (!header_seen) {
      if (line != "node_id,start,end,state") {
        throw ParseError("expected header 'node_id,start,end,state'", line_no);
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields", line_no);
    }
    TraceRecord rec;
    const std::string_view id = trim(fields[0]);
    const auto [ptr, ec] =
        std::from_chars(id.data(), id.data() + id.size(), rec.node);
    if (ec != std::errc() || ptr != id.data() + id.size() || rec.node < 0) {
      throw ParseError("bad node id '" + std::string(id) + "'", line_no);
    }
    rec.start = parse_time(fields[1], line_no);
    rec.end = parse_time(fields[2], line_no);
    const std::string_view state = trim(fields[3]);
    if (state == "up") {
      rec.state = NodeState::kUp;
    } else if (state == "down") {
      rec.state = NodeState::kDown;
    } else {
      throw ParseError("state must be 'up' or 'down'", line_no);
    }
    if (!(rec.end > rec.start)) {
      throw ParseError("record end must be after start", line_no);
    }
    per_node[rec.node].emplace_back(rec, line_no);
    trace.records.push_back(rec);
  }
  if (!header_seen) throw ParseError("missing header", 0);

  for (auto& [node, recs] : per_node) {
    std::sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) {
      return a.first.start < b.first.start;
    });
    for (std::size_t idx = 1; idx < recs.size(); ++idx) {
      if (recs[idx].first.start < recs[idx - 1].first.end) {
        throw ParseError("overlapping intervals for node " +
                             std::to_string(node),
                         recs[idx].second);
      }
    }
  }

  if (horizon) {
    file_horizon = horizon;
  }
  if (file_horizon) {
    if (!(file_horizon->end > file_horizon->start)) {
      throw ParameterError("trace horizon must have positive length");
    }
    trace.horizon_start = file_horizon->start;
    trace.horizon_end = file_horizon->end;
  } else if (!trace.records.empty()) {
    trace.horizon_start = trace.records.front().start;
    trace.horizon_end = trace.records.front().end;
    for (const TraceRecord& rec : trace.records) {
      trace.horizon_start = std::min(trace.horizon_start, rec.start);
      trace.horizon_end = std::max(trace.horizon_end, rec.end);
    }
  }
  return trace;
}

FailureTrace load_failure_trace(const std::string& path,
                                std::optional<TraceHorizon> horizon) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file " + path);
  return parse_failure_trace(in, horizon);
}

std::vector<double> estimate_availability(const FailureTrace& trace,
                                          int n_servers, double f_max) {
  if (n_servers < 1) throw ParameterError("need at least one server");
  if (!(f_max >= 0.0 && f_max < 1.0)) {
    throw ParameterError("f_max must lie in [0, 1)");
  }
  std::vector<std::vector<std::pair<double, double>>> down(n_servers);
  for (const TraceRecord& rec : trace.records) {
    if (rec.node < 0 || rec.node >= n_servers) {
      throw ParameterError("trace node " + std::to_string(rec.node) +
                           " outside [0, " + std::to_string(n_servers) + ")");
    }
    if (rec.state != NodeState::kDown) continue;
    const double a = std::max(rec.start, trace.horizon_start);
    const double b = std::min(rec.end, trace.horizon_end);
    if (b > a) down[rec.node].emplace_back(a, b);
  }
  const double window = trace.horizon_end - trace.horizon_start;
  std::vector<double> f(n_servers, 0.0);
  for (int node = 0; node < n_servers; ++node) {
    auto& intervals = down[node];
    if (intervals.empty() || !(window > 0.0)) continue;
    std::sort(intervals.begin(), intervals.end());
    double downtime = 0.0;
    double cur_a = intervals.front().first;
    double cur_b = intervals.front().second;
    for (std::size_t idx = 1; idx < intervals.size(); ++idx) {
      if (intervals[idx].first > cur_b) {
        downtime += cur_b - cur_a;
        cur_a = intervals[idx].first;
        cur_b = intervals[idx].second;
      } else {
        cur_b = std::max(cur_b, intervals[idx].second);
      }
    }
    downtime += cur_b - cur_a;
    f[node] = std::clamp(downtime / window, 0.0, f_max);
  }
  return f;
}

FailureTrace fold_trace_nodes(FailureTrace trace, int n_servers) {
  if (n_servers < 1) throw ParameterError("need at least one server");
  for (TraceRecord& rec : trace.records) rec.node %= n_servers;
  return trace;
}

void AvailabilityDistribution::validate() const {
  if (kind == Kind::kConstant) {
    if (!(lo >= 0.0 && lo < 1.0)) {
      throw ParameterError("constant failure probability must lie in [0, 1)");
    }
    return;
  }
  if (!(lo >= 0.0 && lo <= hi && hi < 1.0)) {
    throw ParameterError("uniform failure range must satisfy 0 <= lo <= hi < 1");
  }
}

AvailabilityDistribution parse_availability_distribution(
    std::string_view spec) {
  const auto fields = split(spec, ':');
  AvailabilityDistribution d;
  if (fields.size() == 2 && fields[0] == "constant") {
    d.kind = AvailabilityDistribution::Kind::kConstant;
    d.lo = d.hi = parse_probability(fields[1]);
  } else if (fields.size() == 3 && fields[0] == "uniform") {
    d.kind = AvailabilityDistribution::Kind::kUniform;
    d.lo = parse_probability(fields[1]);
    d.hi = parse_probability(fields[2]);
  } else {
    throw ParameterError("availability spec must be constant:F or "
                         "uniform:LO:HI, got '" +
                         std::string(spec) + "'");
  }
  d.validate();
  return d;
}

std::string to_string(const AvailabilityDistribution& d) {
  std::ostringstream out;
  if (d.kind == AvailabilityDistribution::Kind::kConstant) {
    out << "constant:" << d.lo;
  } else {
    out << "uniform:" << d.lo << ':' << d.hi;
  }
  return out.str();
}

std::vector<double> synthetic_availability(
    int n_servers, const AvailabilityDistribution& distribution,
    std::uint64_t seed) {
  distribution.validate();
  if (n_servers < 1) throw ParameterError("need at least one server");
  std::vector<double> f(n_servers, distribution.lo);
  if (distribution.kind == AvailabilityDistribution::Kind::kUniform &&
      distribution.hi > distribution.lo) {
    Rng rng(seed);
    for (double& value : f) {
      value = rng.uniform_real(distribution.lo, distribution.hi);
    }
  }
  return f;
}

}  // namespace avrp
