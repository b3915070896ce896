#include "avrp/model.h"

#include <nlohmann/json.hpp>

#include "avrp/error.h"

namespace avrp {

namespace {

std::string object_label(int k) { return "object " + std::to_string(k); }
std::string server_label(int i) { return "server " + std::to_string(i); }

}  // namespace

void ServerCatalog::validate() const {
  if (capacities.empty()) throw StructuralError("no servers");
  if (failure_probs.size() != capacities.size()) {
    throw StructuralError("failure_probs and capacities differ in length");
  }
  for (int i = 0; i < size(); ++i) {
    if (capacities[i] <= 0) {
      throw ParameterError(server_label(i) + ": capacity must be positive");
    }
    const double f = failure_probs[i];
    if (!(f >= 0.0 && f < 1.0)) {
      throw ParameterError(server_label(i) +
                           ": failure probability must lie in [0, 1)");
    }
  }
}

void ObjectCatalog::validate(int server_count) const {
  if (primaries.size() != sizes.size()) {
    throw StructuralError("primaries and sizes differ in length");
  }
  for (int k = 0; k < size(); ++k) {
    if (sizes[k] <= 0) {
      throw ParameterError(object_label(k) + ": size must be positive");
    }
    if (primaries[k] < 0 || primaries[k] >= server_count) {
      throw StructuralError(object_label(k) + ": primary out of range");
    }
  }
}

std::vector<int> ReplicationMatrix::replicators(int k) const {
  std::vector<int> out;
  for (int i = 0; i < rows(); ++i) {
    if (hosts(i, k)) out.push_back(i);
  }
  return out;
}

int ReplicationMatrix::replica_count(int k) const {
  int count = 0;
  for (int i = 0; i < rows(); ++i) count += hosts(i, k) ? 1 : 0;
  return count;
}

std::int64_t ReplicationMatrix::total_replicas() const {
  std::int64_t count = 0;
  for (int k = 0; k < cols(); ++k) count += replica_count(k);
  return count;
}

std::vector<Violation> validate_placement(const ReplicationMatrix& x,
                                          const ServerCatalog& servers,
                                          const ObjectCatalog& objects) {
  if (x.rows() != servers.size() || x.cols() != objects.size() ||
      objects.primaries.size() != objects.sizes.size()) {
    throw StructuralError("placement dimensions do not match catalogs");
  }
  std::vector<Violation> report;
  for (int i = 0; i < x.rows(); ++i) {
    Size used = 0;
    for (int k = 0; k < x.cols(); ++k) {
      if (x.hosts(i, k)) used += objects.sizes[k];
    }
    if (used > servers.capacities[i]) {
      report.push_back({Violation::Kind::kStorage, i,
                        server_label(i) + " stores " + std::to_string(used) +
                            " > capacity " +
                            std::to_string(servers.capacities[i])});
    }
  }
  for (int k = 0; k < x.cols(); ++k) {
    const int p = objects.primaries[k];
    if (p < 0 || p >= x.rows() || !x.hosts(p, k)) {
      report.push_back({Violation::Kind::kPrimary, k,
                        object_label(k) + " missing from its primary " +
                            server_label(p)});
    }
  }
  return report;
}

ReplicationMatrix primary_only_placement(const ServerCatalog& servers,
                                         const ObjectCatalog& objects) {
  objects.validate(servers.size());
  ReplicationMatrix x(servers.size(), objects.size());
  std::vector<Size> used(servers.size(), 0);
  for (int k = 0; k < objects.size(); ++k) {
    const int p = objects.primaries[k];
    used[p] += objects.sizes[k];
    if (used[p] > servers.capacities[p]) {
      throw CapacityError("primaries do not fit on " + server_label(p) +
                          " (first overflow at " + object_label(k) + ")");
    }
    x(p, k) = 1;
  }
  return x;
}

int nearest_replicator(const ReplicationMatrix& x, const CostMatrix& l, int i,
                       int k) {
  if (x.hosts(i, k)) return i;
  int best = -1;
  for (int j = 0; j < x.rows(); ++j) {
    if (x.hosts(j, k) && (best < 0 || l(i, j) < l(i, best))) best = j;
  }
  if (best < 0) throw StructuralError(object_label(k) + " has no replicator");
  return best;
}

NearestIndex build_nearest_index(const ReplicationMatrix& x,
                                 const CostMatrix& l) {
  if (l.size() != x.rows()) {
    throw StructuralError("cost matrix and placement disagree on servers");
  }
  NearestIndex n(x.rows(), x.cols(), -1);
  for (int k = 0; k < x.cols(); ++k) {
    for (int i = 0; i < x.rows(); ++i) n(i, k) = nearest_replicator(x, l, i, k);
  }
  return n;
}

PlacementState::PlacementState(const CostMatrix& l,
                               const ServerCatalog& servers,
                               const ObjectCatalog& objects,
                               ReplicationMatrix x)
    : l_(&l), servers_(&servers), objects_(&objects), x_(std::move(x)) {
  if (x_.rows() != servers.size() || x_.cols() != objects.size() ||
      l.size() != servers.size()) {
    throw StructuralError("placement state dimensions do not match");
  }
  nearest_ = build_nearest_index(x_, l);
  used_.assign(x_.rows(), 0);
  counts_.assign(x_.cols(), 0);
  for (int i = 0; i < x_.rows(); ++i) {
    for (int k = 0; k < x_.cols(); ++k) {
      if (x_.hosts(i, k)) {
        used_[i] += objects.sizes[k];
        ++counts_[k];
      }
    }
  }
}

void PlacementState::check_indices(int i, int k) const {
  if (i < 0 || i >= server_count() || k < 0 || k >= object_count()) {
    throw StructuralError("replica index out of range");
  }
}

std::vector<PlacementState::NearestChange> PlacementState::add_replica(int i,
                                                                       int k) {
  check_indices(i, k);
  if (x_.hosts(i, k)) {
    throw PreconditionError(server_label(i) + " already hosts " +
                            object_label(k));
  }
  if (!has_space_for(i, k)) {
    throw CapacityError(object_label(k) + " does not fit on " +
                        server_label(i));
  }
  x_(i, k) = 1;
  used_[i] += objects_->sizes[k];
  ++counts_[k];
  std::vector<NearestChange> changes;
  for (int j = 0; j < server_count(); ++j) {
    const int current = nearest_(j, k);
    const Cost via_new = (*l_)(j, i);
    const Cost via_current = (*l_)(j, current);
    if (via_new < via_current || (via_new == via_current && i < current)) {
      nearest_(j, k) = i;
      changes.push_back({j, current, i});
    }
  }
  return changes;
}

std::vector<PlacementState::NearestChange> PlacementState::remove_replica(
    int i, int k) {
  check_indices(i, k);
  if (!x_.hosts(i, k)) {
    throw PreconditionError(server_label(i) + " does not host " +
                            object_label(k));
  }
  if (objects_->primaries[k] == i) {
    throw ConstraintError("cannot evict the primary replica of " +
                          object_label(k));
  }
  x_(i, k) = 0;
  used_[i] -= objects_->sizes[k];
  --counts_[k];
  std::vector<NearestChange> changes;
  for (int j = 0; j < server_count(); ++j) {
    if (nearest_(j, k) != i) continue;
    const int replacement = nearest_replicator(x_, *l_, j, k);
    nearest_(j, k) = replacement;
    changes.push_back({j, i, replacement});
  }
  return changes;
}

void Scenario::validate() const {
  servers.validate();
  objects.validate(servers.size());
  if (traffic.rows() != servers.size() || traffic.cols() != objects.size()) {
    throw StructuralError("traffic matrix must be servers x objects");
  }
  for (int i = 0; i < traffic.rows(); ++i) {
    for (int k = 0; k < traffic.cols(); ++k) {
      if (traffic(i, k) < 0) throw ParameterError("negative traffic entry");
    }
  }
}

std::string scenario_to_json(const Scenario& s) {
  nlohmann::json doc;
  doc["capacities"] = s.servers.capacities;
  doc["failure_probs"] = s.servers.failure_probs;
  doc["sizes"] = s.objects.sizes;
  doc["primaries"] = s.objects.primaries;
  auto rows = nlohmann::json::array();
  for (int i = 0; i < s.traffic.rows(); ++i) {
    auto row = s.traffic.row(i);
    rows.push_back(std::vector<Bytes>(row.begin(), row.end()));
  }
  doc["traffic"] = std::move(rows);
  return doc.dump() + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  try {
    const auto doc = nlohmann::json::parse(text);
    Scenario s;
    s.servers.capacities = doc.at("capacities").get<std::vector<Size>>();
    s.servers.failure_probs = doc.at("failure_probs").get<std::vector<double>>();
    s.objects.sizes = doc.at("sizes").get<std::vector<Size>>();
    s.objects.primaries = doc.at("primaries").get<std::vector<int>>();
    const auto rows = doc.at("traffic").get<std::vector<std::vector<Bytes>>>();
    s.traffic = TrafficMatrix(static_cast<int>(rows.size()), s.objects.size());
    for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
      if (static_cast<int>(rows[i].size()) != s.objects.size()) {
        throw StructuralError("traffic row " + std::to_string(i) +
                              " has wrong length");
      }
      for (int k = 0; k < s.objects.size(); ++k) s.traffic(i, k) = rows[i][k];
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario JSON: ") + e.what(), 0);
  }
}

std::string placement_to_json(const ReplicationMatrix& x) {
  nlohmann::json doc;
  doc["objects"] = nlohmann::json::array();
  for (int k = 0; k < x.cols(); ++k) {
    doc["objects"].push_back({{"id", k}, {"replicators", x.replicators(k)}});
  }
  return doc.dump() + "\n";
}

ReplicationMatrix placement_from_json(const std::string& text,
                                      int server_count, int object_count) {
  try {
    const auto doc = nlohmann::json::parse(text);
    ReplicationMatrix x(server_count, object_count);
    for (const auto& entry : doc.at("objects")) {
      const int k = entry.at("id").get<int>();
      if (k < 0 || k >= object_count) {
        throw StructuralError("placement object id out of range");
      }
      for (int i : entry.at("replicators").get<std::vector<int>>()) {
        if (i < 0 || i >= server_count) {
          throw StructuralError("placement server id out of range");
        }
        x(i, k) = 1;
      }
    }
    return x;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("placement JSON: ") + e.what(), 0);
  }
}

}  // namespace avrp
