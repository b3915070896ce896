#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "avrp/topology.h"

namespace avrp {

using Size = std::int64_t;
using Bytes = std::int64_t;

struct ServerCatalog {
  std::vector<Size> capacities;
  // Probability that the server is down; in [0, 1).
  std::vector<double> failure_probs;

  int size() const { return static_cast<int>(capacities.size()); }
  void validate() const;
};

struct ObjectCatalog {
  std::vector<Size> sizes;
  std::vector<int> primaries;

  int size() const { return static_cast<int>(sizes.size()); }
  void validate(int server_count) const;
};

// Dense servers x objects matrix, row-major.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows),
        cols_(cols),
        data_(static_cast<std::size_t>(rows) * cols, fill) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  T operator()(int i, int k) const { return data_[index(i, k)]; }
  T& operator()(int i, int k) { return data_[index(i, k)]; }
  std::span<const T> row(int i) const {
    return {data_.data() + index(i, 0), static_cast<std::size_t>(cols_)};
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int i, int k) const {
    return static_cast<std::size_t>(i) * cols_ + k;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

// r(i, k): bytes of client traffic (request + response) for object k that
// arrive at server i.
using TrafficMatrix = Grid<Bytes>;

// x(i, k) = 1 iff server i hosts a replica of object k.
class ReplicationMatrix : public Grid<std::uint8_t> {
 public:
  using Grid::Grid;

  bool hosts(int i, int k) const { return (*this)(i, k) != 0; }
  std::vector<int> replicators(int k) const;
  int replica_count(int k) const;
  std::int64_t total_replicas() const;
};

// n(i, k): the replicator of k that serves requests arriving at i.
using NearestIndex = Grid<int>;

struct Violation {
  enum class Kind { kStorage, kPrimary };
  Kind kind;
  int index;  // server for kStorage, object for kPrimary
  std::string message;
};

std::vector<Violation> validate_placement(const ReplicationMatrix& x,
                                          const ServerCatalog& servers,
                                          const ObjectCatalog& objects);

ReplicationMatrix primary_only_placement(const ServerCatalog& servers,
                                         const ObjectCatalog& objects);

// Cheapest replicator of k as seen from i; ties go to the lowest server id.
int nearest_replicator(const ReplicationMatrix& x, const CostMatrix& l, int i,
                       int k);

NearestIndex build_nearest_index(const ReplicationMatrix& x,
                                 const CostMatrix& l);

// Placement plus the bookkeeping the solvers query in O(1): nearest index,
// per-server used storage and per-object replica counts. Single writer.
class PlacementState {
 public:
  struct NearestChange {
    int server;
    int before;
    int after;
  };

  // The referenced catalogs and cost matrix must outlive the state. Throws
  // StructuralError on dimension mismatch; does not require validity.
  PlacementState(const CostMatrix& l, const ServerCatalog& servers,
                 const ObjectCatalog& objects, ReplicationMatrix x);

  const ReplicationMatrix& x() const { return x_; }
  const NearestIndex& nearest() const { return nearest_; }
  const CostMatrix& costs() const { return *l_; }
  const ServerCatalog& servers() const { return *servers_; }
  const ObjectCatalog& objects() const { return *objects_; }
  int server_count() const { return x_.rows(); }
  int object_count() const { return x_.cols(); }

  Size used_storage(int i) const { return used_[i]; }
  Size free_storage(int i) const {
    return servers_->capacities[i] - used_[i];
  }
  bool has_space_for(int i, int k) const {
    return objects_->sizes[k] <= free_storage(i);
  }
  int replica_count(int k) const { return counts_[k]; }

  // Throws PreconditionError if i already hosts k, CapacityError if k does
  // not fit in i's free storage.
  std::vector<NearestChange> add_replica(int i, int k);

  // Throws PreconditionError if i does not host k, ConstraintError if i is
  // the primary of k.
  std::vector<NearestChange> remove_replica(int i, int k);

 private:
  void check_indices(int i, int k) const;

  const CostMatrix* l_;
  const ServerCatalog* servers_;
  const ObjectCatalog* objects_;
  ReplicationMatrix x_;
  NearestIndex nearest_;
  std::vector<Size> used_;
  std::vector<int> counts_;
};

struct Scenario {
  ServerCatalog servers;
  ObjectCatalog objects;
  TrafficMatrix traffic;

  void validate() const;
};

// {"capacities": [...], "failure_probs": [...], "sizes": [...],
//  "primaries": [...], "traffic": [[...], ...]}
std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);

// {"objects": [{"id": k, "replicators": [i, ...]}, ...]}
std::string placement_to_json(const ReplicationMatrix& x);
ReplicationMatrix placement_from_json(const std::string& text,
                                      int server_count, int object_count);

}  // namespace avrp
