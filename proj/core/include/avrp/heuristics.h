#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "avrp/costs.h"
#include "avrp/model.h"
#include "avrp/topology.h"

namespace avrp {

enum class Algorithm {
  kAagg,   // availability-aware greedy global
  kAagro,  // availability-aware greedy random object
  kGg,     // greedy global, no availability
  kGro,    // greedy random object, no availability
};

// Which objects must not lose availability when a candidate flip is scored.
enum class AvailabilityScope { kFocalObject, kAllChangedObjects };

inline constexpr int kUnlimitedReplicas = std::numeric_limits<int>::max();

struct SolverConfig {
  Algorithm algorithm = Algorithm::kAagg;
  // Counts the primary. kUnlimitedReplicas disables the cap.
  int max_replicas_per_object = kUnlimitedReplicas;
  AvailabilityScope availability_scope = AvailabilityScope::kFocalObject;
  AvailabilitySemantics availability_semantics =
      AvailabilitySemantics::kCorrected;
  // Drives the object visiting order of the random-object variants.
  std::uint64_t seed = 0;

  void validate() const;
};

bool is_availability_aware(Algorithm a);
bool is_random_object(Algorithm a);
std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);  // throws ParameterError
std::string_view to_string(AvailabilityScope s);
AvailabilityScope parse_availability_scope(std::string_view name);
std::string_view to_string(AvailabilitySemantics s);
AvailabilitySemantics parse_availability_semantics(std::string_view name);

struct Action {
  enum class Kind { kAdd, kEvict };
  Kind kind = Kind::kAdd;
  int server = 0;
  int object = 0;
  int source = -1;         // kAdd only: replicator the copy is fetched from
  Cost transfer_cost = 0;  // kAdd only

  friend bool operator==(const Action&, const Action&) = default;
};

struct PlacementResult {
  ReplicationMatrix x_new;
  std::vector<Action> schedule;
  Cost impl_cost_total = 0;
  Cost c_old = 0;
  Cost c_new = 0;
  // Sum of the benefits of the committed flips.
  double benefit_total = 0.0;
  int iterations = 0;

  int flips() const;
  int evictions() const;
};

// One scored single-flip candidate, before any eviction.
struct FlipCandidate {
  int server = 0;
  int object = 0;
  Cost access_saving = 0;
  Cost transfer_cost = 0;
  double benefit = 0.0;
};

// Flips already considered in the current sweep.
using FlipMarks = Grid<std::uint8_t>;

// All (i, k) with x(i,k) = 0 whose single-flip benefit is strictly positive,
// whose object is below the replica cap and that are not marked. Ascending
// (i, k) order. Recomputes everything from the state; the solvers keep an
// incremental equivalent.
std::vector<FlipCandidate> enumerate_positive_flips(
    const PlacementState& state, const TrafficMatrix& traffic,
    const SolverConfig& config, const FlipMarks* marks = nullptr);

// Seeded Fisher-Yates permutation of 0..n-1: the order in which the
// random-object variants visit objects.
std::vector<int> object_visit_order(int n, std::uint64_t seed);

// Called after every mutation a solver applies, with the action just taken.
using SolverObserver =
    std::function<void(const PlacementState& state, const Action& action)>;

struct SolverInput {
  const CostMatrix& costs;
  const Scenario& scenario;
  const ReplicationMatrix& x_old;
};

// Dispatches on config.algorithm. Throws ConstraintError if x_old violates
// the storage or primary constraint.
PlacementResult solve(const SolverInput& input, const SolverConfig& config,
                      const SolverObserver& observer = {});

// Each of these insists on the matching config.algorithm.
PlacementResult solve_aagg(const SolverInput& input, const SolverConfig& config,
                           const SolverObserver& observer = {});
PlacementResult solve_aagro(const SolverInput& input,
                            const SolverConfig& config,
                            const SolverObserver& observer = {});
PlacementResult solve_baseline(const SolverInput& input,
                               const SolverConfig& config,
                               const SolverObserver& observer = {});

// Applies the schedule to x_old. Throws PreconditionError on an action that
// does not match the matrix (double add, evicting an absent replica, an Add
// whose source does not host the object).
ReplicationMatrix replay_schedule(const ReplicationMatrix& x_old,
                                  const std::vector<Action>& schedule);

std::string to_json(const PlacementResult& result, Algorithm algorithm);

}  // namespace avrp
