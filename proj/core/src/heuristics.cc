#include "avrp/heuristics.h"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

#include "avrp/error.h"
#include "avrp/rng.h"

namespace avrp {

void SolverConfig::validate() const {
  if (max_replicas_per_object < 1) {
    throw ParameterError("max_replicas_per_object must be >= 1");
  }
}

bool is_availability_aware(Algorithm a) {
  return a == Algorithm::kAagg || a == Algorithm::kAagro;
}

bool is_random_object(Algorithm a) {
  return a == Algorithm::kAagro || a == Algorithm::kGro;
}

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAagg:
      return "aagg";
    case Algorithm::kAagro:
      return "aagro";
    case Algorithm::kGg:
      return "gg";
    case Algorithm::kGro:
      return "gro";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kAagg, Algorithm::kAagro, Algorithm::kGg,
                      Algorithm::kGro}) {
    if (name == to_string(a)) return a;
  }
  throw ParameterError("unknown algorithm '" + std::string(name) + "'");
}

std::string_view to_string(AvailabilityScope s) {
  return s == AvailabilityScope::kFocalObject ? "focal_object"
                                              : "all_changed_objects";
}

AvailabilityScope parse_availability_scope(std::string_view name) {
  if (name == "focal_object") return AvailabilityScope::kFocalObject;
  if (name == "all_changed_objects") {
    return AvailabilityScope::kAllChangedObjects;
  }
  throw ParameterError("unknown availability scope '" + std::string(name) +
                       "'");
}

std::string_view to_string(AvailabilitySemantics s) {
  return s == AvailabilitySemantics::kCorrected ? "corrected" : "literal";
}

AvailabilitySemantics parse_availability_semantics(std::string_view name) {
  if (name == "corrected") return AvailabilitySemantics::kCorrected;
  if (name == "literal") return AvailabilitySemantics::kLiteral;
  throw ParameterError("unknown availability semantics '" +
                       std::string(name) + "'");
}

int PlacementResult::flips() const {
  return static_cast<int>(
      std::count_if(schedule.begin(), schedule.end(), [](const Action& a) {
        return a.kind == Action::Kind::kAdd;
      }));
}

int PlacementResult::evictions() const {
  return static_cast<int>(schedule.size()) - flips();
}

namespace {

double factor_for(const SolverConfig& config, const ServerCatalog& servers,
                  int i) {
  return is_availability_aware(config.algorithm)
             ? server_availability(i, servers.failure_probs)
             : 1.0;
}

// A_k with server `toggled` flipped relative to the state's column k.
double availability_with_toggle(const PlacementState& state, int k,
                                int toggled, AvailabilitySemantics semantics) {
  const auto& f = state.servers().failure_probs;
  const auto& x = state.x();
  double product = 1.0;
  for (int i = 0; i < state.server_count(); ++i) {
    const bool hosts = x.hosts(i, k) != (i == toggled);
    if (!hosts) continue;
    product *=
        semantics == AvailabilitySemantics::kCorrected ? f[i] : 1.0 - f[i];
  }
  return semantics == AvailabilitySemantics::kCorrected ? 1.0 - product
                                                        : product;
}

bool toggle_keeps_availability(const PlacementState& state, int k, int toggled,
                               AvailabilitySemantics semantics) {
  return availability_with_toggle(state, k, toggled, semantics) >=
         availability_with_toggle(state, k, -1, semantics) -
             kAvailabilityEpsilon;
}

struct Move {
  int server = -1;
  int object = -1;
  std::vector<int> evictions;
  Cost net_saving = 0;  // access cost drop after evictions
  Cost transfer_cost = 0;
  double benefit = 0.0;
};

// Greedy engine shared by all four algorithms. Caches, per cell, the saving
// of adding a replica (x = 0) or the loss of removing it (x = 1); a commit
// only invalidates the columns it touched.
class GreedyEngine {
 public:
  GreedyEngine(PlacementState& state, const TrafficMatrix& traffic,
               const SolverConfig& config, const SolverObserver& observer,
               PlacementResult& result)
      : state_(state),
        traffic_(traffic),
        config_(config),
        observer_(observer),
        result_(result),
        delta_(state.server_count(), state.object_count(), 0),
        eviction_order_(state.server_count()),
        eviction_stamp_(state.server_count(), -1) {
    for (int k = 0; k < state_.object_count(); ++k) refresh_column(k);
  }

  // Best admissible move over all objects (column < 0) or one column.
  std::optional<Move> best_move(int column) {
    ++sweep_;
    ++result_.iterations;
    std::optional<Move> best;
    const int m = state_.server_count();
    const int k_begin = column < 0 ? 0 : column;
    const int k_end = column < 0 ? state_.object_count() : column + 1;
    // Ascending (i, k) with strict improvement keeps the smallest pair on
    // ties.
    for (int i = 0; i < m; ++i) {
      for (int k = k_begin; k < k_end; ++k) {
        if (!is_positive_flip(i, k)) continue;
        // Evictions only shrink the saving, so this bounds the benefit from
        // above; a cell that cannot beat the incumbent is never evaluated.
        const double bound =
            static_cast<double>(delta_(i, k) - transfer_cost(i, k)) *
            factor_for(config_, state_.servers(), i);
        if (best && bound <= best->benefit) continue;
        std::optional<Move> move = evaluate(i, k);
        if (!move) continue;
        if (move->benefit > (best ? best->benefit : 0.0)) best = std::move(move);
      }
    }
    return best;
  }

  void commit(const Move& move) {
    const int i = move.server;
    const int k = move.object;
    const Cost c_before = current_cost_;
    for (int evicted : move.evictions) {
      state_.remove_replica(i, evicted);
      const Action action{Action::Kind::kEvict, i, evicted, -1, 0};
      result_.schedule.push_back(action);
      if (observer_) observer_(state_, action);
    }
    const int source = state_.nearest()(i, k);
    const Cost transfer =
        state_.objects().sizes[k] * state_.costs()(i, source);
    if (transfer != move.transfer_cost) {
      throw std::logic_error("transfer cost changed during commit");
    }
    state_.add_replica(i, k);
    const Action action{Action::Kind::kAdd, i, k, source, transfer};
    result_.schedule.push_back(action);
    result_.impl_cost_total += transfer;
    result_.benefit_total += move.benefit;
    current_cost_ -= move.net_saving;
    if (!(current_cost_ < c_before)) {
      throw std::logic_error("committed flip did not lower access cost");
    }
    if (state_.used_storage(i) > state_.servers().capacities[i]) {
      throw std::logic_error("committed flip overflowed server storage");
    }
    if (observer_) observer_(state_, action);

    refresh_column(k);
    for (int evicted : move.evictions) refresh_column(evicted);
  }

  void set_current_cost(Cost c) { current_cost_ = c; }

 private:
  bool is_positive_flip(int i, int k) const {
    if (state_.x().hosts(i, k)) return false;
    if (state_.replica_count(k) >= config_.max_replicas_per_object) {
      return false;
    }
    // The availability factor is strictly positive, so the sign of the
    // single-flip benefit is the sign of saving - transfer.
    return delta_(i, k) > transfer_cost(i, k);
  }

  Cost transfer_cost(int i, int k) const {
    return state_.objects().sizes[k] *
           state_.costs()(i, state_.nearest()(i, k));
  }

  std::optional<Move> evaluate(int i, int k) {
    Move move;
    move.server = i;
    move.object = k;
    move.net_saving = delta_(i, k);
    move.transfer_cost = transfer_cost(i, k);

    if (!state_.has_space_for(i, k)) {
      const std::vector<int>& order = evictions_for(i);
      Size free = state_.free_storage(i);
      const Size needed = state_.objects().sizes[k];
      for (int candidate : order) {
        if (free >= needed) break;
        move.evictions.push_back(candidate);
        move.net_saving -= delta_(i, candidate);
        free += state_.objects().sizes[candidate];
      }
      if (free < needed) return std::nullopt;
    }

    const bool aware = is_availability_aware(config_.algorithm);
    if (aware) {
      const auto semantics = config_.availability_semantics;
      if (!toggle_keeps_availability(state_, k, i, semantics)) {
        return std::nullopt;
      }
      if (config_.availability_scope ==
          AvailabilityScope::kAllChangedObjects) {
        for (int evicted : move.evictions) {
          if (!toggle_keeps_availability(state_, evicted, i, semantics)) {
            return std::nullopt;
          }
        }
      }
    }
    move.benefit = static_cast<double>(move.net_saving - move.transfer_cost) *
                   factor_for(config_, state_.servers(), i);
    return move;
  }

  // Non-primary replicas on i, least damaging eviction first (ties: lowest
  // object id). Evictions on one server touch distinct columns, so the
  // repeated pick-the-best loop reduces to this fixed order.
  const std::vector<int>& evictions_for(int i) {
    if (eviction_stamp_[i] == sweep_) return eviction_order_[i];
    std::vector<int>& order = eviction_order_[i];
    order.clear();
    const auto& primaries = state_.objects().primaries;
    for (int k = 0; k < state_.object_count(); ++k) {
      if (state_.x().hosts(i, k) && primaries[k] != i) order.push_back(k);
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      const Cost la = delta_(i, a);
      const Cost lb = delta_(i, b);
      return la != lb ? la < lb : a < b;
    });
    eviction_stamp_[i] = sweep_;
    return order;
  }

  void refresh_column(int k) {
    const auto& x = state_.x();
    const auto& n = state_.nearest();
    const auto& l = state_.costs();
    const int primary = state_.objects().primaries[k];
    for (int i = 0; i < state_.server_count(); ++i) {
      if (!x.hosts(i, k)) {
        delta_(i, k) = delta_cost_of_add(i, k, x, n, traffic_, l);
      } else if (i != primary) {
        delta_(i, k) = delta_cost_of_remove(i, k, x, n, traffic_, l);
      } else {
        delta_(i, k) = 0;
      }
    }
    // Any server's eviction order may involve column k.
    ++sweep_;
  }

  PlacementState& state_;
  const TrafficMatrix& traffic_;
  const SolverConfig& config_;
  const SolverObserver& observer_;
  PlacementResult& result_;

  // Add saving where x = 0, removal loss where x = 1 (0 for primaries).
  Grid<Cost> delta_;
  std::vector<std::vector<int>> eviction_order_;
  std::vector<std::int64_t> eviction_stamp_;
  std::int64_t sweep_ = 0;
  Cost current_cost_ = 0;
};

PlacementResult run(const SolverInput& input, const SolverConfig& config,
                    const SolverObserver& observer) {
  config.validate();
  const Scenario& scenario = input.scenario;
  scenario.validate();
  if (input.costs.size() != scenario.servers.size()) {
    throw StructuralError("cost matrix does not match the server count");
  }
  if (input.x_old.rows() != scenario.servers.size() ||
      input.x_old.cols() != scenario.objects.size()) {
    throw StructuralError("x_old does not match the scenario");
  }
  const auto violations =
      validate_placement(input.x_old, scenario.servers, scenario.objects);
  if (!violations.empty()) {
    throw ConstraintError("x_old is not a valid placement: " +
                          violations.front().message);
  }

  PlacementState state(input.costs, scenario.servers, scenario.objects,
                       input.x_old);
  PlacementResult result;
  result.c_old =
      total_access_cost(state.nearest(), scenario.traffic, input.costs).total;

  GreedyEngine engine(state, scenario.traffic, config, observer, result);
  engine.set_current_cost(result.c_old);

  if (!is_random_object(config.algorithm)) {
    while (auto move = engine.best_move(-1)) engine.commit(*move);
  } else {
    for (int k : object_visit_order(scenario.objects.size(), config.seed)) {
      while (auto move = engine.best_move(k)) engine.commit(*move);
    }
  }

  result.c_new =
      total_access_cost(state.nearest(), scenario.traffic, input.costs).total;
  result.x_new = state.x();
  return result;
}

}  // namespace

std::vector<int> object_visit_order(int n, std::uint64_t seed) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int pos = n - 1; pos > 0; --pos) {
    std::swap(order[pos], order[rng.uniform_int(0, pos)]);
  }
  return order;
}

std::vector<FlipCandidate> enumerate_positive_flips(
    const PlacementState& state, const TrafficMatrix& traffic,
    const SolverConfig& config, const FlipMarks* marks) {
  std::vector<FlipCandidate> out;
  const auto& x = state.x();
  const auto& n = state.nearest();
  const auto& l = state.costs();
  for (int i = 0; i < state.server_count(); ++i) {
    for (int k = 0; k < state.object_count(); ++k) {
      if (x.hosts(i, k)) continue;
      if (marks != nullptr && (*marks)(i, k) != 0) continue;
      if (state.replica_count(k) >= config.max_replicas_per_object) continue;
      const Cost saving = delta_cost_of_add(i, k, x, n, traffic, l);
      const Cost transfer = state.objects().sizes[k] * l(i, n(i, k));
      if (saving <= transfer) continue;
      const double factor = factor_for(config, state.servers(), i);
      out.push_back({i, k, saving, transfer,
                     static_cast<double>(saving - transfer) * factor});
    }
  }
  return out;
}

PlacementResult solve(const SolverInput& input, const SolverConfig& config,
                      const SolverObserver& observer) {
  return run(input, config, observer);
}

PlacementResult solve_aagg(const SolverInput& input, const SolverConfig& config,
                           const SolverObserver& observer) {
  if (config.algorithm != Algorithm::kAagg) {
    throw ParameterError("solve_aagg requires algorithm aagg");
  }
  return run(input, config, observer);
}

PlacementResult solve_aagro(const SolverInput& input,
                            const SolverConfig& config,
                            const SolverObserver& observer) {
  if (config.algorithm != Algorithm::kAagro) {
    throw ParameterError("solve_aagro requires algorithm aagro");
  }
  return run(input, config, observer);
}

PlacementResult solve_baseline(const SolverInput& input,
                               const SolverConfig& config,
                               const SolverObserver& observer) {
  if (is_availability_aware(config.algorithm)) {
    throw ParameterError("solve_baseline requires algorithm gg or gro");
  }
  return run(input, config, observer);
}

ReplicationMatrix replay_schedule(const ReplicationMatrix& x_old,
                                  const std::vector<Action>& schedule) {
  ReplicationMatrix x = x_old;
  for (const Action& a : schedule) {
    if (a.server < 0 || a.server >= x.rows() || a.object < 0 ||
        a.object >= x.cols()) {
      throw StructuralError("schedule action out of range");
    }
    if (a.kind == Action::Kind::kAdd) {
      if (x.hosts(a.server, a.object)) {
        throw PreconditionError("schedule adds an existing replica");
      }
      if (a.source < 0 || a.source >= x.rows() ||
          !x.hosts(a.source, a.object)) {
        throw PreconditionError("schedule fetches from a non-replicator");
      }
      x(a.server, a.object) = 1;
    } else {
      if (!x.hosts(a.server, a.object)) {
        throw PreconditionError("schedule evicts an absent replica");
      }
      x(a.server, a.object) = 0;
    }
  }
  return x;
}

std::string to_json(const PlacementResult& result, Algorithm algorithm) {
  nlohmann::json doc;
  doc["algorithm"] = std::string(to_string(algorithm));
  doc["c_old"] = result.c_old;
  doc["c_new"] = result.c_new;
  doc["impl_cost"] = result.impl_cost_total;
  doc["benefit_total"] = result.benefit_total;
  doc["iterations"] = result.iterations;
  auto schedule = nlohmann::json::array();
  for (const Action& a : result.schedule) {
    if (a.kind == Action::Kind::kAdd) {
      schedule.push_back({{"action", "add"},
                          {"server", a.server},
                          {"object", a.object},
                          {"source", a.source},
                          {"transfer_cost", a.transfer_cost}});
    } else {
      schedule.push_back(
          {{"action", "evict"}, {"server", a.server}, {"object", a.object}});
    }
  }
  doc["schedule"] = std::move(schedule);
  doc["placement"] = nlohmann::json::parse(placement_to_json(result.x_new));
  return doc.dump() + "\n";
}

}  // namespace avrp
