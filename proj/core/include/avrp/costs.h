#pragma once

#include <span>
#include <string>
#include <vector>

#include "avrp/model.h"
#include "avrp/topology.h"

namespace avrp {

// How per-server failure probabilities f_i combine into object availability.
//  kCorrected: A_k = 1 - prod f_i over replicators (some replicator is up).
//  kLiteral:   A_k = prod (1 - f_i), the product of server availabilities
//              taken verbatim; adding replicas can only lower it.
// The benefit factor of a target server is 1 - f_i under both.
enum class AvailabilitySemantics { kCorrected, kLiteral };

// Absolute slack for the availability comparison on binary doubles.
inline constexpr double kAvailabilityEpsilon = 1e-12;

struct CostReport {
  std::vector<Cost> per_object;
  Cost total = 0;
};

struct BenefitBreakdown {
  Cost access_saving = 0;
  Cost impl_cost = 0;
  double availability_factor = 1.0;
  double benefit = 0.0;
};

// R_k = sum_i l(i, n(i,k)) * r(i,k).
Cost object_access_cost(int k, const NearestIndex& n, const TrafficMatrix& r,
                        const CostMatrix& l);

CostReport total_access_cost(const NearestIndex& n, const TrafficMatrix& r,
                             const CostMatrix& l);

// Drop in total access cost if i became a replicator of k. Only column k is
// touched. Throws PreconditionError if i already hosts k.
Cost delta_cost_of_add(int i, int k, const ReplicationMatrix& x,
                       const NearestIndex& n, const TrafficMatrix& r,
                       const CostMatrix& l);

// Rise in total access cost if i stopped hosting k. Throws PreconditionError
// if i does not host k and StructuralError if i is the sole replicator.
Cost delta_cost_of_remove(int i, int k, const ReplicationMatrix& x,
                          const NearestIndex& n, const TrafficMatrix& r,
                          const CostMatrix& l);

// Transfer cost of moving from x_old to x_new: every new replica is fetched
// from its nearest replicator under x_old. Evictions are free.
Cost implementation_cost(const ReplicationMatrix& x_old,
                         const NearestIndex& n_old,
                         const ReplicationMatrix& x_new,
                         std::span<const Size> sizes, const CostMatrix& l);

double object_availability(
    int k, const ReplicationMatrix& x, std::span<const double> failure_probs,
    AvailabilitySemantics semantics = AvailabilitySemantics::kCorrected);

// A_k(x_new) >= A_k(x_old) - kAvailabilityEpsilon.
bool availability_constraint_ok(
    int k, const ReplicationMatrix& x_old, const ReplicationMatrix& x_new,
    std::span<const double> failure_probs,
    AvailabilitySemantics semantics = AvailabilitySemantics::kCorrected);

inline double server_availability(int i,
                                  std::span<const double> failure_probs) {
  return 1.0 - failure_probs[i];
}

// (c_old - c_new - i_cost) * factor. Throws ParameterError unless
// factor is in (0, 1].
BenefitBreakdown benefit(Cost c_old, Cost c_new, Cost i_cost,
                         double availability_factor);

std::string to_json(const CostReport& report);
std::string to_json(const BenefitBreakdown& b);

}  // namespace avrp
