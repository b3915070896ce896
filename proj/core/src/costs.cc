#include "avrp/costs.h"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "avrp/error.h"

namespace avrp {

Cost object_access_cost(int k, const NearestIndex& n, const TrafficMatrix& r,
                        const CostMatrix& l) {
  Cost total = 0;
  for (int i = 0; i < n.rows(); ++i) {
    const int server = n(i, k);
    if (server < 0) throw StructuralError("object has no replicator");
    total += l(i, server) * r(i, k);
  }
  return total;
}

CostReport total_access_cost(const NearestIndex& n, const TrafficMatrix& r,
                             const CostMatrix& l) {
  if (n.rows() != r.rows() || n.cols() != r.cols() || l.size() != n.rows()) {
    throw StructuralError("access cost inputs disagree on dimensions");
  }
  CostReport report;
  report.per_object.resize(n.cols());
  for (int k = 0; k < n.cols(); ++k) {
    report.per_object[k] = object_access_cost(k, n, r, l);
    report.total += report.per_object[k];
  }
  return report;
}

Cost delta_cost_of_add(int i, int k, const ReplicationMatrix& x,
                       const NearestIndex& n, const TrafficMatrix& r,
                       const CostMatrix& l) {
  if (x.hosts(i, k)) {
    throw PreconditionError("delta_cost_of_add: server already hosts object");
  }
  Cost saving = 0;
  for (int j = 0; j < x.rows(); ++j) {
    const Cost current = l(j, n(j, k));
    const Cost via_new = l(j, i);
    if (via_new < current) saving += r(j, k) * (current - via_new);
  }
  return saving;
}

Cost delta_cost_of_remove(int i, int k, const ReplicationMatrix& x,
                          const NearestIndex& n, const TrafficMatrix& r,
                          const CostMatrix& l) {
  if (!x.hosts(i, k)) {
    throw PreconditionError("delta_cost_of_remove: server does not host object");
  }
  const int m = x.rows();
  Cost loss = 0;
  for (int j = 0; j < m; ++j) {
    if (n(j, k) != i || r(j, k) == 0) continue;
    Cost fallback = -1;
    for (int h = 0; h < m; ++h) {
      if (h != i && x.hosts(h, k) && (fallback < 0 || l(j, h) < fallback)) {
        fallback = l(j, h);
      }
    }
    if (fallback < 0) {
      throw StructuralError("cannot remove the sole replicator of an object");
    }
    loss += r(j, k) * (fallback - l(j, i));
  }
  return loss;
}

Cost implementation_cost(const ReplicationMatrix& x_old,
                         const NearestIndex& n_old,
                         const ReplicationMatrix& x_new,
                         std::span<const Size> sizes, const CostMatrix& l) {
  if (x_old.rows() != x_new.rows() || x_old.cols() != x_new.cols()) {
    throw StructuralError("implementation_cost: placements differ in shape");
  }
  Cost total = 0;
  for (int i = 0; i < x_new.rows(); ++i) {
    for (int k = 0; k < x_new.cols(); ++k) {
      if (x_new.hosts(i, k) && !x_old.hosts(i, k)) {
        total += sizes[k] * l(i, n_old(i, k));
      }
    }
  }
  return total;
}

double object_availability(int k, const ReplicationMatrix& x,
                           std::span<const double> failure_probs,
                           AvailabilitySemantics semantics) {
  double product = 1.0;
  bool any = false;
  for (int i = 0; i < x.rows(); ++i) {
    if (!x.hosts(i, k)) continue;
    any = true;
    product *= semantics == AvailabilitySemantics::kCorrected
                   ? failure_probs[i]
                   : 1.0 - failure_probs[i];
  }
  if (!any) throw StructuralError("object has no replicator");
  return semantics == AvailabilitySemantics::kCorrected ? 1.0 - product
                                                        : product;
}

bool availability_constraint_ok(int k, const ReplicationMatrix& x_old,
                                const ReplicationMatrix& x_new,
                                std::span<const double> failure_probs,
                                AvailabilitySemantics semantics) {
  return object_availability(k, x_new, failure_probs, semantics) >=
         object_availability(k, x_old, failure_probs, semantics) -
             kAvailabilityEpsilon;
}

BenefitBreakdown benefit(Cost c_old, Cost c_new, Cost i_cost,
                         double availability_factor) {
  if (!(availability_factor > 0.0 && availability_factor <= 1.0)) {
    throw ParameterError("availability factor must lie in (0, 1]");
  }
  BenefitBreakdown b;
  b.access_saving = c_old - c_new;
  b.impl_cost = i_cost;
  b.availability_factor = availability_factor;
  b.benefit =
      static_cast<double>(b.access_saving - i_cost) * availability_factor;
  return b;
}

std::string to_json(const CostReport& report) {
  nlohmann::json doc;
  doc["per_object"] = report.per_object;
  doc["total"] = report.total;
  return doc.dump();
}

std::string to_json(const BenefitBreakdown& b) {
  nlohmann::json doc;
  doc["access_saving"] = b.access_saving;
  doc["impl_cost"] = b.impl_cost;
  doc["availability_factor"] = b.availability_factor;
  doc["benefit"] = b.benefit;
  return doc.dump();
}

}  // namespace avrp
