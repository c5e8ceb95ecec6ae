#pragma once

// Honeypot game primitives: UAV types, contract menus, the utilities of
// both sides and an exhaustive checker for individual rationality (IR) and
// incentive compatibility (IC).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "vddc/errors.hpp"

namespace vddc {

// Absolute tolerance on utility gaps. IC binds with exact equality at the
// optimum, so a strict comparison would flag rounding noise.
inline constexpr double kUtilityTolerance = 1e-9;

// Ordering perturbation applied per type index when two eligible types
// share a marginal cost.
inline constexpr double kTieBreakEpsilon = 1e-12;

struct UavType {
  int index = 0;
  double vdd_cost = 0.0;      // cost per VDD byte for creation and transmission
  double privacy_cost = 0.0;  // privacy loss per VDD byte
  double delay = 0.0;         // seconds to deliver its VDD
  int count = 0;              // UAVs of this type

  double marginal_cost() const noexcept { return vdd_cost + privacy_cost; }
};

struct ContractItem {
  double size = 0.0;    // VDD bytes demanded
  double reward = 0.0;  // payment
};

struct ContractMenu {
  double t_max = 0.0;
  std::vector<ContractItem> items;  // aligned with Scenario::types
};

struct Scenario {
  std::vector<UavType> types;
  double satisfaction_factor = 6.0;
  double deployment_cost = 1.0;
  double s_max = 300.0;
  double t_max = 2.0;
  double vdd_demand = 800.0;
  int total_uavs = 0;

  bool eligible(const UavType& t) const noexcept { return t.delay <= t_max; }

  // Meets the deadline and has at least one UAV. Only these types get a
  // non-null contract item.
  bool participates(const UavType& t) const noexcept { return eligible(t) && t.count > 0; }

  void validate() const {
    if (types.empty())
      throw ValidationError("types", "at least one UAV type is required");
    if (!(satisfaction_factor > 0.0))
      throw ValidationError("satisfaction_factor", "must be positive");
    if (!(deployment_cost >= 0.0))
      throw ValidationError("deployment_cost", "must be non-negative");
    if (!(s_max > 0.0)) throw ValidationError("s_max", "must be positive");
    if (!(t_max > 0.0)) throw ValidationError("t_max", "must be positive");
    if (!(vdd_demand > 0.0)) throw ValidationError("vdd_demand", "must be positive");
    if (total_uavs <= 0) throw ValidationError("total_uavs", "must be positive");

    std::set<int> seen;
    long long sum = 0;
    for (const auto& t : types) {
      const std::string f = "types[" + std::to_string(t.index) + "]";
      if (t.index <= 0) throw ValidationError(f + ".index", "must be a positive integer");
      if (!seen.insert(t.index).second) throw ValidationError(f + ".index", "duplicate type index");
      if (!(t.vdd_cost >= 0.0) || !(t.privacy_cost >= 0.0))
        throw ValidationError(f + ".vdd_cost", "cost components must be non-negative");
      if (!(t.marginal_cost() > 0.0))
        throw ValidationError(f + ".vdd_cost", "marginal cost must be positive");
      if (!(t.delay > 0.0)) throw ValidationError(f + ".delay", "must be positive");
      if (t.count < 0) throw ValidationError(f + ".count", "must be non-negative");
      sum += t.count;
    }
    if (sum != total_uavs)
      throw ValidationError("total_uavs", "sum of type counts (" + std::to_string(sum) +
                                              ") differs from total_uavs (" +
                                              std::to_string(total_uavs) + ")");
  }
};

// Utility of a UAV of the given type that signs `item`. A UAV missing the
// deadline is not paid but still bears its costs.
inline double uav_utility(const UavType& type, const ContractItem& item, double t_max,
                          double deployment_cost) noexcept {
  const double cost = type.marginal_cost() * item.size + deployment_cost;
  if (type.delay <= t_max) return item.reward - cost;
  return -cost;
}

// Per-type term of the GCS utility: logarithmic satisfaction weighted by
// count over delay, minus the total payment to that type.
inline double gcs_term(const Scenario& sc, const UavType& type, const ContractItem& item,
                       double t_max) noexcept {
  const bool in_time = type.delay <= t_max;
  const double s = in_time ? item.size : 0.0;
  const double pay = in_time ? type.count * item.reward : 0.0;
  return sc.satisfaction_factor * type.count / type.delay * std::log1p(s) - pay;
}

inline double gcs_term(const Scenario& sc, const UavType& type, const ContractItem& item) noexcept {
  return gcs_term(sc, type, item, sc.t_max);
}

inline void check_menu_shape(const Scenario& sc, const ContractMenu& menu) {
  if (menu.items.size() != sc.types.size())
    throw ValidationError("menu.items", "expected " + std::to_string(sc.types.size()) +
                                            " items, got " + std::to_string(menu.items.size()));
  if (!(menu.t_max > 0.0)) throw ValidationError("menu.t_max", "must be positive");
}

inline double gcs_utility(const Scenario& sc, const ContractMenu& menu) {
  check_menu_shape(sc, menu);
  // The menu deadline governs eligibility.
  double total = 0.0;
  for (std::size_t j = 0; j < sc.types.size(); ++j)
    total += gcs_term(sc, sc.types[j], menu.items[j], menu.t_max);
  return total;
}

// Positions (into sc.types) of the participating types, sorted by
// strictly descending marginal cost. Ties are broken by subtracting
// kTieBreakEpsilon * index, so the lower index ranks first.
inline std::vector<std::size_t> eligible_order(const Scenario& sc) {
  std::vector<std::size_t> pos;
  for (std::size_t j = 0; j < sc.types.size(); ++j)
    if (sc.participates(sc.types[j])) pos.push_back(j);
  auto key = [&](std::size_t j) {
    return sc.types[j].marginal_cost() - kTieBreakEpsilon * sc.types[j].index;
  };
  std::stable_sort(pos.begin(), pos.end(),
                   [&](std::size_t a, std::size_t b) { return key(a) > key(b); });
  return pos;
}

inline std::vector<UavType> eligible_types(const Scenario& sc) {
  std::vector<UavType> out;
  for (auto j : eligible_order(sc)) out.push_back(sc.types[j]);
  return out;
}

struct IrViolation {
  int type_index;
  double utility;
};

struct IcViolation {
  int type_index;
  int preferred_index;  // type whose item it would rather sign
  double gap;           // utility(preferred) - utility(own), > 0
};

struct FeasibilityReport {
  std::vector<IrViolation> ir_violations;
  std::vector<IcViolation> ic_violations;
  std::vector<int> ineligible_nonzero;  // non-participating types offered a non-null item
  bool size_monotone = true;
  bool reward_monotone = true;

  bool feasible() const noexcept {
    return ir_violations.empty() && ic_violations.empty() && ineligible_nonzero.empty() &&
           size_monotone && reward_monotone;
  }
};

// Brute-force check: every eligible type against every eligible item.
inline FeasibilityReport verify_feasibility(const Scenario& sc, const ContractMenu& menu) {
  check_menu_shape(sc, menu);
  Scenario view = sc;
  view.t_max = menu.t_max;

  FeasibilityReport rep;
  const auto order = eligible_order(view);
  for (std::size_t j = 0; j < sc.types.size(); ++j) {
    if (view.participates(sc.types[j])) continue;
    if (menu.items[j].size != 0.0 || menu.items[j].reward != 0.0)
      rep.ineligible_nonzero.push_back(sc.types[j].index);
  }

  for (auto j : order) {
    const auto& t = sc.types[j];
    const double own = uav_utility(t, menu.items[j], menu.t_max, sc.deployment_cost);
    if (own < -kUtilityTolerance) rep.ir_violations.push_back({t.index, own});
    for (auto k : order) {
      if (k == j) continue;
      const double other = uav_utility(t, menu.items[k], menu.t_max, sc.deployment_cost);
      if (other - own > kUtilityTolerance)
        rep.ic_violations.push_back({t.index, sc.types[k].index, other - own});
    }
  }

  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& prev = menu.items[order[i - 1]];
    const auto& cur = menu.items[order[i]];
    if (cur.size < prev.size - kUtilityTolerance) rep.size_monotone = false;
    if (cur.reward < prev.reward - kUtilityTolerance) rep.reward_monotone = false;
  }
  return rep;
}

// Analytic feasibility test: null items for non-participating types, non-decreasing
// sizes and rewards along the eligible order, IR of the costliest type and
// the adjacent IC band C_j dS <= dR <= C_{j-1} dS.
inline bool structural_feasibility(const Scenario& sc, const ContractMenu& menu) {
  check_menu_shape(sc, menu);
  Scenario view = sc;
  view.t_max = menu.t_max;
  for (std::size_t j = 0; j < sc.types.size(); ++j)
    if (!view.participates(sc.types[j]) && (menu.items[j].size != 0.0 || menu.items[j].reward != 0.0))
      return false;

  const auto order = eligible_order(view);
  if (order.empty()) return true;
  const double tol = kUtilityTolerance;
  const auto& first = menu.items[order.front()];
  if (first.size < -tol || first.reward < -tol) return false;
  if (first.reward - sc.types[order.front()].marginal_cost() * first.size - sc.deployment_cost < -tol)
    return false;
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto& p = menu.items[order[i - 1]];
    const auto& c = menu.items[order[i]];
    if (c.size < p.size - tol || c.reward < p.reward - tol) return false;
    const double ds = c.size - p.size;
    const double dr = c.reward - p.reward;
    const double lo = sc.types[order[i]].marginal_cost() * ds;
    const double hi = sc.types[order[i - 1]].marginal_cost() * ds;
    if (dr < lo - tol || dr > hi + tol) return false;
  }
  return true;
}

// Aggregate contracted VDD of the eligible types, count weighted, over the
// GCS demand.
inline double defensive_effectiveness(const Scenario& sc, const ContractMenu& menu) {
  check_menu_shape(sc, menu);
  if (!(sc.vdd_demand > 0.0)) throw ValidationError("vdd_demand", "must be positive");
  double total = 0.0;
  for (std::size_t j = 0; j < sc.types.size(); ++j)
    if (sc.types[j].delay <= menu.t_max) total += sc.types[j].count * menu.items[j].size;
  return total / sc.vdd_demand;
}

} // namespace vddc
