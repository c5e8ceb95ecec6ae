#pragma once

// Optimal VDD-reward menus when the GCS knows how many UAVs of each type
// exist but not who is who, plus the baseline menus used for comparison.
//
// With rewards set so that the costliest eligible type has zero surplus and
// every adjacent downward IC binds, the GCS utility separates into
//
//   sum_j  w_j ln(1 + S_j) - a_j S_j   (minus C_0 times the eligible count)
//
// with w_j = satisfaction * N_j / T_j and information-rent slope
// a_j = C_j sum_{k>=j} N_k - C_{j+1} sum_{k>j} N_k, ranks in descending cost.
// Each term is strictly concave, so the relaxed sizes are stationary points
// and any decreasing run is pooled at the stationary point of its sum.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "vddc/game.hpp"

namespace vddc {

// Per-rank coefficients of the separable objective, ranks following
// eligible_order().
struct ObjectiveCoefficients {
  std::vector<std::size_t> order;  // positions into Scenario::types
  std::vector<double> weight;      // w_j
  std::vector<double> slope;       // a_j

  std::size_t size() const noexcept { return order.size(); }
};

inline ObjectiveCoefficients objective_coefficients(const Scenario& sc) {
  ObjectiveCoefficients oc;
  oc.order = eligible_order(sc);
  const std::size_t n = oc.order.size();
  oc.weight.resize(n);
  oc.slope.resize(n);

  // tail[j] = sum of counts at ranks >= j
  std::vector<double> tail(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) tail[j] = tail[j + 1] + sc.types[oc.order[j]].count;

  for (std::size_t j = 0; j < n; ++j) {
    const auto& t = sc.types[oc.order[j]];
    oc.weight[j] = sc.satisfaction_factor * t.count / t.delay;
    double a = t.marginal_cost() * tail[j];
    if (j + 1 < n) a -= sc.types[oc.order[j + 1]].marginal_cost() * tail[j + 1];
    oc.slope[j] = a;
  }
  return oc;
}

// Value of the rank-`rank` objective term at size s.
inline double objective_term(const Scenario& sc, std::size_t rank, double s) {
  const auto oc = objective_coefficients(sc);
  if (rank >= oc.size()) throw ValidationError("rank", "not an eligible rank");
  return oc.weight[rank] * std::log1p(s) - oc.slope[rank] * s;
}

namespace detail {

// Maximizer over [0, s_max] of  weight * ln(1+s) - slope * s.
inline double concave_argmax(double weight, double slope, double s_max) noexcept {
  // A non-positive slope makes the term non-decreasing: boundary optimum.
  if (!(slope > 0.0)) return s_max;
  return std::clamp(weight / slope - 1.0, 0.0, s_max);
}

} // namespace detail

// Relaxed optimal sizes per eligible rank, clamped to [0, s_max]. The last
// rank uses satisfaction / (T C) - 1, which coincides with w/a when N > 0.
inline std::vector<double> optimal_vdd_unconstrained(const Scenario& sc) {
  const auto oc = objective_coefficients(sc);
  std::vector<double> out(oc.size());
  for (std::size_t j = 0; j < oc.size(); ++j) {
    if (j + 1 == oc.size()) {
      const auto& t = sc.types[oc.order[j]];
      out[j] = std::clamp(sc.satisfaction_factor / (t.delay * t.marginal_cost()) - 1.0, 0.0, sc.s_max);
    } else {
      out[j] = detail::concave_argmax(oc.weight[j], oc.slope[j], sc.s_max);
    }
  }
  return out;
}

struct IroningResult {
  std::vector<double> sizes;
  // Inclusive rank ranges that were pooled (length >= 2).
  std::vector<std::pair<std::size_t, std::size_t>> pools;
};

// Pool-adjacent-violators on the separable objective: merges the leftmost
// decreasing neighbours into one block whose common size maximizes the
// pooled term, re-checking the block against its left neighbour.
inline IroningResult iron_with_pools(const Scenario& sc, const std::vector<double>& sizes) {
  const auto oc = objective_coefficients(sc);
  if (sizes.size() != oc.size())
    throw ValidationError("sizes", "must have one entry per eligible type");

  struct Block {
    std::size_t first, last;
    double weight, slope, value;
  };
  std::vector<Block> stack;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    stack.push_back({j, j, oc.weight[j], oc.slope[j], sizes[j]});
    while (stack.size() >= 2 && stack[stack.size() - 2].value > stack.back().value) {
      Block right = stack.back();
      stack.pop_back();
      Block& left = stack.back();
      left.last = right.last;
      left.weight += right.weight;
      left.slope += right.slope;
      left.value = detail::concave_argmax(left.weight, left.slope, sc.s_max);
    }
  }

  IroningResult res;
  res.sizes.resize(sizes.size());
  for (const auto& b : stack) {
    for (std::size_t j = b.first; j <= b.last; ++j)
      res.sizes[j] = (b.first == b.last) ? sizes[j] : b.value;
    if (b.last > b.first) res.pools.emplace_back(b.first, b.last);
  }
  return res;
}

inline std::vector<double> iron(const Scenario& sc, const std::vector<double>& sizes) {
  return iron_with_pools(sc, sizes).sizes;
}

// Cheapest rewards sustaining a non-decreasing size sequence: the
// costliest type is held at zero surplus and each cheaper type collects the
// rent of mimicking its costlier neighbour.
inline std::vector<double> optimal_rewards(const Scenario& sc, const std::vector<double>& sizes) {
  const auto order = eligible_order(sc);
  if (sizes.size() != order.size())
    throw ValidationError("sizes", "must have one entry per eligible type");
  for (std::size_t j = 1; j < sizes.size(); ++j)
    if (sizes[j] < sizes[j - 1] - kUtilityTolerance)
      throw ValidationError("sizes", "must be non-decreasing along the eligible order");

  std::vector<double> rewards(sizes.size());
  double rent = 0.0;
  for (std::size_t j = 0; j < sizes.size(); ++j) {
    const double c = sc.types[order[j]].marginal_cost();
    if (j > 0) rent += (sc.types[order[j - 1]].marginal_cost() - c) * sizes[j - 1];
    rewards[j] = c * sizes[j] + rent + sc.deployment_cost;
  }
  return rewards;
}

struct SolverTrace {
  std::vector<int> eligible_order;  // type indices, descending cost
  std::vector<double> unconstrained_sizes;
  std::vector<std::pair<std::size_t, std::size_t>> pools;
  ContractMenu final_menu;
};

struct PartialInfoSolution {
  ContractMenu menu;
  SolverTrace trace;
};

inline ContractMenu null_menu(const Scenario& sc) {
  return ContractMenu{sc.t_max, std::vector<ContractItem>(sc.types.size())};
}

inline PartialInfoSolution solve_partial_info(const Scenario& sc) {
  sc.validate();
  PartialInfoSolution out;
  const auto order = eligible_order(sc);
  for (auto j : order) out.trace.eligible_order.push_back(sc.types[j].index);

  out.trace.unconstrained_sizes = optimal_vdd_unconstrained(sc);
  auto ironed = iron_with_pools(sc, out.trace.unconstrained_sizes);
  out.trace.pools = ironed.pools;
  const auto rewards = optimal_rewards(sc, ironed.sizes);

  out.menu = null_menu(sc);
  for (std::size_t r = 0; r < order.size(); ++r) out.menu.items[order[r]] = {ironed.sizes[r], rewards[r]};
  out.trace.final_menu = out.menu;
  return out;
}

// Menu when the GCS observes every UAV's type: only IR has to hold, so each
// type is held at zero surplus at its own efficient size.
inline ContractMenu solve_complete_info(const Scenario& sc) {
  sc.validate();
  auto menu = null_menu(sc);
  for (std::size_t j = 0; j < sc.types.size(); ++j) {
    const auto& t = sc.types[j];
    if (!sc.participates(t)) continue;
    const double c = t.marginal_cost();
    const double s = std::clamp(sc.satisfaction_factor / (t.delay * c) - 1.0, 0.0, sc.s_max);
    menu.items[j] = {s, c * s + sc.deployment_cost};
  }
  return menu;
}

// Reward proportional to size, R = price * S + C_0. Each eligible type
// picks the size maximizing (price - C) * S; indifference resolves to 0.
inline ContractMenu linear_contract(const Scenario& sc, double unit_price) {
  sc.validate();
  if (!(unit_price > 0.0)) throw ValidationError("unit_price", "must be positive");
  auto menu = null_menu(sc);
  for (std::size_t j = 0; j < sc.types.size(); ++j) {
    const auto& t = sc.types[j];
    if (!sc.participates(t)) continue;
    const double s = (t.marginal_cost() < unit_price) ? sc.s_max : 0.0;
    menu.items[j] = {s, unit_price * s + sc.deployment_cost};
  }
  return menu;
}

// Every eligible type gets the item designed for the costliest eligible type.
inline ContractMenu uniform_contract(const Scenario& sc) {
  const auto opt = solve_partial_info(sc);
  const auto order = eligible_order(sc);
  auto menu = null_menu(sc);
  if (order.empty()) return menu;
  const auto item = opt.menu.items[order.front()];
  for (auto j : order) menu.items[j] = item;
  return menu;
}

} // namespace vddc
