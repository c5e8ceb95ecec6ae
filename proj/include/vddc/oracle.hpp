#pragma once

// Exhaustive grid search over non-decreasing size tuples, used to
// cross-check the closed-form partial-information menu on small instances.

#include <cmath>
#include <cstddef>
#include <vector>

#include "vddc/contract.hpp"

namespace vddc {

inline constexpr std::size_t kOracleMaxTypes = 3;

struct OracleResult {
  ContractMenu menu;
  double gcs_utility = 0.0;
};

inline OracleResult brute_force_search(const Scenario& sc, double grid_step) {
  sc.validate();
  if (!(grid_step > 0.0)) throw ValidationError("grid_step", "must be positive");
  const auto order = eligible_order(sc);
  const std::size_t n = order.size();
  if (n > kOracleMaxTypes)
    throw TooManyTypes(std::to_string(n) + " eligible types; the grid oracle handles at most " +
                       std::to_string(kOracleMaxTypes));

  const auto points = static_cast<std::size_t>(std::floor(sc.s_max / grid_step + 1e-9)) + 1;
  std::vector<double> grid(points), log_grid(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = static_cast<double>(k) * grid_step;
    log_grid[k] = std::log1p(grid[k]);
  }

  std::vector<double> cost(n), weight(n), count(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& t = sc.types[order[r]];
    cost[r] = t.marginal_cost();
    weight[r] = sc.satisfaction_factor * t.count / t.delay;
    count[r] = t.count;
  }

  // Utility of a size tuple with the cheapest IC/IR-sustaining rewards,
  // evaluated term by term.
  std::vector<std::size_t> idx(n, 0), best(n, 0);
  auto evaluate = [&]() {
    double u = 0.0, rent = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (r > 0) rent += (cost[r - 1] - cost[r]) * grid[idx[r - 1]];
      const double reward = cost[r] * grid[idx[r]] + rent + sc.deployment_cost;
      u += weight[r] * log_grid[idx[r]] - count[r] * reward;
    }
    return u;
  };

  double best_u = -INFINITY;
  auto recurse = [&](auto&& self, std::size_t r, std::size_t lo) -> void {
    if (r == n) {
      const double u = evaluate();
      if (u > best_u) {
        best_u = u;
        best = idx;
      }
      return;
    }
    for (std::size_t k = lo; k < points; ++k) {
      idx[r] = k;
      self(self, r + 1, k);
    }
  };
  recurse(recurse, 0, 0);

  std::vector<double> sizes(n);
  for (std::size_t r = 0; r < n; ++r) sizes[r] = grid[best[r]];
  const auto rewards = optimal_rewards(sc, sizes);

  OracleResult res;
  res.menu = null_menu(sc);
  for (std::size_t r = 0; r < n; ++r) res.menu.items[order[r]] = {sizes[r], rewards[r]};
  res.gcs_utility = gcs_utility(sc, res.menu);
  return res;
}

inline ContractMenu brute_force_oracle(const Scenario& sc, double grid_step) {
  return brute_force_search(sc, grid_step).menu;
}

// Upper bound on how much utility restricting sizes to a grid of the given
// step can lose: each rank's term is Lipschitz with constant w_j + |a_j|.
inline double grid_resolution_bound(const Scenario& sc, double grid_step) {
  const auto oc = objective_coefficients(sc);
  double lip = 0.0;
  for (std::size_t r = 0; r < oc.size(); ++r) lip += oc.weight[r] + std::abs(oc.slope[r]);
  return grid_step * lip;
}

} // namespace vddc
