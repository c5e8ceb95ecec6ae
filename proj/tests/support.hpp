#pragma once

#include <algorithm>
#include <string>

#include "vddc/vddc.hpp"

namespace vddc::test {

inline Scenario scenario_a() {
  Scenario sc;
  sc.types = {{1, 0.6, 0.4, 1.0, 5}, {2, 0.3, 0.2, 1.0, 5}};
  sc.total_uavs = 10;
  return sc;
}

// Type 2 is slow enough that its relaxed size falls below type 1's. The
// deadline is relaxed so that type 2 still qualifies.
inline Scenario scenario_b() {
  Scenario sc = scenario_a();
  sc.types[1].delay = 4.0;
  sc.t_max = 4.0;
  return sc;
}

inline double uniform(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

struct RandomSpec {
  int min_types = 1;
  int max_types = 6;
  double s_max_lo = 5.0;
  double s_max_hi = 300.0;
  bool all_eligible = false;
  bool all_present = false;
};

inline Scenario random_scenario(RngStream& rng, const RandomSpec& spec = {}) {
  Scenario sc;
  const int n = spec.min_types + static_cast<int>(rng.below(spec.max_types - spec.min_types + 1));
  sc.satisfaction_factor = uniform(rng, 1.0, 10.0);
  sc.deployment_cost = uniform(rng, 0.0, 2.0);
  sc.s_max = uniform(rng, spec.s_max_lo, spec.s_max_hi);
  sc.t_max = 2.0;
  int total = 0;
  for (int j = 0; j < n; ++j) {
    UavType t;
    t.index = j + 1;
    const double c = uniform(rng, 0.01, 1.0);
    const double share = rng.uniform();
    t.vdd_cost = c * share;
    t.privacy_cost = c - t.vdd_cost;
    t.delay = spec.all_eligible ? uniform(rng, 0.2, 2.0) : uniform(rng, 0.2, 3.0);
    t.count = static_cast<int>(rng.below(11)) + (spec.all_present ? 1 : 0);
    total += t.count;
    sc.types.push_back(t);
  }
  if (total == 0) {
    sc.types.front().count = 1;
    total = 1;
  }
  sc.total_uavs = total;
  return sc;
}

} // namespace vddc::test
