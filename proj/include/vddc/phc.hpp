#pragma once

// Two-tier policy hill-climbing for contract design when the GCS knows
// neither the type distribution nor any private cost. Per eligible type the
// GCS keeps a (Q, pi) pair over its offer levels with the previous VDD size
// as state, and the UAV keeps one over VDD sizes with the current offer as
// state.
//
// Settlement in one slot: the GCS offers to pay for delivered VDD its own
// per-UAV valuation minus a retained margin (its action),
//     R = max(0, satisfaction / T_j * ln(1 + S) - margin),
// and the UAV picks S. S = 0 means the UAV stays out: nothing is paid and
// both sides score 0. Otherwise the UAV scores R - C_j S - C_0 and the GCS
// scores its per-type utility term N_j (valuation - R). The UAV therefore
// faces a reward that grows with VDD and learns the efficient size, while
// the GCS learns the largest margin the UAV still accepts, which drives the
// UAV to zero surplus as in the complete-information menu.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vddc/errors.hpp"
#include "vddc/game.hpp"
#include "vddc/rng.hpp"

namespace vddc {

struct PhcParams {
  double learning_rate_gcs = 0.7;
  double learning_rate_uav = 0.7;
  double discount_gcs = 0.8;
  double discount_uav = 0.8;
  double step_gcs = 0.01;
  double step_uav = 0.01;
  int reward_levels = 20;  // A: GCS offers are A + 1 levels
  int size_levels = 20;    // B: UAV sizes are B + 1 levels
  double r_max = 0.0;      // top of the reward grid; 0 picks the default
  double margin_max = 0.0; // top of the margin grid; 0 picks the default

  int slots = 20000;
  int hotboot_episodes = 0;
  int hotboot_slots = 2000;
  double hotboot_spread = 0.2;
  int window = 500;
  double min_share = 0.95;

  void validate() const {
    auto unit = [](double v, const char* f, bool closed_low, bool closed_high) {
      const bool lo = closed_low ? v >= 0.0 : v > 0.0;
      const bool hi = closed_high ? v <= 1.0 : v < 1.0;
      if (!(lo && hi)) throw ValidationError(std::string("phc.") + f, "out of range");
    };
    unit(learning_rate_gcs, "learning_rate_gcs", false, true);
    unit(learning_rate_uav, "learning_rate_uav", false, true);
    unit(discount_gcs, "discount_gcs", true, false);
    unit(discount_uav, "discount_uav", true, false);
    unit(step_gcs, "step_gcs", false, false);
    unit(step_uav, "step_uav", false, false);
    if (reward_levels < 0) throw ValidationError("phc.reward_levels", "must be non-negative");
    if (size_levels < 0) throw ValidationError("phc.size_levels", "must be non-negative");
    if (r_max < 0.0) throw ValidationError("phc.r_max", "must be non-negative");
    if (margin_max < 0.0) throw ValidationError("phc.margin_max", "must be non-negative");
    if (slots < 1) throw ValidationError("phc.slots", "must be at least 1");
    if (hotboot_episodes < 0) throw ValidationError("phc.hotboot_episodes", "must be non-negative");
    if (hotboot_slots < 1) throw ValidationError("phc.hotboot_slots", "must be at least 1");
    if (!(hotboot_spread >= 0.0 && hotboot_spread < 1.0))
      throw ValidationError("phc.hotboot_spread", "must lie in [0, 1)");
    if (window < 1) throw ValidationError("phc.window", "must be at least 1");
    if (!(min_share > 0.0 && min_share <= 1.0))
      throw ValidationError("phc.min_share", "must lie in (0, 1]");
  }
};

// Fills the grid tops left at 0: r_max = 2 (C_1 S_max + C_0) with C_1 the
// costliest eligible type, margin_max = the largest per-UAV valuation of
// S_max over eligible types.
inline PhcParams resolve_defaults(PhcParams p, const Scenario& sc) {
  double c1 = 0.0, top_value = 0.0;
  for (const auto& t : sc.types) {
    if (!sc.participates(t)) continue;
    c1 = std::max(c1, t.marginal_cost());
    top_value = std::max(top_value, sc.satisfaction_factor / t.delay * std::log1p(sc.s_max));
  }
  if (p.r_max == 0.0) p.r_max = 2.0 * (c1 * sc.s_max + sc.deployment_cost);
  if (p.margin_max == 0.0) p.margin_max = top_value;
  return p;
}

// levels + 1 evenly spaced points on [0, top]; zero levels is the single
// point {top}.
inline std::vector<double> uniform_grid(int levels, double top) {
  if (levels == 0) return {top};
  std::vector<double> g(static_cast<std::size_t>(levels) + 1);
  for (int k = 0; k <= levels; ++k) g[k] = k * top / levels;
  return g;
}

struct ActionGrids {
  std::vector<double> reward;  // A + 1 reward levels
  std::vector<double> size;    // B + 1 VDD sizes
  std::vector<double> margin;  // A + 1 GCS margin levels
};

inline ActionGrids action_grids(const PhcParams& p, double s_max) {
  return {uniform_grid(p.reward_levels, p.r_max), uniform_grid(p.size_levels, s_max),
          uniform_grid(p.reward_levels, p.margin_max)};
}

// Index of the grid point nearest to `value`; ties go to the lower point,
// values past either end clamp.
inline std::size_t quantize_state(double value, std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("grid", "must not be empty");
  auto it = std::lower_bound(grid.begin(), grid.end(), value);
  if (it == grid.begin()) return 0;
  if (it == grid.end()) return grid.size() - 1;
  const auto hi = static_cast<std::size_t>(it - grid.begin());
  return (value - grid[hi - 1] <= grid[hi] - value) ? hi - 1 : hi;
}

// Tabular Q-function and mixed strategy of one learner.
class PolicyTables {
public:
  PolicyTables() = default;

  // Cold start: Q = 0, uniform strategy in every state.
  PolicyTables(std::size_t states, std::size_t actions)
      : states_(states), actions_(actions), q_(states * actions, 0.0),
        pi_(states * actions, actions ? 1.0 / static_cast<double>(actions) : 0.0) {}

  std::size_t states() const noexcept { return states_; }
  std::size_t actions() const noexcept { return actions_; }

  double q(std::size_t s, std::size_t a) const { return q_[s * actions_ + a]; }
  double& q(std::size_t s, std::size_t a) { return q_[s * actions_ + a]; }

  std::span<const double> q_row(std::size_t s) const { return {q_.data() + s * actions_, actions_}; }
  std::span<const double> policy(std::size_t s) const { return {pi_.data() + s * actions_, actions_}; }
  std::span<double> policy(std::size_t s) { return {pi_.data() + s * actions_, actions_}; }

  // argmax_a Q(s, a); ties go to the lowest index.
  std::size_t greedy(std::size_t s) const {
    auto row = q_row(s);
    return static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
  }

  double max_q(std::size_t s) const { return q(s, greedy(s)); }

  // Every strategy row on the simplex and every Q finite.
  bool valid(double tol = 1e-9) const {
    for (double v : q_)
      if (!std::isfinite(v)) return false;
    for (std::size_t s = 0; s < states_; ++s) {
      double sum = 0.0;
      for (double p : policy(s)) {
        if (p < 0.0 || p > 1.0) return false;
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) return false;
    }
    return true;
  }

  bool operator==(const PolicyTables&) const = default;

private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> q_;
  std::vector<double> pi_;
};

struct PhcStep {
  double rate;      // learning rate
  double discount;
  double step;      // hill-climbing increment
};

// One Bellman backup of Q(state, action) followed by a hill-climbing move of
// the state's strategy toward the greedy action: +step on it and
// -step / (actions) on every other one, then clamp at 0 and renormalize.
inline void phc_update(PolicyTables& t, std::size_t state, std::size_t action, double payoff,
                       std::size_t next_state, const PhcStep& p) {
  double& q = t.q(state, action);
  q = (1.0 - p.rate) * q + p.rate * (payoff + p.discount * t.max_q(next_state));

  const std::size_t greedy = t.greedy(state);
  auto row = t.policy(state);
  const double down = p.step / static_cast<double>(row.size());
  double sum = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    row[a] += (a == greedy) ? p.step : -down;
    row[a] = std::max(row[a], 0.0);
    sum += row[a];
  }
  for (auto& v : row) v /= sum;
}

// Samples an action from the state's mixed strategy.
inline std::size_t select_action(const PolicyTables& t, std::size_t state, RngStream& rng) {
  const auto row = t.policy(state);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t a = 0; a < row.size(); ++a) {
    acc += row[a];
    if (u < acc) return a;
  }
  // u landed in the rounding gap above the cumulative sum.
  for (std::size_t a = row.size(); a-- > 0;)
    if (row[a] > 0.0) return a;
  return 0;
}

// Tables for both tiers, one pair per eligible type in scenario order.
struct LearnerTables {
  std::vector<int> type_indices;
  std::vector<PolicyTables> gcs;
  std::vector<PolicyTables> uav;

  bool operator==(const LearnerTables&) const = default;
};

inline std::vector<std::size_t> learning_positions(const Scenario& sc) {
  std::vector<std::size_t> pos;
  for (std::size_t j = 0; j < sc.types.size(); ++j)
    if (sc.participates(sc.types[j])) pos.push_back(j);
  return pos;
}

inline LearnerTables cold_tables(const Scenario& sc, const PhcParams& p) {
  const std::size_t n_reward = static_cast<std::size_t>(p.reward_levels) + 1;
  const std::size_t n_size = static_cast<std::size_t>(p.size_levels) + 1;
  LearnerTables lt;
  for (auto j : learning_positions(sc)) {
    lt.type_indices.push_back(sc.types[j].index);
    lt.gcs.emplace_back(n_size, n_reward);
    lt.uav.emplace_back(n_reward, n_size);
  }
  return lt;
}

struct Settlement {
  double reward = 0.0;
  double uav_payoff = 0.0;
  double gcs_payoff = 0.0;
};

inline Settlement settle(const Scenario& sc, const UavType& t, double size, double margin) {
  if (size <= 0.0) return {};
  const double value = sc.satisfaction_factor / t.delay * std::log1p(size);
  Settlement out;
  out.reward = std::max(0.0, value - margin);
  const ContractItem item{size, out.reward};
  out.uav_payoff = uav_utility(t, item, sc.t_max, sc.deployment_cost);
  out.gcs_payoff = gcs_term(sc, t, item);
  return out;
}

struct SlotRecord {
  std::size_t slot = 0;
  int type_index = 0;
  std::size_t gcs_state = 0;  // previous size level
  std::size_t uav_state = 0;  // offer level seen this slot
  std::size_t reward_action = 0;  // GCS margin level
  std::size_t size_action = 0;
  double reward = 0.0;
  double size = 0.0;
  double uav_utility = 0.0;
  double gcs_term = 0.0;

  bool operator==(const SlotRecord&) const = default;
};

// Slot-major records: all learning types of slot 0, then slot 1, ...
struct EpisodeLog {
  std::vector<int> type_indices;
  std::size_t slots = 0;
  std::vector<SlotRecord> records;

  const SlotRecord& at(std::size_t slot, std::size_t type_rank) const {
    return records[slot * type_indices.size() + type_rank];
  }

  bool operator==(const EpisodeLog&) const = default;
};

struct TrainResult {
  EpisodeLog log;
  LearnerTables tables;
};

// Runs `slots` slots starting from `init`. Within a slot the GCS moves
// first: it observes the previous VDD size (0 before the first slot) and
// posts an offer; the UAV observes that offer and picks its size. The UAV
// treats the posted offer as standing terms, so its successor state is the
// same offer; the GCS's successor state is the size it just obtained.
inline TrainResult train(const Scenario& sc, PhcParams params, std::size_t slots, LearnerTables init,
                         RngStream& rng) {
  sc.validate();
  params = resolve_defaults(params, sc);
  params.validate();
  if (slots < 1) throw ValidationError("slots", "must be at least 1");
  const auto grids = action_grids(params, sc.s_max);
  const auto pos = learning_positions(sc);
  if (init.gcs.size() != pos.size() || init.uav.size() != pos.size())
    throw ValidationError("tables", "one table pair per eligible type is required");
  for (std::size_t r = 0; r < pos.size(); ++r)
    if (init.gcs[r].states() != grids.size.size() || init.gcs[r].actions() != grids.margin.size() ||
        init.uav[r].states() != grids.margin.size() || init.uav[r].actions() != grids.size.size())
      throw ValidationError("tables", "table shape does not match the action grids");

  const PhcStep gcs_step{params.learning_rate_gcs, params.discount_gcs, params.step_gcs};
  const PhcStep uav_step{params.learning_rate_uav, params.discount_uav, params.step_uav};

  TrainResult out;
  out.tables = std::move(init);
  out.log.slots = slots;
  for (auto j : pos) out.log.type_indices.push_back(sc.types[j].index);
  out.log.records.reserve(slots * pos.size());

  std::vector<double> prev_size(pos.size(), 0.0);
  for (std::size_t t = 0; t < slots; ++t) {
    for (std::size_t r = 0; r < pos.size(); ++r) {
      const auto& type = sc.types[pos[r]];
      auto& gcs = out.tables.gcs[r];
      auto& uav = out.tables.uav[r];

      const std::size_t gs = quantize_state(prev_size[r], grids.size);
      const std::size_t a = select_action(gcs, gs, rng);
      const std::size_t us = a;
      const std::size_t b = select_action(uav, us, rng);

      const double size = grids.size[b];
      const auto deal = settle(sc, type, size, grids.margin[a]);
      phc_update(gcs, gs, a, deal.gcs_payoff, b, gcs_step);
      phc_update(uav, us, b, deal.uav_payoff, us, uav_step);

      out.log.records.push_back(
          {t, type.index, gs, us, a, b, deal.reward, size, deal.uav_payoff, deal.gcs_payoff});
      prev_size[r] = size;
    }
  }
  return out;
}

// Copy of `sc` with each cost component and count scaled by an independent
// factor drawn uniformly from [1 - spread, 1 + spread]. Positive counts stay
// positive; delays and the deadline are untouched so eligibility is kept.
inline Scenario perturb_scenario(const Scenario& sc, double spread, RngStream& rng) {
  Scenario out = sc;
  int total = 0;
  for (auto& t : out.types) {
    const double fc = 1.0 - spread + 2.0 * spread * rng.uniform();
    const double fn = 1.0 - spread + 2.0 * spread * rng.uniform();
    t.vdd_cost *= fc;
    t.privacy_cost *= fc;
    if (t.count > 0) t.count = std::max(1, static_cast<int>(std::lround(t.count * fn)));
    total += t.count;
  }
  out.total_uavs = total;
  return out;
}

// Offline pre-training on a family of similar scenarios. Each episode picks
// a family member at random and continues training the same tables.
inline LearnerTables hotboot(const std::vector<Scenario>& family, int episodes, const PhcParams& params,
                             RngStream& rng, LearnerTables init) {
  if (episodes < 0) throw ValidationError("episodes", "must be non-negative");
  if (episodes > 0 && family.empty()) throw ValidationError("family", "must not be empty");
  for (int e = 0; e < episodes; ++e) {
    const auto& sc = family[rng.below(family.size())];
    init = train(sc, params, static_cast<std::size_t>(params.hotboot_slots), std::move(init), rng).tables;
  }
  return init;
}

inline LearnerTables hotboot(const Scenario& base, const PhcParams& params, RngStream& rng) {
  auto tables = cold_tables(base, params);
  if (params.hotboot_episodes == 0) return tables;
  std::vector<Scenario> family;
  for (int e = 0; e < params.hotboot_episodes; ++e)
    family.push_back(perturb_scenario(base, params.hotboot_spread, rng));
  // Grid tops follow the live scenario so the tables line up with it.
  const auto live = resolve_defaults(params, base);
  return hotboot(family, params.hotboot_episodes, live, rng, std::move(tables));
}

struct TypeConvergence {
  int type_index = 0;
  bool converged = false;
  std::size_t modal_size_action = 0;
  std::size_t modal_reward_action = 0;
  double modal_size = 0.0;
  double modal_reward = 0.0;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> mode_of(const std::vector<std::size_t>& counts) {
  auto it = std::max_element(counts.begin(), counts.end());
  return {static_cast<std::size_t>(it - counts.begin()), *it};
}

} // namespace detail

// A type has converged when, over the trailing `window` slots, one size
// action and one offer action each fill at least `min_share` of the slots.
inline std::vector<TypeConvergence> convergence_check(const EpisodeLog& log, std::size_t window,
                                                      double min_share = 0.95) {
  if (window == 0 || window > log.slots)
    throw InsufficientData("window of " + std::to_string(window) + " slots over a log of " +
                           std::to_string(log.slots));
  const std::size_t n = log.type_indices.size();
  std::vector<TypeConvergence> out(n);
  const double need = min_share * static_cast<double>(window);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t max_action = 0;
    for (std::size_t t = log.slots - window; t < log.slots; ++t)
      max_action = std::max({max_action, log.at(t, r).size_action, log.at(t, r).reward_action});
    std::vector<std::size_t> sizes(max_action + 1, 0), offers(max_action + 1, 0);
    for (std::size_t t = log.slots - window; t < log.slots; ++t) {
      ++sizes[log.at(t, r).size_action];
      ++offers[log.at(t, r).reward_action];
    }
    const auto [sa, sn] = detail::mode_of(sizes);
    const auto [ra, rn] = detail::mode_of(offers);
    auto& c = out[r];
    c.type_index = log.type_indices[r];
    c.converged = static_cast<double>(sn) >= need && static_cast<double>(rn) >= need;
    c.modal_size_action = sa;
    c.modal_reward_action = ra;
    // Realized values of the most recent slot playing the modal pair.
    for (std::size_t t = log.slots; t-- > log.slots - window;) {
      const auto& rec = log.at(t, r);
      if (rec.size_action == sa && rec.reward_action == ra) {
        c.modal_size = rec.size;
        c.modal_reward = rec.reward;
        break;
      }
    }
  }
  return out;
}

// Number of slots after which every trailing window stays converged for
// every type, or nullopt if the log ends unconverged.
inline std::optional<std::size_t> convergence_slot(const EpisodeLog& log, std::size_t window,
                                                   double min_share = 0.95) {
  if (window == 0 || window > log.slots)
    throw InsufficientData("window of " + std::to_string(window) + " slots over a log of " +
                           std::to_string(log.slots));
  const std::size_t n = log.type_indices.size();
  const double need = min_share * static_cast<double>(window);

  std::size_t width = 1;
  for (const auto& rec : log.records) width = std::max({width, rec.size_action + 1, rec.reward_action + 1});

  // converged_until[t]: all types converged over the window ending at slot t.
  std::vector<char> ok(log.slots, 1);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<std::size_t> sizes(width, 0), offers(width, 0);
    for (std::size_t t = 0; t < log.slots; ++t) {
      ++sizes[log.at(t, r).size_action];
      ++offers[log.at(t, r).reward_action];
      if (t >= window) {
        --sizes[log.at(t - window, r).size_action];
        --offers[log.at(t - window, r).reward_action];
      }
      if (t + 1 < window) {
        ok[t] = 0;
        continue;
      }
      const double s = static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));
      const double o = static_cast<double>(*std::max_element(offers.begin(), offers.end()));
      if (s < need || o < need) ok[t] = 0;
    }
  }
  if (log.slots == 0 || !ok[log.slots - 1]) return std::nullopt;
  std::size_t t = log.slots - 1;
  while (t > 0 && ok[t - 1]) --t;
  return t + 1;
}

} // namespace vddc
