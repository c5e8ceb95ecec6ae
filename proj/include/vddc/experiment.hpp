#pragma once

// Experiment drivers behind the CLI: single solves, the four-scheme
// comparison, cost and population sweeps and seeded PHC runs, plus their
// CSV and manifest writers. Nothing here touches the filesystem except the
// explicit write_* helpers.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <future>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vddc/config.hpp"
#include "vddc/contract.hpp"
#include "vddc/csv.hpp"
#include "vddc/game.hpp"
#include "vddc/oracle.hpp"
#include "vddc/phc.hpp"
#include "vddc/rng.hpp"

namespace vddc {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& scheme_labels() {
  static const std::vector<std::string> labels{"partial", "complete", "linear", "uniform"};
  return labels;
}

struct MetricsRow {
  std::string scheme;
  std::vector<double> sizes;          // aligned with Scenario::types
  std::vector<double> rewards;
  std::vector<double> uav_utilities;  // 0 for types that do not participate
  double gcs_utility = 0.0;
  double zeta = 0.0;
  std::optional<std::size_t> convergence_slot;
  double wall_seconds = 0.0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

inline MetricsRow metrics_for(const Scenario& sc, const ContractMenu& menu, std::string scheme) {
  MetricsRow row;
  row.scheme = std::move(scheme);
  for (std::size_t j = 0; j < sc.types.size(); ++j) {
    const auto& t = sc.types[j];
    const auto& item = menu.items[j];
    row.sizes.push_back(item.size);
    row.rewards.push_back(item.reward);
    const bool in = t.count > 0 && t.delay <= menu.t_max;
    row.uav_utilities.push_back(in ? uav_utility(t, item, menu.t_max, sc.deployment_cost) : 0.0);
  }
  row.gcs_utility = gcs_utility(sc, menu);
  row.zeta = defensive_effectiveness(sc, menu);
  return row;
}

// Costliest eligible marginal cost; the linear baseline's default price.
inline double highest_eligible_cost(const Scenario& sc) {
  const auto order = eligible_order(sc);
  if (order.empty()) throw ValidationError("types", "no type meets the deadline");
  return sc.types[order.front()].marginal_cost();
}

// Menus of the four schemes in label order.
inline std::vector<ContractMenu> scheme_menus(const Scenario& sc, double linear_price) {
  std::vector<ContractMenu> out;
  const auto& labels = scheme_labels();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    try {
      switch (k) {
      case 0: out.push_back(solve_partial_info(sc).menu); break;
      case 1: out.push_back(solve_complete_info(sc)); break;
      case 2: out.push_back(linear_contract(sc, linear_price)); break;
      default: out.push_back(uniform_contract(sc)); break;
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverError(labels[k] + ": " + e.what());
    }
  }
  return out;
}

inline std::vector<MetricsRow> run_compare(const ExperimentConfig& cfg) {
  const auto& sc = cfg.scenario;
  const double price = cfg.linear_price.value_or(highest_eligible_cost(sc));
  std::vector<MetricsRow> rows;
  const auto menus = scheme_menus(sc, price);
  for (std::size_t k = 0; k < menus.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    rows.push_back(metrics_for(sc, menus[k], scheme_labels()[k]));
    rows.back().wall_seconds = detail::seconds_since(t0);
  }
  return rows;
}

inline std::string compare_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "scheme,gcs_utility,zeta,sizes,rewards,uav_utilities\n";
  for (const auto& r : rows)
    out += r.scheme + "," + format_number(r.gcs_utility) + "," + format_number(r.zeta) + "," +
           join_numbers(r.sizes) + "," + join_numbers(r.rewards) + "," + join_numbers(r.uav_utilities) + "\n";
  return out;
}

struct SolveReport {
  PartialInfoSolution solution;
  MetricsRow metrics;
  std::optional<OracleResult> oracle;
  double oracle_bound = 0.0;
};

// Partial-information menu, optionally cross-checked against the grid
// oracle: the closed form must match or beat it by no more than the grid's
// resolution bound.
inline SolveReport run_solve(const ExperimentConfig& cfg, bool with_oracle) {
  SolveReport rep;
  rep.solution = solve_partial_info(cfg.scenario);
  rep.metrics = metrics_for(cfg.scenario, rep.solution.menu, "partial");
  if (with_oracle) {
    const double step = cfg.grid_oracle.value_or(0.25);
    try {
      rep.oracle = brute_force_search(cfg.scenario, step);
    } catch (const TooManyTypes& e) {
      throw SolverError(std::string("oracle: ") + e.what());
    }
    rep.oracle_bound = grid_resolution_bound(cfg.scenario, step);
    const double gap = rep.metrics.gcs_utility - rep.oracle->gcs_utility;
    if (gap < -1e-9 || gap > rep.oracle_bound + 1e-9)
      throw SolverError("oracle: closed-form utility " + format_number(rep.metrics.gcs_utility) +
                        " disagrees with grid utility " + format_number(rep.oracle->gcs_utility));
  }
  return rep;
}

inline std::string solve_csv(const Scenario& sc, const SolveReport& rep) {
  std::string out = "type,marginal_cost,delay,count,eligible,size,reward,uav_utility\n";
  for (std::size_t j = 0; j < sc.types.size(); ++j) {
    const auto& t = sc.types[j];
    out += std::to_string(t.index) + "," + format_number(t.marginal_cost()) + "," + format_number(t.delay) + "," +
           std::to_string(t.count) + "," + (sc.eligible(t) ? "1" : "0") + "," +
           format_number(rep.metrics.sizes[j]) + "," + format_number(rep.metrics.rewards[j]) + "," +
           format_number(rep.metrics.uav_utilities[j]) + "\n";
  }
  return out;
}

inline nlohmann::json solve_trace_json(const SolveReport& rep) {
  nlohmann::json j;
  const auto& tr = rep.solution.trace;
  j["eligible_order"] = tr.eligible_order;
  j["unconstrained_sizes"] = tr.unconstrained_sizes;
  auto pools = nlohmann::json::array();
  for (const auto& [a, b] : tr.pools) pools.push_back({a, b});
  j["pools"] = pools;
  j["gcs_utility"] = rep.metrics.gcs_utility;
  j["zeta"] = rep.metrics.zeta;
  if (rep.oracle) {
    j["oracle_gcs_utility"] = rep.oracle->gcs_utility;
    j["oracle_bound"] = rep.oracle_bound;
  }
  return j;
}

struct CostSweepRow {
  double cost = 0.0;
  std::string scheme;
  double size = 0.0;
  double reward = 0.0;
  double uav_utility = 0.0;
};

// Varies the marginal cost of one type over [from, to], splitting it
// between its two components in the configured proportion, and records
// that type's item and utility under each scheme. The linear price stays at
// its value for the configured scenario.
inline std::vector<CostSweepRow> run_sweep_cost(const ExperimentConfig& cfg) {
  const auto& base = cfg.scenario;
  const auto& sw = cfg.sweep_cost;
  std::size_t pos = 0;
  if (sw.type_index != 0)
    while (base.types[pos].index != sw.type_index) ++pos;
  if (!base.participates(base.types[pos]))
    throw ValidationError("sweep_cost.type", "swept type misses the deadline or has no UAVs");
  const double price = cfg.linear_price.value_or(highest_eligible_cost(base));
  const auto& ref = base.types[pos];
  const double share = ref.vdd_cost / ref.marginal_cost();

  std::vector<CostSweepRow> rows;
  for (int k = 0; k < sw.points; ++k) {
    const double c = sw.points == 1 ? sw.from : sw.from + (sw.to - sw.from) * k / (sw.points - 1);
    Scenario sc = base;
    sc.types[pos].vdd_cost = c * share;
    sc.types[pos].privacy_cost = c - c * share;
    const auto menus = scheme_menus(sc, price);
    for (std::size_t m = 0; m < menus.size(); ++m) {
      const auto& item = menus[m].items[pos];
      rows.push_back({c, scheme_labels()[m], item.size, item.reward,
                      uav_utility(sc.types[pos], item, menus[m].t_max, sc.deployment_cost)});
    }
  }
  return rows;
}

inline std::string sweep_cost_csv(const std::vector<CostSweepRow>& rows) {
  std::string out = "cost,scheme,size,reward,uav_utility\n";
  for (const auto& r : rows)
    out += format_number(r.cost) + "," + r.scheme + "," + format_number(r.size) + "," + format_number(r.reward) +
           "," + format_number(r.uav_utility) + "\n";
  return out;
}

// Type counts rescaled to `population` UAVs in proportion to the configured
// counts. Floors first, then the leftover UAVs go to the largest
// remainders, ties to the earlier listed type.
inline Scenario scale_population(const Scenario& sc, int population) {
  if (population < 1) throw ValidationError("population", "must be positive");
  Scenario out = sc;
  const double total = sc.total_uavs;
  std::vector<double> rem(sc.types.size());
  int assigned = 0;
  for (std::size_t j = 0; j < sc.types.size(); ++j) {
    const double quota = population * sc.types[j].count / total;
    out.types[j].count = static_cast<int>(std::floor(quota));
    rem[j] = quota - out.types[j].count;
    assigned += out.types[j].count;
  }
  std::vector<std::size_t> idx(sc.types.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned < population; ++k, ++assigned) ++out.types[idx[k % idx.size()]].count;
  out.total_uavs = population;
  return out;
}

struct PopulationSweepRow {
  int population = 0;
  std::string scheme;
  double zeta = 0.0;
  double gcs_utility = 0.0;
};

inline std::vector<PopulationSweepRow> run_sweep_population(const ExperimentConfig& cfg) {
  const double price = cfg.linear_price.value_or(highest_eligible_cost(cfg.scenario));
  std::vector<PopulationSweepRow> rows;
  for (int n : cfg.sweep_population.populations) {
    const auto sc = scale_population(cfg.scenario, n);
    const auto menus = scheme_menus(sc, price);
    for (std::size_t m = 0; m < menus.size(); ++m)
      rows.push_back({n, scheme_labels()[m], defensive_effectiveness(sc, menus[m]), gcs_utility(sc, menus[m])});
  }
  return rows;
}

inline std::string sweep_population_csv(const std::vector<PopulationSweepRow>& rows) {
  std::string out = "population,scheme,zeta,gcs_utility\n";
  for (const auto& r : rows)
    out += std::to_string(r.population) + "," + r.scheme + "," + format_number(r.zeta) + "," +
           format_number(r.gcs_utility) + "\n";
  return out;
}

struct PhcSeedResult {
  std::uint64_t seed = 0;
  EpisodeLog log;
  std::vector<TypeConvergence> convergence;
  std::optional<std::size_t> convergence_slot;
  double wall_seconds = 0.0;

  bool converged() const {
    return std::all_of(convergence.begin(), convergence.end(), [](const auto& c) { return c.converged; });
  }
};

struct PhcRun {
  std::vector<PhcSeedResult> seeds;
  ContractMenu reference;  // closed-form partial-information menu
};

// One seed: optional hotboot, then the live horizon. Its stream is derived
// from the seed alone, so runs do not depend on how seeds are scheduled.
inline PhcSeedResult run_phc_seed(const Scenario& sc, const PhcParams& params, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RngStream rng(mix_seed(seed, 0));
  auto init = hotboot(sc, params, rng);
  PhcSeedResult res;
  res.seed = seed;
  res.log = train(sc, params, static_cast<std::size_t>(params.slots), std::move(init), rng).log;
  const auto window = static_cast<std::size_t>(params.window);
  res.convergence = convergence_check(res.log, window, params.min_share);
  res.convergence_slot = convergence_slot(res.log, window, params.min_share);
  res.wall_seconds = detail::seconds_since(t0);
  return res;
}

inline PhcRun run_phc(const ExperimentConfig& cfg) {
  if (!cfg.phc) throw ValidationError("phc", "phc mode requires a phc block");
  if (cfg.seeds.empty()) throw ValidationError("seeds", "phc mode requires at least one seed");
  PhcRun run;
  run.reference = solve_partial_info(cfg.scenario).menu;
  std::vector<std::future<PhcSeedResult>> jobs;
  for (auto seed : cfg.seeds)
    jobs.push_back(std::async(std::launch::async, run_phc_seed, std::cref(cfg.scenario), std::cref(*cfg.phc), seed));
  for (auto& j : jobs) run.seeds.push_back(j.get());
  return run;
}

inline std::string phc_log_csv(const EpisodeLog& log) {
  std::string out = "slot,type,gcs_state,uav_state,offer_action,size_action,reward,size,uav_utility,gcs_term\n";
  for (const auto& r : log.records)
    out += std::to_string(r.slot) + "," + std::to_string(r.type_index) + "," + std::to_string(r.gcs_state) + "," +
           std::to_string(r.uav_state) + "," + std::to_string(r.reward_action) + "," +
           std::to_string(r.size_action) + "," + format_number(r.reward) + "," + format_number(r.size) + "," +
           format_number(r.uav_utility) + "," + format_number(r.gcs_term) + "\n";
  return out;
}

inline std::string phc_summary_csv(const Scenario& sc, const PhcRun& run) {
  std::string out =
      "seed,type,converged,convergence_slot,modal_size,modal_reward,reference_size,reference_reward\n";
  for (const auto& s : run.seeds) {
    for (const auto& c : s.convergence) {
      std::size_t pos = 0;
      while (sc.types[pos].index != c.type_index) ++pos;
      const auto& ref = run.reference.items[pos];
      out += std::to_string(s.seed) + "," + std::to_string(c.type_index) + "," + (c.converged ? "1" : "0") + "," +
             (s.convergence_slot ? std::to_string(*s.convergence_slot) : std::string()) + "," +
             format_number(c.modal_size) + "," + format_number(c.modal_reward) + "," + format_number(ref.size) +
             "," + format_number(ref.reward) + "\n";
    }
  }
  return out;
}

// Run description written next to the outputs. It holds nothing time
// dependent, so equal manifests mean equal inputs.
inline std::string manifest_json(const ExperimentConfig& cfg, const std::vector<std::string>& outputs) {
  nlohmann::ordered_json j;
  j["tool"] = "vddc";
  j["version"] = kVersion;
  j["mode"] = to_string(cfg.mode);
  j["config_hash"] = "fnv1a64:" + hex64(fnv1a64(cfg.canonical));
  j["seeds"] = cfg.seeds;
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

} // namespace vddc
