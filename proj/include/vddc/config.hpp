#pragma once

// Experiment configuration files. JSON (comments allowed); every key is
// documented in the README and unknown keys are rejected so typos surface.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "vddc/channel.hpp"
#include "vddc/errors.hpp"
#include "vddc/game.hpp"
#include "vddc/phc.hpp"

namespace vddc {

enum class Mode { solve, compare, sweep_cost, sweep_population, phc };

inline std::string to_string(Mode m) {
  switch (m) {
  case Mode::solve: return "solve";
  case Mode::compare: return "compare";
  case Mode::sweep_cost: return "sweep-cost";
  case Mode::sweep_population: return "sweep-population";
  case Mode::phc: return "phc";
  }
  return "?";
}

inline Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::solve, Mode::compare, Mode::sweep_cost, Mode::sweep_population, Mode::phc})
    if (to_string(m) == s) return m;
  throw ValidationError("mode", "unknown mode '" + s + "'");
}

struct CostSweep {
  int type_index = 0;  // 0: the first listed type
  double from = 0.01;
  double to = 1.0;
  int points = 100;
};

struct PopulationSweep {
  std::vector<int> populations{2, 4, 6, 8, 10};
};

struct ExperimentConfig {
  Scenario scenario;
  Mode mode = Mode::solve;
  std::vector<std::uint64_t> seeds;
  std::optional<PhcParams> phc;
  ChannelParams channel;
  std::string output_dir = "out";
  std::optional<double> grid_oracle;   // grid step of the brute-force cross-check
  std::optional<double> linear_price;  // unit price of the linear baseline
  CostSweep sweep_cost;
  PopulationSweep sweep_population;
  std::string canonical;  // normalized config text, hashed into manifests
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& where, std::set<std::string> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!known.count(it.key()))
      throw ValidationError(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

inline const json& object_at(const json& parent, const char* key, const std::string& where) {
  const auto& v = parent.at(key);
  if (!v.is_object()) throw ValidationError(where, "must be an object");
  return v;
}

template <class T>
T get_as(const json& obj, const char* key, const std::string& field, T fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) throw ValidationError(field, "must be a number");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ValidationError(field, "must be an integer");
    if constexpr (std::is_unsigned_v<T>)
      if (v.is_number_integer() && !v.is_number_unsigned()) throw ValidationError(field, "must be non-negative");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw ValidationError(field, "must be a string");
  } else if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) throw ValidationError(field, "must be true or false");
  }
  return v.get<T>();
}

inline Vec3 get_vec3(const json& obj, const char* key, const std::string& field, Vec3 fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 3) throw ValidationError(field, "must be an array of three numbers");
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) throw ValidationError(field, "must be an array of three numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

// 1-based line and column of a byte offset.
inline std::pair<std::size_t, std::size_t> locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline ChannelParams parse_channel(const json& c, Vec3& gcs_position, std::optional<double>& reference_bytes) {
  reject_unknown(c, "channel",
                 {"carrier_freq", "kappa_los", "kappa_nlos", "iota1", "iota2", "gcs_height", "bandwidth",
                  "tx_power", "noise_power", "slot_length", "gcs_position", "reference_bytes"});
  ChannelParams p;
  p.carrier_freq = get_as(c, "carrier_freq", "channel.carrier_freq", p.carrier_freq);
  p.kappa_los = get_as(c, "kappa_los", "channel.kappa_los", p.kappa_los);
  p.kappa_nlos = get_as(c, "kappa_nlos", "channel.kappa_nlos", p.kappa_nlos);
  p.iota1 = get_as(c, "iota1", "channel.iota1", p.iota1);
  p.iota2 = get_as(c, "iota2", "channel.iota2", p.iota2);
  p.gcs_height = get_as(c, "gcs_height", "channel.gcs_height", p.gcs_height);
  p.bandwidth = get_as(c, "bandwidth", "channel.bandwidth", p.bandwidth);
  p.tx_power = get_as(c, "tx_power", "channel.tx_power", p.tx_power);
  p.noise_power = get_as(c, "noise_power", "channel.noise_power", p.noise_power);
  p.slot_length = get_as(c, "slot_length", "channel.slot_length", p.slot_length);
  gcs_position = get_vec3(c, "gcs_position", "channel.gcs_position", gcs_position);
  if (c.contains("reference_bytes"))
    reference_bytes = get_as(c, "reference_bytes", "channel.reference_bytes", 0.0);
  p.validate();
  return p;
}

inline PhcParams parse_phc(const json& j) {
  reject_unknown(j, "phc",
                 {"learning_rate_gcs", "learning_rate_uav", "discount_gcs", "discount_uav", "step_gcs",
                  "step_uav", "reward_levels", "size_levels", "r_max", "margin_max", "slots",
                  "hotboot_episodes", "hotboot_slots", "hotboot_spread", "window", "min_share"});
  PhcParams p;
  p.learning_rate_gcs = get_as(j, "learning_rate_gcs", "phc.learning_rate_gcs", p.learning_rate_gcs);
  p.learning_rate_uav = get_as(j, "learning_rate_uav", "phc.learning_rate_uav", p.learning_rate_uav);
  p.discount_gcs = get_as(j, "discount_gcs", "phc.discount_gcs", p.discount_gcs);
  p.discount_uav = get_as(j, "discount_uav", "phc.discount_uav", p.discount_uav);
  p.step_gcs = get_as(j, "step_gcs", "phc.step_gcs", p.step_gcs);
  p.step_uav = get_as(j, "step_uav", "phc.step_uav", p.step_uav);
  p.reward_levels = get_as(j, "reward_levels", "phc.reward_levels", p.reward_levels);
  p.size_levels = get_as(j, "size_levels", "phc.size_levels", p.size_levels);
  p.r_max = get_as(j, "r_max", "phc.r_max", p.r_max);
  p.margin_max = get_as(j, "margin_max", "phc.margin_max", p.margin_max);
  p.slots = get_as(j, "slots", "phc.slots", p.slots);
  p.hotboot_episodes = get_as(j, "hotboot_episodes", "phc.hotboot_episodes", p.hotboot_episodes);
  p.hotboot_slots = get_as(j, "hotboot_slots", "phc.hotboot_slots", p.hotboot_slots);
  p.hotboot_spread = get_as(j, "hotboot_spread", "phc.hotboot_spread", p.hotboot_spread);
  p.window = get_as(j, "window", "phc.window", p.window);
  p.min_share = get_as(j, "min_share", "phc.min_share", p.min_share);
  p.validate();
  if (p.window > p.slots) throw ValidationError("phc.window", "longer than the horizon");
  return p;
}

} // namespace detail

// Parses and validates config text. Omitted channel and PHC blocks take the
// defaults of ChannelParams and PhcParams.
inline ExperimentConfig parse_config(const std::string& text) {
  using detail::get_as;
  using detail::json;
  json root;
  try {
    root = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    const auto [line, col] = detail::locate(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string msg = e.what();
    if (auto p = msg.find("parse error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(line, col, msg);
  }
  if (!root.is_object()) throw ParseError(1, 1, "top level must be an object");
  detail::reject_unknown(root, "",
                         {"mode", "scenario", "seeds", "phc", "channel", "output_dir", "grid_oracle",
                          "linear_price", "sweep_cost", "sweep_population"});

  ExperimentConfig cfg;
  cfg.canonical = root.dump();
  if (!root.contains("mode")) throw ValidationError("mode", "is required");
  cfg.mode = parse_mode(get_as<std::string>(root, "mode", "mode", ""));
  cfg.output_dir = get_as<std::string>(root, "output_dir", "output_dir", cfg.output_dir);

  Vec3 gcs_position{0.0, 0.0, 0.0};
  std::optional<double> reference_bytes;
  if (root.contains("channel"))
    cfg.channel = detail::parse_channel(detail::object_at(root, "channel", "channel"), gcs_position,
                                        reference_bytes);

  if (!root.contains("scenario")) throw ValidationError("scenario", "is required");
  const auto& s = detail::object_at(root, "scenario", "scenario");
  detail::reject_unknown(s, "scenario",
                         {"satisfaction_factor", "deployment_cost", "s_max", "t_max", "vdd_demand",
                          "total_uavs", "types"});
  Scenario& sc = cfg.scenario;
  sc.satisfaction_factor = get_as(s, "satisfaction_factor", "satisfaction_factor", sc.satisfaction_factor);
  sc.deployment_cost = get_as(s, "deployment_cost", "deployment_cost", sc.deployment_cost);
  sc.s_max = get_as(s, "s_max", "s_max", sc.s_max);
  sc.t_max = get_as(s, "t_max", "t_max", sc.t_max);
  sc.vdd_demand = get_as(s, "vdd_demand", "vdd_demand", sc.vdd_demand);
  if (!s.contains("total_uavs")) throw ValidationError("total_uavs", "is required");
  sc.total_uavs = get_as(s, "total_uavs", "total_uavs", 0);
  if (!s.contains("types") || !s.at("types").is_array() || s.at("types").empty())
    throw ValidationError("types", "must be a non-empty array");

  int next_index = 1;
  for (const auto& t : s.at("types")) {
    const std::string f = "types[" + std::to_string(next_index) + "]";
    if (!t.is_object()) throw ValidationError(f, "must be an object");
    detail::reject_unknown(t, f, {"index", "vdd_cost", "privacy_cost", "delay", "position", "count"});
    UavType u;
    u.index = get_as(t, "index", f + ".index", next_index);
    u.vdd_cost = get_as(t, "vdd_cost", f + ".vdd_cost", 0.0);
    u.privacy_cost = get_as(t, "privacy_cost", f + ".privacy_cost", 0.0);
    if (!t.contains("count")) throw ValidationError(f + ".count", "is required");
    u.count = get_as(t, "count", f + ".count", 0);
    const bool has_delay = t.contains("delay"), has_pos = t.contains("position");
    if (has_delay == has_pos) throw ValidationError(f + ".delay", "give exactly one of delay or position");
    if (has_delay) {
      u.delay = get_as(t, "delay", f + ".delay", 0.0);
    } else {
      const Vec3 at = detail::get_vec3(t, "position", f + ".position", {});
      try {
        u.delay = derive_delay(at, gcs_position, reference_bytes.value_or(sc.s_max), cfg.channel);
      } catch (const ZeroCapacity& e) {
        throw ValidationError(f + ".position", e.what());
      }
    }
    sc.types.push_back(u);
    next_index = u.index + 1;
  }
  sc.validate();

  if (root.contains("seeds")) {
    const auto& arr = root.at("seeds");
    if (!arr.is_array()) throw ValidationError("seeds", "must be an array");
    for (const auto& v : arr) {
      if (!v.is_number_unsigned()) throw ValidationError("seeds", "entries must be non-negative integers");
      cfg.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (root.contains("phc")) cfg.phc = detail::parse_phc(detail::object_at(root, "phc", "phc"));
  if (root.contains("grid_oracle")) {
    cfg.grid_oracle = get_as(root, "grid_oracle", "grid_oracle", 0.0);
    if (!(*cfg.grid_oracle > 0.0)) throw ValidationError("grid_oracle", "must be positive");
  }
  if (root.contains("linear_price")) {
    cfg.linear_price = get_as(root, "linear_price", "linear_price", 0.0);
    if (!(*cfg.linear_price > 0.0)) throw ValidationError("linear_price", "must be positive");
  }
  if (root.contains("sweep_cost")) {
    const auto& c = detail::object_at(root, "sweep_cost", "sweep_cost");
    detail::reject_unknown(c, "sweep_cost", {"type", "from", "to", "points"});
    auto& sw = cfg.sweep_cost;
    sw.type_index = get_as(c, "type", "sweep_cost.type", sw.type_index);
    sw.from = get_as(c, "from", "sweep_cost.from", sw.from);
    sw.to = get_as(c, "to", "sweep_cost.to", sw.to);
    sw.points = get_as(c, "points", "sweep_cost.points", sw.points);
  }
  {
    const auto& sw = cfg.sweep_cost;
    if (!(sw.from > 0.0 && sw.to >= sw.from)) throw ValidationError("sweep_cost.from", "need 0 < from <= to");
    if (sw.points < 1) throw ValidationError("sweep_cost.points", "must be at least 1");
    if (sw.type_index != 0 &&
        std::none_of(sc.types.begin(), sc.types.end(), [&](const UavType& t) { return t.index == sw.type_index; }))
      throw ValidationError("sweep_cost.type", "no such type index");
  }
  if (root.contains("sweep_population")) {
    const auto& c = detail::object_at(root, "sweep_population", "sweep_population");
    detail::reject_unknown(c, "sweep_population", {"populations"});
    if (c.contains("populations")) {
      const auto& arr = c.at("populations");
      if (!arr.is_array() || arr.empty())
        throw ValidationError("sweep_population.populations", "must be a non-empty array");
      cfg.sweep_population.populations.clear();
      for (const auto& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() < 1)
          throw ValidationError("sweep_population.populations", "entries must be positive integers");
        cfg.sweep_population.populations.push_back(v.get<int>());
      }
    }
  }

  if (cfg.mode == Mode::phc) {
    if (!cfg.phc) throw ValidationError("phc", "phc mode requires a phc block");
    if (cfg.seeds.empty()) throw ValidationError("seeds", "phc mode requires at least one seed");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

} // namespace vddc
