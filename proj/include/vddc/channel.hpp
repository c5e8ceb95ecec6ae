#pragma once

// Air-to-ground channel and UAV mobility. Used to derive a type's delivery
// delay from geometry instead of taking it as a given.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "vddc/errors.hpp"

namespace vddc {

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& v) noexcept { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

struct UavKinematics {
  Vec3 position{};  // meters
  double v_max = 1.0;  // meters / second
};

struct ChannelParams {
  double carrier_freq = 2.4e9;       // Hz
  double light_speed = 2.99792458e8; // m/s
  double kappa_los = 1.0;            // dB
  double kappa_nlos = 20.0;          // dB
  double iota1 = 9.61;
  double iota2 = 0.16;               // per degree
  double gcs_height = 2.0;           // m
  double bandwidth = 1e6;            // Hz
  double tx_power = 0.1;             // W
  double noise_power = 1e-13;        // W
  double slot_length = 1.0;          // s

  void validate() const {
    auto pos = [](double v, const char* f) {
      if (!(v > 0.0)) throw ValidationError(std::string("channel.") + f, "must be positive");
    };
    pos(carrier_freq, "carrier_freq");
    pos(light_speed, "light_speed");
    pos(iota1, "iota1");
    pos(iota2, "iota2");
    pos(gcs_height, "gcs_height");
    pos(bandwidth, "bandwidth");
    pos(tx_power, "tx_power");
    pos(noise_power, "noise_power");
    pos(slot_length, "slot_length");
    if (!(kappa_los >= 0.0)) throw ValidationError("channel.kappa_los", "must be non-negative");
    if (!(kappa_nlos >= kappa_los))
      throw ValidationError("channel.kappa_nlos", "must be at least kappa_los");
  }
};

// Horizontal distances below this are treated as an overhead pass.
inline constexpr double kMinHorizontalDistance = 0.1;

// Moves the UAV one slot along `direction` (unit vector) at `speed`.
inline UavKinematics step_mobility(const UavKinematics& k, const Vec3& direction, double speed,
                                   double dt) {
  if (std::abs(norm(direction) - 1.0) > 1e-9)
    throw ValidationError("direction", "must be a unit vector");
  if (speed < 0.0 || dt < 0.0) throw ValidationError("speed", "speed and dt must be non-negative");
  const double step = speed * dt;
  if (step > dt * k.v_max)
    throw SpeedViolation("displacement " + std::to_string(step) + " m exceeds " +
                         std::to_string(dt * k.v_max) + " m allowed in one slot");
  UavKinematics out = k;
  for (int i = 0; i < 3; ++i) out.position[i] += step * direction[i];
  return out;
}

// Logistic LoS probability of an elevation angle given in degrees.
inline double los_probability(double elevation_deg, const ChannelParams& p) noexcept {
  return 1.0 / (1.0 + p.iota1 * std::exp(-p.iota2 * (elevation_deg - p.iota1)));
}

// Expected A2G pathloss in dB: free-space term over the horizontal
// distance plus the LoS/NLoS mixture of excess attenuations.
inline double a2g_pathloss(const Vec3& uav_pos, const Vec3& gcs_pos, const ChannelParams& p) noexcept {
  double d = std::hypot(uav_pos[0] - gcs_pos[0], uav_pos[1] - gcs_pos[1]);
  double elevation = 0.0;
  if (d < kMinHorizontalDistance) {
    d = kMinHorizontalDistance;
    elevation = 90.0;
  } else {
    const double rise = uav_pos[2] - p.gcs_height;
    elevation = std::max(0.0, std::atan(rise / d) * 180.0 / std::numbers::pi);
  }
  const double p_los = los_probability(elevation, p);
  const double fspl = 20.0 * std::log10(4.0 * std::numbers::pi * d * p.carrier_freq / p.light_speed);
  return fspl + p_los * p.kappa_los + (1.0 - p_los) * p.kappa_nlos;
}

// Seconds needed to push `vdd_bytes` through the link at Shannon capacity.
inline double transmission_delay(double vdd_bytes, double pathloss_db, const ChannelParams& p) {
  if (vdd_bytes < 0.0) throw ValidationError("vdd_bytes", "must be non-negative");
  const double snr = p.tx_power * std::pow(10.0, -pathloss_db / 10.0) / p.noise_power;
  const double capacity = p.bandwidth * std::log2(1.0 + snr);
  if (!(capacity > 0.0) || !std::isfinite(capacity))
    throw ZeroCapacity("link capacity is zero at " + std::to_string(pathloss_db) + " dB");
  return 8.0 * vdd_bytes / capacity;
}

// Delay of a UAV hovering at `uav_pos` that must upload `vdd_bytes`.
inline double derive_delay(const Vec3& uav_pos, const Vec3& gcs_pos, double vdd_bytes,
                           const ChannelParams& p) {
  return transmission_delay(vdd_bytes, a2g_pathloss(uav_pos, gcs_pos, p), p);
}

} // namespace vddc
