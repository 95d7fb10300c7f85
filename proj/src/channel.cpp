#include "rbresale/channel.hpp"

#include <cmath>
#include <numbers>

#include "rbresale/error.hpp"

namespace rbresale {

void EnvironmentParams::validate() const {
  if (!(station_height > 0.0)) throw ConfigError("station height must be > 0");
  if (!(tx_power > 0.0)) throw ConfigError("tx power must be > 0");
  if (!(noise > 0.0)) throw ConfigError("noise power must be > 0");
  if (!(carrier > 0.0)) throw ConfigError("carrier frequency must be > 0");
  if (!(rb_bandwidth > 0.0)) throw ConfigError("RB bandwidth must be > 0");
  if (!(slot_length > 0.0)) throw ConfigError("slot length must be > 0");
  if (!(rb_airtime > 0.0 && rb_airtime <= slot_length)) throw ConfigError("RB airtime must lie in (0, slot length]");
  if (!(light_speed > 0.0)) throw ConfigError("light speed must be > 0");
  if (!(arena.x_max > arena.x_min && arena.y_max > arena.y_min)) throw ConfigError("arena must have positive area");
  if (!arena.contains(station)) throw ConfigError("arena must contain the station");
}

double distance(Point pos, const EnvironmentParams& env) {
  const double dx = pos.x - env.station.x;
  const double dy = pos.y - env.station.y;
  return std::sqrt(dx * dx + dy * dy + env.station_height * env.station_height);
}

double received_power(double dist, const EnvironmentParams& env) {
  const double g = env.wavelength() / (4.0 * std::numbers::pi * dist);
  return env.tx_power * g * g;
}

double efficiency_factor(Point slot_start, Point slot_end, const EnvironmentParams& env) {
  Point at = slot_start;
  if (env.intra_slot == IntraSlotPolicy::Midpoint) {
    at = {0.5 * (slot_start.x + slot_end.x), 0.5 * (slot_start.y + slot_end.y)};
  }
  const double snr = received_power(distance(at, env), env) / env.noise;
  return env.rb_airtime * env.rb_bandwidth * std::log2(1.0 + snr);
}

Point sample_point(Rng& rng, const Arena& arena) {
  const double x = uniform(rng, arena.x_min, arena.x_max);
  const double y = uniform(rng, arena.y_min, arena.y_max);
  return {x, y};
}

MobilityState initial_mobility(Rng& rng, const Arena& arena, double speed) {
  MobilityState s;
  s.position = sample_point(rng, arena);
  s.waypoint = sample_point(rng, arena);
  s.speed = speed;
  return s;
}

MobilityState step_mobility(const MobilityState& state, Rng& rng, const Arena& arena) {
  MobilityState next = state;
  const double dx = state.waypoint.x - state.position.x;
  const double dy = state.waypoint.y - state.position.y;
  const double gap = std::hypot(dx, dy);
  if (gap <= state.speed) {
    next.position = state.waypoint;
    next.waypoint = sample_point(rng, arena);
    return next;
  }
  const double k = state.speed / gap;
  next.position = {state.position.x + k * dx, state.position.y + k * dy};
  return next;
}

}  // namespace rbresale
