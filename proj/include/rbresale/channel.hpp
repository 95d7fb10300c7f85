#pragma once

// Single-station uplink channel: geometry, free-space received power and the
// per-RB transmission efficiency, plus random-waypoint mobility.

#include "rbresale/rng.hpp"

namespace rbresale {

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct Arena {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 100.0;
  double y_max = 100.0;
  bool contains(Point p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
  bool operator==(const Arena&) const = default;
};

/// How the efficiency integral treats motion inside one slot.
enum class IntraSlotPolicy { SlotStart, Midpoint };

struct EnvironmentParams {
  Point station{50.0, 50.0};
  double station_height = 10.0;   // m
  double tx_power = 0.1;          // W
  double noise = 2.5118864315095823e-13;  // W (-96 dBm)
  double carrier = 2.4e9;         // Hz
  double rb_bandwidth = 360e3;    // Hz
  double slot_length = 10.0;      // s
  /// Airtime of one tradable RB inside the slot. Defaults to the whole slot.
  double rb_airtime = 10.0;       // s
  double light_speed = 3.0e8;     // m/s
  Arena arena{};
  IntraSlotPolicy intra_slot = IntraSlotPolicy::SlotStart;

  double wavelength() const { return light_speed / carrier; }
  void validate() const;
  bool operator==(const EnvironmentParams&) const = default;
};

double distance(Point pos, const EnvironmentParams& env);

/// Friis free-space received power with unit antenna gains.
double received_power(double dist, const EnvironmentParams& env);

/// Bits one RB carries in the slot: W * log2(1 + P_rx / N) integrated over
/// the RB airtime, with the position chosen by env.intra_slot.
double efficiency_factor(Point slot_start, Point slot_end, const EnvironmentParams& env);

struct MobilityState {
  Point position{};
  Point waypoint{};
  double speed = 10.0;  // m per slot
};

Point sample_point(Rng& rng, const Arena& arena);
MobilityState initial_mobility(Rng& rng, const Arena& arena, double speed);

/// Advances one slot toward the waypoint; arriving (or reaching it with
/// distance to spare) stops on the waypoint and draws a fresh one.
MobilityState step_mobility(const MobilityState& state, Rng& rng, const Arena& arena);

}  // namespace rbresale
