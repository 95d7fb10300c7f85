#pragma once

#include <cmath>

// Data sizes are carried in bits throughout. Mb and Gb are decimal.
namespace rbresale::units {

inline constexpr double kMegabit = 1e6;
inline constexpr double kGigabit = 1e9;

constexpr double megabits(double v) { return v * kMegabit; }
constexpr double gigabits(double v) { return v * kGigabit; }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }
inline double watts_to_dbm(double w) { return 10.0 * std::log10(w * 1000.0); }

}  // namespace rbresale::units
