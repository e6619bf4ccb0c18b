#pragma once

#include <cmath>

namespace iab {

constexpr double kSpeedOfLight = 299792458.0;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// thermal noise power over bandwidth_hz, given density in dBm/Hz
inline double noise_power_watt(double noise_dbm_per_hz, double bandwidth_hz) {
  return dbm_to_watt(noise_dbm_per_hz) * bandwidth_hz;
}

}  // namespace iab
