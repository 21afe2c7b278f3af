#pragma once

namespace bets {

// All internal state is SI (seconds, meters, m/s). Emission rates use the
// domain unit grams/km and speed-facing emission APIs take km/h; these two
// helpers are the only conversion points.

inline constexpr double kSecondsPerHour = 3600.0;
inline constexpr double kMetersPerKm = 1000.0;

constexpr double mps_from_kmh(double kmh) { return kmh / 3.6; }
constexpr double kmh_from_mps(double mps) { return mps * 3.6; }

constexpr double seconds_from_hours(double h) { return h * kSecondsPerHour; }
constexpr double hours_from_seconds(double s) { return s / kSecondsPerHour; }

} // namespace bets
