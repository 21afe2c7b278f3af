#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "bets/error.hpp"
#include "bets/units.hpp"

namespace bets {

/// Convex speed-to-emission surrogate
///
///   eps(v) = a/v + b + c*v^2   [grams CO2 per km, v in km/h]
///
/// High in the stop-and-go regime, minimal in the moderate band, rising again
/// at high speed. The interior minimum sits at v* = (a/(2c))^(1/3).
struct EmissionCurve {
  double coeff_a = 3000.0; // gram*(km/h)/km, low-speed term
  double coeff_b = 80.0;   // gram/km, rolling term
  double coeff_c = 0.005;  // gram/(km*(km/h)^2), aerodynamic term

  // Idle flow anchor: 10 minutes of idling emits as much as driving 1 km at
  // this speed. idle_g_per_h = 0 means "derive from the anchor".
  double idle_anchor_kmh = 8.0;
  double idle_g_per_h = 0.0;

  double nox_scale = 0.004; // NOx proxy = nox_scale * CO2

  bool operator==(const EmissionCurve&) const = default;
};

inline double emission_rate(const EmissionCurve& c, double speed_kmh) {
  if (!(speed_kmh > 0.0)) {
    throw Error("emission_rate: speed must be > 0 (idling is handled by idle_rate)");
  }
  return c.coeff_a / speed_kmh + c.coeff_b + c.coeff_c * speed_kmh * speed_kmh;
}

/// Speed of the curve's interior minimum, km/h.
inline double min_emission_speed_kmh(const EmissionCurve& c) {
  return std::cbrt(c.coeff_a / (2.0 * c.coeff_c));
}

/// Positive idling emission flow in grams/hour, used when speed = 0.
inline double idle_rate(const EmissionCurve& c) {
  if (c.idle_g_per_h > 0.0) return c.idle_g_per_h;
  // 1 km at the anchor speed spread over 10 minutes.
  return emission_rate(c, c.idle_anchor_kmh) * 6.0;
}

/// Per-km value reported for intervals with zero distance.
inline double idle_equivalent_epsilon(const EmissionCurve& c) {
  return emission_rate(c, c.idle_anchor_kmh);
}

/// One piece of a piecewise-constant speed trace. speed_kmh == 0 is idling.
struct SpeedSegment {
  double speed_kmh = 0.0;
  double duration_s = 0.0;
};

struct GramsDistance {
  double grams = 0.0;
  double km = 0.0;
};

/// Integrates CO2 grams and distance over a speed trace.
inline GramsDistance integrate_trace(const EmissionCurve& curve,
                                     std::span<const SpeedSegment> trace) {
  GramsDistance acc;
  const double idle_flow = idle_rate(curve);
  for (const auto& seg : trace) {
    if (seg.duration_s < 0) throw Error("integrate_trace: negative segment duration");
    if (seg.duration_s == 0) continue;
    const double hours = hours_from_seconds(seg.duration_s);
    if (seg.speed_kmh > 0.0) {
      const double km = seg.speed_kmh * hours;
      acc.grams += emission_rate(curve, seg.speed_kmh) * km;
      acc.km += km;
    } else if (seg.speed_kmh == 0.0) {
      acc.grams += idle_flow * hours;
    } else {
      throw Error("integrate_trace: negative speed");
    }
  }
  return acc;
}

/// One published measurement: average grams/km over the elapsed sampling
/// interval plus the distance driven in it.
struct EmissionSample {
  uint32_t vehicle_id = 0;
  double timestamp_s = 0.0;     // seconds since period start, multiple of T_s
  double epsilon_g_per_km = 0.0;
  double distance_km = 0.0;
  bool all_idle = false;
  bool period_start = false;
};

/// The period-start sample: cumulative emissions reset to zero at each
/// period boundary.
inline EmissionSample period_start_sample(uint32_t vehicle_id, double timestamp_s = 0.0) {
  EmissionSample s;
  s.vehicle_id = vehicle_id;
  s.timestamp_s = timestamp_s;
  s.period_start = true;
  return s;
}

/// Integrates one sampling interval's trace into a sample. The trace must
/// cover the interval exactly; zero-distance intervals report the
/// idle-equivalent per-km value and are flagged instead of dividing by zero.
inline EmissionSample sample_emissions(uint32_t vehicle_id, double timestamp_s,
                                       std::span<const SpeedSegment> trace,
                                       const EmissionCurve& curve,
                                       double interval_s) {
  double covered = 0.0;
  for (const auto& seg : trace) covered += seg.duration_s;
  if (trace.empty() || std::abs(covered - interval_s) > 1e-6 * std::max(1.0, interval_s)) {
    throw Error("sample_emissions: speed trace does not cover the sampling interval");
  }
  const GramsDistance gd = integrate_trace(curve, trace);
  EmissionSample s;
  s.vehicle_id = vehicle_id;
  s.timestamp_s = timestamp_s;
  s.distance_km = gd.km;
  if (gd.km > 0.0) {
    s.epsilon_g_per_km = gd.grams / gd.km;
  } else {
    s.epsilon_g_per_km = idle_equivalent_epsilon(curve);
    s.all_idle = true;
  }
  return s;
}

} // namespace bets
