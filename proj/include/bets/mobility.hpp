#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "bets/error.hpp"
#include "bets/scenario.hpp"
#include "bets/units.hpp"

namespace bets {

// ---------------------------------------------------------------------------
// Geometry

struct Vec2 {
  double x = 0;
  double y = 0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

enum class DriveMode : uint8_t { Free = 0, SpeedCapped = 1 };

struct VehicleState {
  uint32_t id = 0;
  Vec2 pos_m;
  Vec2 vel_mps;
  DriveMode mode = DriveMode::Free;
  double cap_kmh = 0; // meaningful when mode == SpeedCapped
  double cumulative_grams = 0;
  double odometer_km = 0;

  double speed_kmh() const { return kmh_from_mps(vel_mps.norm()); }
};

inline double distance(const VehicleState& i, const VehicleState& j) {
  return (i.pos_m - j.pos_m).norm();
}

// ---------------------------------------------------------------------------
// Contact windows

struct ContactWindow {
  uint32_t vehicle_i = 0;
  uint32_t vehicle_j = 0;
  double start_t_s = 0;
  double l_total_s = 0;       // last in-range instant minus start_t
  bool open_ended = false;    // still within range at the horizon
  double bound_lprime_s = 0;  // reporting bound from window_upper_bound
};

/// Reporting bound L' = r / (1.8 * rel_speed), with r in meters and the
/// relative speed in km/h. Zero relative speed means the pair never
/// separates, so the bound is unbounded.
inline double window_upper_bound(double range_m, double rel_speed_kmh) {
  if (rel_speed_kmh < 0) throw Error("window_upper_bound: rel_speed must be >= 0");
  if (rel_speed_kmh == 0) return std::numeric_limits<double>::infinity();
  return range_m / (1.8 * rel_speed_kmh);
}

/// Time to push one block through the link at the effective rate.
inline double trans_latency(double block_size_bits, double data_rate_bps) {
  if (!(block_size_bits > 0)) throw Error("trans_latency: block size must be > 0");
  if (!(data_rate_bps > 0)) throw Error("trans_latency: data rate must be > 0");
  return block_size_bits / data_rate_bps;
}

/// One constant-velocity piece of a trajectory.
struct TrajectorySegment {
  double t_start_s = 0;
  double duration_s = 0;
  Vec2 pos_m;   // position at t_start_s
  Vec2 vel_mps; // constant over the segment
};

namespace detail {

inline Vec2 position_at(std::span<const TrajectorySegment> traj, double t) {
  for (const auto& seg : traj) {
    const double end = seg.t_start_s + seg.duration_s;
    if (t >= seg.t_start_s - 1e-9 && t <= end + 1e-9) {
      return seg.pos_m + seg.vel_mps * (t - seg.t_start_s);
    }
  }
  throw Error("contact_window: trajectory undefined at requested time");
}

inline Vec2 velocity_at(std::span<const TrajectorySegment> traj, double t) {
  for (const auto& seg : traj) {
    const double end = seg.t_start_s + seg.duration_s;
    if (t >= seg.t_start_s - 1e-9 && t < end - 1e-12) return seg.vel_mps;
  }
  return traj.empty() ? Vec2{} : traj.back().vel_mps;
}

inline void require_coverage(std::span<const TrajectorySegment> traj, double t0, double t1) {
  if (traj.empty()) throw Error("contact_window: trajectory undefined (empty)");
  double covered = traj.front().t_start_s;
  if (covered > t0 + 1e-9) throw Error("contact_window: trajectory starts after query interval");
  for (const auto& seg : traj) {
    if (seg.duration_s < 0) throw Error("contact_window: negative segment duration");
    if (seg.t_start_s > covered + 1e-9) {
      throw Error("contact_window: trajectory has a gap");
    }
    covered = std::max(covered, seg.t_start_s + seg.duration_s);
  }
  if (covered < t1 - 1e-9) throw Error("contact_window: trajectory ends before horizon");
}

} // namespace detail

/// Last instant within [t, t+horizon] at which the pair is within range r,
/// given piecewise constant-velocity trajectories for both vehicles. The
/// relative motion on each merged piece is linear, so |d|^2 <= r^2 reduces to
/// a quadratic inequality whose root interval is intersected with the piece.
/// Returns nothing when the pair is out of range at t. Windows that are
/// still in range at the horizon are flagged open_ended.
inline std::optional<ContactWindow> contact_window(uint32_t id_i,
                                                   std::span<const TrajectorySegment> traj_i,
                                                   uint32_t id_j,
                                                   std::span<const TrajectorySegment> traj_j,
                                                   double range_m, double t_s,
                                                   double horizon_s) {
  if (horizon_s < 0) throw Error("contact_window: horizon must be >= 0");
  const double t_end = t_s + horizon_s;
  detail::require_coverage(traj_i, t_s, t_end);
  detail::require_coverage(traj_j, t_s, t_end);

  const Vec2 p0 = detail::position_at(traj_i, t_s) - detail::position_at(traj_j, t_s);
  if (p0.norm() > range_m) return std::nullopt;

  // Merge the two segment breakpoint sets inside [t, t+horizon].
  std::vector<double> cuts{t_s, t_end};
  for (const auto& seg : traj_i) {
    if (seg.t_start_s > t_s && seg.t_start_s < t_end) cuts.push_back(seg.t_start_s);
  }
  for (const auto& seg : traj_j) {
    if (seg.t_start_s > t_s && seg.t_start_s < t_end) cuts.push_back(seg.t_start_s);
  }
  std::sort(cuts.begin(), cuts.end());

  double last_in_range = t_s;
  for (size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double u0 = cuts[k];
    const double u1 = cuts[k + 1];
    if (u1 - u0 <= 0) continue;
    const Vec2 p = detail::position_at(traj_i, u0) - detail::position_at(traj_j, u0);
    const Vec2 v = detail::velocity_at(traj_i, (u0 + u1) / 2) -
                   detail::velocity_at(traj_j, (u0 + u1) / 2);
    const double a = v.dot(v);
    const double b = 2 * p.dot(v);
    const double c = p.dot(p) - range_m * range_m;
    const double len = u1 - u0;
    if (a == 0) {
      if (c <= 0) last_in_range = std::max(last_in_range, u1);
      continue;
    }
    const double disc = b * b - 4 * a * c;
    if (disc < 0) continue;
    const double sq = std::sqrt(disc);
    const double tau_lo = (-b - sq) / (2 * a);
    const double tau_hi = (-b + sq) / (2 * a);
    const double in_lo = std::max(0.0, tau_lo);
    const double in_hi = std::min(len, tau_hi);
    if (in_hi >= in_lo) last_in_range = std::max(last_in_range, u0 + in_hi);
  }

  ContactWindow w;
  w.vehicle_i = id_i;
  w.vehicle_j = id_j;
  w.start_t_s = t_s;
  w.l_total_s = last_in_range - t_s;
  const Vec2 p_end = detail::position_at(traj_i, t_end) - detail::position_at(traj_j, t_end);
  w.open_ended = p_end.norm() <= range_m;
  if (w.open_ended) w.l_total_s = horizon_s;
  const Vec2 v0 = detail::velocity_at(traj_i, t_s) - detail::velocity_at(traj_j, t_s);
  w.bound_lprime_s = window_upper_bound(range_m, kmh_from_mps(v0.norm()));
  return w;
}

/// Constant-velocity projection of the current states over the horizon.
inline std::optional<ContactWindow> contact_window(const VehicleState& i, const VehicleState& j,
                                                   double range_m, double t_s,
                                                   double horizon_s) {
  const TrajectorySegment si{t_s, horizon_s, i.pos_m, i.vel_mps};
  const TrajectorySegment sj{t_s, horizon_s, j.pos_m, j.vel_mps};
  return contact_window(i.id, std::span<const TrajectorySegment>(&si, 1), j.id,
                        std::span<const TrajectorySegment>(&sj, 1), range_m, t_s, horizon_s);
}

// ---------------------------------------------------------------------------
// Behavior policy

/// Under DLT control an alert drops the vehicle into SpeedCapped mode at the
/// configured moderate-band target and clamps the current speed; vehicles
/// already at or below the target keep their mode. The baseline policy
/// ignores alerts entirely.
inline VehicleState apply_behavior_policy(VehicleState v, bool alerted,
                                          BehaviorPolicy policy, double cap_kmh) {
  if (policy == BehaviorPolicy::Baseline || !alerted) return v;
  if (v.speed_kmh() <= cap_kmh) return v;
  v.mode = DriveMode::SpeedCapped;
  v.cap_kmh = cap_kmh;
  const double speed = v.vel_mps.norm();
  const double cap_mps = mps_from_kmh(cap_kmh);
  if (speed > cap_mps && speed > 0) {
    const double scale = cap_mps / speed;
    v.vel_mps = v.vel_mps * scale;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Road models

/// Arc-coordinate state for the ring; embedded into the plane on demand.
struct RingKinematics {
  double arc_m = 0;       // position along the ring, in [0, circumference)
  int direction = 1;      // +1 counterclockwise, -1 clockwise
  double speed_mps = 0;   // applied speed (after any cap)
};

inline void advance_ring(RingKinematics& k, double dt_s, double circumference_m) {
  k.arc_m += k.direction * k.speed_mps * dt_s;
  while (k.arc_m >= circumference_m) k.arc_m -= circumference_m;
  while (k.arc_m < 0) k.arc_m += circumference_m;
}

/// Maps the arc coordinate onto a circle of matching circumference. Velocity
/// is tangent to the ring, so embedded speeds equal arc speeds.
inline void embed_on_ring(VehicleState& v, const RingKinematics& k, double circumference_m) {
  const double radius = circumference_m / (2 * std::numbers::pi);
  const double theta = k.arc_m / radius;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  v.pos_m = Vec2{radius * c, radius * s};
  const double vmag = k.direction * k.speed_mps;
  v.vel_mps = Vec2{-s * vmag, c * vmag};
}

struct PlaneKinematics {
  Vec2 pos_m;
  double heading_rad = 0;
  double speed_mps = 0;
};

inline void advance_plane(PlaneKinematics& k, double dt_s) {
  k.pos_m = k.pos_m + Vec2{std::cos(k.heading_rad), std::sin(k.heading_rad)} * (k.speed_mps * dt_s);
}

inline void embed_on_plane(VehicleState& v, const PlaneKinematics& k) {
  v.pos_m = k.pos_m;
  v.vel_mps = Vec2{std::cos(k.heading_rad), std::sin(k.heading_rad)} * k.speed_mps;
}

} // namespace bets
