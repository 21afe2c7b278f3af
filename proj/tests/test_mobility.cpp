#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bets/mobility.hpp"
#include "bets/rng.hpp"

using namespace bets;

namespace {

VehicleState make_vehicle(uint32_t id, double x, double y, double vx_kmh, double vy_kmh) {
  VehicleState v;
  v.id = id;
  v.pos_m = {x, y};
  v.vel_mps = {mps_from_kmh(vx_kmh), mps_from_kmh(vy_kmh)};
  return v;
}

// Brute-force oracle: scan the horizon on a fine grid and report the last
// in-range instant, interpolating positions directly from the segments.
double scan_last_in_range(std::span<const TrajectorySegment> ti,
                          std::span<const TrajectorySegment> tj, double r, double t0,
                          double horizon, double step) {
  auto pos = [](std::span<const TrajectorySegment> traj, double t) {
    for (const auto& seg : traj) {
      if (t >= seg.t_start_s - 1e-9 && t <= seg.t_start_s + seg.duration_s + 1e-9) {
        return seg.pos_m + seg.vel_mps * (t - seg.t_start_s);
      }
    }
    throw Error("scan oracle: time outside trajectory");
  };
  double last = t0;
  for (double t = t0; t <= t0 + horizon + step / 2; t += step) {
    const double tt = std::min(t, t0 + horizon);
    if ((pos(ti, tt) - pos(tj, tt)).norm() <= r) last = tt;
  }
  return last - t0;
}

} // namespace

TEST_CASE("planar distance") {
  const VehicleState a = make_vehicle(0, 0, 0, 0, 0);
  const VehicleState b = make_vehicle(1, 3, 4, 0, 0);
  REQUIRE(distance(a, a) == 0.0);
  REQUIRE(distance(a, b) == 5.0);
  RngStream rng(2);
  for (int k = 0; k < 100; ++k) {
    const VehicleState p = make_vehicle(0, rng.uniform(-500, 500), rng.uniform(-500, 500), 0, 0);
    const VehicleState q = make_vehicle(1, rng.uniform(-500, 500), rng.uniform(-500, 500), 0, 0);
    REQUIRE(distance(p, q) == distance(q, p));
    REQUIRE(distance(p, q) >= 0.0);
  }
}

TEST_CASE("reporting bound shrinks with relative speed") {
  REQUIRE(window_upper_bound(300.0, 50.0) == Catch::Approx(300.0 / 90.0).epsilon(1e-15));
  REQUIRE(window_upper_bound(300.0, 100.0) == Catch::Approx(300.0 / 180.0).epsilon(1e-15));
  // Halving the speed doubles the bound.
  REQUIRE(window_upper_bound(300.0, 25.0) == Catch::Approx(2 * window_upper_bound(300.0, 50.0)));
  REQUIRE(std::isinf(window_upper_bound(300.0, 0.0)));
  REQUIRE_THROWS_AS(window_upper_bound(300.0, -1.0), Error);

  // Strictly decreasing and convex over an even grid.
  std::vector<double> values;
  for (double v = 10.0; v <= 130.0; v += 10.0) values.push_back(window_upper_bound(300.0, v));
  for (size_t i = 1; i < values.size(); ++i) REQUIRE(values[i] < values[i - 1]);
  for (size_t i = 2; i < values.size(); ++i) {
    REQUIRE(values[i] - values[i - 1] > values[i - 1] - values[i - 2]);
  }
}

TEST_CASE("transmission latency is block size over rate") {
  REQUIRE(trans_latency(1e6, 1e6) == 1.0);
  REQUIRE(trans_latency(1e6, 6e6) == Catch::Approx(1.0 / 6.0).epsilon(1e-15));
  REQUIRE(trans_latency(8e6, 6e6) == Catch::Approx(4.0 / 3.0).epsilon(1e-15));
  REQUIRE(trans_latency(2e6, 1e6) == 2 * trans_latency(1e6, 1e6));
  REQUIRE_THROWS_AS(trans_latency(0.0, 1e6), Error);
  REQUIRE_THROWS_AS(trans_latency(1e6, 0.0), Error);
}

TEST_CASE("head-on encounter produces the full chord window") {
  // i starts at the ring of the range circle and the pair closes at 100 km/h,
  // so the in-range episode spans 2r divided by the closing speed.
  const VehicleState i = make_vehicle(0, 0, 0, 50.0, 0);
  const VehicleState j = make_vehicle(1, 300.0, 0, -50.0, 0);
  const auto w = contact_window(i, j, 300.0, 0.0, 60.0);
  REQUIRE(w.has_value());
  const double closing_mps = mps_from_kmh(100.0);
  const double expect = 600.0 / closing_mps; // 21.6 s
  REQUIRE(w->l_total_s == Catch::Approx(expect).epsilon(1e-9));
  REQUIRE(w->l_total_s == Catch::Approx(21.6).epsilon(1e-9));
  REQUIRE_FALSE(w->open_ended);
  REQUIRE(w->vehicle_i == 0);
  REQUIRE(w->vehicle_j == 1);
  REQUIRE(w->bound_lprime_s == Catch::Approx(300.0 / 180.0).epsilon(1e-12));

  // Cross-check against a millisecond scan.
  const TrajectorySegment si{0.0, 60.0, i.pos_m, i.vel_mps};
  const TrajectorySegment sj{0.0, 60.0, j.pos_m, j.vel_mps};
  const double scanned = scan_last_in_range({&si, 1}, {&sj, 1}, 300.0, 0.0, 60.0, 1e-3);
  REQUIRE(std::abs(w->l_total_s - scanned) < 1e-2);
}

TEST_CASE("a pair at rest relative to each other never separates") {
  const VehicleState i = make_vehicle(0, 0, 0, 80.0, 0);
  const VehicleState j = make_vehicle(1, 100.0, 0, 80.0, 0);
  const auto w = contact_window(i, j, 300.0, 0.0, 900.0);
  REQUIRE(w.has_value());
  REQUIRE(w->open_ended);
  REQUIRE(w->l_total_s == 900.0);
  REQUIRE(std::isinf(w->bound_lprime_s));
}

TEST_CASE("out-of-range pairs have no window") {
  const VehicleState i = make_vehicle(0, 0, 0, 50.0, 0);
  const VehicleState j = make_vehicle(1, 301.0, 0, -50.0, 0);
  REQUIRE_FALSE(contact_window(i, j, 300.0, 0.0, 60.0).has_value());
}

TEST_CASE("randomized constant-velocity encounters match the scan oracle") {
  RngStream rng(404);
  int tested = 0;
  while (tested < 20) {
    const VehicleState i = make_vehicle(0, rng.uniform(-200, 200), rng.uniform(-200, 200),
                                        rng.uniform(-120, 120), rng.uniform(-120, 120));
    const VehicleState j = make_vehicle(1, rng.uniform(-200, 200), rng.uniform(-200, 200),
                                        rng.uniform(-120, 120), rng.uniform(-120, 120));
    const double r = 300.0;
    const double horizon = 40.0;
    const auto w = contact_window(i, j, r, 0.0, horizon);
    if (!w.has_value()) continue;
    ++tested;
    const TrajectorySegment si{0.0, horizon, i.pos_m, i.vel_mps};
    const TrajectorySegment sj{0.0, horizon, j.pos_m, j.vel_mps};
    const double scanned = scan_last_in_range({&si, 1}, {&sj, 1}, r, 0.0, horizon, 1e-3);
    REQUIRE(std::abs(w->l_total_s - scanned) <= 1e-2);

    // Geometric envelope for straight-line motion: the in-range episode can
    // last at most a full chord crossing.
    const double rel = (i.vel_mps - j.vel_mps).norm();
    if (!w->open_ended && rel > 1e-9) {
      REQUIRE(w->l_total_s <= 2 * r / rel + 1e-9);
    }
  }
}

TEST_CASE("piecewise trajectories honor direction changes") {
  // i drives away along +x, turns around at t=10, and comes back into range.
  const std::vector<TrajectorySegment> ti{
      {0.0, 10.0, {250.0, 0.0}, {10.0, 0.0}},
      {10.0, 50.0, {350.0, 0.0}, {-10.0, 0.0}},
  };
  const std::vector<TrajectorySegment> tj{{0.0, 60.0, {0.0, 0.0}, {0.0, 0.0}}};
  const double r = 300.0;
  const auto w = contact_window(0, ti, 1, tj, r, 0.0, 60.0);
  REQUIRE(w.has_value());
  // Back inside the range circle at t=15 and never leaves before the horizon.
  REQUIRE(w->open_ended);
  REQUIRE(w->l_total_s == 60.0);

  const auto w_short = contact_window(0, ti, 1, tj, r, 0.0, 12.0);
  REQUIRE(w_short.has_value());
  REQUIRE_FALSE(w_short->open_ended);
  const double scanned = scan_last_in_range(ti, tj, r, 0.0, 12.0, 1e-3);
  REQUIRE(std::abs(w_short->l_total_s - scanned) <= 1e-2);
  REQUIRE(w_short->l_total_s == Catch::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("gappy or short trajectories are rejected") {
  const std::vector<TrajectorySegment> gap{
      {0.0, 5.0, {0.0, 0.0}, {1.0, 0.0}},
      {7.0, 10.0, {7.0, 0.0}, {1.0, 0.0}},
  };
  const std::vector<TrajectorySegment> full{{0.0, 20.0, {0.0, 0.0}, {0.0, 0.0}}};
  REQUIRE_THROWS_AS(contact_window(0, gap, 1, full, 300.0, 0.0, 15.0), Error);
  const std::vector<TrajectorySegment> short_traj{{0.0, 5.0, {0.0, 0.0}, {1.0, 0.0}}};
  REQUIRE_THROWS_AS(contact_window(0, short_traj, 1, full, 300.0, 0.0, 15.0), Error);
  REQUIRE_THROWS_AS(
      contact_window(0, std::vector<TrajectorySegment>{}, 1, full, 300.0, 0.0, 15.0), Error);
  REQUIRE_THROWS_AS(contact_window(0, full, 1, full, 300.0, 0.0, -1.0), Error);
}

TEST_CASE("behavior policy caps speed only for alerted vehicles under control") {
  VehicleState fast = make_vehicle(0, 0, 0, 120.0, 0);

  SECTION("baseline ignores alerts") {
    const VehicleState v = apply_behavior_policy(fast, true, BehaviorPolicy::Baseline, 72.0);
    REQUIRE(v.mode == DriveMode::Free);
    REQUIRE(v.speed_kmh() == Catch::Approx(120.0));
  }

  SECTION("controlled and alerted drops to the cap") {
    const VehicleState v = apply_behavior_policy(fast, true, BehaviorPolicy::DltControlled, 72.0);
    REQUIRE(v.mode == DriveMode::SpeedCapped);
    REQUIRE(v.cap_kmh == 72.0);
    REQUIRE(v.speed_kmh() == Catch::Approx(72.0).epsilon(1e-12));
  }

  SECTION("controlled but quiet keeps its speed") {
    const VehicleState v = apply_behavior_policy(fast, false, BehaviorPolicy::DltControlled, 72.0);
    REQUIRE(v.mode == DriveMode::Free);
    REQUIRE(v.speed_kmh() == Catch::Approx(120.0));
  }

  SECTION("already below the cap stays free") {
    const VehicleState slow = make_vehicle(0, 0, 0, 60.0, 0);
    const VehicleState v = apply_behavior_policy(slow, true, BehaviorPolicy::DltControlled, 72.0);
    REQUIRE(v.mode == DriveMode::Free);
    REQUIRE(v.speed_kmh() == Catch::Approx(60.0));
  }
}

TEST_CASE("ring kinematics wrap and embed consistently") {
  const double circumference = 10000.0;
  RingKinematics k{9990.0, 1, 20.0};
  advance_ring(k, 1.0, circumference);
  REQUIRE(k.arc_m == Catch::Approx(10.0).margin(1e-9));

  RingKinematics back{5.0, -1, 20.0};
  advance_ring(back, 1.0, circumference);
  REQUIRE(back.arc_m == Catch::Approx(9985.0).margin(1e-9));

  for (int s = 0; s < 1000; ++s) {
    advance_ring(k, 1.0, circumference);
    REQUIRE(k.arc_m >= 0.0);
    REQUIRE(k.arc_m < circumference);
  }

  VehicleState v;
  k.speed_mps = 25.0;
  embed_on_ring(v, k, circumference);
  const double radius = circumference / (2 * std::numbers::pi);
  REQUIRE(v.pos_m.norm() == Catch::Approx(radius).epsilon(1e-12));
  REQUIRE(v.vel_mps.norm() == Catch::Approx(25.0).epsilon(1e-12));
  // Velocity is tangent: orthogonal to the radius vector.
  REQUIRE(std::abs(v.pos_m.dot(v.vel_mps)) < 1e-6 * radius * 25.0);
}

TEST_CASE("plane kinematics move along the heading") {
  PlaneKinematics k{{100.0, 100.0}, 0.0, 10.0};
  advance_plane(k, 2.0);
  REQUIRE(k.pos_m.x == Catch::Approx(120.0));
  REQUIRE(k.pos_m.y == Catch::Approx(100.0));
  k.heading_rad = std::numbers::pi / 2;
  advance_plane(k, 1.0);
  REQUIRE(k.pos_m.y == Catch::Approx(110.0));

  VehicleState v;
  embed_on_plane(v, k);
  REQUIRE(v.pos_m.x == Catch::Approx(k.pos_m.x));
  REQUIRE(v.vel_mps.norm() == Catch::Approx(10.0));
}
