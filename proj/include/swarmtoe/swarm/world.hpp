#pragma once

// Simulated fleet: five drones on staging pads beside the board, dispatched
// one at a time to land on board cells.
//
// Missions fly ascend -> traverse -> descend. The traverse follows the board's
// grid lines (plus a transit lane between the board and the pads) so the
// airborne drone never passes over a drone already landed on a cell.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "swarmtoe/rng.hpp"
#include "swarmtoe/swarm/pid.hpp"
#include "swarmtoe/swarm/types.hpp"

namespace swarmtoe::swarm {

class SwarmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class MissionPhase { Ascend, Traverse, Descend };

struct Waypoint {
  Pose target;
  MissionPhase phase = MissionPhase::Traverse;
};

struct Mission {
  int drone = 0;
  Cell cell{1};
  std::vector<Waypoint> route;
  std::size_t leg = 0;
  double started_at = 0.0;
};

enum class SwarmEventKind { MissionComplete, MissionFailed };

struct SwarmEvent {
  SwarmEventKind kind = SwarmEventKind::MissionComplete;
  int drone = 0;
  Cell cell{1};
  double time = 0.0;
  std::string detail;
};

struct MocapSample {
  int id = 0;
  Pose pose;
  double timestamp = 0.0;
};

// Arena-frame center of a cell at board surface height. Columns run along x,
// rows along y.
inline Pose cell_center(const SwarmConfig& cfg, Cell cell) {
  const double pitch_x = cfg.board_width / 3.0;
  const double pitch_y = cfg.board_depth / 3.0;
  return {cfg.board_x + (cell.col() + 0.5) * pitch_x, cfg.board_y + (cell.row() + 0.5) * pitch_y, cfg.board_z};
}

inline Pose staging_pose(const SwarmConfig& cfg, int drone) {
  return {cfg.staging_x, cfg.staging_y0 + drone * cfg.staging_pitch, cfg.board_z};
}

// Waypoints from `start` to a landing on `cell`. Traverse legs are
// axis-aligned: out to the transit lane, along it to the grid line above the
// target row, along that line to the target column, then half a cell in.
inline std::vector<Waypoint> plan_route(const SwarmConfig& cfg, const Pose& start, Cell cell) {
  const Pose goal = cell_center(cfg, cell);
  const double h = cfg.cruise_altitude;
  std::vector<Waypoint> route;
  auto add = [&](Pose p, MissionPhase phase) {
    if (!route.empty() && (route.back().target - p).norm() < 1e-12) return;
    route.push_back({p, phase});
  };
  add({start.x, start.y, h}, MissionPhase::Ascend);
  if ((goal - start).horizontal_norm() >= cfg.position_tolerance) {
    const double lane_y = cfg.board_y + cell.row() * (cfg.board_depth / 3.0);
    add({cfg.corridor_x, start.y, h}, MissionPhase::Traverse);
    add({cfg.corridor_x, lane_y, h}, MissionPhase::Traverse);
    add({goal.x, lane_y, h}, MissionPhase::Traverse);
    add({goal.x, goal.y, h}, MissionPhase::Traverse);
  }
  add(goal, MissionPhase::Descend);
  return route;
}

class World {
 public:
  explicit World(SwarmConfig cfg = {}) : cfg_(cfg), mocap_rng_(SeededRng(cfg.seed).split(0x6d6f636170)) {
    cfg_.pid.validate();
    if (!(cfg_.dt > 0)) throw std::invalid_argument("World: dt must be positive");
    for (int i = 0; i < kFleetSize; ++i) {
      fleet_[static_cast<std::size_t>(i)].id = i;
      fleet_[static_cast<std::size_t>(i)].pose = staging_pose(cfg_, i);
    }
  }

  const SwarmConfig& config() const noexcept { return cfg_; }
  const std::array<DroneState, kFleetSize>& fleet() const noexcept { return fleet_; }
  const DroneState& drone(int id) const { return fleet_.at(static_cast<std::size_t>(id)); }
  double clock() const noexcept { return clock_; }
  std::uint64_t ticks() const noexcept { return ticks_; }
  const std::optional<Mission>& active_mission() const noexcept { return mission_; }
  std::size_t queued_missions() const noexcept { return queue_.size(); }
  bool busy() const noexcept { return mission_.has_value() || !queue_.empty(); }
  const Arena& arena() const noexcept { return arena_; }

  bool cell_occupied(Cell c) const noexcept {
    for (const DroneState& d : fleet_)
      if (d.assigned_cell == c && d.status != DroneStatus::Failed) return true;
    return false;
  }

  // Nearest idle drone to the cell, ties to the lowest id; it starts flying
  // at once. Only one mission may be in flight.
  int assign_drone(Cell cell) {
    check_dispatchable(cell);
    const Pose target = cell_center(cfg_, cell);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const DroneState& d : fleet_) {
      if (d.status != DroneStatus::Idle) continue;
      const double dist = (d.pose - target).norm();
      if (dist < best_d) {
        best_d = dist;
        best = d.id;
      }
    }
    if (best < 0) throw SwarmError("assign_drone: no idle drone");
    launch(best, cell);
    return best;
  }

  // Sends a specific idle drone to the cell.
  void dispatch(int drone, Cell cell) {
    check_dispatchable(cell);
    if (fleet_.at(static_cast<std::size_t>(drone)).status != DroneStatus::Idle)
      throw SwarmError("dispatch: drone " + std::to_string(drone) + " is not idle");
    launch(drone, cell);
  }

  // Queue a landing; missions start one after another.
  void request_mission(Cell cell) { queue_.push_back(cell); }

  void tick() {
    if (!mission_ && !queue_.empty()) {
      const Cell next = queue_.front();
      queue_.pop_front();
      try {
        assign_drone(next);
      } catch (const SwarmError& e) {
        events_.push_back({SwarmEventKind::MissionFailed, -1, next, clock_, e.what()});
      }
    }
    if (mission_) advance_mission();
    clock_ += cfg_.dt;
    ++ticks_;
    if (log_) log_state(*log_);
  }

  void advance(double seconds) {
    const auto n = static_cast<std::uint64_t>(std::llround(seconds / cfg_.dt));
    for (std::uint64_t i = 0; i < n; ++i) tick();
  }

  // Ticks until the fleet is idle or `limit` seconds pass; returns whether it
  // settled.
  bool run_until_idle(double limit = 120.0) {
    const double stop = clock_ + limit;
    while (busy() && clock_ < stop) tick();
    return !busy();
  }

  std::vector<SwarmEvent> take_events() {
    std::vector<SwarmEvent> out(events_.begin(), events_.end());
    events_.clear();
    return out;
  }

  std::vector<MocapSample> mocap_sample() {
    std::vector<MocapSample> out;
    out.reserve(fleet_.size());
    for (const DroneState& d : fleet_) {
      Pose p = d.pose;
      if (cfg_.mocap_sigma > 0)
        for (int a = 0; a < 3; ++a) p[a] += mocap_rng_.gaussian(0.0, cfg_.mocap_sigma);
      out.push_back({d.id, p, clock_});
    }
    return out;
  }

  // Drones back on their pads; the board is physically clear.
  void reset_fleet() {
    if (mission_ || !queue_.empty()) throw SwarmError("reset_fleet: missions still active");
    for (DroneState& d : fleet_) {
      const int id = d.id;
      d = DroneState{};
      d.id = id;
      d.pose = staging_pose(cfg_, id);
    }
  }

  // Place a drone directly; used by fixtures that start from arbitrary poses.
  void set_drone(const DroneState& state) { fleet_.at(static_cast<std::size_t>(state.id)) = state; }

  // Per-tick trajectory records: `t, drone_id, x, y, z, vx, vy, vz, status`.
  void set_trajectory_log(std::ostream* os) { log_ = os; }

  void log_state(std::ostream& os) const {
    char buf[256];
    for (const DroneState& d : fleet_) {
      std::snprintf(buf, sizeof buf, "%.2f, %d, %.17g, %.17g, %.17g, %.17g, %.17g, %.17g, %s\n", clock_, d.id,
                    d.pose.x, d.pose.y, d.pose.z, d.velocity.x, d.velocity.y, d.velocity.z,
                    std::string(to_string(d.status)).c_str());
      os << buf;
    }
  }

 private:
  void check_dispatchable(Cell cell) const {
    if (mission_) throw SwarmError("a mission is already in flight");
    if (cell_occupied(cell)) throw SwarmError("cell " + std::to_string(cell.index()) + " is occupied");
  }

  void launch(int drone, Cell cell) {
    DroneState& d = fleet_[static_cast<std::size_t>(drone)];
    d.status = DroneStatus::Flying;
    d.assigned_cell = cell;
    d.integral = {};
    mission_ = Mission{drone, cell, plan_route(cfg_, d.pose, cell), 0, clock_};
  }

  void advance_mission() {
    Mission& m = *mission_;
    DroneState& d = fleet_[static_cast<std::size_t>(m.drone)];
    const Waypoint& wp = m.route[m.leg];
    const DroneState next = pid_step(d, wp.target, cfg_.pid, cfg_.dt);
    if (next.status == DroneStatus::Failed) {
      d.status = DroneStatus::Failed;
      fail("non-finite drone state");
      return;
    }
    d = next;
    // The table is solid.
    if (d.pose.z < cfg_.board_z) {
      d.pose.z = cfg_.board_z;
      d.velocity.z = std::max(d.velocity.z, 0.0);
    }
    const bool arrived = (d.pose - wp.target).norm() < cfg_.position_tolerance &&
                         d.velocity.norm() < cfg_.speed_tolerance;
    if (arrived) {
      if (++m.leg == m.route.size()) {
        d.status = DroneStatus::Landed;
        d.velocity = {};
        d.integral = {};
        d.pose.z = cfg_.board_z;
        events_.push_back({SwarmEventKind::MissionComplete, m.drone, m.cell, clock_ + cfg_.dt, {}});
        mission_.reset();
        return;
      }
      if (m.route[m.leg].phase == MissionPhase::Descend) d.status = DroneStatus::Landing;
    }
    if (clock_ + cfg_.dt - m.started_at > cfg_.mission_timeout) {
      d.status = DroneStatus::Failed;
      fail("mission timed out");
    }
  }

  void fail(const std::string& why) {
    events_.push_back({SwarmEventKind::MissionFailed, mission_->drone, mission_->cell, clock_ + cfg_.dt, why});
    mission_.reset();
  }

  SwarmConfig cfg_;
  Arena arena_;
  std::array<DroneState, kFleetSize> fleet_{};
  std::optional<Mission> mission_;
  std::deque<Cell> queue_;
  std::deque<SwarmEvent> events_;
  double clock_ = 0.0;
  std::uint64_t ticks_ = 0;
  SeededRng mocap_rng_;
  std::ostream* log_ = nullptr;
};

// Snapshot after each tick of a single mission.
struct WorldSnapshot {
  double clock = 0.0;
  std::array<DroneState, kFleetSize> fleet{};
};

// Runs the given drone's mission to completion (or failure); throws if the
// drone is not flying.
inline std::vector<WorldSnapshot> fly_mission(World& world, int drone) {
  if (!world.active_mission() || world.active_mission()->drone != drone)
    throw SwarmError("fly_mission: drone " + std::to_string(drone) + " has no mission in flight");
  std::vector<WorldSnapshot> out;
  while (world.active_mission() && world.active_mission()->drone == drone) {
    world.tick();
    out.push_back({world.clock(), world.fleet()});
  }
  return out;
}

// Smallest horizontal distance between drones that are airborne or landed on
// the board (idle drones on pads are included when `include_idle`).
inline double min_horizontal_separation(const std::array<DroneState, kFleetSize>& fleet, bool include_idle = false) {
  double best = std::numeric_limits<double>::infinity();
  auto counts = [&](const DroneState& d) {
    return d.airborne() || d.status == DroneStatus::Landed || (include_idle && d.status == DroneStatus::Idle);
  };
  for (std::size_t i = 0; i < fleet.size(); ++i)
    for (std::size_t j = i + 1; j < fleet.size(); ++j)
      if (counts(fleet[i]) && counts(fleet[j]))
        best = std::min(best, (fleet[i].pose - fleet[j].pose).horizontal_norm());
  return best;
}

}  // namespace swarmtoe::swarm
