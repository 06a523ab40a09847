#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "swarmtoe/game/board.hpp"

namespace swarmtoe::swarm {

using game::Cell;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const noexcept { return {x * s, y * s, z * s}; }
  double norm() const noexcept { return std::sqrt(x * x + y * y + z * z); }
  double horizontal_norm() const noexcept { return std::hypot(x, y); }
  bool finite() const noexcept { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  constexpr double& operator[](int axis) noexcept { return axis == 0 ? x : (axis == 1 ? y : z); }
  constexpr double operator[](int axis) const noexcept { return axis == 0 ? x : (axis == 1 ? y : z); }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

// Arena-frame position in meters.
using Pose = Vec3;

// Capture volume: 2.5 x 2.5 x 1.5 m, about 5 m^3 of usable flight space
// above the floor footprint used by the board and pads.
struct Arena {
  Vec3 lo{0.0, 0.0, 0.0};
  Vec3 hi{2.5, 2.5, 1.5};
  bool contains(const Vec3& p, double slack = 1e-9) const noexcept {
    for (int a = 0; a < 3; ++a)
      if (p[a] < lo[a] - slack || p[a] > hi[a] + slack) return false;
    return true;
  }
};

enum class DroneStatus { Idle, Flying, Landing, Landed, Failed };

constexpr std::string_view to_string(DroneStatus s) noexcept {
  switch (s) {
    case DroneStatus::Idle: return "Idle";
    case DroneStatus::Flying: return "Flying";
    case DroneStatus::Landing: return "Landing";
    case DroneStatus::Landed: return "Landed";
    case DroneStatus::Failed: return "Failed";
  }
  return "?";
}

struct DroneState {
  int id = 0;
  Pose pose;
  Vec3 velocity;
  Vec3 integral;  // accumulated position error, for the ki term
  DroneStatus status = DroneStatus::Idle;
  std::optional<Cell> assigned_cell;

  bool airborne() const noexcept { return status == DroneStatus::Flying || status == DroneStatus::Landing; }

  friend bool operator==(const DroneState&, const DroneState&) = default;
};

// Per-axis gains: kp [1/s^2], ki [1/s^3], kd [1/s]; limits per axis.
struct PidParams {
  Vec3 kp{9.0, 9.0, 9.0};
  Vec3 ki{0.0, 0.0, 0.0};
  Vec3 kd{6.0, 6.0, 6.0};  // critically damped with kp = 9
  double v_max = 1.0;      // m/s
  double a_max = 3.0;      // m/s^2

  void validate() const {
    for (int a = 0; a < 3; ++a)
      if (kp[a] < 0 || ki[a] < 0 || kd[a] < 0) throw std::invalid_argument("PID gains must be non-negative");
    if (!(v_max > 0) || !(a_max > 0)) throw std::invalid_argument("v_max and a_max must be positive");
  }
  friend bool operator==(const PidParams&, const PidParams&) = default;
};

struct SwarmConfig {
  PidParams pid;
  double dt = 0.01;  // 100 Hz control tick

  // Board on the landing table: `board_width` along x (columns), `board_depth`
  // along y (rows), top-left corner at the origin.
  double board_x = 0.5;
  double board_y = 0.5;
  double board_z = 0.0;
  double board_width = 1.0;
  double board_depth = 1.2;

  double cruise_altitude = 0.7;

  // Staging pads in a line parallel to y, beside the board.
  double staging_x = 2.0;
  double staging_y0 = 0.6;
  double staging_pitch = 0.25;

  // Transit lane along y, outside the board; by default it runs above the pads.
  double corridor_x = 2.0;

  double position_tolerance = 0.02;  // m
  double speed_tolerance = 0.05;     // m/s
  double mission_timeout = 30.0;     // s
  double mocap_sigma = 0.0;          // m
  std::uint64_t seed = 0;

  friend bool operator==(const SwarmConfig&, const SwarmConfig&) = default;
};

inline constexpr int kFleetSize = 5;

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size()) throw std::invalid_argument("config key '" + key + "': not a number: " + v);
  return out;
}

}  // namespace detail

// Flat `key = value` file; '#' starts a comment. Unknown keys are errors.
inline void write_config(std::ostream& os, const SwarmConfig& c) {
  using detail::fmt;
  const char* axes = "xyz";
  for (int a = 0; a < 3; ++a) {
    os << "kp_" << axes[a] << " = " << fmt(c.pid.kp[a]) << '\n';
    os << "ki_" << axes[a] << " = " << fmt(c.pid.ki[a]) << '\n';
    os << "kd_" << axes[a] << " = " << fmt(c.pid.kd[a]) << '\n';
  }
  os << "v_max = " << fmt(c.pid.v_max) << '\n'
     << "a_max = " << fmt(c.pid.a_max) << '\n'
     << "dt = " << fmt(c.dt) << '\n'
     << "board_x = " << fmt(c.board_x) << '\n'
     << "board_y = " << fmt(c.board_y) << '\n'
     << "board_z = " << fmt(c.board_z) << '\n'
     << "board_width = " << fmt(c.board_width) << '\n'
     << "board_depth = " << fmt(c.board_depth) << '\n'
     << "cruise_altitude = " << fmt(c.cruise_altitude) << '\n'
     << "staging_x = " << fmt(c.staging_x) << '\n'
     << "staging_y0 = " << fmt(c.staging_y0) << '\n'
     << "staging_pitch = " << fmt(c.staging_pitch) << '\n'
     << "corridor_x = " << fmt(c.corridor_x) << '\n'
     << "position_tolerance = " << fmt(c.position_tolerance) << '\n'
     << "speed_tolerance = " << fmt(c.speed_tolerance) << '\n'
     << "mission_timeout = " << fmt(c.mission_timeout) << '\n'
     << "mocap_sigma = " << fmt(c.mocap_sigma) << '\n'
     << "seed = " << c.seed << '\n';
}

inline SwarmConfig read_config(std::istream& is) {
  SwarmConfig c;
  std::map<std::string, double*> fields = {
      {"kp_x", &c.pid.kp.x}, {"kp_y", &c.pid.kp.y}, {"kp_z", &c.pid.kp.z},
      {"ki_x", &c.pid.ki.x}, {"ki_y", &c.pid.ki.y}, {"ki_z", &c.pid.ki.z},
      {"kd_x", &c.pid.kd.x}, {"kd_y", &c.pid.kd.y}, {"kd_z", &c.pid.kd.z},
      {"v_max", &c.pid.v_max}, {"a_max", &c.pid.a_max}, {"dt", &c.dt},
      {"board_x", &c.board_x}, {"board_y", &c.board_y}, {"board_z", &c.board_z},
      {"board_width", &c.board_width}, {"board_depth", &c.board_depth},
      {"cruise_altitude", &c.cruise_altitude}, {"staging_x", &c.staging_x},
      {"staging_y0", &c.staging_y0}, {"staging_pitch", &c.staging_pitch},
      {"corridor_x", &c.corridor_x}, {"position_tolerance", &c.position_tolerance},
      {"speed_tolerance", &c.speed_tolerance}, {"mission_timeout", &c.mission_timeout},
      {"mocap_sigma", &c.mocap_sigma},
  };
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  };
  std::string line;
  while (std::getline(is, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "seed") {
      std::uint64_t s = 0;
      const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
      if (ec != std::errc{} || p != value.data() + value.size())
        throw std::invalid_argument("config key 'seed': not an unsigned integer: " + value);
      c.seed = s;
      continue;
    }
    const auto it = fields.find(key);
    if (it == fields.end()) throw std::invalid_argument("unknown config key '" + key + "'");
    *it->second = detail::parse_double(key, value);
  }
  c.pid.validate();
  return c;
}

}  // namespace swarmtoe::swarm
