#pragma once

#include <algorithm>

#include "swarmtoe/swarm/types.hpp"

namespace swarmtoe::swarm {

// One control step toward a stationary target on a point-mass double
// integrator. Per axis:
//
//   e  = target - x
//   I += e * dt
//   a  = clamp(kp * e + ki * I - kd * v, +-a_max)    (de/dt = -v)
//   v  = clamp(v + a * dt, +-v_max)
//   x  = x + v * dt                                   (semi-implicit)
//
// A non-finite result marks the drone Failed and leaves its last good state.
inline DroneState pid_step(const DroneState& drone, const Pose& target, const PidParams& params, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("pid_step: dt must be positive");
  DroneState next = drone;
  for (int a = 0; a < 3; ++a) {
    const double e = target[a] - drone.pose[a];
    next.integral[a] = drone.integral[a] + e * dt;
    const double cmd = params.kp[a] * e + params.ki[a] * next.integral[a] - params.kd[a] * drone.velocity[a];
    const double acc = std::clamp(cmd, -params.a_max, params.a_max);
    next.velocity[a] = std::clamp(drone.velocity[a] + acc * dt, -params.v_max, params.v_max);
    next.pose[a] = drone.pose[a] + next.velocity[a] * dt;
  }
  if (!next.pose.finite() || !next.velocity.finite() || !next.integral.finite()) {
    DroneState failed = drone;
    failed.status = DroneStatus::Failed;
    return failed;
  }
  return next;
}

}  // namespace swarmtoe::swarm
