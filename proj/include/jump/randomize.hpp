#pragma once

#include "jump/sim.hpp"

namespace jump {

constexpr int kPrivDim = 15;

// One (lo, hi) pair per randomized dynamics row.
struct RandomizationRanges {
  double friction_ratio[2];
  double joint_damping[2];  // absolute, N m s / rad
  double spring_ratio[2];
  double mass_ratio[2];
  double inertia_ratio[2];
  double root_com[2];  // m, each planar axis
  double link_com[2];
  double pd_ratio[2];
  double motor_pos_bias[2];
  double motor_vel_bias[2];
  double gyro_bias[2];
  double linvel_bias[2];
  double delay[2];
  double perturb_force;   // |F| bound, N, per planar axis
  double perturb_moment;  // |M| bound, N m
  double perturb_dur[2];

  void validate() const;  // lo <= hi per row
};

RandomizationRanges randomization_ranges(const Config& cfg);

// A per-episode draw of the physical model plus its raw parameter vector
// (the privileged input of the expert policy and the value function).
struct SampledDynamics {
  RobotModel model;
  SensorModel sensor;
  Eigen::Matrix<double, kPrivDim, 1> raw;
  // Per-row normalization of `raw` to [-1, 1] by the configured ranges.
  Eigen::Matrix<double, kPrivDim, 1> normalized(const RandomizationRanges& r) const;
};

// Stage 3 draws every row uniformly and enables the sensor model; stages 1-2
// return the nominal model bit-identically with clean sensors.
SampledDynamics sample_dynamics(const RandomizationRanges& r, const RobotModel& base,
                                const SensorModel& base_sensor, int stage, Rng& rng);

}  // namespace jump
