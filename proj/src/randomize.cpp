#include "jump/randomize.hpp"

#include <stdexcept>

namespace jump {

void RandomizationRanges::validate() const {
  const double* rows[] = {friction_ratio, joint_damping, spring_ratio, mass_ratio,
                          inertia_ratio,  root_com,      link_com,     pd_ratio,
                          motor_pos_bias, motor_vel_bias, gyro_bias,   linvel_bias,
                          delay,          perturb_dur};
  for (const double* r : rows)
    if (r[0] > r[1]) throw std::runtime_error("randomization: range with lo > hi");
}

RandomizationRanges randomization_ranges(const Config& c) {
  RandomizationRanges r;
  r.friction_ratio[0] = c.rand_friction_lo;
  r.friction_ratio[1] = c.rand_friction_hi;
  r.joint_damping[0] = c.rand_joint_damping_lo_nms;
  r.joint_damping[1] = c.rand_joint_damping_hi_nms;
  r.spring_ratio[0] = c.rand_spring_lo;
  r.spring_ratio[1] = c.rand_spring_hi;
  r.mass_ratio[0] = c.rand_mass_lo;
  r.mass_ratio[1] = c.rand_mass_hi;
  r.inertia_ratio[0] = c.rand_inertia_lo;
  r.inertia_ratio[1] = c.rand_inertia_hi;
  r.root_com[0] = c.rand_root_com_lo_m;
  r.root_com[1] = c.rand_root_com_hi_m;
  r.link_com[0] = c.rand_link_com_lo_m;
  r.link_com[1] = c.rand_link_com_hi_m;
  r.pd_ratio[0] = c.rand_pd_lo;
  r.pd_ratio[1] = c.rand_pd_hi;
  r.motor_pos_bias[0] = c.rand_motor_pos_bias_lo_rad;
  r.motor_pos_bias[1] = c.rand_motor_pos_bias_hi_rad;
  r.motor_vel_bias[0] = c.rand_motor_vel_bias_lo;
  r.motor_vel_bias[1] = c.rand_motor_vel_bias_hi;
  r.gyro_bias[0] = c.rand_gyro_bias_lo_rad;
  r.gyro_bias[1] = c.rand_gyro_bias_hi_rad;
  r.linvel_bias[0] = c.rand_linvel_bias_lo_mps;
  r.linvel_bias[1] = c.rand_linvel_bias_hi_mps;
  r.delay[0] = c.rand_delay_lo_s;
  r.delay[1] = c.rand_delay_hi_s;
  r.perturb_force = c.rand_perturb_force_n;
  r.perturb_moment = c.rand_perturb_moment_nm;
  r.perturb_dur[0] = c.rand_perturb_dur_lo_s;
  r.perturb_dur[1] = c.rand_perturb_dur_hi_s;
  r.validate();
  return r;
}

Eigen::Matrix<double, kPrivDim, 1> SampledDynamics::normalized(
    const RandomizationRanges& r) const {
  const double* rows[kPrivDim] = {r.friction_ratio, r.joint_damping, r.spring_ratio,
                                  r.mass_ratio,     r.inertia_ratio, r.root_com,
                                  r.root_com,       r.link_com,      r.link_com,
                                  r.pd_ratio,       r.motor_pos_bias, r.motor_vel_bias,
                                  r.gyro_bias,      r.linvel_bias,   r.delay};
  Eigen::Matrix<double, kPrivDim, 1> n;
  for (int i = 0; i < kPrivDim; ++i) {
    const double mid = 0.5 * (rows[i][0] + rows[i][1]);
    const double half = 0.5 * (rows[i][1] - rows[i][0]);
    n[i] = half > 0.0 ? (raw[i] - mid) / half : 0.0;
  }
  return n;
}

SampledDynamics sample_dynamics(const RandomizationRanges& r, const RobotModel& base,
                                const SensorModel& base_sensor, int stage, Rng& rng) {
  SampledDynamics d;
  d.model = base;
  d.sensor = base_sensor;
  if (stage < 3) {
    d.sensor.enabled = false;
    d.raw << 1.0, base.joint_damping, 1.0, 1.0, 1.0, base.root_com_dx, base.root_com_dz,
        base.leg_com_dx, base.leg_com_dz, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0;
    return d;
  }
  auto u = [&](const double* range) { return rng.uniform(range[0], range[1]); };
  const double friction = u(r.friction_ratio);
  const double damping = u(r.joint_damping);
  const double spring = u(r.spring_ratio);
  const double mass = u(r.mass_ratio);
  const double inertia = u(r.inertia_ratio);
  const double root_dx = u(r.root_com), root_dz = u(r.root_com);
  const double link_dx = u(r.link_com), link_dz = u(r.link_com);
  const double pd = u(r.pd_ratio);
  const double mpb = u(r.motor_pos_bias);
  const double mvb = u(r.motor_vel_bias);
  const double gb = u(r.gyro_bias);
  const double lvb = u(r.linvel_bias);
  const double delay = u(r.delay);
  d.raw << friction, damping, spring, mass, inertia, root_dx, root_dz, link_dx, link_dz, pd, mpb,
      mvb, gb, lvb, delay;

  RobotModel& m = d.model;
  m.ground_friction *= friction;
  m.joint_damping = damping;
  m.spring_stiffness *= spring;
  m.pelvis_mass *= mass;
  m.thigh_mass *= mass;
  m.shin_mass *= mass;
  m.foot_mass *= mass;
  m.pelvis_inertia *= inertia;
  m.thigh_inertia *= inertia;
  m.shin_inertia *= inertia;
  m.foot_inertia *= inertia;
  m.root_com_dx = base.root_com_dx + root_dx;
  m.root_com_dz = base.root_com_dz + root_dz;
  m.leg_com_dx = base.leg_com_dx + link_dx;
  m.leg_com_dz = base.leg_com_dz + link_dz;
  m.kp *= pd;
  m.kd *= pd;

  d.sensor.enabled = true;
  d.sensor.motor_pos_bias = mpb;
  d.sensor.motor_vel_bias = mvb;
  d.sensor.gyro_bias = gb;
  d.sensor.linvel_bias = lvb;
  d.sensor.delay_s = delay;
  return d;
}

}  // namespace jump
