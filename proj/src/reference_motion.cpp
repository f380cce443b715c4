#include "jump/reference.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace jump {

double ReferenceMotion::pelvis_at(int t) const {
  if (t < 0) t = 0;
  return t < samples() ? pelvis_z[size_t(t)] : standing_pelvis;
}

double ReferenceMotion::foot_at(int t) const {
  if (t < 0) t = 0;
  return t < samples() ? foot_z[size_t(t)] : 0.0;
}

const Vec4& ReferenceMotion::motors_at(int t) const {
  if (t < 0) t = 0;
  return t < samples() ? motors[size_t(t)] : standing_motors;
}

Eigen::Matrix<double, 13, 1> ReferenceMotion::preview(int t) const {
  Eigen::Matrix<double, 13, 1> p;
  p[0] = pelvis_at(t);
  p.segment<4>(1) = motors_at(t + 1);
  p.segment<4>(5) = motors_at(t + 4);
  p.segment<4>(9) = motors_at(t + 7);
  return p;
}

ReferenceMotion build_jump_in_place(const Config& cfg, const RobotModel& m) {
  const double s = cfg.ref_scale;
  const double g = cfg.sim_gravity_mps2;
  const double z0 = cfg.ref_standing_pelvis_m * s;
  const double apex = cfg.ref_apex_pelvis_m * s;
  const double foot_apex = cfg.ref_apex_foot_m * s;
  const double crouch = cfg.ref_crouch_depth_m * s;
  const double tj = cfg.ref_tj_s;
  const double dt = cfg.sim_dt_s * cfg.sim_substeps;

  // feasibility against leg geometry (hip height above the sole line)
  const double leg_max = (m.thigh_len + m.shin_len) * 0.998;
  const double leg_min = (m.thigh_len + m.shin_len) * 0.25;
  const double apex_ext = (apex + m.hip_off_z) - foot_apex;
  if (apex_ext > leg_max)
    throw std::runtime_error("reference: apex pelvis height needs leg extension " +
                             std::to_string(apex_ext) + " m > reachable " +
                             std::to_string(leg_max) + " m");
  if (apex_ext < leg_min)
    throw std::runtime_error("reference: apex foot height leaves leg length " +
                             std::to_string(apex_ext) + " m < minimum " + std::to_string(leg_min) +
                             " m");
  if (z0 - crouch + m.hip_off_z < leg_min)
    throw std::runtime_error("reference: crouch depth folds the leg below its minimum length");

  // Snap the apex onto the sample grid so the peak samples equal the
  // configured apexes exactly.
  const double t_apex = std::round(cfg.ref_apex_time_s / dt) * dt;
  const double z_lo = z0 + cfg.ref_push_rise_m * s;
  if (apex <= z_lo)
    throw std::runtime_error("reference: apex pelvis height must exceed the liftoff height");
  const double v_lo = std::sqrt(2.0 * g * (apex - z_lo));
  const double t_air = v_lo / g;  // liftoff to apex
  const double t_lo = t_apex - t_air;
  const double t_td = t_apex + t_air;
  const double t_crouch = cfg.ref_crouch_duration_s;
  if (t_lo <= t_crouch)
    throw std::runtime_error("reference: apex time leaves no room for the push-off phase");
  if (t_td >= tj) throw std::runtime_error("reference: flight phase extends past the jump duration");

  // push-off quintic z(u) on [0, Tp]: starts at the crouch bottom at rest,
  // ends at (z_lo, v_lo) entering free flight (accel -g)
  const double Tp = t_lo - t_crouch;
  const double zc = z0 - crouch;
  // boundary conditions: p(0)=zc, p'(0)=0, p''(0)=0, p(Tp)=z_lo, p'(Tp)=v_lo, p''(Tp)=-g
  auto quintic = [&](double u) {
    const double T = Tp;
    const double x = u / T;
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
    // hermite quintic basis
    const double h0 = 1 - 10 * x3 + 15 * x4 - 6 * x5;
    const double h1 = T * (x - 6 * x3 + 8 * x4 - 3 * x5);
    const double h2 = T * T * 0.5 * (x2 - 3 * x3 + 3 * x4 - x5);
    const double h3 = 10 * x3 - 15 * x4 + 6 * x5;
    const double h4 = T * (-4 * x3 + 7 * x4 - 3 * x5);
    const double h5 = T * T * 0.5 * (x3 - 2 * x4 + x5);
    return h0 * zc + h1 * 0.0 + h2 * 0.0 + h3 * z_lo + h4 * v_lo + h5 * (-g);
  };
  // landing cubic hermite from (z_lo, -v_lo) at touchdown to standing at rest
  const double Tl = tj - t_td;
  auto landing = [&](double u) {
    const double x = u / Tl;
    const double x2 = x * x, x3 = x2 * x;
    const double h00 = 2 * x3 - 3 * x2 + 1;
    const double h10 = x3 - 2 * x2 + x;
    const double h01 = -2 * x3 + 3 * x2;
    const double h11 = x3 - x2;
    return h00 * z_lo + h10 * Tl * (-v_lo) + h01 * z0 + h11 * Tl * 0.0;
  };

  ReferenceMotion ref;
  ref.tj_s = tj;
  ref.dt = dt;
  ref.standing_pelvis = z0;
  ref.standing_motors = standing_pose(m, z0);
  ref.t_apex_s = t_apex;
  ref.t_air_s = t_air;
  const int n = int(std::floor(tj / dt)) + 1;
  const double foot_halfwidth = t_air;
  for (int i = 0; i < n; ++i) {
    const double t = i * dt;
    double z;
    if (t <= t_crouch)
      z = z0 - crouch * 0.5 * (1.0 - std::cos(M_PI * t / t_crouch));
    else if (t <= t_lo)
      z = quintic(t - t_crouch);
    else if (t <= t_td)
      z = apex - 0.5 * g * (t - t_apex) * (t - t_apex);
    else
      z = landing(t - t_td);
    double e = 0.0;
    if (std::abs(t - t_apex) < foot_halfwidth)
      e = foot_apex * 0.5 * (1.0 + std::cos(M_PI * (t - t_apex) / foot_halfwidth));
    const double d = std::clamp((z + m.hip_off_z) - e, leg_min, leg_max);
    double hip, knee;
    ik_hip_knee(d, m.thigh_len, hip, knee);
    ref.pelvis_z.push_back(z);
    ref.foot_z.push_back(e);
    Vec4 q;
    q << hip, knee, hip, knee;
    ref.motors.push_back(q);
  }
  return ref;
}

void export_reference_csv(const ReferenceMotion& ref, std::ostream& os) {
  os << "t_s,pelvis_z_m,foot_z_left_m,foot_z_right_m,hip_left_rad,knee_left_rad,"
        "hip_right_rad,knee_right_rad\n";
  char buf[256];
  for (int i = 0; i < ref.samples(); ++i) {
    const Vec4& q = ref.motors[size_t(i)];
    snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", i * ref.dt,
             ref.pelvis_z[size_t(i)], ref.foot_z[size_t(i)], ref.foot_z[size_t(i)], q[0], q[1],
             q[2], q[3]);
    os << buf;
  }
}

ReferenceMotion import_reference_csv(std::istream& is) {
  ReferenceMotion ref;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("reference csv: empty file");
  double prev_t = 0.0, t = 0.0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double v[8];
    for (int i = 0; i < 8; ++i) {
      if (!std::getline(ss, cell, ',')) throw std::runtime_error("reference csv: short row");
      v[i] = std::strtod(cell.c_str(), nullptr);
    }
    prev_t = t;
    t = v[0];
    ref.pelvis_z.push_back(v[1]);
    ref.foot_z.push_back(std::min(v[2], v[3]));
    Vec4 q;
    q << v[4], v[5], v[6], v[7];
    ref.motors.push_back(q);
  }
  if (ref.samples() < 2) throw std::runtime_error("reference csv: needs at least two samples");
  ref.dt = t - prev_t;
  ref.tj_s = t + ref.dt;
  ref.standing_pelvis = ref.pelvis_z.back();
  ref.standing_motors = ref.motors.back();
  // Flight window, reconstructed from the samples: the apex lands exactly on
  // the sample grid by construction, and the foot clearance profile is
  // nonzero precisely while airborne.
  int apex_i = 0;
  int lifted = 0;
  for (int i = 0; i < ref.samples(); ++i) {
    if (ref.pelvis_z[i] > ref.pelvis_z[apex_i]) apex_i = i;
    if (ref.foot_z[i] > 1e-9) ++lifted;
  }
  ref.t_apex_s = apex_i * ref.dt;
  ref.t_air_s = 0.5 * lifted * ref.dt;
  return ref;
}

}  // namespace jump
