#include "jump/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jump {

void RobotModel::validate() const {
  auto pos = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::runtime_error(std::string("model: ") + name + " must be positive");
  };
  pos(pelvis_mass, "pelvis_mass");
  pos(thigh_mass, "thigh_mass");
  pos(shin_mass, "shin_mass");
  pos(foot_mass, "foot_mass");
  pos(pelvis_inertia, "pelvis_inertia");
  pos(thigh_inertia, "thigh_inertia");
  pos(shin_inertia, "shin_inertia");
  pos(foot_inertia, "foot_inertia");
  pos(thigh_len, "thigh_len");
  pos(shin_len, "shin_len");
  pos(foot_toe, "foot_toe");
  pos(foot_heel, "foot_heel");
  pos(spring_stiffness, "spring_stiffness");
  pos(kp, "pd_kp");
  pos(kd, "pd_kd");
  pos(torque_limit, "torque_limit");
  pos(ground_stiffness, "ground_stiffness");
  pos(ground_damp_ramp, "ground_damp_ramp");
  if (ground_friction < 0.0) throw std::runtime_error("model: ground_friction must be >= 0");
}

LegKin leg_fk(const RobotModel& m, const Vec9& q, int leg) {
  const int ih = leg == 0 ? Q_HIPL : Q_HIPR;
  const double th = q[Q_TH];
  const double c = std::cos(th), s = std::sin(th);
  LegKin k;
  k.hip = Vec2(q[Q_X] + m.hip_off_x * c - m.hip_off_z * s,
               q[Q_Z] + m.hip_off_x * s + m.hip_off_z * c);
  const double a1 = th + q[ih];            // thigh absolute angle from straight-down
  const double a2 = a1 + q[ih + 1];        // shin
  k.knee = k.hip + m.thigh_len * Vec2(std::sin(a1), -std::cos(a1));
  k.ankle = k.knee + m.shin_len * Vec2(std::sin(a2), -std::cos(a2));
  const double af = a2 + q[ih + 2] + m.foot_mount_rad;  // sole direction
  const Vec2 fwd(std::cos(af), std::sin(af));
  k.toe = k.ankle + m.foot_toe * fwd;
  k.heel = k.ankle - m.foot_heel * fwd;
  return k;
}

void ik_hip_knee(double d, double leg_len, double& hip, double& knee) {
  const double r = std::clamp(d / (2.0 * leg_len), -1.0, 1.0);
  const double beta = std::acos(r);
  hip = -beta;
  knee = 2.0 * beta;
}

Vec4 standing_pose(const RobotModel& m, double pelvis_h) {
  const double d = pelvis_h + m.hip_off_z;  // hip height above the sole plane
  double hip, knee;
  ik_hip_knee(d, m.thigh_len, hip, knee);
  Vec4 p;
  p << hip, knee, hip, knee;
  return p;
}

RobotModel default_model(const Config& cfg) {
  RobotModel m;
  m.pelvis_mass = cfg.sim_pelvis_mass_kg;
  m.thigh_mass = cfg.sim_thigh_mass_kg;
  m.shin_mass = cfg.sim_shin_mass_kg;
  m.foot_mass = cfg.sim_foot_mass_kg;
  m.pelvis_inertia = cfg.sim_pelvis_inertia_kgm2;
  m.thigh_inertia = cfg.sim_thigh_inertia_kgm2;
  m.shin_inertia = cfg.sim_shin_inertia_kgm2;
  m.foot_inertia = cfg.sim_foot_inertia_kgm2;
  m.hip_off_x = cfg.sim_hip_offset_x_m;
  m.hip_off_z = cfg.sim_hip_offset_z_m;
  m.thigh_len = cfg.sim_thigh_len_m;
  m.shin_len = cfg.sim_shin_len_m;
  m.foot_toe = cfg.sim_foot_toe_m;
  m.foot_heel = cfg.sim_foot_heel_m;
  m.root_com_dx = cfg.sim_pelvis_com_dx_m;
  m.root_com_dz = cfg.sim_pelvis_com_dz_m;
  m.leg_com_dx = cfg.sim_leg_com_dx_m;
  m.leg_com_dz = cfg.sim_leg_com_dz_m;
  m.joint_damping = cfg.sim_joint_damping_nms;
  m.spring_stiffness = cfg.sim_spring_stiffness_nm;
  m.spring_damping = cfg.sim_spring_damping_nms;
  m.kp = cfg.sim_kp_nm;
  m.kd = cfg.sim_kd_nms;
  m.torque_limit = cfg.sim_torque_limit_nm;
  m.ground_friction = cfg.sim_ground_friction;
  m.ground_stiffness = cfg.sim_ground_stiffness_npm;
  m.ground_damping = cfg.sim_ground_damping_nspm;
  m.ground_damp_ramp = cfg.sim_ground_damp_ramp_m;
  m.tangent_stiffness = cfg.sim_tangent_stiffness_npm;
  m.tangent_damping = cfg.sim_tangent_damping_nspm;
  m.gravity = cfg.sim_gravity_mps2;
  m.qd_hard_bound = cfg.sim_qd_hard_bound;
  // Sole horizontal when standing at the configured pelvis height.
  const double d = cfg.ref_standing_pelvis_m + m.hip_off_z;
  double hip, knee;
  ik_hip_knee(d, m.thigh_len, hip, knee);
  m.foot_mount_rad = -(hip + knee);  // cancels thigh+shin rotation at stance
  m.validate();
  return m;
}

SensorModel default_sensor(const Config& cfg) {
  SensorModel s;
  s.std_motor_pos = cfg.sim_sensor_motor_pos_std_rad;
  s.std_motor_vel = cfg.sim_sensor_motor_vel_std;
  s.std_gyro = cfg.sim_sensor_gyro_std_rad;
  s.std_linvel = cfg.sim_sensor_linvel_std_mps;
  return s;
}

double pd_torque(double kp, double kd, double q_m, double qd_m, double q_m_des) {
  return kp * (q_m_des - q_m) - kd * qd_m;
}

Vec4 pd_torques(const RobotModel& m, const SimState& s, const Vec4& q_m_des) {
  Vec4 tau;
  for (int i = 0; i < kNumMotors; ++i) {
    const int qi = kMotorIdx[i];
    tau[i] = pd_torque(m.kp, m.kd, s.q[qi], s.qd[qi], q_m_des[i]);
    tau[i] = std::clamp(tau[i], -m.torque_limit, m.torque_limit);
  }
  return tau;
}

namespace {

struct PointGeom {
  Vec2 p;
  Vec2 r_base, r_hip, r_knee, r_ankle;  // lever arms to each upstream pivot
  int hip_idx;
};

// The four contact points with their lever arms, for Jacobian products.
void contact_geometry(const RobotModel& m, const Vec9& q, std::array<PointGeom, 4>& pts,
                      LegKin kin[2]) {
  const Vec2 base(q[Q_X], q[Q_Z]);
  for (int leg = 0; leg < 2; ++leg) {
    kin[leg] = leg_fk(m, q, leg);
    for (int j = 0; j < 2; ++j) {
      PointGeom& g = pts[2 * leg + j];
      g.p = j == 0 ? kin[leg].toe : kin[leg].heel;
      g.r_base = g.p - base;
      g.r_hip = g.p - kin[leg].hip;
      g.r_knee = g.p - kin[leg].knee;
      g.r_ankle = g.p - kin[leg].ankle;
      g.hip_idx = leg == 0 ? Q_HIPL : Q_HIPR;
    }
  }
}

Vec2 point_velocity(const Vec9& qd, const PointGeom& g) {
  // v = J q_dot with columns (1,0), (0,1), perp(r) per upstream angle.
  const double wx = -g.r_base.y() * qd[Q_TH] - g.r_hip.y() * qd[g.hip_idx] -
                    g.r_knee.y() * qd[g.hip_idx + 1] - g.r_ankle.y() * qd[g.hip_idx + 2];
  const double wz = g.r_base.x() * qd[Q_TH] + g.r_hip.x() * qd[g.hip_idx] +
                    g.r_knee.x() * qd[g.hip_idx + 1] + g.r_ankle.x() * qd[g.hip_idx + 2];
  return Vec2(qd[Q_X] + wx, qd[Q_Z] + wz);
}

// Inverse of the effective mass felt at a contact point along each axis,
// 1 / m_eff = J M^-1 J^T for the point-velocity Jacobian row.
Vec2 point_inv_mass(const Vec9& D, const PointGeom& g) {
  const double ix = 1.0 / D[Q_X] + g.r_base.y() * g.r_base.y() / D[Q_TH] +
                    g.r_hip.y() * g.r_hip.y() / D[g.hip_idx] +
                    g.r_knee.y() * g.r_knee.y() / D[g.hip_idx + 1] +
                    g.r_ankle.y() * g.r_ankle.y() / D[g.hip_idx + 2];
  const double iz = 1.0 / D[Q_Z] + g.r_base.x() * g.r_base.x() / D[Q_TH] +
                    g.r_hip.x() * g.r_hip.x() / D[g.hip_idx] +
                    g.r_knee.x() * g.r_knee.x() / D[g.hip_idx + 1] +
                    g.r_ankle.x() * g.r_ankle.x() / D[g.hip_idx + 2];
  return Vec2(ix, iz);
}

// Penalty normal force plus anchored-spring Coulomb friction for one point.
// Mutates the anchor exactly as the stepper does.
void point_contact(const RobotModel& m, const Ground& ground, const Vec2& p, const Vec2& v,
                   const Vec2& inv_mass, double dt, ContactPoint& c) {
  c.p = p;
  c.v = v;
  const double pen = ground.height(p.x()) - p.y();
  if (pen <= 0.0) {
    c.fn = 0.0;
    c.ft = 0.0;
    c.active = false;
    return;
  }
  if (!c.active) {
    c.anchor_x = p.x();
    c.active = true;
  }
  // Damping acts only while the point moves into the ground. One-way damping
  // cannot pull the contact open, so push-off keeps its full spring force, and
  // the depth ramp keeps the force continuous at grazing touchdowns. Both
  // damping coefficients are conditioned implicitly by the effective mass the
  // point feels; an explicit c with c*dt/m_eff > 2 would pump energy whenever
  // the leg folds into a long-lever posture.
  const double ramp = std::min(pen / m.ground_damp_ramp, 1.0);
  double damp = v.y() < 0.0 ? m.ground_damping * ramp : 0.0;
  damp /= 1.0 + damp * dt * inv_mass.y();
  c.fn = std::max(0.0, m.ground_stiffness * pen - damp * v.y());
  const double tdamp = m.tangent_damping / (1.0 + m.tangent_damping * dt * inv_mass.x());
  const double raw = -m.tangent_stiffness * (p.x() - c.anchor_x) - tdamp * v.x();
  const double lim = m.ground_friction * c.fn;
  c.ft = std::clamp(raw, -lim, lim);
  if (raw != c.ft) {
    // Sliding: drag the anchor so the spring deflection alone carries the
    // cone-bound force. Folding the damping term into the anchor would store
    // velocity-dependent energy in the spring.
    c.anchor_x = p.x() + c.ft / m.tangent_stiffness;
  }
}

}  // namespace

void contact_forces(const RobotModel& m, const Ground& g, const SimState& s, double dt,
                    std::array<ContactPoint, 4>& out) {
  std::array<PointGeom, 4> pts;
  LegKin kin[2];
  contact_geometry(m, s.q, pts, kin);
  const Vec9 D = m.inertia_diag();
  out = s.contacts;
  for (int i = 0; i < 4; ++i)
    point_contact(m, g, pts[i].p, point_velocity(s.qd, pts[i]), point_inv_mass(D, pts[i]), dt,
                  out[i]);
}

SimState step_dynamics(const RobotModel& m, const SimState& s, const Vec4& torques, double dt,
                       const Ground& ground, const BaseWrench& wrench) {
  if (!(dt > 0.0)) throw std::runtime_error("sim: dt must be positive");
  if (!s.q.allFinite() || !s.qd.allFinite())
    throw std::runtime_error("sim: non-finite state rejected");
  if (!torques.allFinite()) throw std::runtime_error("sim: non-finite torque rejected");

  SimState n = s;
  Vec9 Q = Vec9::Zero();

  // Base gravity is applied as an acceleration after the force division so an
  // airborne step gives qdd[Q_Z] = -g with no mass round trip; the ballistic
  // velocity law then holds bit-exactly. The CoM pitch moment stays a force.
  const Vec2 r = m.com_offset();
  if (r.x() != 0.0 || r.y() != 0.0) {
    const double c = std::cos(s.q[Q_TH]), sn = std::sin(s.q[Q_TH]);
    Q[Q_TH] -= m.total_mass() * m.gravity * (r.x() * c - r.y() * sn);
  }

  // actuation
  for (int i = 0; i < kNumMotors; ++i) {
    const double tau = std::clamp(torques[i], -m.torque_limit, m.torque_limit);
    Q[kMotorIdx[i]] += tau;
    n.tau_applied[i] = tau;
  }

  // passive joints: leaf-spring stiffness and damping; viscous damping on motors
  for (int leg = 0; leg < 2; ++leg) {
    const int ih = leg == 0 ? Q_HIPL : Q_HIPR;
    Q[ih] -= m.joint_damping * s.qd[ih];
    Q[ih + 1] -= m.joint_damping * s.qd[ih + 1];
    Q[ih + 2] -= m.spring_stiffness * s.q[ih + 2] + m.spring_damping * s.qd[ih + 2];
  }

  // ground contact
  std::array<PointGeom, 4> pts;
  LegKin kin[2];
  contact_geometry(m, s.q, pts, kin);
  const Vec9 Dm = m.inertia_diag();
  for (int i = 0; i < 4; ++i) {
    ContactPoint& c = n.contacts[i];
    point_contact(m, ground, pts[i].p, point_velocity(s.qd, pts[i]), point_inv_mass(Dm, pts[i]),
                  dt, c);
    if (!c.active) continue;
    const PointGeom& g = pts[i];
    Q[Q_X] += c.ft;
    Q[Q_Z] += c.fn;
    Q[Q_TH] += g.r_base.x() * c.fn - g.r_base.y() * c.ft;
    Q[g.hip_idx] += g.r_hip.x() * c.fn - g.r_hip.y() * c.ft;
    Q[g.hip_idx + 1] += g.r_knee.x() * c.fn - g.r_knee.y() * c.ft;
    Q[g.hip_idx + 2] += g.r_ankle.x() * c.fn - g.r_ankle.y() * c.ft;
  }

  // external wrench on the base
  Q[Q_X] += wrench.fx;
  Q[Q_Z] += wrench.fz;
  Q[Q_TH] += wrench.my;

  for (int i = 0; i < Q_N; ++i) {
    double qdd = Q[i] / Dm[i];
    if (i == Q_Z) qdd -= m.gravity;
    n.qdd_last[i] = qdd;
    n.qd[i] = s.qd[i] + dt * qdd;
    n.q[i] = s.q[i] + dt * n.qd[i];
  }
  n.time = s.time + dt;
  n.tick = s.tick + 1;

  for (int i = 0; i < Q_N; ++i) {
    if (!std::isfinite(n.qd[i]) || std::abs(n.qd[i]) > m.qd_hard_bound)
      throw std::runtime_error("sim: simulation diverged (|qd| bound exceeded at coordinate " +
                               std::to_string(i) + ")");
  }
  return n;
}

Eigen::Matrix<double, kObsDim, 1> raw_observation(const SimState& s) {
  Eigen::Matrix<double, kObsDim, 1> o;
  o[0] = s.q[Q_TH];
  for (int i = 0; i < kNumMotors; ++i) o[1 + i] = s.q[kMotorIdx[i]];
  o[5] = s.qd[Q_X];
  o[6] = s.qd[Q_Z];
  for (int i = 0; i < kNumMotors; ++i) o[7 + i] = s.qd[kMotorIdx[i]];
  return o;
}

void DelayBuffer::reset(const Eigen::Matrix<double, kObsDim, 1>& initial) {
  buf_.clear();
  buf_.push_back(initial);
}

void DelayBuffer::push(const Eigen::Matrix<double, kObsDim, 1>& obs) {
  buf_.push_back(obs);
  // 0.025 s of delay at 2 kHz needs 50 past entries; keep a small margin.
  while (buf_.size() > 64) buf_.pop_front();
}

const Eigen::Matrix<double, kObsDim, 1>& DelayBuffer::delayed(int ticks) const {
  const int n = int(buf_.size());
  const int back = std::min(ticks, n - 1);
  return buf_[size_t(n - 1 - back)];
}

Eigen::Matrix<double, kObsDim, 1> observe(const DelayBuffer& buf, const SensorModel& sensor,
                                          double dt, Rng& rng) {
  if (!sensor.enabled) return buf.delayed(0);
  const int ticks = int(sensor.delay_s / dt);
  Eigen::Matrix<double, kObsDim, 1> o = buf.delayed(ticks);
  o[0] += sensor.gyro_bias + rng.normal(0.0, sensor.std_gyro);
  for (int i = 1; i < 5; ++i) o[i] += sensor.motor_pos_bias + rng.normal(0.0, sensor.std_motor_pos);
  o[5] += sensor.linvel_bias + rng.normal(0.0, sensor.std_linvel);
  o[6] += sensor.linvel_bias + rng.normal(0.0, sensor.std_linvel);
  for (int i = 7; i < 11; ++i)
    o[i] += sensor.motor_vel_bias + rng.normal(0.0, sensor.std_motor_vel);
  return o;
}

double mechanical_energy(const RobotModel& m, const Ground& g, const SimState& s) {
  const Vec9 D = m.inertia_diag();
  double e = 0.0;
  for (int i = 0; i < Q_N; ++i) e += 0.5 * D[i] * s.qd[i] * s.qd[i];
  const Vec2 r = m.com_offset();
  const double c = std::cos(s.q[Q_TH]), sn = std::sin(s.q[Q_TH]);
  e += m.total_mass() * m.gravity * (s.q[Q_Z] + r.x() * sn + r.y() * c);
  e += 0.5 * m.spring_stiffness * (s.q[Q_SPRL] * s.q[Q_SPRL] + s.q[Q_SPRR] * s.q[Q_SPRR]);
  for (const ContactPoint& cp : s.contacts) {
    if (!cp.active) continue;
    const double pen = g.height(cp.p.x()) - cp.p.y();
    if (pen > 0.0) e += 0.5 * m.ground_stiffness * pen * pen;
    const double dx = cp.p.x() - cp.anchor_x;
    e += 0.5 * m.tangent_stiffness * dx * dx;
  }
  return e;
}

}  // namespace jump
