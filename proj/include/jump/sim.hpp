#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>

#include "jump/config.hpp"
#include "jump/rng.hpp"

namespace jump {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using VecX = Eigen::VectorXd;

// Generalized coordinate layout.
enum QIdx { Q_X = 0, Q_Z, Q_TH, Q_HIPL, Q_KNEEL, Q_SPRL, Q_HIPR, Q_KNEER, Q_SPRR, Q_N };
// Actuated joints within q: hips and knees of both legs.
constexpr int kMotorIdx[4] = {Q_HIPL, Q_KNEEL, Q_HIPR, Q_KNEER};
constexpr int kNumMotors = 4;
constexpr int kObsDim = 11;  // [pitch, q_m(4), vx, vz, qd_m(4)]

// Planar spring-legged biped.
//
// The generalized inertia is diagonal: the base carries the total mass and the
// aggregate pitch inertia, each joint coordinate carries its distal link's
// inertia. Couplings between base and legs enter exclusively through contact
// Jacobians and the aggregate-CoM gravity moment, not through off-diagonal
// mass terms. This keeps flight-phase ballistics and momentum conservation
// exact (machine precision) while preserving the mechanisms that matter for
// jumping: underactuation in flight, spring energy storage, impact transients,
// and the base being controllable only through ground reaction forces.
struct RobotModel {
  double pelvis_mass = 17.0, thigh_mass = 4.0, shin_mass = 2.5, foot_mass = 0.5;
  double pelvis_inertia = 0.35, thigh_inertia = 0.15, shin_inertia = 0.08, foot_inertia = 0.02;
  double hip_off_x = 0.0, hip_off_z = -0.1;
  double thigh_len = 0.45, shin_len = 0.45;
  double foot_toe = 0.09, foot_heel = 0.05;
  double foot_mount_rad = 0.0;  // makes the sole horizontal in the default stance
  // CoM offsets in the base frame: root applies to the pelvis link, leg to the
  // six leg links; the gravity pitch moment uses their mass-weighted sum.
  double root_com_dx = 0.0, root_com_dz = 0.0;
  double leg_com_dx = 0.0, leg_com_dz = 0.0;
  double joint_damping = 1.0;
  double spring_stiffness = 1250.0, spring_damping = 2.0;
  double kp = 600.0, kd = 4.0;
  double torque_limit = 140.0;
  double ground_friction = 0.8;
  double ground_stiffness = 2e5, ground_damping = 4000.0;
  double ground_damp_ramp = 0.001;  // penetration depth over which damping fades in
  double tangent_stiffness = 1e4, tangent_damping = 100.0;
  double gravity = 9.81;
  double qd_hard_bound = 1e3;

  double total_mass() const { return pelvis_mass + 2.0 * (thigh_mass + shin_mass + foot_mass); }
  double leg_mass() const { return 2.0 * (thigh_mass + shin_mass + foot_mass); }
  // Aggregate CoM offset from the base origin, in the base frame.
  Vec2 com_offset() const {
    double m = total_mass();
    return Vec2((pelvis_mass * root_com_dx + leg_mass() * leg_com_dx) / m,
                (pelvis_mass * root_com_dz + leg_mass() * leg_com_dz) / m);
  }
  Vec9 inertia_diag() const {
    Vec9 d;
    d << total_mass(), total_mass(), pelvis_inertia, thigh_inertia, shin_inertia, foot_inertia,
        thigh_inertia, shin_inertia, foot_inertia;
    return d;
  }
  void validate() const;  // throws on non-physical parameters
};

struct SensorModel {
  bool enabled = false;  // false: exact ground-truth observations, no delay
  double motor_pos_bias = 0.0;
  double motor_vel_bias = 0.0;
  double gyro_bias = 0.0;
  double linvel_bias = 0.0;
  double delay_s = 0.0;
  double std_motor_pos = 0.001;
  double std_motor_vel = 0.01;
  double std_gyro = 0.001;
  double std_linvel = 0.02;
};

// Piecewise-constant ground height with at most one step edge.
struct Ground {
  double base_h = 0.0;
  double step_h = 0.0;
  double edge_x = 0.0;
  int dir = 0;  // 0: flat, +1: step region is x >= edge_x, -1: x <= edge_x
  double height(double x) const {
    if (dir > 0 && x >= edge_x) return base_h + step_h;
    if (dir < 0 && x <= edge_x) return base_h + step_h;
    return base_h;
  }
};

// External wrench on the base (world frame force + pitch moment).
struct BaseWrench {
  double fx = 0.0, fz = 0.0, my = 0.0;
};

struct ContactPoint {
  Vec2 p = Vec2::Zero();   // world position
  Vec2 v = Vec2::Zero();   // world velocity
  double fn = 0.0;         // normal (vertical) force
  double ft = 0.0;         // tangential (horizontal) force
  double anchor_x = 0.0;   // friction anchor, valid while active
  bool active = false;
};

struct SimState {
  Vec9 q = Vec9::Zero();
  Vec9 qd = Vec9::Zero();
  Vec9 qdd_last = Vec9::Zero();
  double time = 0.0;
  uint64_t tick = 0;
  // contact points: 0 toeL, 1 heelL, 2 toeR, 3 heelR
  std::array<ContactPoint, 4> contacts;
  Vec4 tau_applied = Vec4::Zero();  // clamped torques of the last substep

  double foot_z(int leg) const {  // lower of toe/heel, world frame
    return std::min(contacts[2 * leg].p.y(), contacts[2 * leg + 1].p.y());
  }
  double foot_fn(int leg) const { return contacts[2 * leg].fn + contacts[2 * leg + 1].fn; }
  double total_fn() const { return foot_fn(0) + foot_fn(1); }
  bool in_contact(int leg) const {
    return contacts[2 * leg].active || contacts[2 * leg + 1].active;
  }
};

// Forward kinematics of one leg (leg 0 = left, 1 = right; identical geometry).
struct LegKin {
  Vec2 hip, knee, ankle, toe, heel;
};
LegKin leg_fk(const RobotModel& m, const Vec9& q, int leg);

// Knee-backward planar inverse kinematics: hip-to-ankle distance d maps to
// (hip, knee) angles with the ankle directly below the hip.
void ik_hip_knee(double d, double leg_len, double& hip, double& knee);
// Motor target vector [hipL kneeL hipR kneeR] for standing at a pelvis height.
Vec4 standing_pose(const RobotModel& m, double pelvis_h);

RobotModel default_model(const Config& cfg);
SensorModel default_sensor(const Config& cfg);

double pd_torque(double kp, double kd, double q_m, double qd_m, double q_m_des);
Vec4 pd_torques(const RobotModel& m, const SimState& s, const Vec4& q_m_des);

// Contact forces for the current state without advancing it. Uses (and does
// not modify) the anchors stored in the state. dt is the step the damping
// conditioning assumes, normally the same value later passed to step_dynamics.
void contact_forces(const RobotModel& m, const Ground& g, const SimState& s, double dt,
                    std::array<ContactPoint, 4>& out);

// One semi-implicit Euler step. Torques are clamped to the model's limit.
// Throws on non-finite input and on divergence (|qd| beyond the hard bound).
SimState step_dynamics(const RobotModel& m, const SimState& s, const Vec4& torques, double dt,
                       const Ground& g = Ground{}, const BaseWrench& wrench = BaseWrench{});

// Proprioceptive channels: [pitch, motor pos, base vx, vz, motor vel].
Eigen::Matrix<double, kObsDim, 1> raw_observation(const SimState& s);

// Ring buffer of raw observations at the low-level rate, for sensor delay.
class DelayBuffer {
 public:
  void reset(const Eigen::Matrix<double, kObsDim, 1>& initial);
  void push(const Eigen::Matrix<double, kObsDim, 1>& obs);
  // Observation from `ticks` low-level steps ago (clamped to oldest held).
  const Eigen::Matrix<double, kObsDim, 1>& delayed(int ticks) const;
  size_t size() const { return buf_.size(); }

 private:
  std::deque<Eigen::Matrix<double, kObsDim, 1>> buf_;
};

// Sensor pipeline: delayed raw observation + per-episode bias + Gaussian
// jitter. With sensor.enabled == false this is the identity on the newest raw
// observation.
Eigen::Matrix<double, kObsDim, 1> observe(const DelayBuffer& buf, const SensorModel& sensor,
                                          double dt, Rng& rng);

// Total mechanical energy of the model system: kinetic + gravitational +
// joint-spring + contact-spring (normal and tangential) storage. Passive
// trajectories never increase it.
double mechanical_energy(const RobotModel& m, const Ground& g, const SimState& s);

}  // namespace jump
