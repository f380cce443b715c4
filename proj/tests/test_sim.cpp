#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "jump/sim.hpp"

using namespace jump;

namespace {

SimState airborne_state(double z0, double vx, double vz) {
  SimState s;
  s.q[Q_X] = 0.0;
  s.q[Q_Z] = z0;
  s.qd[Q_X] = vx;
  s.qd[Q_Z] = vz;
  s.q[Q_HIPL] = s.q[Q_HIPR] = 0.2;
  s.q[Q_KNEEL] = s.q[Q_KNEER] = -0.4;
  return s;
}

SimState standing_state(const RobotModel& m, double pelvis_h) {
  SimState s;
  Vec4 pose = standing_pose(m, pelvis_h);
  s.q[Q_Z] = pelvis_h;
  for (int i = 0; i < kNumMotors; ++i) s.q[kMotorIdx[i]] = pose[i];
  return s;
}

}  // namespace

TEST_CASE("airborne stepping obeys the exact ballistic velocity law") {
  Config cfg;
  RobotModel m = default_model(cfg);
  const double g = m.gravity;
  const double z0 = 3.0, vx0 = 0.7, vz0 = 1.3;
  SimState s = airborne_state(z0, vx0, vz0);
  const double dt = cfg.sim_dt_s;
  // Precomputed so the check rounds g*dt separately, exactly as the stepper
  // does; fusing the product into the subtraction would differ by an ulp.
  volatile const double g_dt_v = g * dt;
  const double g_dt = g_dt_v;

  SUBCASE("zero torques: v_z(t+dt) = v_z(t) - g dt, exactly") {
    for (int i = 1; i <= 2000; ++i) {
      const double vz_before = s.qd[Q_Z];
      s = step_dynamics(m, s, Vec4::Zero(), dt);
      if (s.q[Q_Z] < 1.15) break;  // stay clear of the maximum foot reach
      CHECK(s.qd[Q_Z] == vz_before - g_dt);
      CHECK(s.qd[Q_X] == vx0);  // horizontal momentum untouched
      // position is the exact integral of the discrete velocities
      const double n = double(i);
      const double z = z0 + n * vz0 * dt - g * dt * dt * n * (n + 1.0) / 2.0;
      CHECK(s.q[Q_Z] == doctest::Approx(z).epsilon(1e-12));
      CHECK(s.q[Q_X] == doctest::Approx(vx0 * n * dt).epsilon(1e-12));
    }
  }

  SUBCASE("leg motion cannot push on the base without ground contact") {
    s = airborne_state(z0, vx0, vz0);
    for (int i = 1; i <= 2000; ++i) {
      Vec4 tau;
      const double t = i * dt;
      tau << 40.0 * std::sin(20.0 * t), -30.0 * std::cos(15.0 * t), 25.0 * std::sin(10.0 * t),
          35.0 * std::cos(25.0 * t);
      const double vz_before = s.qd[Q_Z];
      s = step_dynamics(m, s, tau, dt);
      if (s.q[Q_Z] < 1.15) break;
      CHECK(s.qd[Q_Z] == vz_before - g_dt);
      CHECK(s.qd[Q_X] == doctest::Approx(vx0).epsilon(1e-9));
    }
  }
}

TEST_CASE("contact forces respect unilaterality and the friction cone") {
  Config cfg;
  RobotModel m = default_model(cfg);
  const double mu = m.ground_friction;
  SimState s = standing_state(m, 0.88);
  Vec4 hold = standing_pose(m, 0.88);
  const double dt = cfg.sim_dt_s;

  int active_samples = 0;
  for (int i = 0; i < 100000; ++i) {
    const double t = i * dt;
    // Crouch-bounce sweep plus a horizontal shove tries to push contacts
    // toward slipping.
    Vec4 target = standing_pose(m, 0.88 - 0.12 * std::abs(std::sin(3.0 * t)));
    BaseWrench w;
    w.fx = 120.0 * std::sin(1.7 * t);
    Vec4 tau = pd_torques(m, s, target);
    s = step_dynamics(m, s, tau, dt, Ground{}, w);
    for (const ContactPoint& c : s.contacts) {
      CHECK(c.fn >= 0.0);
      if (c.active) {
        ++active_samples;
        CHECK(std::abs(c.ft) <= mu * c.fn + 1e-9);
      } else {
        CHECK(c.fn == 0.0);
        CHECK(c.ft == 0.0);
      }
    }
    (void)hold;
  }
  CHECK(active_samples > 100000);  // the sweep actually exercised contact
}

TEST_CASE("standing hold balances the contact forces against the robot weight") {
  Config cfg;
  RobotModel m = default_model(cfg);
  const double h = cfg.ref_standing_pelvis_m;
  SimState s = standing_state(m, h);
  Vec4 target = standing_pose(m, h);
  const double dt = cfg.sim_dt_s;
  double fn_sum = 0.0;
  int n = 0;
  while (s.time < 1.2) {
    s = step_dynamics(m, s, pd_torques(m, s, target), dt);
    if (s.time > 0.3) {
      fn_sum += s.total_fn();
      ++n;
      CHECK(s.in_contact(0));
      CHECK(s.in_contact(1));
    }
  }
  const double weight = m.total_mass() * m.gravity;
  CHECK(fn_sum / n == doctest::Approx(weight).epsilon(0.02));
  CHECK(std::abs(s.q[Q_Z] - h) < 0.05 * h);
  // Open-loop PD standing is only metastable in this model (active balance is
  // the policy's job); the pitch may drift but must not have toppled yet.
  CHECK(std::abs(s.q[Q_TH]) < 0.25);
}

TEST_CASE("passive trajectories do not gain mechanical energy") {
  Config cfg;
  RobotModel m = default_model(cfg);
  Ground g;
  SimState s = standing_state(m, 0.95);
  s.q[Q_Z] = 1.2;  // drop onto the ground
  s.qd[Q_X] = 0.4;
  const double dt = cfg.sim_dt_s;
  const double e0 = mechanical_energy(m, g, s);
  const double scale = std::max(1.0, std::abs(e0));
  // Semi-implicit Euler rings at the contact frequency, so raw per-step energy
  // is not monotone; windows average the ringing out. The per-step tolerance
  // accumulates as 1e-6 relative per step across a window.
  const int kWindow = 2000;
  double prev_mean = std::numeric_limits<double>::infinity();
  double mean_acc = 0.0;
  double e_last = e0;
  int n = 0;
  int windows = 0;
  for (int i = 0; i < 20000; ++i) {
    s = step_dynamics(m, s, Vec4::Zero(), dt, g);
    e_last = mechanical_energy(m, g, s);
    CHECK(e_last <= e0 + 0.02 * scale);  // ringing stays bounded, no blow-up
    mean_acc += e_last;
    if (++n == kWindow) {
      const double mean = mean_acc / kWindow;
      CHECK(mean <= prev_mean + kWindow * 1e-6 * scale);
      prev_mean = mean;
      mean_acc = 0.0;
      n = 0;
      ++windows;
    }
  }
  CHECK(windows == 10);
  CHECK(e_last < e0);  // damping actually dissipated something
}

TEST_CASE("inverse kinematics round-trips through forward kinematics") {
  Config cfg;
  RobotModel m = default_model(cfg);
  for (double d : {0.55, 0.65, 0.75, 0.85, 0.89}) {
    double hip = 0.0, knee = 0.0;
    ik_hip_knee(d, m.thigh_len, hip, knee);
    CHECK(knee >= 0.0);  // flexion-positive branch
    Vec9 q = Vec9::Zero();
    q[Q_Z] = 1.5;
    q[Q_HIPL] = hip;
    q[Q_KNEEL] = knee;
    LegKin k = leg_fk(m, q, 0);
    const double got = (k.hip - k.ankle).norm();
    CHECK(got == doctest::Approx(d).epsilon(1e-10));
    CHECK(k.ankle.x() == doctest::Approx(k.hip.x()).epsilon(1e-10));
  }
}

TEST_CASE("standing pose puts the feet on the ground at the commanded height") {
  Config cfg;
  RobotModel m = default_model(cfg);
  // The foot mount angle levels the sole at the configured standing height;
  // at other heights the ankle still lands on the ground but the sole tilts.
  for (double h : {0.8, 0.9, 1.0}) {
    SimState s = standing_state(m, h);
    for (int leg = 0; leg < 2; ++leg) {
      LegKin k = leg_fk(m, s.q, leg);
      CHECK(k.ankle.y() == doctest::Approx(0.0).epsilon(1e-9));
    }
  }
  SimState s = standing_state(m, cfg.ref_standing_pelvis_m);
  for (int leg = 0; leg < 2; ++leg) {
    LegKin k = leg_fk(m, s.q, leg);
    CHECK(s.foot_z(leg) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(k.toe.y() - k.heel.y()) < 1e-9);  // sole horizontal
  }
}

TEST_CASE("step_dynamics rejects non-finite input and diverged states") {
  Config cfg;
  RobotModel m = default_model(cfg);
  SimState s = airborne_state(2.0, 0.0, 0.0);
  Vec4 bad = Vec4::Zero();
  bad[1] = std::nan("");
  CHECK_THROWS_AS(step_dynamics(m, s, bad, cfg.sim_dt_s), std::runtime_error);

  SimState nan_state = s;
  nan_state.q[Q_Z] = std::nan("");
  CHECK_THROWS_AS(step_dynamics(m, nan_state, Vec4::Zero(), cfg.sim_dt_s), std::runtime_error);

  SimState fast = s;
  fast.qd[Q_X] = 2.0 * m.qd_hard_bound;
  CHECK_THROWS_AS(step_dynamics(m, fast, Vec4::Zero(), cfg.sim_dt_s), std::runtime_error);
}

TEST_CASE("model validation rejects non-physical parameters") {
  Config cfg;
  RobotModel m = default_model(cfg);
  CHECK_NOTHROW(m.validate());
  RobotModel bad = m;
  bad.pelvis_mass = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  bad = m;
  bad.thigh_len = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
  bad = m;
  bad.ground_friction = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
}

TEST_CASE("delay buffer returns clamped history") {
  DelayBuffer buf;
  Eigen::Matrix<double, kObsDim, 1> v = Eigen::Matrix<double, kObsDim, 1>::Zero();
  buf.reset(v);
  for (int i = 1; i <= 5; ++i) {
    v.setConstant(double(i));
    buf.push(v);
  }
  CHECK(buf.delayed(0)[0] == 5.0);
  CHECK(buf.delayed(2)[0] == 3.0);
  CHECK(buf.delayed(100)[0] == 0.0);  // clamps to the oldest entry
}

TEST_CASE("sensor pipeline is the identity when disabled and biased when not") {
  Config cfg;
  DelayBuffer buf;
  Eigen::Matrix<double, kObsDim, 1> v;
  for (int i = 0; i < kObsDim; ++i) v[i] = 0.1 * i;
  buf.reset(v);
  for (int k = 1; k <= 60; ++k) {
    auto w = v;
    w.array() += k * 0.01;
    buf.push(w);
  }

  SensorModel off;
  off.enabled = false;
  Rng rng(3);
  auto got = observe(buf, off, cfg.sim_dt_s, rng);
  CHECK((got - buf.delayed(0)).norm() == 0.0);

  SensorModel on;
  on.enabled = true;
  on.delay_s = 10 * cfg.sim_dt_s;
  on.motor_pos_bias = 0.05;
  on.std_motor_pos = on.std_motor_vel = on.std_gyro = on.std_linvel = 0.0;
  auto exp = buf.delayed(10);
  auto sensed = observe(buf, on, cfg.sim_dt_s, rng);
  for (int i = 1; i <= 4; ++i) CHECK(sensed[i] == doctest::Approx(exp[i] + 0.05).epsilon(1e-12));
  CHECK(sensed[0] == exp[0]);  // pitch channel has its own bias knob
}

TEST_CASE("stepping is bit-deterministic") {
  Config cfg;
  RobotModel m = default_model(cfg);
  auto run = [&] {
    SimState s = standing_state(m, 0.9);
    Vec4 target = standing_pose(m, 0.85);
    for (int i = 0; i < 5000; ++i) s = step_dynamics(m, s, pd_torques(m, s, target), cfg.sim_dt_s);
    return s;
  };
  SimState a = run(), b = run();
  CHECK((a.q - b.q).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.qd - b.qd).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.tick == b.tick);
}
