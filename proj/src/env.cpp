#include "jump/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jump {

const char* term_name(Term t) {
  switch (t) {
    case Term::none: return "none";
    case Term::fall: return "fall";
    case Term::foot_bound: return "foot_bound";
    case Term::task_bound: return "task_bound";
    case Term::timeout: return "timeout";
  }
  return "?";
}

EpisodeConfig episode_config(const Config& cfg, int stage, Mode mode) {
  if (stage < 1 || stage > 3) throw std::runtime_error("episode: stage must be 1, 2, or 3");
  EpisodeConfig ec;
  ec.stage = stage;
  ec.mode = mode;
  ec.policy_dt = cfg.sim_dt_s * cfg.sim_substeps;
  ec.fall_height = cfg.ep_fall_height_m;
  if (stage == 1) {
    ec.max_steps = cfg.ep_s1_max_steps;
    ec.ee = cfg.ep_s1_ee_m;
    ec.et_pos = cfg.ep_s1_et_pos_m;
    ec.et_ang = cfg.ep_s1_et_ang_rad;
  } else {
    ec.max_steps = cfg.ep_s23_max_steps;
    ec.ee = cfg.ep_s23_ee_m;
    ec.et_pos = cfg.ep_s23_et_pos_m;
    ec.et_ang = cfg.ep_s23_et_ang_rad;
  }
  ec.task_grace_s = cfg.ep_task_grace_s;
  ec.goal_cx[0] = cfg.ep_goal_cx_lo_m;
  ec.goal_cx[1] = cfg.ep_goal_cx_hi_m;
  ec.goal_cz[0] = cfg.ep_goal_cz_lo_m;
  ec.goal_cz[1] = cfg.ep_goal_cz_hi_m;
  ec.stand[0] = cfg.ep_stand_lo_s;
  ec.stand[1] = cfg.ep_stand_hi_s;
  ec.first_stand[0] = cfg.ep_first_stand_lo_s;
  ec.first_stand[1] = cfg.ep_first_stand_hi_s;
  ec.settle_delay_s = cfg.ep_settle_delay_s;
  ec.lpf_beta = cfg.ep_lpf_beta;
  ec.elevation_blend = cfg.ep_elevation_blend;
  ec.platform_min_edge = cfg.ep_platform_min_edge_m;
  ec.platform_min_cx = cfg.ep_platform_min_cx_m;
  return ec;
}

const char* mode_name(Mode m) { return m == Mode::flat ? "flat" : "terrain"; }

Mode parse_mode(const std::string& s) {
  if (s == "flat") return Mode::flat;
  if (s == "terrain") return Mode::terrain;
  throw std::runtime_error("unknown mode '" + s + "' (expected flat or terrain)");
}

Goal sample_goal(const EpisodeConfig& ec, Rng& rng) {
  Goal g;
  if (ec.stage == 1) return g;
  g.cx = rng.uniform(ec.goal_cx[0], ec.goal_cx[1]);
  if (ec.mode == Mode::terrain && std::abs(g.cx) >= ec.platform_min_cx)
    g.cz = rng.uniform(ec.goal_cz[0], ec.goal_cz[1]);
  return g;
}

JumpEnv::JumpEnv(const Config& cfg, int stage, Mode mode)
    : cfg_(cfg),
      ec_(episode_config(cfg, stage, mode)),
      base_model_(default_model(cfg)),
      base_sensor_(default_sensor(cfg)),
      ref_(build_jump_in_place(cfg, base_model_)),
      ranges_(randomization_ranges(cfg)),
      weights_(reward_weights(cfg)),
      perturb_on_(cfg.env_perturbation && stage == 3) {}

void JumpEnv::set_forced_pulse(double start_s, double dur_s, const BaseWrench& w) {
  forced_pulse_ = true;
  forced_pulse_start_ = start_s;
  forced_pulse_dur_ = dur_s;
  forced_pulse_wrench_ = w;
}

void JumpEnv::anchor_here() {
  anchor_x_ = s_.q[Q_X];
  anchor_ground_ = ground_.height(anchor_x_);
}

void JumpEnv::configure_ground_for(const Goal& g) {
  const double here = ground_.height(s_.q[Q_X]);
  ground_ = Ground{};
  ground_.base_h = here;
  if (ec_.mode == Mode::terrain && g.cz != 0.0) {
    const int dir = g.cx >= 0.0 ? 1 : -1;
    ground_.step_h = g.cz;
    ground_.edge_x = anchor_x_ + dir * std::max(ec_.platform_min_edge, std::abs(g.cx) * 0.5);
    ground_.dir = dir;
  }
  anchor_ground_ = ground_.height(anchor_x_);
}

void JumpEnv::begin_jump() {
  anchor_here();
  goal_ = has_forced_goal_ ? forced_goal_ : sample_goal(ec_, rng_goal_);
  configure_ground_for(goal_);
  standing_ = false;
  ref_step_ = 0;
  crossed_tj_ = false;
  grace_until_ = 0.0;
  ++jumps_started_;
}

void JumpEnv::begin_standing(double lo_s, double hi_s) {
  anchor_here();
  goal_ = Goal{};
  standing_ = true;
  ref_step_ = std::max(ref_step_, ref_.samples());
  crossed_tj_ = true;
  if (single_jump_ && jumps_started_ > 0) {
    stand_left_ = 1 << 30;
  } else {
    const double dur = single_jump_ ? lo_s : rng_goal_.uniform(lo_s, hi_s);
    stand_left_ = std::max(1, int(std::lround(dur / ec_.policy_dt)));
  }
}

void JumpEnv::schedule_next_pulse() {
  const double gap = rng_perturb_.uniform(cfg_.rand_perturb_gap_lo_s, cfg_.rand_perturb_gap_hi_s);
  next_pulse_step_ = steps_ + std::max(1, int(std::lround(gap / ec_.policy_dt)));
}

Observation JumpEnv::reset(uint64_t master_seed, int worker, uint64_t episode) {
  rng_init_ = Rng::stream(master_seed, uint64_t(worker), episode, 0);
  rng_goal_ = Rng::stream(master_seed, uint64_t(worker), episode, 1);
  rng_sensor_ = Rng::stream(master_seed, uint64_t(worker), episode, 2);
  rng_dyn_ = Rng::stream(master_seed, uint64_t(worker), episode, 3);
  rng_perturb_ = Rng::stream(master_seed, uint64_t(worker), episode, 4);

  dyn_ = sample_dynamics(ranges_, base_model_, base_sensor_, ec_.stage, rng_dyn_);
  dyn_.model.root_com_dx += com_dx_;
  dyn_.model.root_com_dz += com_dz_;
  dyn_.model.leg_com_dx += com_dx_;
  dyn_.model.leg_com_dz += com_dz_;

  ground_ = Ground{};

  s_ = SimState{};
  Vec4 motors = ref_.standing_motors;
  for (int j = 0; j < kNumMotors; ++j)
    motors[j] += rng_init_.uniform(-cfg_.ep_init_joint_noise_rad, cfg_.ep_init_joint_noise_rad);
  s_.q.setZero();
  for (int j = 0; j < kNumMotors; ++j) s_.q[kMotorIdx[j]] = motors[j];
  // Drop the pelvis until the lowest sole point touches the ground, then back
  // off by a small sampled clearance so episodes never start in penetration.
  s_.q[Q_Z] = ref_.standing_pelvis;
  double lowest = 1e9;
  for (int leg = 0; leg < 2; ++leg) {
    const LegKin k = leg_fk(dyn_.model, s_.q, leg);
    lowest = std::min(lowest, std::min(k.toe.y(), k.heel.y()));
  }
  s_.q[Q_Z] += ground_.height(s_.q[Q_X]) - lowest +
               rng_init_.uniform(0.0, cfg_.ep_init_height_noise_m);
  s_.qd.setZero();
  for (int j = 0; j < kNumMotors; ++j)
    s_.qd[kMotorIdx[j]] = rng_init_.uniform(-cfg_.ep_init_vel_noise, cfg_.ep_init_vel_noise);
  contact_forces(dyn_.model, ground_, s_, cfg_.sim_dt_s, s_.contacts);

  delay_.reset(raw_observation(s_));
  sensed_ = observe(delay_, dyn_.sensor, cfg_.sim_dt_s, rng_sensor_);

  for (int j = 0; j < kNumMotors; ++j) lpf_[j] = s_.q[kMotorIdx[j]];
  prev_action_.setZero();
  prev_qd_m_.setZero();
  for (int j = 0; j < kNumMotors; ++j) prev_qd_m_[j] = s_.qd[kMotorIdx[j]];

  Eigen::Matrix<double, kPairDim, 1> pad;
  pad << sensed_, Vec4::Zero();
  for (int k = 0; k < kLongHist; ++k) ring_[k] = pad;
  ring_head_ = 0;
  hist_count_ = 0;

  steps_ = 0;
  term_ = Term::none;
  jumps_started_ = 0;
  airborne_ = false;
  last_flight_s_ = 0.0;
  last_flight_dx_ = 0.0;
  max_flight_s_ = 0.0;
  last_touchdown_ = 0.0;

  pulse_active_ = false;
  next_pulse_step_ = -1;
  if (forced_pulse_) {
    next_pulse_step_ = std::max(0, int(std::lround(forced_pulse_start_ / ec_.policy_dt)));
  } else if (perturb_on_) {
    schedule_next_pulse();
  }

  if (ec_.stage == 1) {
    begin_jump();
  } else {
    standing_ = true;
    anchor_here();
    goal_ = Goal{};
    ref_step_ = ref_.samples();
    crossed_tj_ = true;
    grace_until_ = 0.0;
    if (single_jump_) {
      stand_left_ = std::max(1, int(std::lround(ec_.first_stand[0] / ec_.policy_dt)));
    } else {
      const double dur = rng_goal_.uniform(ec_.first_stand[0], ec_.first_stand[1]);
      stand_left_ = std::max(1, int(std::lround(dur / ec_.policy_dt)));
    }
  }
  return assemble();
}

double JumpEnv::elevation_sigma() const {
  if (!ec_.elevation_blend) return 1.0;
  const double t = jump_clock();
  const double t_lo = ref_.t_apex_s - ref_.t_air_s;
  const double t_td = ref_.t_apex_s + ref_.t_air_s;
  if (t <= t_lo) return 0.0;
  if (t >= t_td) return 1.0;
  return (t - t_lo) / (t_td - t_lo);
}

void JumpEnv::push_pair(const Eigen::Matrix<double, kObsDim, 1>& qo, const Vec4& action) {
  ring_[ring_head_] << qo, action;
  ring_head_ = (ring_head_ + 1) % kLongHist;
  if (hist_count_ < kLongHist) ++hist_count_;
}

Observation JumpEnv::assemble() const {
  Observation o;
  o.goal << goal_.cx, goal_.cy, goal_.cz, goal_.cphi;
  o.preview = ref_.preview(ref_step_);
  for (int k = 0; k < kLongHist; ++k)
    o.long_hist.segment<kPairDim>(k * kPairDim) = ring_[(ring_head_ + k) % kLongHist];
  o.short_hist = o.long_hist.tail<kShortDim>();

  o.value_obs[0] = local_x();
  o.value_obs[1] = local_z();
  for (int i = 2; i < 9; ++i) o.value_obs[i] = s_.q[i];
  for (int i = 0; i < 9; ++i) o.value_obs[9 + i] = s_.qd[i];
  o.value_obs.segment<kGoalDim>(18) = o.goal;
  o.value_obs.segment<kPrivDim>(22) = dyn_.normalized(ranges_);
  o.value_obs[37] = std::min(jump_clock() / ref_.tj_s, 2.0);
  o.value_obs[38] = standing_ ? 1.0 : 0.0;
  o.value_obs[39] = double(steps_) / double(ec_.max_steps);
  return o;
}

Term JumpEnv::check_termination() const {
  const double ground_below = ground_.height(s_.q[Q_X]);
  if (s_.q[Q_Z] - ground_below < ec_.fall_height) return Term::fall;
  for (int leg = 0; leg < 2; ++leg) {
    const LegKin k = leg_fk(dyn_.model, s_.q, leg);
    if (k.knee.y() <= ground_.height(k.knee.x())) return Term::fall;
  }
  if (!fall_only_) {
    if (!standing_ && jump_clock() <= ref_.tj_s) {
      const double sig = elevation_sigma();
      for (int leg = 0; leg < 2; ++leg) {
        const double target = ref_.foot_at(ref_step_) + goal_.cz * sig;
        const double foot = s_.foot_z(leg) - anchor_ground_;
        if (std::abs(foot - target) > ec_.ee) return Term::foot_bound;
      }
    }
    if (crossed_tj_ && s_.time >= grace_until_) {
      if (std::abs(local_x() - goal_.cx) > ec_.et_pos) return Term::task_bound;
      if (std::abs(s_.q[Q_TH] - goal_.cphi) > ec_.et_ang) return Term::task_bound;
    }
  }
  if (steps_ + 1 >= ec_.max_steps) return Term::timeout;
  return Term::none;
}

void JumpEnv::update_flight_tracking(StepEvents& ev) {
  const bool contact = s_.in_contact(0) || s_.in_contact(1);
  if (!airborne_ && !contact) {
    airborne_ = true;
    flight_start_ = s_.time;
    takeoff_x_ = s_.q[Q_X];
    ev.takeoff = true;
  } else if (airborne_ && contact) {
    airborne_ = false;
    last_flight_s_ = s_.time - flight_start_;
    last_flight_dx_ = s_.q[Q_X] - takeoff_x_;
    max_flight_s_ = std::max(max_flight_s_, last_flight_s_);
    last_touchdown_ = s_.time;
    grace_until_ = std::max(grace_until_, s_.time + ec_.task_grace_s);
    ev.touchdown = true;
  }
}

StepResult JumpEnv::step(const Vec4& action, const Vec4& motor_target) {
  if (term_ != Term::none) throw std::runtime_error("env: step on a terminated episode");
  if (!action.allFinite() || !motor_target.allFinite())
    throw std::runtime_error("env: non-finite action");

  StepResult out;

  if (pulse_active_ && steps_ >= pulse_end_step_) {
    pulse_active_ = false;
    if (perturb_on_ && !forced_pulse_) schedule_next_pulse();
  }
  if (!pulse_active_ && next_pulse_step_ >= 0 && steps_ >= next_pulse_step_) {
    pulse_active_ = true;
    next_pulse_step_ = -1;
    double dur;
    if (forced_pulse_) {
      pulse_wrench_ = forced_pulse_wrench_;
      dur = forced_pulse_dur_;
    } else {
      pulse_wrench_.fx = rng_perturb_.uniform(-ranges_.perturb_force, ranges_.perturb_force);
      pulse_wrench_.fz = rng_perturb_.uniform(-ranges_.perturb_force, ranges_.perturb_force);
      pulse_wrench_.my = rng_perturb_.uniform(-ranges_.perturb_moment, ranges_.perturb_moment);
      dur = rng_perturb_.uniform(ranges_.perturb_dur[0], ranges_.perturb_dur[1]);
    }
    pulse_end_step_ = steps_ + std::max(1, int(std::lround(dur / ec_.policy_dt)));
  }
  BaseWrench wrench = const_wrench_;
  if (pulse_active_) {
    wrench.fx += pulse_wrench_.fx;
    wrench.fz += pulse_wrench_.fz;
    wrench.my += pulse_wrench_.my;
  }

  lpf_ = ec_.lpf_beta * lpf_ + (1.0 - ec_.lpf_beta) * motor_target;

  for (int i = 0; i < cfg_.sim_substeps; ++i) {
    const Vec4 tau = pd_torques(dyn_.model, s_, lpf_);
    s_ = step_dynamics(dyn_.model, s_, tau, cfg_.sim_dt_s, ground_, wrench);
    delay_.push(raw_observation(s_));
  }
  sensed_ = observe(delay_, dyn_.sensor, cfg_.sim_dt_s, rng_sensor_);

  ++ref_step_;
  if (!standing_ && !crossed_tj_ && jump_clock() > ref_.tj_s) {
    crossed_tj_ = true;
    grace_until_ = std::max(grace_until_, s_.time + ec_.task_grace_s);
  }
  update_flight_tracking(out.events);

  RewardInputs in;
  for (int j = 0; j < kNumMotors; ++j) {
    in.q_m[j] = s_.q[kMotorIdx[j]];
    in.qd_m[j] = s_.qd[kMotorIdx[j]];
  }
  in.tau = s_.tau_applied;
  in.qdd_m = (in.qd_m - prev_qd_m_) / ec_.policy_dt;
  in.pelvis_x = local_x();
  in.pelvis_z = local_z();
  in.vx = s_.qd[Q_X];
  in.pitch = s_.q[Q_TH];
  in.pitch_rate = s_.qd[Q_TH];
  in.foot_z[0] = s_.foot_z(0) - anchor_ground_;
  in.foot_z[1] = s_.foot_z(1) - anchor_ground_;
  in.fz_total = s_.total_fn();
  in.action = action;
  // No action precedes the first step, so the change-of-action term reads 1.
  in.prev_action = steps_ == 0 ? action : prev_action_;
  in.ref_step = ref_step_;
  in.jump_clock_s = jump_clock();
  in.elevation_sigma = elevation_sigma();
  out.breakdown = compute_reward(in, ref_, goal_, ec_.stage, weights_);
  out.reward = out.breakdown.total;

  term_ = check_termination();

  if (term_ == Term::none) {
    if (!standing_) {
      if (jump_clock() >= ref_.tj_s + ec_.settle_delay_s && s_.in_contact(0) &&
          s_.in_contact(1)) {
        begin_standing(ec_.stand[0], ec_.stand[1]);
        out.events.settled = true;
      }
    } else if (--stand_left_ <= 0) {
      begin_jump();
      out.events.jump_started = true;
    }
  }

  push_pair(sensed_, action);
  prev_action_ = action;
  prev_qd_m_ = in.qd_m;
  ++steps_;

  out.term = term_;
  out.truncated = term_ == Term::timeout;
  out.done = term_ != Term::none && !out.truncated;
  out.obs = assemble();
  return out;
}

}  // namespace jump
