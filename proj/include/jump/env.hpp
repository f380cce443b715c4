#pragma once

#include <cstdint>

#include "jump/randomize.hpp"
#include "jump/reference.hpp"
#include "jump/reward.hpp"

namespace jump {

constexpr int kActionDim = 4;
constexpr int kPairDim = kObsDim + kActionDim;  // (q^o, a) history entry, 15
constexpr int kShortHist = 4;                   // policy steps, ~0.12 s
constexpr int kLongHist = 66;                   // policy steps, ~2 s
constexpr int kGoalDim = 4;
constexpr int kShortDim = kShortHist * kPairDim;
constexpr int kLongDim = kLongHist * kPairDim;
// q local (9) + qd (9) + goal (4) + normalized dynamics draw (15)
// + [jump clock / T_J, standing flag, episode fraction]
constexpr int kValuePrivOffset = 9 + 9 + kGoalDim;
constexpr int kValueObsDim = kValuePrivOffset + kPrivDim + 3;

enum class Term { none, fall, foot_bound, task_bound, timeout };
const char* term_name(Term t);

struct EpisodeConfig {
  int stage = 1;
  Mode mode = Mode::flat;
  int max_steps = 750;
  double policy_dt = 0.03;
  double fall_height = 0.55;
  double ee = 0.22;  // per-foot reference-tracking bound, jump phase only
  double et_pos = 1.0, et_ang = 0.7853981633974483;  // post-landing task bound
  double task_grace_s = 0.25;
  double goal_cx[2] = {0.0, 0.0};
  double goal_cz[2] = {0.0, 0.0};
  double stand[2] = {1.0, 15.0};
  double first_stand[2] = {1.0, 3.0};
  double settle_delay_s = 0.5;
  double lpf_beta = 0.3;
  bool elevation_blend = true;
  double platform_min_edge = 0.12;
  double platform_min_cx = 0.3;  // terrain jumps shorter than this keep c_z = 0
};

EpisodeConfig episode_config(const Config& cfg, int stage, Mode mode);

const char* mode_name(Mode m);
Mode parse_mode(const std::string& s);

// Stage 1 fixes the task to the zero goal; stages 2-3 draw uniformly within
// the configured ranges with mode pinning (flat: c_z = 0; terrain and short
// jumps: see EpisodeConfig). Planar build: c_y = c_phi = 0 always.
Goal sample_goal(const EpisodeConfig& ec, Rng& rng);

struct Observation {
  Eigen::Matrix<double, kGoalDim, 1> goal = Eigen::Matrix<double, kGoalDim, 1>::Zero();
  Eigen::Matrix<double, kPreviewDim, 1> preview = Eigen::Matrix<double, kPreviewDim, 1>::Zero();
  // (q^o, a) pairs, oldest first, each pair contiguous.
  Eigen::Matrix<double, kShortDim, 1> short_hist = Eigen::Matrix<double, kShortDim, 1>::Zero();
  Eigen::Matrix<double, kLongDim, 1> long_hist = Eigen::Matrix<double, kLongDim, 1>::Zero();
  // Privileged critic input; never fed to a policy.
  Eigen::Matrix<double, kValueObsDim, 1> value_obs = Eigen::Matrix<double, kValueObsDim, 1>::Zero();
};

struct StepEvents {
  bool jump_started = false;
  bool takeoff = false;
  bool touchdown = false;
  bool settled = false;
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  RewardBreakdown breakdown{};
  bool done = false;       // fall / foot_bound / task_bound
  bool truncated = false;  // step budget exhausted, value bootstraps
  Term term = Term::none;
  StepEvents events;
};

// One planar jumping episode driver: goal scheduling, the jump <-> stand
// cycle, low-pass-filtered position control at 33 Hz over 2 kHz dynamics,
// stage-scheduled rewards, early termination, and history assembly.
//
// Each (master_seed, worker, episode) triple owns five decorrelated RNG
// streams (init pose, goal/schedules, sensor noise, dynamics draw,
// perturbations), so trajectories are reproducible independently of how many
// workers run or in which order they step.
class JumpEnv {
 public:
  JumpEnv(const Config& cfg, int stage, Mode mode);

  // Hooks for evaluation and robustness scenarios; set before reset().
  void set_single_jump(bool on) { single_jump_ = on; }
  void set_forced_goal(const Goal& g) { forced_goal_ = g; has_forced_goal_ = true; }
  void clear_forced_goal() { has_forced_goal_ = false; }
  void set_fall_only_termination(bool on) { fall_only_ = on; }
  void set_constant_wrench(const BaseWrench& w) { const_wrench_ = w; }
  void set_com_shift(double dx, double dz) { com_dx_ = dx; com_dz_ = dz; }
  void set_perturbation_enabled(bool on) { perturb_on_ = on; }
  // Replaces the next scheduled random pulse (robustness: one known pulse).
  void set_forced_pulse(double start_s, double dur_s, const BaseWrench& w);

  Observation reset(uint64_t master_seed, int worker, uint64_t episode);
  // `action` is the raw policy output recorded into the histories; `motor_target`
  // is the desired motor position vector after any architecture-specific
  // post-processing. The env low-pass filters the target and runs PD control.
  StepResult step(const Vec4& action, const Vec4& motor_target);

  const SimState& state() const { return s_; }
  const RobotModel& model() const { return dyn_.model; }
  const SampledDynamics& dynamics() const { return dyn_; }
  const ReferenceMotion& reference() const { return ref_; }
  const EpisodeConfig& episode() const { return ec_; }
  const Goal& goal() const { return goal_; }
  const Ground& ground() const { return ground_; }
  int steps() const { return steps_; }
  bool done() const { return term_ != Term::none; }
  Term term() const { return term_; }
  bool standing_phase() const { return standing_; }
  int jumps_started() const { return jumps_started_; }
  double jump_clock() const { return ref_step_ * ec_.policy_dt; }
  int ref_step() const { return ref_step_; }
  double anchor_x() const { return anchor_x_; }
  double anchor_ground() const { return anchor_ground_; }
  double local_x() const { return s_.q[Q_X] - anchor_x_; }
  double local_z() const { return s_.q[Q_Z] - anchor_ground_; }
  double pitch_err() const { return s_.q[Q_TH] - goal_.cphi; }
  double last_flight_s() const { return last_flight_s_; }
  double last_flight_dx() const { return last_flight_dx_; }
  double max_flight_s() const { return max_flight_s_; }
  double elevation_sigma() const;
  int real_long_entries() const { return hist_count_ > kLongHist ? kLongHist : hist_count_; }
  int real_short_entries() const { return hist_count_ > kShortHist ? kShortHist : hist_count_; }
  const Eigen::Matrix<double, kObsDim, 1>& sensed() const { return sensed_; }
  const Vec4& filtered_target() const { return lpf_; }
  const RandomizationRanges& ranges() const { return ranges_; }
  const RewardWeights& weights() const { return weights_; }

 private:
  void anchor_here();
  void begin_jump();
  void begin_standing(double lo_s, double hi_s);
  void configure_ground_for(const Goal& g);
  void push_pair(const Eigen::Matrix<double, kObsDim, 1>& qo, const Vec4& action);
  Observation assemble() const;
  Term check_termination() const;
  void update_flight_tracking(StepEvents& ev);
  void schedule_next_pulse();

  Config cfg_;
  EpisodeConfig ec_;
  RobotModel base_model_;
  SensorModel base_sensor_;
  ReferenceMotion ref_;
  RandomizationRanges ranges_;
  RewardWeights weights_;

  SampledDynamics dyn_;
  SimState s_;
  Ground ground_;
  DelayBuffer delay_;
  Rng rng_init_, rng_goal_, rng_sensor_, rng_dyn_, rng_perturb_;

  Goal goal_;
  bool has_forced_goal_ = false;
  Goal forced_goal_;
  bool single_jump_ = false;
  bool fall_only_ = false;
  bool perturb_on_ = false;
  BaseWrench const_wrench_;
  double com_dx_ = 0.0, com_dz_ = 0.0;

  int steps_ = 0;
  Term term_ = Term::none;
  bool standing_ = true;
  int ref_step_ = 0;
  int stand_left_ = 0;  // policy steps until the next jump command
  int jumps_started_ = 0;
  double anchor_x_ = 0.0;
  double anchor_ground_ = 0.0;
  double grace_until_ = 0.0;  // sim time when the post-landing bound arms
  bool crossed_tj_ = false;

  Vec4 lpf_ = Vec4::Zero();
  Vec4 prev_action_ = Vec4::Zero();
  Vec4 prev_qd_m_ = Vec4::Zero();
  Eigen::Matrix<double, kObsDim, 1> sensed_ = Eigen::Matrix<double, kObsDim, 1>::Zero();

  Eigen::Matrix<double, kPairDim, 1> ring_[kLongHist];
  int ring_head_ = 0;  // index of the oldest entry
  int hist_count_ = 0;

  bool airborne_ = false;
  double flight_start_ = 0.0, takeoff_x_ = 0.0;
  double last_flight_s_ = 0.0, last_flight_dx_ = 0.0;
  double max_flight_s_ = 0.0;
  double last_touchdown_ = 0.0;

  bool pulse_active_ = false;
  BaseWrench pulse_wrench_;
  int pulse_end_step_ = 0;
  int next_pulse_step_ = -1;
  bool forced_pulse_ = false;
  double forced_pulse_start_ = 0.0, forced_pulse_dur_ = 0.0;
  BaseWrench forced_pulse_wrench_;
};

}  // namespace jump
