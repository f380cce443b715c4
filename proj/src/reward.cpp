#include "jump/reward.hpp"

#include <cmath>
#include <stdexcept>

namespace jump {

const char* const kRewardRowNames[R_COUNT] = {
    "motion",       "pelvis_height", "foot_height", "pelvis_pos",
    "pelvis_vel",   "orientation",   "angular_rate", "impact",
    "torque",       "motor_vel",     "joint_acc",    "action_diff",
};

RewardWeights reward_weights(const Config& c) {
  RewardWeights w;
  auto row = [&w](RewardRow r, double a, double s1a, double s1b, double s23a, double s23b) {
    w.alpha[r] = a;
    w.s1_pre[r] = s1a;
    w.s1_post[r] = s1b;
    w.s23_pre[r] = s23a;
    w.s23_post[r] = s23b;
  };
  row(R_MOTION, c.alpha_motion, c.rw_motion_s1_pre, c.rw_motion_s1_post, c.rw_motion_s23_pre,
      c.rw_motion_s23_post);
  row(R_PELVIS_HEIGHT, c.alpha_pelvis_height, c.rw_pelvis_height_s1_pre, c.rw_pelvis_height_s1_post,
      c.rw_pelvis_height_s23_pre, c.rw_pelvis_height_s23_post);
  row(R_FOOT_HEIGHT, c.alpha_foot_height, c.rw_foot_height_s1_pre, c.rw_foot_height_s1_post,
      c.rw_foot_height_s23_pre, c.rw_foot_height_s23_post);
  row(R_PELVIS_POS, c.alpha_pelvis_pos, c.rw_pelvis_pos_s1_pre, c.rw_pelvis_pos_s1_post,
      c.rw_pelvis_pos_s23_pre, c.rw_pelvis_pos_s23_post);
  row(R_PELVIS_VEL, c.alpha_pelvis_vel, c.rw_pelvis_vel_s1_pre, c.rw_pelvis_vel_s1_post,
      c.rw_pelvis_vel_s23_pre, c.rw_pelvis_vel_s23_post);
  row(R_ORIENTATION, c.alpha_orientation, c.rw_orientation_s1_pre, c.rw_orientation_s1_post,
      c.rw_orientation_s23_pre, c.rw_orientation_s23_post);
  row(R_ANGULAR_RATE, c.alpha_angular_rate, c.rw_angular_rate_s1_pre, c.rw_angular_rate_s1_post,
      c.rw_angular_rate_s23_pre, c.rw_angular_rate_s23_post);
  row(R_IMPACT, c.alpha_impact, c.rw_impact_s1_pre, c.rw_impact_s1_post, c.rw_impact_s23_pre,
      c.rw_impact_s23_post);
  row(R_TORQUE, c.alpha_torque, c.rw_torque_s1_pre, c.rw_torque_s1_post, c.rw_torque_s23_pre,
      c.rw_torque_s23_post);
  row(R_MOTOR_VEL, c.alpha_motor_vel, c.rw_motor_vel_s1_pre, c.rw_motor_vel_s1_post,
      c.rw_motor_vel_s23_pre, c.rw_motor_vel_s23_post);
  row(R_JOINT_ACC, c.alpha_joint_acc, c.rw_joint_acc_s1_pre, c.rw_joint_acc_s1_post,
      c.rw_joint_acc_s23_pre, c.rw_joint_acc_s23_post);
  row(R_ACTION_DIFF, c.alpha_action_diff, c.rw_action_diff_s1_pre, c.rw_action_diff_s1_post,
      c.rw_action_diff_s23_pre, c.rw_action_diff_s23_post);
  w.angular_rate_literal = c.reward_angular_rate_literal;
  for (int i = 0; i < R_COUNT; ++i) {
    if (w.alpha[i] <= 0.0) throw std::runtime_error("reward: alpha must be positive");
    if (w.s1_pre[i] < 0 || w.s1_post[i] < 0 || w.s23_pre[i] < 0 || w.s23_post[i] < 0)
      throw std::runtime_error("reward: weights must be non-negative");
  }
  return w;
}

double reward_kernel(const VecX& u, const VecX& v, double alpha) {
  if (u.size() != v.size())
    throw std::runtime_error("reward kernel: dimension mismatch (" + std::to_string(u.size()) +
                             " vs " + std::to_string(v.size()) + ")");
  return std::exp(-alpha * (u - v).squaredNorm());
}

double reward_kernel1(double u, double v, double alpha) {
  const double d = u - v;
  return std::exp(-alpha * d * d);
}

RewardBreakdown compute_reward(const RewardInputs& in, const ReferenceMotion& ref,
                               const Goal& goal, int stage, const RewardWeights& w) {
  const bool post = in.jump_clock_s > ref.tj_s;
  const double* ws = w.select(stage, post);

  RewardBreakdown out;
  const double cz = goal.cz * in.elevation_sigma;
  const Vec4 dm = in.q_m - ref.motors_at(in.ref_step);
  out.comp[R_MOTION] = std::exp(-w.alpha[R_MOTION] * dm.squaredNorm());
  out.comp[R_PELVIS_HEIGHT] =
      reward_kernel1(in.pelvis_z, ref.pelvis_at(in.ref_step) + cz, w.alpha[R_PELVIS_HEIGHT]);
  const double ef = ref.foot_at(in.ref_step) + cz;
  const double df0 = in.foot_z[0] - ef, df1 = in.foot_z[1] - ef;
  out.comp[R_FOOT_HEIGHT] = std::exp(-w.alpha[R_FOOT_HEIGHT] * (df0 * df0 + df1 * df1));
  out.comp[R_PELVIS_POS] = reward_kernel1(in.pelvis_x, goal.cx, w.alpha[R_PELVIS_POS]);
  const double vxd = post ? 0.0 : goal.cx / ref.tj_s;
  out.comp[R_PELVIS_VEL] = reward_kernel1(in.vx, vxd, w.alpha[R_PELVIS_VEL]);
  out.comp[R_ORIENTATION] = reward_kernel1(in.pitch, goal.cphi, w.alpha[R_ORIENTATION]);
  // The published component table pairs the orientation angles with the yaw
  // rate target here; the running text tracks angular rates. Both collapse to
  // a zero target in the planar build, applied to angle or rate respectively.
  const double rate_target = post ? 0.0 : goal.cphi / ref.tj_s;
  out.comp[R_ANGULAR_RATE] =
      w.angular_rate_literal
          ? reward_kernel1(in.pitch, rate_target, w.alpha[R_ANGULAR_RATE])
          : reward_kernel1(in.pitch_rate, rate_target, w.alpha[R_ANGULAR_RATE]);
  out.comp[R_IMPACT] = reward_kernel1(in.fz_total, 0.0, w.alpha[R_IMPACT]);
  out.comp[R_TORQUE] = std::exp(-w.alpha[R_TORQUE] * in.tau.squaredNorm());
  out.comp[R_MOTOR_VEL] = std::exp(-w.alpha[R_MOTOR_VEL] * in.qd_m.squaredNorm());
  out.comp[R_JOINT_ACC] = std::exp(-w.alpha[R_JOINT_ACC] * in.qdd_m.squaredNorm());
  out.comp[R_ACTION_DIFF] =
      std::exp(-w.alpha[R_ACTION_DIFF] * (in.action - in.prev_action).squaredNorm());

  double num = 0.0, den = 0.0;
  for (int i = 0; i < R_COUNT; ++i) {
    num += ws[i] * out.comp[i];
    den += ws[i];
  }
  out.total = num / den;
  return out;
}

}  // namespace jump
