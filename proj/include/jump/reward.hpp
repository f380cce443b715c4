#pragma once

#include "jump/reference.hpp"
#include "jump/sim.hpp"

namespace jump {

// Task command in the local frame of the episode's (or jump's) start pose.
// Planar build pins c_y = c_phi = 0; flat mode additionally pins c_z = 0.
struct Goal {
  double cx = 0.0, cy = 0.0, cz = 0.0, cphi = 0.0;
};

enum class Mode { flat, terrain };

enum RewardRow {
  R_MOTION = 0,
  R_PELVIS_HEIGHT,
  R_FOOT_HEIGHT,
  R_PELVIS_POS,
  R_PELVIS_VEL,
  R_ORIENTATION,
  R_ANGULAR_RATE,
  R_IMPACT,
  R_TORQUE,
  R_MOTOR_VEL,
  R_JOINT_ACC,
  R_ACTION_DIFF,
  R_COUNT
};
extern const char* const kRewardRowNames[R_COUNT];

struct RewardWeights {
  // schedules: stage 1 vs stages 2-3, before vs after the reference jump ends
  double s1_pre[R_COUNT];
  double s1_post[R_COUNT];
  double s23_pre[R_COUNT];
  double s23_post[R_COUNT];
  double alpha[R_COUNT];
  bool angular_rate_literal = false;

  const double* select(int stage, bool post_landing) const {
    if (stage == 1) return post_landing ? s1_post : s1_pre;
    return post_landing ? s23_post : s23_pre;
  }
};

RewardWeights reward_weights(const Config& cfg);

// exp(-alpha * ||u - v||^2). Throws on dimension mismatch.
double reward_kernel(const VecX& u, const VecX& v, double alpha);
double reward_kernel1(double u, double v, double alpha);

// Everything the reward reads, already expressed in the jump's local frame
// (positions relative to the anchor pose, heights relative to the anchor's
// ground level).
struct RewardInputs {
  Vec4 q_m, qd_m, tau, qdd_m;
  double pelvis_x = 0.0;   // displacement from the anchor
  double pelvis_z = 0.0;   // height above the anchor's ground
  double vx = 0.0;
  double pitch = 0.0, pitch_rate = 0.0;
  double foot_z[2] = {0.0, 0.0};
  double fz_total = 0.0;
  Vec4 action = Vec4::Zero(), prev_action = Vec4::Zero();
  int ref_step = 0;           // policy steps since the jump command
  double jump_clock_s = 0.0;  // seconds since the jump command
  double elevation_sigma = 1.0;  // blend factor applied to c_z targets
};

struct RewardBreakdown {
  double comp[R_COUNT];  // unweighted kernel values
  double total;          // (w / ||w||_1)^T r
};

RewardBreakdown compute_reward(const RewardInputs& in, const ReferenceMotion& ref,
                               const Goal& goal, int stage, const RewardWeights& w);

}  // namespace jump
