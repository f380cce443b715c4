#include "jump/config.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace jump {
namespace {

enum class Kind { Double, Int, Bool };

struct Entry {
  const char* key;
  Kind kind;
  size_t offset;
};

// Registry of every config key. Order here is the dump order.
#define F_D(name, field) {name, Kind::Double, offsetof(Config, field)}
#define F_I(name, field) {name, Kind::Int, offsetof(Config, field)}
#define F_B(name, field) {name, Kind::Bool, offsetof(Config, field)}

const Entry kEntries[] = {
    F_D("sim.dt_s", sim_dt_s),
    F_I("sim.substeps_per_policy_step", sim_substeps),
    F_D("sim.gravity_mps2", sim_gravity_mps2),
    F_D("sim.pelvis_mass_kg", sim_pelvis_mass_kg),
    F_D("sim.thigh_mass_kg", sim_thigh_mass_kg),
    F_D("sim.shin_mass_kg", sim_shin_mass_kg),
    F_D("sim.foot_mass_kg", sim_foot_mass_kg),
    F_D("sim.pelvis_inertia_kgm2", sim_pelvis_inertia_kgm2),
    F_D("sim.thigh_inertia_kgm2", sim_thigh_inertia_kgm2),
    F_D("sim.shin_inertia_kgm2", sim_shin_inertia_kgm2),
    F_D("sim.foot_inertia_kgm2", sim_foot_inertia_kgm2),
    F_D("sim.hip_offset_x_m", sim_hip_offset_x_m),
    F_D("sim.hip_offset_z_m", sim_hip_offset_z_m),
    F_D("sim.thigh_len_m", sim_thigh_len_m),
    F_D("sim.shin_len_m", sim_shin_len_m),
    F_D("sim.foot_toe_m", sim_foot_toe_m),
    F_D("sim.foot_heel_m", sim_foot_heel_m),
    F_D("sim.pelvis_com_dx_m", sim_pelvis_com_dx_m),
    F_D("sim.pelvis_com_dz_m", sim_pelvis_com_dz_m),
    F_D("sim.leg_com_dx_m", sim_leg_com_dx_m),
    F_D("sim.leg_com_dz_m", sim_leg_com_dz_m),
    F_D("sim.joint_damping_nms_rad", sim_joint_damping_nms),
    F_D("sim.spring_stiffness_nm_rad", sim_spring_stiffness_nm),
    F_D("sim.spring_damping_nms_rad", sim_spring_damping_nms),
    F_D("sim.pd_kp_nm_rad", sim_kp_nm),
    F_D("sim.pd_kd_nms_rad", sim_kd_nms),
    F_D("sim.torque_limit_nm", sim_torque_limit_nm),
    F_D("sim.ground_friction", sim_ground_friction),
    F_D("sim.ground_stiffness_n_m", sim_ground_stiffness_npm),
    F_D("sim.ground_damping_ns_m", sim_ground_damping_nspm),
    F_D("sim.ground_damp_ramp_m", sim_ground_damp_ramp_m),
    F_D("sim.tangent_stiffness_n_m", sim_tangent_stiffness_npm),
    F_D("sim.tangent_damping_ns_m", sim_tangent_damping_nspm),
    F_D("sim.qd_hard_bound", sim_qd_hard_bound),
    F_D("sim.sensor_motor_pos_std_rad", sim_sensor_motor_pos_std_rad),
    F_D("sim.sensor_motor_vel_std_rad_s", sim_sensor_motor_vel_std),
    F_D("sim.sensor_gyro_std_rad", sim_sensor_gyro_std_rad),
    F_D("sim.sensor_linvel_std_m_s", sim_sensor_linvel_std_mps),
    F_D("ref.tj_s", ref_tj_s),
    F_D("ref.apex_pelvis_m", ref_apex_pelvis_m),
    F_D("ref.apex_foot_m", ref_apex_foot_m),
    F_D("ref.crouch_depth_m", ref_crouch_depth_m),
    F_D("ref.crouch_duration_s", ref_crouch_duration_s),
    F_D("ref.apex_time_s", ref_apex_time_s),
    F_D("ref.push_rise_m", ref_push_rise_m),
    F_D("ref.standing_pelvis_m", ref_standing_pelvis_m),
    F_D("ref.scale", ref_scale),
    F_D("ref.rate_bound_joint_rad", ref_rate_bound_joint_rad),
    F_D("ref.rate_bound_height_m", ref_rate_bound_height_m),
    F_D("reward.w_motion_s1_pre", rw_motion_s1_pre),
    F_D("reward.w_motion_s1_post", rw_motion_s1_post),
    F_D("reward.w_motion_s23_pre", rw_motion_s23_pre),
    F_D("reward.w_motion_s23_post", rw_motion_s23_post),
    F_D("reward.w_pelvis_height_s1_pre", rw_pelvis_height_s1_pre),
    F_D("reward.w_pelvis_height_s1_post", rw_pelvis_height_s1_post),
    F_D("reward.w_pelvis_height_s23_pre", rw_pelvis_height_s23_pre),
    F_D("reward.w_pelvis_height_s23_post", rw_pelvis_height_s23_post),
    F_D("reward.w_foot_height_s1_pre", rw_foot_height_s1_pre),
    F_D("reward.w_foot_height_s1_post", rw_foot_height_s1_post),
    F_D("reward.w_foot_height_s23_pre", rw_foot_height_s23_pre),
    F_D("reward.w_foot_height_s23_post", rw_foot_height_s23_post),
    F_D("reward.w_pelvis_pos_s1_pre", rw_pelvis_pos_s1_pre),
    F_D("reward.w_pelvis_pos_s1_post", rw_pelvis_pos_s1_post),
    F_D("reward.w_pelvis_pos_s23_pre", rw_pelvis_pos_s23_pre),
    F_D("reward.w_pelvis_pos_s23_post", rw_pelvis_pos_s23_post),
    F_D("reward.w_pelvis_vel_s1_pre", rw_pelvis_vel_s1_pre),
    F_D("reward.w_pelvis_vel_s1_post", rw_pelvis_vel_s1_post),
    F_D("reward.w_pelvis_vel_s23_pre", rw_pelvis_vel_s23_pre),
    F_D("reward.w_pelvis_vel_s23_post", rw_pelvis_vel_s23_post),
    F_D("reward.w_orientation_s1_pre", rw_orientation_s1_pre),
    F_D("reward.w_orientation_s1_post", rw_orientation_s1_post),
    F_D("reward.w_orientation_s23_pre", rw_orientation_s23_pre),
    F_D("reward.w_orientation_s23_post", rw_orientation_s23_post),
    F_D("reward.w_angular_rate_s1_pre", rw_angular_rate_s1_pre),
    F_D("reward.w_angular_rate_s1_post", rw_angular_rate_s1_post),
    F_D("reward.w_angular_rate_s23_pre", rw_angular_rate_s23_pre),
    F_D("reward.w_angular_rate_s23_post", rw_angular_rate_s23_post),
    F_D("reward.w_impact_s1_pre", rw_impact_s1_pre),
    F_D("reward.w_impact_s1_post", rw_impact_s1_post),
    F_D("reward.w_impact_s23_pre", rw_impact_s23_pre),
    F_D("reward.w_impact_s23_post", rw_impact_s23_post),
    F_D("reward.w_torque_s1_pre", rw_torque_s1_pre),
    F_D("reward.w_torque_s1_post", rw_torque_s1_post),
    F_D("reward.w_torque_s23_pre", rw_torque_s23_pre),
    F_D("reward.w_torque_s23_post", rw_torque_s23_post),
    F_D("reward.w_motor_vel_s1_pre", rw_motor_vel_s1_pre),
    F_D("reward.w_motor_vel_s1_post", rw_motor_vel_s1_post),
    F_D("reward.w_motor_vel_s23_pre", rw_motor_vel_s23_pre),
    F_D("reward.w_motor_vel_s23_post", rw_motor_vel_s23_post),
    F_D("reward.w_joint_acc_s1_pre", rw_joint_acc_s1_pre),
    F_D("reward.w_joint_acc_s1_post", rw_joint_acc_s1_post),
    F_D("reward.w_joint_acc_s23_pre", rw_joint_acc_s23_pre),
    F_D("reward.w_joint_acc_s23_post", rw_joint_acc_s23_post),
    F_D("reward.w_action_diff_s1_pre", rw_action_diff_s1_pre),
    F_D("reward.w_action_diff_s1_post", rw_action_diff_s1_post),
    F_D("reward.w_action_diff_s23_pre", rw_action_diff_s23_pre),
    F_D("reward.w_action_diff_s23_post", rw_action_diff_s23_post),
    F_D("reward.alpha_motion", alpha_motion),
    F_D("reward.alpha_pelvis_height", alpha_pelvis_height),
    F_D("reward.alpha_foot_height", alpha_foot_height),
    F_D("reward.alpha_pelvis_pos", alpha_pelvis_pos),
    F_D("reward.alpha_pelvis_vel", alpha_pelvis_vel),
    F_D("reward.alpha_orientation", alpha_orientation),
    F_D("reward.alpha_angular_rate", alpha_angular_rate),
    F_D("reward.alpha_impact", alpha_impact),
    F_D("reward.alpha_torque", alpha_torque),
    F_D("reward.alpha_motor_vel", alpha_motor_vel),
    F_D("reward.alpha_joint_acc", alpha_joint_acc),
    F_D("reward.alpha_action_diff", alpha_action_diff),
    F_B("reward.angular_rate_literal", reward_angular_rate_literal),
    F_I("episode.s1_max_steps", ep_s1_max_steps),
    F_I("episode.s23_max_steps", ep_s23_max_steps),
    F_D("episode.fall_height_m", ep_fall_height_m),
    F_D("episode.s1_foot_bound_m", ep_s1_ee_m),
    F_D("episode.s23_foot_bound_m", ep_s23_ee_m),
    F_D("episode.s1_task_bound_pos_m", ep_s1_et_pos_m),
    F_D("episode.s1_task_bound_ang_rad", ep_s1_et_ang_rad),
    F_D("episode.s23_task_bound_pos_m", ep_s23_et_pos_m),
    F_D("episode.s23_task_bound_ang_rad", ep_s23_et_ang_rad),
    F_D("episode.task_grace_s", ep_task_grace_s),
    F_D("episode.goal_cx_lo_m", ep_goal_cx_lo_m),
    F_D("episode.goal_cx_hi_m", ep_goal_cx_hi_m),
    F_D("episode.goal_cy_lo_m", ep_goal_cy_lo_m),
    F_D("episode.goal_cy_hi_m", ep_goal_cy_hi_m),
    F_D("episode.goal_cz_lo_m", ep_goal_cz_lo_m),
    F_D("episode.goal_cz_hi_m", ep_goal_cz_hi_m),
    F_D("episode.goal_cphi_lo_rad", ep_goal_cphi_lo_rad),
    F_D("episode.goal_cphi_hi_rad", ep_goal_cphi_hi_rad),
    F_D("episode.stand_lo_s", ep_stand_lo_s),
    F_D("episode.stand_hi_s", ep_stand_hi_s),
    F_D("episode.first_stand_lo_s", ep_first_stand_lo_s),
    F_D("episode.first_stand_hi_s", ep_first_stand_hi_s),
    F_D("episode.settle_delay_s", ep_settle_delay_s),
    F_B("episode.elevation_blend", ep_elevation_blend),
    F_D("episode.platform_min_edge_m", ep_platform_min_edge_m),
    F_D("episode.platform_min_cx_m", ep_platform_min_cx_m),
    F_D("episode.settle_time_s", ep_settle_time_s),
    F_D("episode.lpf_beta", ep_lpf_beta),
    F_D("episode.init_height_noise_m", ep_init_height_noise_m),
    F_D("episode.init_joint_noise_rad", ep_init_joint_noise_rad),
    F_D("episode.init_vel_noise", ep_init_vel_noise),
    F_D("rand.friction_ratio_lo", rand_friction_lo),
    F_D("rand.friction_ratio_hi", rand_friction_hi),
    F_D("rand.joint_damping_lo_nms_rad", rand_joint_damping_lo_nms),
    F_D("rand.joint_damping_hi_nms_rad", rand_joint_damping_hi_nms),
    F_D("rand.spring_ratio_lo", rand_spring_lo),
    F_D("rand.spring_ratio_hi", rand_spring_hi),
    F_D("rand.mass_ratio_lo", rand_mass_lo),
    F_D("rand.mass_ratio_hi", rand_mass_hi),
    F_D("rand.inertia_ratio_lo", rand_inertia_lo),
    F_D("rand.inertia_ratio_hi", rand_inertia_hi),
    F_D("rand.root_com_lo_m", rand_root_com_lo_m),
    F_D("rand.root_com_hi_m", rand_root_com_hi_m),
    F_D("rand.link_com_lo_m", rand_link_com_lo_m),
    F_D("rand.link_com_hi_m", rand_link_com_hi_m),
    F_D("rand.pd_ratio_lo", rand_pd_lo),
    F_D("rand.pd_ratio_hi", rand_pd_hi),
    F_D("rand.motor_pos_bias_lo_rad", rand_motor_pos_bias_lo_rad),
    F_D("rand.motor_pos_bias_hi_rad", rand_motor_pos_bias_hi_rad),
    F_D("rand.motor_vel_bias_lo_rad_s", rand_motor_vel_bias_lo),
    F_D("rand.motor_vel_bias_hi_rad_s", rand_motor_vel_bias_hi),
    F_D("rand.gyro_bias_lo_rad", rand_gyro_bias_lo_rad),
    F_D("rand.gyro_bias_hi_rad", rand_gyro_bias_hi_rad),
    F_D("rand.linvel_bias_lo_m_s", rand_linvel_bias_lo_mps),
    F_D("rand.linvel_bias_hi_m_s", rand_linvel_bias_hi_mps),
    F_D("rand.delay_lo_s", rand_delay_lo_s),
    F_D("rand.delay_hi_s", rand_delay_hi_s),
    F_D("rand.perturb_force_n", rand_perturb_force_n),
    F_D("rand.perturb_moment_nm", rand_perturb_moment_nm),
    F_D("rand.perturb_dur_lo_s", rand_perturb_dur_lo_s),
    F_D("rand.perturb_dur_hi_s", rand_perturb_dur_hi_s),
    F_D("rand.perturb_gap_lo_s", rand_perturb_gap_lo_s),
    F_D("rand.perturb_gap_hi_s", rand_perturb_gap_hi_s),
    F_B("env.perturbation", env_perturbation),
    F_I("nn.short_history", nn_short_history),
    F_I("nn.long_history", nn_long_history),
    F_I("nn.base_hidden", nn_base_hidden),
    F_I("nn.value_hidden", nn_value_hidden),
    F_I("nn.conv1_kernel", nn_conv1_kernel),
    F_I("nn.conv1_filters", nn_conv1_filters),
    F_I("nn.conv1_stride", nn_conv1_stride),
    F_I("nn.conv2_kernel", nn_conv2_kernel),
    F_I("nn.conv2_filters", nn_conv2_filters),
    F_I("nn.conv2_stride", nn_conv2_stride),
    F_B("nn.alt_encoder", nn_alt_encoder),
    F_I("nn.alt_conv1_kernel", nn_alt_conv1_kernel),
    F_I("nn.alt_conv1_filters", nn_alt_conv1_filters),
    F_I("nn.alt_conv1_stride", nn_alt_conv1_stride),
    F_I("nn.alt_conv2_kernel", nn_alt_conv2_kernel),
    F_I("nn.alt_conv2_filters", nn_alt_conv2_filters),
    F_I("nn.alt_conv2_stride", nn_alt_conv2_stride),
    F_I("nn.alt_conv3_kernel", nn_alt_conv3_kernel),
    F_I("nn.alt_conv3_filters", nn_alt_conv3_filters),
    F_I("nn.alt_conv3_stride", nn_alt_conv3_stride),
    F_D("nn.action_std", nn_action_std),
    F_I("nn.extrinsics_dim", nn_extrinsics_dim),
    F_I("nn.priv_hidden", nn_priv_hidden),
    F_D("nn.hidden_gain", nn_hidden_gain),
    F_D("nn.final_scale", nn_final_scale),
    F_D("ppo.gamma", ppo_gamma),
    F_D("ppo.lam", ppo_lam),
    F_D("ppo.clip", ppo_clip),
    F_D("ppo.lr", ppo_lr),
    F_I("ppo.epochs", ppo_epochs),
    F_I("ppo.minibatches", ppo_minibatches),
    F_I("ppo.n_envs", ppo_n_envs),
    F_I("ppo.steps_per_env", ppo_steps_per_env),
    F_D("ppo.ent_coef", ppo_ent_coef),
    F_D("ppo.vf_coef", ppo_vf_coef),
    F_D("ppo.max_grad_norm", ppo_max_grad_norm),
    F_B("ppo.adv_norm", ppo_adv_norm),
    F_I("ppo.iters_s1", ppo_iters_s1),
    F_I("ppo.iters_s2", ppo_iters_s2),
    F_I("ppo.iters_s3", ppo_iters_s3),
    F_I("ppo.checkpoint_every", ppo_checkpoint_every),
    F_B("ppo.paper_scale", ppo_paper_scale),
    F_I("ppo.paper_n_envs", ppo_paper_n_envs),
    F_I("ppo.paper_steps_per_env", ppo_paper_steps_per_env),
    F_I("ppo.paper_iters_s1", ppo_paper_iters_s1),
    F_I("ppo.paper_iters_s2", ppo_paper_iters_s2),
    F_I("ppo.paper_iters_s3", ppo_paper_iters_s3),
    F_I("rma.iters", rma_iters),
    F_I("rma.rollout_steps", rma_rollout_steps),
    F_I("rma.epochs", rma_epochs),
    F_I("rma.minibatch", rma_minibatch),
    F_D("rma.lr", rma_lr),
    F_I("rma.checkpoints", rma_checkpoints),
    F_I("arma.iters", arma_iters),
    F_I("harness.eval_episodes", harness_eval_episodes),
    F_I("harness.eval_max_steps", harness_eval_max_steps),
    F_D("harness.robust_force_n", harness_robust_force_n),
    F_D("harness.com_offset_m", harness_com_offset_m),
    F_I("harness.trials", harness_trials),
};

#undef F_D
#undef F_I
#undef F_B

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

bool Config::apply_line(const std::string& raw, int lineno, std::string& err) {
  std::string line = raw;
  size_t hash = line.find('#');
  if (hash != std::string::npos) line = line.substr(0, hash);
  line = trim(line);
  if (line.empty()) return true;
  size_t eq = line.find('=');
  if (eq == std::string::npos) {
    err = "config: line " + std::to_string(lineno) + " has no '='";
    return false;
  }
  std::string key = trim(line.substr(0, eq));
  std::string val = trim(line.substr(eq + 1));
  for (const Entry& e : kEntries) {
    if (key != e.key) continue;
    char* base = reinterpret_cast<char*>(this);
    const char* c = val.c_str();
    char* end = nullptr;
    switch (e.kind) {
      case Kind::Double: {
        double d = std::strtod(c, &end);
        if (end == c || *end != '\0') {
          err = "config: bad numeric value for '" + key + "': " + val;
          return false;
        }
        *reinterpret_cast<double*>(base + e.offset) = d;
        return true;
      }
      case Kind::Int: {
        long long v = std::strtoll(c, &end, 10);
        if (end == c || *end != '\0') {
          err = "config: bad integer value for '" + key + "': " + val;
          return false;
        }
        *reinterpret_cast<int*>(base + e.offset) = int(v);
        return true;
      }
      case Kind::Bool: {
        bool b;
        if (val == "true" || val == "1")
          b = true;
        else if (val == "false" || val == "0")
          b = false;
        else {
          err = "config: bad boolean value for '" + key + "': " + val;
          return false;
        }
        *reinterpret_cast<bool*>(base + e.offset) = b;
        return true;
      }
    }
  }
  err = "config: unknown key '" + key + "' (line " + std::to_string(lineno) + ")";
  return false;
}

bool Config::load_file(const std::string& path, std::string& err) {
  std::ifstream in(path);
  if (!in) {
    err = "config: cannot open " + path;
    return false;
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!apply_line(line, lineno, err)) return false;
  }
  return true;
}

void Config::dump(std::ostream& os) const {
  const char* base = reinterpret_cast<const char*>(this);
  char buf[64];
  for (const Entry& e : kEntries) {
    os << e.key << " = ";
    switch (e.kind) {
      case Kind::Double:
        snprintf(buf, sizeof(buf), "%.17g", *reinterpret_cast<const double*>(base + e.offset));
        os << buf;
        break;
      case Kind::Int:
        os << *reinterpret_cast<const int*>(base + e.offset);
        break;
      case Kind::Bool:
        os << (*reinterpret_cast<const bool*>(base + e.offset) ? "true" : "false");
        break;
    }
    os << "\n";
  }
}

std::vector<std::string> Config::keys() const {
  std::vector<std::string> out;
  for (const Entry& e : kEntries) out.push_back(e.key);
  return out;
}

}  // namespace jump
