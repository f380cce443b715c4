#pragma once

#include <iosfwd>
#include <vector>

#include "jump/sim.hpp"

namespace jump {

// Kinematic jump-in-place trajectory sampled at the policy rate. Purely an
// imitation prior: crouch, push off, ballistic apex, landing absorption,
// settle to the standing pose by the end of the jump duration. Not required
// to be dynamically feasible.
struct ReferenceMotion {
  double tj_s = 1.66;
  double dt = 0.03;  // policy step duration
  std::vector<double> pelvis_z;
  std::vector<double> foot_z;
  std::vector<Vec4> motors;
  double standing_pelvis = 0.9;
  Vec4 standing_motors = Vec4::Zero();
  double t_apex_s = 0.0;  // flight window: liftoff at t_apex - t_air,
  double t_air_s = 0.0;   // touchdown at t_apex + t_air

  int samples() const { return int(pelvis_z.size()); }
  // Step-indexed accessors; indices past the trajectory clamp to standing.
  double pelvis_at(int t) const;
  double foot_at(int t) const;
  const Vec4& motors_at(int t) const;
  // [pelvis_z(t), motors(t+1), motors(t+4), motors(t+7)], 13 values.
  Eigen::Matrix<double, 13, 1> preview(int t) const;
};

constexpr int kPreviewDim = 13;

// Throws with the violated limit's name if the configured apex heights are
// outside what the leg geometry can track.
ReferenceMotion build_jump_in_place(const Config& cfg, const RobotModel& m);

// Columns: t_s, pelvis_z_m, foot_z_left_m, foot_z_right_m, hip_left_rad,
// knee_left_rad, hip_right_rad, knee_right_rad.
void export_reference_csv(const ReferenceMotion& ref, std::ostream& os);
ReferenceMotion import_reference_csv(std::istream& is);

}  // namespace jump
