#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "jump/reference.hpp"

using namespace jump;

namespace {

ReferenceMotion default_ref(Config* out_cfg = nullptr) {
  Config cfg;
  if (out_cfg) *out_cfg = cfg;
  return build_jump_in_place(cfg, default_model(cfg));
}

int apex_index(const ReferenceMotion& ref) {
  return int(std::round(ref.t_apex_s / ref.dt));
}

}  // namespace

TEST_CASE("trajectory covers the jump duration on the policy-step grid") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  const double step = cfg.sim_dt_s * cfg.sim_substeps;
  CHECK(ref.dt == step);
  CHECK(ref.tj_s == cfg.ref_tj_s);
  CHECK(ref.samples() == int(std::floor(cfg.ref_tj_s / step)) + 1);
  CHECK(ref.samples() == int(ref.foot_z.size()));
  CHECK(ref.samples() == int(ref.motors.size()));
}

TEST_CASE("starts standing and clamps to standing after the trajectory ends") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  CHECK(ref.pelvis_at(0) == cfg.ref_standing_pelvis_m);
  CHECK(ref.foot_at(0) == 0.0);
  CHECK(ref.motors_at(0) == ref.standing_motors);
  for (int t : {ref.samples(), ref.samples() + 1, ref.samples() + 500}) {
    CHECK(ref.pelvis_at(t) == ref.standing_pelvis);
    CHECK(ref.foot_at(t) == 0.0);
    CHECK(ref.motors_at(t) == ref.standing_motors);
  }
  // negative indices clamp to the first sample
  CHECK(ref.pelvis_at(-3) == ref.pelvis_at(0));
  // the landing settles back to the standing height by the last sample
  CHECK(ref.pelvis_z.back() == doctest::Approx(cfg.ref_standing_pelvis_m).epsilon(1e-3));
}

TEST_CASE("apex samples hit the configured heights exactly") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  const int ia = apex_index(ref);
  CHECK(ref.pelvis_z[ia] == cfg.ref_apex_pelvis_m);
  CHECK(ref.foot_z[ia] == cfg.ref_apex_foot_m);
  // the apex is the global maximum of both profiles
  for (int i = 0; i < ref.samples(); ++i) {
    CHECK(ref.pelvis_z[i] <= ref.pelvis_z[ia]);
    CHECK(ref.foot_z[i] <= ref.foot_z[ia]);
  }
}

TEST_CASE("flight phase is a symmetric free-fall parabola around the apex") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  const int ia = apex_index(ref);
  const double g = cfg.sim_gravity_mps2;
  for (int k = 1; k <= 4; ++k) {
    const double t_off = k * ref.dt;
    if (t_off >= ref.t_air_s) break;
    const double expect = cfg.ref_apex_pelvis_m - 0.5 * g * t_off * t_off;
    CHECK(ref.pelvis_z[ia - k] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(ref.pelvis_z[ia + k] == doctest::Approx(expect).epsilon(1e-12));
    // foot clearance is symmetric too
    CHECK(ref.foot_z[ia - k] == doctest::Approx(ref.foot_z[ia + k]).epsilon(1e-12));
  }
}

TEST_CASE("foot clearance is zero outside the flight window and positive inside") {
  ReferenceMotion ref = default_ref();
  for (int i = 0; i < ref.samples(); ++i) {
    const double t = i * ref.dt;
    const double off = std::abs(t - ref.t_apex_s);
    if (off < ref.t_air_s - 1e-12) {
      CHECK(ref.foot_z[i] > 0.0);
    } else if (off > ref.t_air_s + 1e-12) {
      CHECK(ref.foot_z[i] == 0.0);
    }
  }
}

TEST_CASE("crouch descends monotonically to the configured depth") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  const int n_crouch = int(cfg.ref_crouch_duration_s / ref.dt);
  double lowest = ref.pelvis_z[0];
  for (int i = 1; i <= n_crouch; ++i) {
    CHECK(ref.pelvis_z[i] <= ref.pelvis_z[i - 1] + 1e-12);
    lowest = std::min(lowest, ref.pelvis_z[i]);
  }
  CHECK(lowest == doctest::Approx(cfg.ref_standing_pelvis_m - cfg.ref_crouch_depth_m)
                      .epsilon(1e-9));
}

TEST_CASE("profiles stay within the per-step rate bounds") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  for (int i = 1; i < ref.samples(); ++i) {
    CHECK(std::abs(ref.pelvis_z[i] - ref.pelvis_z[i - 1]) <= cfg.ref_rate_bound_height_m);
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(ref.motors[i][j] - ref.motors[i - 1][j]) <= cfg.ref_rate_bound_joint_rad);
  }
}

TEST_CASE("motor samples track the pelvis-to-foot distance through the leg ik") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  RobotModel m = default_model(cfg);
  for (int i = 0; i < ref.samples(); ++i) {
    const double d = (ref.pelvis_z[i] + m.hip_off_z) - ref.foot_z[i];
    if (d <= 0.25 * (m.thigh_len + m.shin_len) || d >= 0.998 * (m.thigh_len + m.shin_len))
      continue;  // clamped samples do not round-trip
    const double knee = ref.motors[i][1];
    CHECK(2.0 * m.thigh_len * std::cos(knee / 2.0) == doctest::Approx(d).epsilon(1e-9));
    CHECK(ref.motors[i][0] == doctest::Approx(-knee / 2.0).epsilon(1e-9));
    // both legs get the same jump-in-place profile
    CHECK(ref.motors[i][2] == ref.motors[i][0]);
    CHECK(ref.motors[i][3] == ref.motors[i][1]);
  }
}

TEST_CASE("flight window matches the liftoff velocity the apex requires") {
  Config cfg;
  ReferenceMotion ref = default_ref(&cfg);
  const double z_lo = cfg.ref_standing_pelvis_m + cfg.ref_push_rise_m;
  const double v_lo = std::sqrt(2.0 * cfg.sim_gravity_mps2 * (cfg.ref_apex_pelvis_m - z_lo));
  CHECK(ref.t_air_s == doctest::Approx(v_lo / cfg.sim_gravity_mps2).epsilon(1e-12));
  // the apex time is the configured one snapped onto the sample grid
  CHECK(std::abs(ref.t_apex_s - cfg.ref_apex_time_s) <= 0.5 * ref.dt + 1e-12);
  CHECK(ref.t_apex_s - ref.t_air_s > cfg.ref_crouch_duration_s);
  CHECK(ref.t_apex_s + ref.t_air_s < ref.tj_s);
}

TEST_CASE("scaling the reference scales the key heights") {
  Config cfg;
  cfg.ref_scale = 1.1;
  ReferenceMotion ref = build_jump_in_place(cfg, default_model(cfg));
  CHECK(ref.standing_pelvis == doctest::Approx(0.9 * 1.1).epsilon(1e-12));
  const int ia = apex_index(ref);
  CHECK(ref.pelvis_z[ia] == doctest::Approx(cfg.ref_apex_pelvis_m * 1.1).epsilon(1e-12));
  CHECK(ref.foot_z[ia] == doctest::Approx(cfg.ref_apex_foot_m * 1.1).epsilon(1e-12));
}

TEST_CASE("infeasible configurations are rejected with the violated limit") {
  Config cfg;
  RobotModel m = default_model(cfg);

  Config c1 = cfg;
  c1.ref_apex_pelvis_m = 2.0;
  CHECK_THROWS_WITH_AS(build_jump_in_place(c1, m), doctest::Contains("reachable"),
                       std::runtime_error);

  Config c2 = cfg;
  c2.ref_apex_foot_m = 0.95;
  CHECK_THROWS_WITH_AS(build_jump_in_place(c2, m), doctest::Contains("minimum"),
                       std::runtime_error);

  Config c3 = cfg;
  c3.ref_crouch_depth_m = 0.7;
  CHECK_THROWS_WITH_AS(build_jump_in_place(c3, m), doctest::Contains("crouch"),
                       std::runtime_error);

  Config c4 = cfg;
  c4.ref_apex_pelvis_m = 0.93;  // below the liftoff height z0 + push rise
  CHECK_THROWS_WITH_AS(build_jump_in_place(c4, m), doctest::Contains("liftoff"),
                       std::runtime_error);

  Config c5 = cfg;
  c5.ref_apex_time_s = 0.4;  // flight would have to start inside the crouch
  CHECK_THROWS_WITH_AS(build_jump_in_place(c5, m), doctest::Contains("push-off"),
                       std::runtime_error);

  Config c6 = cfg;
  c6.ref_apex_time_s = 1.6;
  CHECK_THROWS_WITH_AS(build_jump_in_place(c6, m), doctest::Contains("past the jump"),
                       std::runtime_error);
}

TEST_CASE("csv export and import round-trip the sampled trajectory") {
  ReferenceMotion ref = default_ref();
  std::stringstream ss;
  export_reference_csv(ref, ss);

  ReferenceMotion back = import_reference_csv(ss);
  REQUIRE(back.samples() == ref.samples());
  for (int i = 0; i < ref.samples(); ++i) {
    // %.17g print and strtod parse round-trip doubles bit-exactly
    CHECK(back.pelvis_z[i] == ref.pelvis_z[i]);
    CHECK(back.foot_z[i] == ref.foot_z[i]);
    CHECK(back.motors[i] == ref.motors[i]);
  }
  CHECK(back.dt == doctest::Approx(ref.dt).epsilon(1e-12));
  CHECK(back.standing_pelvis == ref.pelvis_z.back());
  CHECK(back.standing_motors == ref.motors.back());
  // reconstructed flight window only resolves to the sample grid
  CHECK(std::abs(back.t_apex_s - ref.t_apex_s) <= ref.dt + 1e-9);
  CHECK(std::abs(back.t_air_s - ref.t_air_s) <= ref.dt + 1e-9);
}

TEST_CASE("csv import rejects malformed input") {
  std::stringstream empty;
  CHECK_THROWS_WITH_AS(import_reference_csv(empty), doctest::Contains("empty"),
                       std::runtime_error);

  std::stringstream short_row("header\n0.0,0.9,0.0\n");
  CHECK_THROWS_WITH_AS(import_reference_csv(short_row), doctest::Contains("short row"),
                       std::runtime_error);

  std::stringstream one_row("header\n0.0,0.9,0.0,0.0,-0.4,0.9,-0.4,0.9\n");
  CHECK_THROWS_WITH_AS(import_reference_csv(one_row), doctest::Contains("two samples"),
                       std::runtime_error);
}

TEST_CASE("preview packs the pelvis height with three lookahead motor frames") {
  ReferenceMotion ref = default_ref();
  for (int t : {0, 10, ref.samples() - 2, ref.samples() + 3}) {
    const auto p = ref.preview(t);
    CHECK(p[0] == ref.pelvis_at(t));
    for (int j = 0; j < 4; ++j) {
      CHECK(p[1 + j] == ref.motors_at(t + 1)[j]);
      CHECK(p[5 + j] == ref.motors_at(t + 4)[j]);
      CHECK(p[9 + j] == ref.motors_at(t + 7)[j]);
    }
  }
}
