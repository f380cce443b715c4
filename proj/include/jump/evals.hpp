#pragma once

#include <string>
#include <vector>

#include "jump/arch.hpp"
#include "jump/trace.hpp"

namespace jump {

// Loads a policy from a checkpoint, inferring the architecture family from
// the tensor name prefix. The shared-structure family loads as the student.
Policy load_policy(const Config& cfg, const std::string& path, Kind* kind_out = nullptr);

// Runs one deterministic-policy episode up to the post-settle measurement
// instant (or termination, whichever first) and reports the landing pose
// error in the frame and goal of the episode's jump.
struct RunOutcome {
  bool fell = false;
  bool jumped = false;
  int steps = 0;
  double pos_err = 0.0;
  double ang_err = 0.0;
  double max_flight_s = 0.0;
};
RunOutcome run_policy_episode(const Config& cfg, Policy& policy, const TraceSetup& ts,
                              const std::string& trace_path = "");

struct EvalTrial {
  Goal goal;
  uint64_t seed = 0;
  double pos_err = 0.0;
  double ang_err = 0.0;
  bool success = false;
  bool survived = false;
  std::string trace;
};

struct EvalSummary {
  std::vector<EvalTrial> trials;
  int successes = 0;
  int survived = 0;
};

// Goals file: CSV with columns c_x_m, c_y_m, c_z_m, c_phi_rad.
std::vector<Goal> load_goals_csv(const std::string& path);

// One commanded jump per (goal, seed); success iff the post-settle pose error
// is within the task bound (closed: the bound itself passes). Writes
// eval_report.csv and per-trial traces under out_dir.
EvalSummary eval_landing(const Config& cfg, Policy& policy, const std::vector<Goal>& goals,
                         const std::vector<uint64_t>& seeds, const std::string& out_dir,
                         bool write_traces = true);

enum class Scenario { constant_force, com_offset, wrench_pulse };
const char* scenario_name(Scenario s);
Scenario parse_scenario(const std::string& s);

struct RobustTrial {
  bool survived = false;
  bool retargeted = false;  // survived with landing displaced beyond the task bound
  double landing_disp = 0.0;
  double ang_err = 0.0;
  std::string trace;
};

struct RobustReport {
  Scenario scenario = Scenario::constant_force;
  double magnitude = 0.0;
  std::vector<RobustTrial> trials;
  int survived = 0;
  int retargeted = 0;
};

// Commanded jump-in-place under an out-of-distribution scenario. Writes
// robustness_<scenario>.json and per-trial traces under out_dir.
RobustReport run_robustness(const Config& cfg, Policy& policy, Scenario sc,
                            double magnitude, int trials, uint64_t seed,
                            const std::string& out_dir, bool write_traces = true);

}  // namespace jump
