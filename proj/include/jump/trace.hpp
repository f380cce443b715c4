#pragma once

#include <fstream>
#include <string>

#include "jump/env.hpp"

namespace jump {

// Everything needed to rebuild the exact environment behind a recorded
// episode: stage, mode, the reset seed triple and every hook that was applied.
struct TraceSetup {
  int stage = 1;
  Mode mode = Mode::flat;
  uint64_t master_seed = 0;
  int worker = 0;
  uint64_t episode = 0;

  bool single_jump = false;
  bool fall_only = false;
  bool has_forced_goal = false;
  Goal forced_goal;
  BaseWrench const_wrench;
  double com_dx = 0.0, com_dz = 0.0;
  bool perturb = false;
  bool has_pulse = false;
  double pulse_start_s = 0.0, pulse_dur_s = 0.0;
  BaseWrench pulse;
};

// Applies the hooks in a fixed order and resets. The writer and the replayer
// both go through here so a trace pins down the trajectory completely.
Observation setup_env(JumpEnv& env, const TraceSetup& ts);

// One CSV per episode. Header comments carry the full config dump and the
// setup; data rows are %.17g so every double round-trips exactly.
class TraceWriter {
 public:
  TraceWriter(const std::string& path, const Config& cfg, const TraceSetup& ts);
  void row(const JumpEnv& env, const Vec4& action, const Vec4& target, const StepResult& r);

 private:
  std::ofstream os_;
};

struct ReplayReport {
  bool ok = false;
  int steps = 0;
  int first_mismatch = -1;  // row index of the first diverging value
  std::string detail;
};

// Rebuilds the environment from the trace header, feeds the recorded actions
// back in and compares state, torques, contact forces, reward and termination
// of every step for exact equality.
ReplayReport replay_trace(const std::string& path);

}  // namespace jump
