#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "jump/evals.hpp"
#include "jump/ppo.hpp"

namespace jump {

Policy load_policy(const Config& cfg, const std::string& path, Kind* kind_out) {
  const std::vector<nn::TensorInfo> manifest = nn::checkpoint_manifest(path);
  std::string tag;
  for (const auto& t : manifest) {
    if (t.name.rfind("policy_", 0) != 0) continue;
    const size_t slash = t.name.find('/');
    if (slash == std::string::npos) continue;
    tag = t.name.substr(7, slash - 7);
    break;
  }
  Kind kind;
  if (tag == "ours") {
    kind = Kind::ours;
  } else if (tag == "residual") {
    kind = Kind::residual;
  } else if (tag == "long_only") {
    kind = Kind::long_only;
  } else if (tag == "short_only") {
    kind = Kind::short_only;
  } else if (tag == "expert") {
    kind = Kind::expert;
  } else if (tag == "rma") {
    kind = Kind::rma_student;
  } else {
    throw std::runtime_error("eval: '" + path +
                             "' does not contain a recognizable policy (tag '" + tag +
                             "')");
  }
  Policy p = build_policy(cfg, kind, 0);
  nn::load_checkpoint(path, p.tensors());
  if (kind_out) *kind_out = kind;
  return p;
}

RunOutcome run_policy_episode(const Config& cfg, Policy& policy, const TraceSetup& ts,
                              const std::string& trace_path) {
  JumpEnv env(cfg, ts.stage, ts.mode);
  std::unique_ptr<TraceWriter> tw;
  if (!trace_path.empty()) tw = std::make_unique<TraceWriter>(trace_path, cfg, ts);
  Observation o = setup_env(env, ts);

  RunOutcome out;
  double anchor_x = env.anchor_x();
  Goal jgoal = env.goal();
  out.jumped = (ts.stage == 1);  // stage 1 commands the jump at reset
  double last_td = -1.0;

  const auto measure = [&](void) {
    out.pos_err = std::abs(env.state().q[Q_X] - anchor_x - jgoal.cx);
    out.ang_err = std::abs(env.state().q[Q_TH] - jgoal.cphi);
  };

  for (;;) {
    const Vec4 a = policy_act(policy, o, false, nullptr);
    const Vec4 tgt = action_postprocess(policy.kind(), a, env.reference(), env.ref_step());
    const StepResult r = env.step(a, tgt);
    if (tw) tw->row(env, a, tgt, r);
    ++out.steps;
    out.max_flight_s = env.max_flight_s();

    if (r.events.jump_started) {
      anchor_x = env.anchor_x();
      jgoal = env.goal();
      out.jumped = true;
    }
    if (r.events.touchdown) last_td = env.state().time;

    if (r.done || r.truncated) {
      out.fell = r.term == Term::fall;
      measure();
      break;
    }
    const bool grounded = env.state().in_contact(0) || env.state().in_contact(1);
    if (out.jumped && grounded && last_td > 0.0 &&
        env.state().time >= last_td + cfg.ep_settle_time_s) {
      measure();
      break;
    }
    o = r.obs;
  }
  return out;
}

std::vector<Goal> load_goals_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("eval: cannot open goals file '" + path + "'");
  std::vector<Goal> goals;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.find("c_x_m") != std::string::npos) continue;
    Goal g;
    char trail = 0;
    const int got =
        std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf%c", &g.cx, &g.cy, &g.cz, &g.cphi, &trail);
    if (got < 4)
      throw std::runtime_error("eval: goals file line " + std::to_string(lineno) +
                               " is not c_x_m,c_y_m,c_z_m,c_phi_rad");
    goals.push_back(g);
  }
  if (goals.empty()) throw std::runtime_error("eval: goals file '" + path + "' is empty");
  return goals;
}

EvalSummary eval_landing(const Config& cfg, Policy& policy, const std::vector<Goal>& goals,
                         const std::vector<uint64_t>& seeds, const std::string& out_dir,
                         bool write_traces) {
  std::filesystem::create_directories(out_dir);
  bool any_elev = false;
  for (const Goal& g : goals) any_elev = any_elev || g.cz != 0.0;
  const Mode mode = any_elev ? Mode::terrain : Mode::flat;
  const EpisodeConfig ec = episode_config(cfg, 2, mode);

  EvalSummary sum;
  std::ofstream report(out_dir + "/eval_report.csv");
  if (!report)
    throw std::runtime_error("eval: cannot write '" + out_dir + "/eval_report.csv'");
  report << "c_x_m,c_y_m,c_z_m,c_phi_rad,seed,pos_err_m,ang_err_rad,success,survived,"
            "trace\n";

  int worker = 0;
  for (size_t gi = 0; gi < goals.size(); ++gi) {
    for (size_t si = 0; si < seeds.size(); ++si, ++worker) {
      TraceSetup ts;
      ts.stage = 2;
      ts.mode = mode;
      ts.master_seed = seeds[si];
      ts.worker = worker;
      ts.episode = 0;
      ts.single_jump = true;
      ts.fall_only = true;
      ts.has_forced_goal = true;
      ts.forced_goal = goals[gi];

      EvalTrial t;
      t.goal = goals[gi];
      t.seed = seeds[si];
      if (write_traces)
        t.trace = out_dir + "/eval_g" + std::to_string(gi) + "_s" + std::to_string(si) +
                  ".csv";
      const RunOutcome ro = run_policy_episode(cfg, policy, ts, t.trace);
      t.pos_err = ro.pos_err;
      t.ang_err = ro.ang_err;
      t.survived = !ro.fell;
      t.success = t.survived && ro.jumped && t.pos_err <= ec.et_pos && t.ang_err <= ec.et_ang;
      sum.successes += t.success ? 1 : 0;
      sum.survived += t.survived ? 1 : 0;

      char row[256];
      std::snprintf(row, sizeof row, "%g,%g,%g,%g,%llu,%.6f,%.6f,%d,%d,%s\n", t.goal.cx,
                    t.goal.cy, t.goal.cz, t.goal.cphi,
                    static_cast<unsigned long long>(t.seed), t.pos_err, t.ang_err,
                    t.success ? 1 : 0, t.survived ? 1 : 0, t.trace.c_str());
      report << row;
      sum.trials.push_back(std::move(t));
    }
  }
  return sum;
}

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::constant_force: return "constant_force";
    case Scenario::com_offset: return "com_offset";
    case Scenario::wrench_pulse: return "wrench_pulse";
  }
  return "?";
}

Scenario parse_scenario(const std::string& s) {
  if (s == "constant_force") return Scenario::constant_force;
  if (s == "com_offset") return Scenario::com_offset;
  if (s == "wrench_pulse") return Scenario::wrench_pulse;
  throw std::runtime_error("unknown scenario '" + s +
                           "' (constant_force, com_offset, wrench_pulse)");
}

RobustReport run_robustness(const Config& cfg, Policy& policy, Scenario sc,
                            double magnitude, int trials, uint64_t seed,
                            const std::string& out_dir, bool write_traces) {
  std::filesystem::create_directories(out_dir);
  const EpisodeConfig ec = episode_config(cfg, 2, Mode::flat);

  RobustReport rep;
  rep.scenario = sc;
  rep.magnitude = magnitude;

  for (int i = 0; i < trials; ++i) {
    TraceSetup ts;
    ts.stage = 2;
    ts.mode = Mode::flat;
    ts.master_seed = seed;
    ts.worker = i;
    ts.episode = 0;
    ts.single_jump = true;
    ts.fall_only = true;
    ts.has_forced_goal = true;  // jump in place

    switch (sc) {
      case Scenario::constant_force:
        ts.const_wrench.fx = magnitude;
        break;
      case Scenario::com_offset:
        ts.com_dx = magnitude;
        ts.com_dz = magnitude;
        break;
      case Scenario::wrench_pulse: {
        const ReferenceMotion ref = build_jump_in_place(cfg, default_model(cfg));
        ts.has_pulse = true;
        ts.pulse_start_s = cfg.ep_first_stand_lo_s + (ref.t_apex_s - ref.t_air_s);
        ts.pulse_dur_s = 0.2;
        ts.pulse.fx = magnitude;
        ts.pulse.my = 0.25 * magnitude;
        break;
      }
    }

    RobustTrial t;
    if (write_traces)
      t.trace = out_dir + "/robust_" + std::string(scenario_name(sc)) + "_t" +
                std::to_string(i) + ".csv";
    const RunOutcome ro = run_policy_episode(cfg, policy, ts, t.trace);
    t.survived = !ro.fell;
    t.landing_disp = ro.pos_err;
    t.ang_err = ro.ang_err;
    t.retargeted = t.survived && ro.jumped && t.landing_disp > ec.et_pos;
    rep.survived += t.survived ? 1 : 0;
    rep.retargeted += t.retargeted ? 1 : 0;
    rep.trials.push_back(std::move(t));
  }

  nlohmann::json j;
  j["scenario"] = scenario_name(sc);
  j["magnitude"] = rep.magnitude;
  j["trials"] = int(rep.trials.size());
  j["survived"] = rep.survived;
  j["recovered_by_retargeting"] = rep.retargeted;
  j["per_trial"] = nlohmann::json::array();
  for (const RobustTrial& t : rep.trials) {
    nlohmann::json tj;
    tj["survived"] = t.survived;
    tj["recovered_by_retargeting"] = t.retargeted;
    tj["landing_disp_m"] = t.landing_disp;
    tj["ang_err_rad"] = t.ang_err;
    tj["trace"] = t.trace;
    j["per_trial"].push_back(tj);
  }
  std::ofstream os(out_dir + "/robustness_" + scenario_name(sc) + ".json");
  if (!os)
    throw std::runtime_error("robustness: cannot write report under '" + out_dir + "'");
  os << j.dump(2) << "\n";
  return rep;
}

}  // namespace jump
