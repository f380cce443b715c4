#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jump/cli.hpp"
#include "jump/evals.hpp"
#include "jump/ppo.hpp"
#include "jump/rma.hpp"
#include "jump/trace.hpp"

namespace jump {

namespace {

Config load_config_or_throw(const std::string& path) {
  Config cfg;
  if (!path.empty()) {
    std::string err;
    if (!cfg.load_file(path, err)) throw std::runtime_error(err);
  }
  return cfg;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Goal-conditioned jumping controller: training, evaluation and replay"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Run one curriculum stage of training");
  int stage = 1;
  std::string arch = "ours", mode_s = "terrain", config_path, out_dir = "out";
  uint64_t seed = 0;
  bool no_wallclock = false, single_jump = false;
  train->add_option("--stage", stage, "Curriculum stage")->check(CLI::Range(1, 3));
  train->add_option("--arch", arch,
                    "ours|residual|long|short|expert|rma|arma (rma trains the "
                    "distilled student, arma finetunes it)");
  train->add_option("--mode", mode_s, "flat|terrain");
  train->add_option("--seed", seed, "Experiment seed");
  train->add_option("--config", config_path, "Config file overriding the defaults");
  train->add_option("--out", out_dir, "Checkpoint/metrics directory");
  train->add_flag("--no-wallclock", no_wallclock,
                  "Write 0 in the metrics wall-clock column, for byte-identical runs");
  train->add_flag("--single-jump", single_jump,
                  "Command only the episode's first jump, then stand (single-goal "
                  "training)");

  // eval
  auto* eval = app.add_subcommand("eval", "Landing accuracy over a goals file");
  std::string ckpt_path, goals_path;
  std::vector<uint64_t> seeds;
  eval->add_option("--checkpoint", ckpt_path, "Policy checkpoint")->required();
  eval->add_option("--goals", goals_path, "CSV with c_x_m,c_y_m,c_z_m,c_phi_rad")
      ->required();
  eval->add_option("--seeds", seeds, "Seed list")->delimiter(',');
  eval->add_option("--config", config_path, "Config file overriding the defaults");
  eval->add_option("--out", out_dir, "Report/trace directory");

  // robustness
  auto* robust = app.add_subcommand("robustness", "Out-of-distribution survival trials");
  std::string scenario_s = "constant_force";
  double magnitude = -1.0;
  int trials = -1;
  robust->add_option("--checkpoint", ckpt_path, "Policy checkpoint")->required();
  robust->add_option("--scenario", scenario_s, "constant_force|com_offset|wrench_pulse");
  robust->add_option("--magnitude", magnitude,
                     "Scenario strength (N or m); default per scenario");
  robust->add_option("--trials", trials, "Trial count");
  robust->add_option("--seed", seed, "Experiment seed");
  robust->add_option("--config", config_path, "Config file overriding the defaults");
  robust->add_option("--out", out_dir, "Report/trace directory");

  // replay
  auto* replay = app.add_subcommand("replay", "Re-simulate a trace and verify it");
  std::string trace_path;
  replay->add_option("--trace", trace_path, "Trace CSV written by eval/robustness")
      ->required();

  // export-ref
  auto* exref = app.add_subcommand("export-ref", "Write the reference motion as CSV");
  std::string ref_out;
  exref->add_option("--out", ref_out, "Output CSV path")->required();
  exref->add_option("--config", config_path, "Config file overriding the defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*train) {
      const Config cfg = load_config_or_throw(config_path);
      const Kind kind = parse_kind(arch);
      TrainOptions opt;
      opt.stage = stage;
      opt.kind = kind;
      opt.mode = parse_mode(mode_s);
      opt.seed = seed;
      opt.out_dir = out_dir;
      opt.no_wallclock = no_wallclock;
      opt.single_jump = single_jump;
      if (kind == Kind::rma_student) {
        const DistillResult r = distill_student(cfg, opt);
        std::cout << "distilled student -> " << r.checkpoint << "\n";
      } else if (kind == Kind::arma) {
        const std::string p = finetune_arma(cfg, opt);
        std::cout << "finetuned -> " << p << "\n";
      } else {
        const std::string p = train_stage(cfg, opt);
        std::cout << "trained -> " << p << "\n";
      }
      return 0;
    }

    if (*eval) {
      const Config cfg = load_config_or_throw(config_path);
      Policy policy = load_policy(cfg, ckpt_path);
      const std::vector<Goal> goals = load_goals_csv(goals_path);
      if (seeds.empty()) seeds.push_back(0);
      const EvalSummary sum = eval_landing(cfg, policy, goals, seeds, out_dir);
      std::cout << "successes " << sum.successes << "/" << sum.trials.size()
                << " survived " << sum.survived << "/" << sum.trials.size()
                << "; report in " << out_dir << "/eval_report.csv\n";
      return 0;
    }

    if (*robust) {
      const Config cfg = load_config_or_throw(config_path);
      Policy policy = load_policy(cfg, ckpt_path);
      const Scenario sc = parse_scenario(scenario_s);
      if (magnitude < 0.0) {
        magnitude = sc == Scenario::constant_force ? cfg.harness_robust_force_n
                    : sc == Scenario::com_offset   ? cfg.harness_com_offset_m
                                                   : cfg.rand_perturb_force_n;
      }
      if (trials < 0) trials = cfg.harness_trials;
      const RobustReport rep =
          run_robustness(cfg, policy, sc, magnitude, trials, seed, out_dir);
      std::cout << "survived " << rep.survived << "/" << trials
                << " recovered-by-retargeting " << rep.retargeted << "; report in "
                << out_dir << "/robustness_" << scenario_name(sc) << ".json\n";
      return 0;
    }

    if (*replay) {
      const ReplayReport rep = replay_trace(trace_path);
      if (rep.ok) {
        std::cout << "replay ok: " << rep.steps << " steps bit-exact\n";
        return 0;
      }
      std::cout << "replay MISMATCH: " << rep.detail << "\n";
      return 1;
    }

    if (*exref) {
      const Config cfg = load_config_or_throw(config_path);
      const ReferenceMotion ref = build_jump_in_place(cfg, default_model(cfg));
      std::ofstream os(ref_out);
      if (!os) throw std::runtime_error("export-ref: cannot write '" + ref_out + "'");
      export_reference_csv(ref, os);
      std::cout << "wrote " << ref.samples() << " samples to " << ref_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace jump
