#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "jump/arch.hpp"
#include "jump/env.hpp"

namespace jump {

struct PpoConfig {
  double gamma = 0.99;
  double lam = 0.95;
  double clip = 0.2;
  double lr = 3e-4;
  int epochs = 4;
  int minibatches = 8;
  int n_envs = 16;
  int steps_per_env = 256;
  double ent_coef = 0.0;
  double vf_coef = 0.5;
  double max_grad_norm = 1.0;
  bool adv_norm = true;
};

PpoConfig ppo_config(const Config& cfg);

// Generalized advantage estimation over one trajectory segment.
//
//   delta_t = r_t + gamma * next_value_t - v_t
//   adv_t   = delta_t + gamma * lam * adv_{t+1} * (boundary_t ? 0 : 1)
//   ret_t   = adv_t + v_t
//
// next_value_t carries the bootstrap convention: the value of the successor
// state, already zeroed where the episode truly terminated. boundary_t is 1
// after the last step of an episode, terminated or truncated, and stops the
// recursion there. All arithmetic is double.
struct GaeResult {
  std::vector<double> adv;
  std::vector<double> ret;
};
GaeResult gae(const std::vector<double>& rewards, const std::vector<double>& values,
              const std::vector<double>& next_values, const std::vector<uint8_t>& boundary,
              double gamma, double lam);

// One on-policy batch. Columns are ordered worker-major: sample index
// w * steps_per_env + t, so each worker's segment is contiguous.
struct RolloutBatch {
  int n = 0;
  int n_envs = 0;
  int steps_per_env = 0;

  PolicyInput inputs;
  nn::Mat value_obs;  // [kValueObsDim x n]
  nn::Mat actions;    // raw policy-frame actions, before any postprocess
  Eigen::VectorXd logp;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<double> next_values;
  std::vector<uint8_t> done;      // true termination after this step
  std::vector<uint8_t> boundary;  // episode ended after this step (either way)
  std::vector<double> advantages;
  std::vector<double> returns;

  struct EpisodeStat {
    double ret = 0.0;
    int len = 0;
    Term term = Term::none;
  };
  std::vector<EpisodeStat> finished;  // episodes that ended inside this batch
};

// Draws one raw action from the policy for a single observation.
// With exploration off the mean is returned and `noise` may be null.
Vec4 policy_act(Policy& policy, const Observation& o, bool explore, Rng* noise);

// Steps n_envs environments in lockstep and in worker-index order, keeping
// episode state across batches. Exploration noise is drawn from a dedicated
// per-worker stream so a collection is fully determined by
// (seed, n_envs, steps_per_env, parameters).
class Collector {
 public:
  Collector(const Config& cfg, int stage, Mode mode, Kind kind, uint64_t seed,
            const PpoConfig& ppo);

  RolloutBatch collect(Policy& policy, ValueNet& value);

  // Episode customization applied to every worker (single-goal training,
  // robustness wrenches). Must be called before the first collect.
  void configure_envs(const std::function<void(JumpEnv&)>& fn);

  int n_envs() const { return static_cast<int>(envs_.size()); }
  const JumpEnv& env(int w) const { return *envs_[w]; }

 private:
  PpoConfig ppo_;
  Kind kind_;
  double std_ = 0.1;
  std::vector<std::unique_ptr<JumpEnv>> envs_;
  std::vector<Observation> obs_;
  std::vector<uint64_t> episode_;
  std::vector<double> ep_return_;
  std::vector<int> ep_len_;
  std::vector<Rng> noise_;
  uint64_t seed_ = 0;
};

struct UpdateStats {
  double pi_loss = 0.0;
  double v_loss = 0.0;
  double approx_kl = 0.0;
  double clip_frac = 0.0;
  bool skipped = false;  // non-finite loss; parameters untouched
};

UpdateStats ppo_update(Policy& policy, ValueNet& value, RolloutBatch& batch,
                       const PpoConfig& cfg, nn::Adam& opt_pi, nn::Adam& opt_v,
                       Rng& shuffle);

struct TrainOptions {
  int stage = 1;
  Kind kind = Kind::ours;
  Mode mode = Mode::terrain;
  uint64_t seed = 0;
  std::string out_dir = "out";
  bool no_wallclock = false;   // metrics wall_clock_s column written as 0
  bool single_jump = false;    // first goal only, then stand for the rest
  int log_every = 10;          // progress lines to stderr; 0 silences

  // Optional early stop, polled every hook_every iterations. Returning true
  // ends the run; the final checkpoint is still written.
  std::function<bool(int iter, Policy& policy, ValueNet& value)> stop_hook;
  int hook_every = 25;
};

// out_dir file naming shared by the trainer, prerequisite checks and evals.
std::string checkpoint_name(Kind kind, int stage, uint64_t seed);
std::string metrics_name(Kind kind, int stage, uint64_t seed);

// Full PPO run for one curriculum stage: loads the previous stage's
// checkpoint when stage > 1, writes metrics CSV and periodic + final
// checkpoints. Returns the final checkpoint path.
std::string train_stage(const Config& cfg, const TrainOptions& opt);

// The loop inside train_stage, on an already-built policy/value pair:
// collect, update, metrics row, periodic checkpoints, final save to
// <base>.jgck. Reused by the finetuning phase, which prepares its own
// networks and freezes.
void ppo_loop(const Config& cfg, const TrainOptions& opt, Policy& policy, ValueNet& value,
              int iters, const std::string& base);

// Rolling per-episode statistics used for the metrics rows.
class EpisodeStats {
 public:
  explicit EpisodeStats(size_t cap = 64) : cap_(cap) {}
  void push(const RolloutBatch::EpisodeStat& s);
  bool empty() const { return buf_.empty(); }
  double mean_return() const;
  double mean_len() const;
  double frac(Term t) const;

 private:
  size_t cap_;
  std::deque<RolloutBatch::EpisodeStat> buf_;
};

}  // namespace jump
