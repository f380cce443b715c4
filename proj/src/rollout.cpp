#include <iostream>
#include <stdexcept>

#include "jump/ppo.hpp"

namespace jump {

PpoConfig ppo_config(const Config& cfg) {
  PpoConfig p;
  p.gamma = cfg.ppo_gamma;
  p.lam = cfg.ppo_lam;
  p.clip = cfg.ppo_clip;
  p.lr = cfg.ppo_lr;
  p.epochs = cfg.ppo_epochs;
  p.minibatches = cfg.ppo_minibatches;
  p.n_envs = cfg.effective_n_envs();
  p.steps_per_env = cfg.effective_steps_per_env();
  p.ent_coef = cfg.ppo_ent_coef;
  p.vf_coef = cfg.ppo_vf_coef;
  p.max_grad_norm = cfg.ppo_max_grad_norm;
  p.adv_norm = cfg.ppo_adv_norm;
  return p;
}

Vec4 policy_act(Policy& policy, const Observation& o, bool explore, Rng* noise) {
  PolicyInput in = policy.make_input(1);
  policy.assemble(o, in, 0);
  const nn::Mat mean = policy.forward(in);
  Vec4 a;
  for (int j = 0; j < kActionDim; ++j) {
    a[j] = double(mean(j, 0));
    if (explore) a[j] += policy.action_std() * noise->normal();
  }
  return a;
}

Collector::Collector(const Config& cfg, int stage, Mode mode, Kind kind, uint64_t seed,
                     const PpoConfig& ppo)
    : ppo_(ppo), kind_(kind), std_(cfg.nn_action_std), seed_(seed) {
  envs_.reserve(ppo.n_envs);
  for (int w = 0; w < ppo.n_envs; ++w) {
    envs_.push_back(std::make_unique<JumpEnv>(cfg, stage, mode));
    episode_.push_back(0);
    ep_return_.push_back(0.0);
    ep_len_.push_back(0);
    // Exploration noise lives on its own stream, disjoint from the five
    // episode streams the environment draws from (salts 0..4).
    noise_.push_back(Rng::stream(seed, uint64_t(w), 0xA5, 5));
  }
  obs_.resize(ppo.n_envs);
}

void Collector::configure_envs(const std::function<void(JumpEnv&)>& fn) {
  for (auto& e : envs_) fn(*e);
}

RolloutBatch Collector::collect(Policy& policy, ValueNet& value) {
  const int N = ppo_.n_envs;
  const int T = ppo_.steps_per_env;

  if (episode_[0] == 0 && ep_len_[0] == 0 && !envs_[0]->steps()) {
    for (int w = 0; w < N; ++w) obs_[w] = envs_[w]->reset(seed_, w, episode_[w]);
  }

  RolloutBatch b;
  b.n_envs = N;
  b.steps_per_env = T;
  b.n = N * T;
  b.inputs = policy.make_input(b.n);
  b.value_obs.resize(kValueObsDim, b.n);
  b.actions.resize(kActionDim, b.n);
  b.logp.resize(b.n);
  b.rewards.assign(b.n, 0.0);
  b.values.assign(b.n, 0.0);
  b.next_values.assign(b.n, 0.0);
  b.done.assign(b.n, 0);
  b.boundary.assign(b.n, 0);

  PolicyInput step_in = policy.make_input(N);
  nn::Mat vobs(kValueObsDim, N);
  nn::Mat act(kActionDim, N);

  for (int t = 0; t < T; ++t) {
    for (int w = 0; w < N; ++w) {
      policy.assemble(obs_[w], step_in, w);
      vobs.col(w) = obs_[w].value_obs.cast<float>();
    }
    const nn::Mat mean = policy.forward(step_in);
    const nn::Mat v = value.forward(vobs);

    for (int w = 0; w < N; ++w) {
      const int idx = w * T + t;
      b.inputs.direct.col(idx) = step_in.direct.col(w);
      if (b.inputs.long_hist.size()) b.inputs.long_hist.col(idx) = step_in.long_hist.col(w);
      if (b.inputs.priv.size()) b.inputs.priv.col(idx) = step_in.priv.col(w);
      b.value_obs.col(idx) = vobs.col(w);
      b.values[idx] = double(v(0, w));
      if (t > 0 && !b.boundary[idx - 1]) b.next_values[idx - 1] = double(v(0, w));
      for (int j = 0; j < kActionDim; ++j)
        act(j, w) = float(double(mean(j, w)) + std_ * noise_[w].normal());
    }
    const Eigen::VectorXd lp = nn::gaussian_logprob(mean, act, std_);

    for (int w = 0; w < N; ++w) {
      const int idx = w * T + t;
      b.actions.col(idx) = act.col(w);
      b.logp[idx] = lp[w];
      const Vec4 raw = act.col(w).cast<double>();
      const Vec4 target =
          action_postprocess(kind_, raw, envs_[w]->reference(), envs_[w]->ref_step());

      StepResult r;
      bool diverged = false;
      try {
        r = envs_[w]->step(raw, target);
      } catch (const std::exception& e) {
        diverged = true;
        std::cerr << "incident: worker " << w << " episode " << episode_[w]
                  << " step " << ep_len_[w] << ": " << e.what()
                  << "; episode truncated\n";
      }

      if (diverged) {
        b.boundary[idx] = 1;
        b.next_values[idx] = b.values[idx];
        b.finished.push_back({ep_return_[w], ep_len_[w] + 1, Term::timeout});
        ep_return_[w] = 0.0;
        ep_len_[w] = 0;
        obs_[w] = envs_[w]->reset(seed_, w, ++episode_[w]);
        continue;
      }

      b.rewards[idx] = r.reward;
      ep_return_[w] += r.reward;
      ep_len_[w] += 1;

      if (r.done || r.truncated) {
        b.boundary[idx] = 1;
        if (r.done) {
          b.done[idx] = 1;
          b.next_values[idx] = 0.0;
        } else {
          nn::Mat tv(kValueObsDim, 1);
          tv.col(0) = r.obs.value_obs.cast<float>();
          b.next_values[idx] = double(value.forward(tv)(0, 0));
        }
        b.finished.push_back({ep_return_[w], ep_len_[w], r.term});
        ep_return_[w] = 0.0;
        ep_len_[w] = 0;
        obs_[w] = envs_[w]->reset(seed_, w, ++episode_[w]);
      } else {
        obs_[w] = r.obs;
      }
    }
  }

  // Bootstrap values for segments that continue past the batch end.
  for (int w = 0; w < N; ++w) vobs.col(w) = obs_[w].value_obs.cast<float>();
  const nn::Mat v_tail = value.forward(vobs);
  for (int w = 0; w < N; ++w) {
    const int idx = w * T + (T - 1);
    if (!b.boundary[idx]) b.next_values[idx] = double(v_tail(0, w));
  }

  // Per-worker GAE over the contiguous segments.
  b.advantages.resize(b.n);
  b.returns.resize(b.n);
  for (int w = 0; w < N; ++w) {
    const int o = w * T;
    const std::vector<double> r(b.rewards.begin() + o, b.rewards.begin() + o + T);
    const std::vector<double> vv(b.values.begin() + o, b.values.begin() + o + T);
    const std::vector<double> nv(b.next_values.begin() + o, b.next_values.begin() + o + T);
    const std::vector<uint8_t> bd(b.boundary.begin() + o, b.boundary.begin() + o + T);
    const GaeResult g = gae(r, vv, nv, bd, ppo_.gamma, ppo_.lam);
    for (int t = 0; t < T; ++t) {
      b.advantages[o + t] = g.adv[t];
      b.returns[o + t] = g.ret[t];
    }
  }
  return b;
}

void EpisodeStats::push(const RolloutBatch::EpisodeStat& s) {
  buf_.push_back(s);
  while (buf_.size() > cap_) buf_.pop_front();
}

double EpisodeStats::mean_return() const {
  if (buf_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : buf_) s += e.ret;
  return s / double(buf_.size());
}

double EpisodeStats::mean_len() const {
  if (buf_.empty()) return 0.0;
  double s = 0.0;
  for (const auto& e : buf_) s += double(e.len);
  return s / double(buf_.size());
}

double EpisodeStats::frac(Term t) const {
  if (buf_.empty()) return 0.0;
  double c = 0.0;
  for (const auto& e : buf_) c += (e.term == t) ? 1.0 : 0.0;
  return c / double(buf_.size());
}

}  // namespace jump
