#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "jump/ppo.hpp"

namespace jump {

namespace {

void zero_grads(const std::vector<nn::Tensor*>& ts) {
  for (auto* t : ts) t->grad.setZero();
}

std::vector<nn::Tensor*> all_tensors(Policy& policy, ValueNet& value) {
  std::vector<nn::Tensor*> ts = policy.tensors();
  for (auto* t : value.tensors()) ts.push_back(t);
  return ts;
}

}  // namespace

UpdateStats ppo_update(Policy& policy, ValueNet& value, RolloutBatch& b,
                       const PpoConfig& cfg, nn::Adam& opt_pi, nn::Adam& opt_v,
                       Rng& shuffle) {
  const int n = b.n;
  if (cfg.adv_norm && n > 1) {
    double m = 0.0;
    for (double a : b.advantages) m += a;
    m /= double(n);
    double var = 0.0;
    for (double a : b.advantages) var += (a - m) * (a - m);
    const double sd = std::sqrt(var / double(n));
    for (double& a : b.advantages) a = (a - m) / (sd + 1e-8);
  }

  const double std = policy.action_std();
  nn::AdamConfig ac;
  ac.lr = cfg.lr;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  UpdateStats st;
  double sum_pi = 0.0, sum_v = 0.0, sum_kl = 0.0, sum_clip = 0.0;
  int applied = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int i = n - 1; i > 0; --i) {
      const int j = int(shuffle.uniform_index(uint64_t(i) + 1));
      std::swap(order[i], order[j]);
    }
    for (int mb = 0; mb < cfg.minibatches; ++mb) {
      const int lo = mb * n / cfg.minibatches;
      const int hi = (mb + 1) * n / cfg.minibatches;
      const int B = hi - lo;
      if (B <= 0) continue;

      PolicyInput in = policy.make_input(B);
      nn::Mat vo(kValueObsDim, B), am(kActionDim, B);
      Eigen::VectorXd adv(B), ret(B), lpold(B);
      for (int k = 0; k < B; ++k) {
        const int idx = order[lo + k];
        in.direct.col(k) = b.inputs.direct.col(idx);
        if (in.long_hist.size()) in.long_hist.col(k) = b.inputs.long_hist.col(idx);
        if (in.priv.size()) in.priv.col(k) = b.inputs.priv.col(idx);
        vo.col(k) = b.value_obs.col(idx);
        am.col(k) = b.actions.col(idx);
        adv[k] = b.advantages[idx];
        ret[k] = b.returns[idx];
        lpold[k] = b.logp[idx];
      }

      const nn::Mat mean = policy.forward(in);
      const Eigen::VectorXd lpnew = nn::gaussian_logprob(mean, am, std);

      Eigen::VectorXd scale(B);
      double pil = 0.0, kl = 0.0, clipped = 0.0;
      for (int k = 0; k < B; ++k) {
        const double ratio = std::exp(lpnew[k] - lpold[k]);
        const double u = ratio * adv[k];
        const double c = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv[k];
        pil += -std::min(u, c);
        kl += lpold[k] - lpnew[k];
        clipped += std::abs(ratio - 1.0) > cfg.clip ? 1.0 : 0.0;
        scale[k] = (u <= c) ? -adv[k] * ratio / double(B) : 0.0;
      }
      pil /= double(B);

      const nn::Mat vpred = value.forward(vo);
      double vl = 0.0;
      for (int k = 0; k < B; ++k) {
        const double d = double(vpred(0, k)) - ret[k];
        vl += d * d;
      }
      vl /= double(B);

      if (!std::isfinite(pil) || !std::isfinite(vl)) {
        std::cerr << "incident: non-finite loss (pi=" << pil << " v=" << vl
                  << "); minibatch skipped\n";
        st.skipped = true;
        continue;
      }

      const nn::Mat dmean = nn::gaussian_dlogp_dmean(mean, am, std, scale);
      nn::Mat dv(1, B);
      for (int k = 0; k < B; ++k)
        dv(0, k) = float(cfg.vf_coef * 2.0 * (double(vpred(0, k)) - ret[k]) / double(B));

      policy.backward(dmean);
      value.backward(dv);

      const double gnp = nn::clip_grad_norm(policy.tensors(), cfg.max_grad_norm);
      const double gnv = nn::clip_grad_norm(value.tensors(), cfg.max_grad_norm);
      if (!std::isfinite(gnp) || !std::isfinite(gnv)) {
        std::cerr << "incident: non-finite gradient norm; minibatch skipped\n";
        zero_grads(policy.tensors());
        zero_grads(value.tensors());
        st.skipped = true;
        continue;
      }
      opt_pi.step(policy.tensors(), ac);
      opt_v.step(value.tensors(), ac);

      sum_pi += pil;
      sum_v += vl;
      sum_kl += kl / double(B);
      sum_clip += clipped / double(B);
      ++applied;
    }
  }

  if (applied > 0) {
    st.pi_loss = sum_pi / applied;
    st.v_loss = sum_v / applied;
    st.approx_kl = sum_kl / applied;
    st.clip_frac = sum_clip / applied;
  }
  return st;
}

std::string checkpoint_name(Kind kind, int stage, uint64_t seed) {
  return std::string(kind_name(kind)) + "_s" + std::to_string(stage) + "_seed" +
         std::to_string(seed) + ".jgck";
}

std::string metrics_name(Kind kind, int stage, uint64_t seed) {
  return std::string(kind_name(kind)) + "_s" + std::to_string(stage) + "_seed" +
         std::to_string(seed) + "_metrics.csv";
}

void ppo_loop(const Config& cfg, const TrainOptions& opt, Policy& policy, ValueNet& value,
              int iters, const std::string& base) {
  const PpoConfig ppo = ppo_config(cfg);
  Collector col(cfg, opt.stage, opt.mode, policy.kind(), opt.seed, ppo);
  if (opt.single_jump)
    col.configure_envs([](JumpEnv& e) { e.set_single_jump(true); });

  const EpisodeConfig ec = episode_config(cfg, opt.stage, opt.mode);
  nn::Adam opt_pi, opt_v;
  Rng shuffle = Rng::stream(opt.seed, 0x5B, 0, 6);
  EpisodeStats stats(64);

  std::ofstream csv(base + "_metrics.csv");
  if (!csv) throw std::runtime_error("train: cannot write '" + base + "_metrics.csv'");
  csv << "iteration,stage,arch,seed,mean_return,normalized_return,mean_episode_len,"
         "frac_fall,frac_foot_bound,frac_task_bound,frac_timeout,wall_clock_s\n";

  const auto t0 = std::chrono::steady_clock::now();
  for (int iter = 1; iter <= iters; ++iter) {
    RolloutBatch b = col.collect(policy, value);
    for (const auto& s : b.finished) stats.push(s);
    const UpdateStats us = ppo_update(policy, value, b, ppo, opt_pi, opt_v, shuffle);

    const double mean_ret = stats.mean_return();
    const double norm_ret = mean_ret / double(ec.max_steps);
    double wall = 0.0;
    if (!opt.no_wallclock) {
      wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    char row[512];
    std::snprintf(row, sizeof row, "%d,%d,%s,%llu,%.6f,%.6f,%.2f,%.4f,%.4f,%.4f,%.4f,%.3f\n",
                  iter, opt.stage, kind_name(opt.kind),
                  static_cast<unsigned long long>(opt.seed), mean_ret, norm_ret,
                  stats.mean_len(), stats.frac(Term::fall), stats.frac(Term::foot_bound),
                  stats.frac(Term::task_bound), stats.frac(Term::timeout), wall);
    csv << row;
    csv.flush();

    if (opt.log_every > 0 && iter % opt.log_every == 0) {
      std::cerr << base << " iter " << iter << "/" << iters << " return " << mean_ret
                << " norm " << norm_ret << " pi " << us.pi_loss << " v " << us.v_loss
                << "\n";
    }
    if (cfg.ppo_checkpoint_every > 0 && iter % cfg.ppo_checkpoint_every == 0 &&
        iter < iters) {
      nn::save_checkpoint(base + "_iter" + std::to_string(iter) + ".jgck",
                          all_tensors(policy, value));
    }
    if (opt.stop_hook && opt.hook_every > 0 && iter % opt.hook_every == 0 &&
        opt.stop_hook(iter, policy, value))
      break;
  }
  nn::save_checkpoint(base + ".jgck", all_tensors(policy, value));
}

std::string train_stage(const Config& cfg, const TrainOptions& opt) {
  if (opt.kind == Kind::rma_student || opt.kind == Kind::arma)
    throw std::runtime_error(
        "train: this architecture is trained by its dedicated phase, not plain "
        "policy-gradient runs");
  if (opt.stage < 1 || opt.stage > 3)
    throw std::runtime_error("train: stage must be 1, 2 or 3");

  std::filesystem::create_directories(opt.out_dir);
  Policy policy = build_policy(cfg, opt.kind, opt.seed);
  ValueNet value(cfg, opt.seed);

  if (opt.stage > 1) {
    const std::string prev =
        opt.out_dir + "/" + checkpoint_name(opt.kind, opt.stage - 1, opt.seed);
    if (!std::filesystem::exists(prev))
      throw std::runtime_error("train: stage " + std::to_string(opt.stage) +
                               " requires the stage " + std::to_string(opt.stage - 1) +
                               " checkpoint '" + prev + "'");
    nn::load_checkpoint(prev, all_tensors(policy, value));
  }

  const std::string file = checkpoint_name(opt.kind, opt.stage, opt.seed);
  const std::string base = opt.out_dir + "/" + file.substr(0, file.size() - 5);
  ppo_loop(cfg, opt, policy, value, cfg.effective_iters(opt.stage), base);
  return base + ".jgck";
}

}  // namespace jump
