#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "jump/rma.hpp"

namespace jump {

namespace {

double heldout_mse(Policy& student, const nn::Mat& long_hist, const nn::Mat& target) {
  const nn::Mat ehat = student.student_extrinsics(long_hist);
  double s = 0.0;
  for (int k = 0; k < ehat.cols(); ++k)
    for (int j = 0; j < ehat.rows(); ++j) {
      const double d = double(ehat(j, k)) - double(target(j, k));
      s += d * d;
    }
  return s / double(ehat.cols());
}

}  // namespace

DistillResult distill_student(const Config& cfg, const TrainOptions& opt) {
  if (opt.stage != 3)
    throw std::runtime_error("distill: the student is trained at stage 3");
  std::filesystem::create_directories(opt.out_dir);

  const std::string expert_path =
      opt.out_dir + "/" + checkpoint_name(Kind::expert, 3, opt.seed);
  if (!std::filesystem::exists(expert_path))
    throw std::runtime_error("distill: requires the expert stage-3 checkpoint '" +
                             expert_path + "'");

  Policy expert = build_policy(cfg, Kind::expert, opt.seed);
  ValueNet value(cfg, opt.seed);
  {
    std::vector<nn::Tensor*> ts = expert.tensors();
    for (auto* t : value.tensors()) ts.push_back(t);
    nn::load_checkpoint(expert_path, ts);
  }

  Policy student = build_policy(cfg, Kind::rma_student, opt.seed);
  {
    const std::vector<nn::Tensor*> et = expert.base_tensors();
    const std::vector<nn::Tensor*> st = student.base_tensors();
    for (size_t i = 0; i < et.size(); ++i) st[i]->value = et[i]->value;
  }
  student.set_base_trainable(false);

  PpoConfig roll = ppo_config(cfg);
  roll.steps_per_env = cfg.rma_rollout_steps;

  // Held-out regression set, collected once with the untrained encoder.
  nn::Mat heldout_long, heldout_target;
  {
    Collector eval_col(cfg, 3, opt.mode, Kind::rma_student, opt.seed ^ 0x9e3779b9ull, roll);
    RolloutBatch hb = eval_col.collect(student, value);
    heldout_long = hb.inputs.long_hist;
    const nn::Mat priv = hb.value_obs.middleRows(kValuePrivOffset, kPrivDim);
    heldout_target = expert.expert_extrinsics(priv);
  }

  Collector col(cfg, 3, opt.mode, Kind::rma_student, opt.seed, roll);
  nn::Adam adam;
  nn::AdamConfig ac;
  ac.lr = cfg.rma_lr;
  Rng shuffle = Rng::stream(opt.seed, 0x5B, 0, 7);

  DistillResult res;
  res.mse.push_back(heldout_mse(student, heldout_long, heldout_target));

  const std::string file = checkpoint_name(Kind::rma_student, 3, opt.seed);
  const std::string base = opt.out_dir + "/" + file.substr(0, file.size() - 5);
  std::ofstream csv(base + "_distill.csv");
  if (!csv) throw std::runtime_error("distill: cannot write '" + base + "_distill.csv'");
  csv << "checkpoint,iteration,mse\n";
  {
    char row[128];
    std::snprintf(row, sizeof row, "0,0,%.8f\n", res.mse.back());
    csv << row;
    csv.flush();
  }

  const int iters = cfg.rma_iters;
  const int marks = std::max(1, cfg.rma_checkpoints);
  int next_mark = 1;

  for (int iter = 1; iter <= iters; ++iter) {
    RolloutBatch b = col.collect(student, value);
    const nn::Mat priv = b.value_obs.middleRows(kValuePrivOffset, kPrivDim);
    const nn::Mat target = expert.expert_extrinsics(priv);

    std::vector<int> order(b.n);
    std::iota(order.begin(), order.end(), 0);
    for (int epoch = 0; epoch < cfg.rma_epochs; ++epoch) {
      for (int i = b.n - 1; i > 0; --i) {
        const int j = int(shuffle.uniform_index(uint64_t(i) + 1));
        std::swap(order[i], order[j]);
      }
      for (int lo = 0; lo < b.n; lo += cfg.rma_minibatch) {
        const int B = std::min(cfg.rma_minibatch, b.n - lo);
        nn::Mat ml(kLongDim, B), mt(cfg.nn_extrinsics_dim, B);
        for (int k = 0; k < B; ++k) {
          const int idx = order[lo + k];
          ml.col(k) = b.inputs.long_hist.col(idx);
          mt.col(k) = target.col(idx);
        }
        const nn::Mat ehat = student.student_extrinsics(ml);
        nn::Mat de = ehat - mt;
        double mse = 0.0;
        for (int k = 0; k < B; ++k) mse += double(de.col(k).squaredNorm());
        mse /= double(B);
        if (!std::isfinite(mse)) {
          std::cerr << "incident: non-finite distillation loss; minibatch skipped\n";
          continue;
        }
        de *= float(2.0 / double(B));
        student.student_extrinsics_backward(de);
        nn::clip_grad_norm(student.encoder_tensors(), cfg.ppo_max_grad_norm);
        adam.step(student.encoder_tensors(), ac);
      }
    }

    const bool at_mark = iter * marks >= next_mark * iters && next_mark <= marks;
    if (at_mark) {
      res.mse.push_back(heldout_mse(student, heldout_long, heldout_target));
      char row[128];
      std::snprintf(row, sizeof row, "%d,%d,%.8f\n", next_mark, iter, res.mse.back());
      csv << row;
      csv.flush();
      ++next_mark;
    }
    if (opt.log_every > 0 && iter % opt.log_every == 0)
      std::cerr << base << " iter " << iter << "/" << iters << " heldout mse "
                << heldout_mse(student, heldout_long, heldout_target) << "\n";
  }

  {
    std::vector<nn::Tensor*> ts = student.tensors();
    for (auto* t : value.tensors()) ts.push_back(t);
    nn::save_checkpoint(base + ".jgck", ts);
  }
  res.checkpoint = base + ".jgck";
  return res;
}

std::string finetune_arma(const Config& cfg, const TrainOptions& opt) {
  if (opt.stage != 3)
    throw std::runtime_error("finetune: the finetuning phase runs at stage 3");
  std::filesystem::create_directories(opt.out_dir);

  const std::string student_path =
      opt.out_dir + "/" + checkpoint_name(Kind::rma_student, 3, opt.seed);
  if (!std::filesystem::exists(student_path))
    throw std::runtime_error("finetune: requires the distilled student checkpoint '" +
                             student_path + "'");

  Policy policy = build_policy(cfg, Kind::arma, opt.seed);
  ValueNet value(cfg, opt.seed);
  {
    std::vector<nn::Tensor*> ts = policy.tensors();
    for (auto* t : value.tensors()) ts.push_back(t);
    nn::load_checkpoint(student_path, ts);
  }
  policy.set_encoder_trainable(false);

  const std::string file = checkpoint_name(Kind::arma, 3, opt.seed);
  const std::string base = opt.out_dir + "/" + file.substr(0, file.size() - 5);
  ppo_loop(cfg, opt, policy, value, cfg.arma_iters, base);
  return base + ".jgck";
}

}  // namespace jump
