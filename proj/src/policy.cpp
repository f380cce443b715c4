#include <stdexcept>

#include "jump/arch.hpp"

namespace jump {

namespace {

// rma_student and arma share one architecture; their checkpoints must
// interchange, so they share a name tag too.
const char* structural_tag(Kind k) {
  switch (k) {
    case Kind::ours: return "ours";
    case Kind::residual: return "residual";
    case Kind::long_only: return "long_only";
    case Kind::short_only: return "short_only";
    case Kind::expert: return "expert";
    case Kind::rma_student:
    case Kind::arma: return "rma";
  }
  return "?";
}

}  // namespace

Policy::Policy(const Config& cfg, Kind kind, uint64_t init_seed)
    : kind_(kind), std_(cfg.nn_action_std) {
  Rng rng = Rng::stream(init_seed, 100);
  const std::string prefix = std::string("policy_") + structural_tag(kind);

  std::vector<nn::ConvSpec> specs;
  if (cfg.nn_alt_encoder) {
    specs = {{cfg.nn_alt_conv1_kernel, cfg.nn_alt_conv1_filters, cfg.nn_alt_conv1_stride, true},
             {cfg.nn_alt_conv2_kernel, cfg.nn_alt_conv2_filters, cfg.nn_alt_conv2_stride, true},
             {cfg.nn_alt_conv3_kernel, cfg.nn_alt_conv3_filters, cfg.nn_alt_conv3_stride, true}};
  } else {
    specs = {{cfg.nn_conv1_kernel, cfg.nn_conv1_filters, cfg.nn_conv1_stride, false},
             {cfg.nn_conv2_kernel, cfg.nn_conv2_filters, cfg.nn_conv2_stride, false}};
  }

  direct_dim_ = kind == Kind::long_only ? kGoalDim + kPreviewDim + kPairDim
                                        : kGoalDim + kPreviewDim + kShortDim;
  uses_long_ = kind == Kind::ours || kind == Kind::residual || kind == Kind::long_only ||
               kind == Kind::rma_student || kind == Kind::arma;
  has_conv_head_ = kind == Kind::rma_student || kind == Kind::arma;

  if (uses_long_) {
    conv = nn::ConvEncoder(prefix + "/enc", kPairDim, specs, cfg.nn_hidden_gain, rng);
    feed_dim_ = conv.out_dim(kLongHist);
    if (has_conv_head_) {
      conv_head = nn::Dense(prefix + "/enc/head", feed_dim_, cfg.nn_extrinsics_dim, 1.0, rng);
      feed_dim_ = cfg.nn_extrinsics_dim;
    }
  } else if (kind == Kind::expert) {
    priv_mlp = nn::Mlp(prefix + "/priv", kPrivDim, {cfg.nn_priv_hidden, cfg.nn_priv_hidden},
                       cfg.nn_extrinsics_dim, cfg.nn_hidden_gain, 1.0, rng);
    feed_dim_ = cfg.nn_extrinsics_dim;
  } else {
    feed_dim_ = 0;
  }

  base = nn::Mlp(prefix + "/base", direct_dim_ + feed_dim_,
                 {cfg.nn_base_hidden, cfg.nn_base_hidden}, kActionDim, cfg.nn_hidden_gain,
                 cfg.nn_final_scale, rng);
}

nn::Mat Policy::forward(const PolicyInput& in) {
  if (in.direct.rows() != direct_dim_)
    throw std::runtime_error("policy: direct input dim mismatch");
  if (feed_dim_ == 0) return base.forward(in.direct);

  nn::Mat feat;
  if (kind_ == Kind::expert) {
    if (in.priv.rows() != kPrivDim || in.priv.cols() != in.direct.cols())
      throw std::runtime_error("policy: privileged input dim mismatch");
    feat = priv_mlp.forward(in.priv);
  } else {
    if (in.long_hist.rows() != kLongDim || in.long_hist.cols() != in.direct.cols())
      throw std::runtime_error("policy: long-history input dim mismatch");
    feat = conv.forward(in.long_hist);
    if (has_conv_head_) feat = conv_head.forward(feat);
  }
  nn::Mat bin(direct_dim_ + feed_dim_, in.direct.cols());
  bin.topRows(direct_dim_) = in.direct;
  bin.bottomRows(feed_dim_) = feat;
  return base.forward(bin);
}

void Policy::backward(const nn::Mat& dmean) {
  nn::Mat g = base.backward(dmean);
  if (feed_dim_ == 0) return;
  nn::Mat dfeat = g.bottomRows(feed_dim_);
  if (kind_ == Kind::expert) {
    priv_mlp.backward(dfeat);
  } else {
    if (has_conv_head_) dfeat = conv_head.backward(dfeat);
    conv.backward(dfeat);
  }
}

nn::Mat Policy::expert_extrinsics(const nn::Mat& priv) {
  if (kind_ != Kind::expert)
    throw std::runtime_error("policy: kind has no privileged extrinsics encoder");
  return priv_mlp.forward(priv);
}

nn::Mat Policy::student_extrinsics(const nn::Mat& long_hist) {
  if (!has_conv_head_)
    throw std::runtime_error("policy: kind has no student extrinsics path");
  return conv_head.forward(conv.forward(long_hist));
}

void Policy::student_extrinsics_backward(const nn::Mat& de) {
  if (!has_conv_head_)
    throw std::runtime_error("policy: kind has no student extrinsics path");
  conv.backward(conv_head.backward(de));
}

void Policy::assemble(const Observation& o, PolicyInput& in, int column) const {
  auto d = in.direct.col(column);
  d.segment(0, kGoalDim) = o.goal.cast<float>();
  d.segment(kGoalDim, kPreviewDim) = o.preview.cast<float>();
  if (kind_ == Kind::long_only)
    d.segment(kGoalDim + kPreviewDim, kPairDim) = o.long_hist.tail<kPairDim>().cast<float>();
  else
    d.segment(kGoalDim + kPreviewDim, kShortDim) = o.short_hist.cast<float>();
  if (uses_long_) in.long_hist.col(column) = o.long_hist.cast<float>();
  if (kind_ == Kind::expert)
    in.priv.col(column) = o.value_obs.segment<kPrivDim>(kValuePrivOffset).cast<float>();
}

PolicyInput Policy::make_input(int batch) const {
  PolicyInput in;
  in.direct.resize(direct_dim_, batch);
  if (uses_long_) in.long_hist.resize(kLongDim, batch);
  if (kind_ == Kind::expert) in.priv.resize(kPrivDim, batch);
  return in;
}

std::vector<nn::Tensor*> Policy::tensors() {
  std::vector<nn::Tensor*> out = encoder_tensors();
  base.collect(out);
  return out;
}

std::vector<nn::Tensor*> Policy::base_tensors() {
  std::vector<nn::Tensor*> out;
  base.collect(out);
  return out;
}

std::vector<nn::Tensor*> Policy::encoder_tensors() {
  std::vector<nn::Tensor*> out;
  conv.collect(out);
  if (has_conv_head_) conv_head.collect(out);
  priv_mlp.collect(out);
  return out;
}

void Policy::set_base_trainable(bool on) {
  for (nn::Tensor* t : base_tensors()) t->trainable = on;
}

void Policy::set_encoder_trainable(bool on) {
  for (nn::Tensor* t : encoder_tensors()) t->trainable = on;
}

ValueNet::ValueNet(const Config& cfg, uint64_t init_seed) {
  Rng rng = Rng::stream(init_seed, 101);
  mlp = nn::Mlp("value", kValueObsDim, {cfg.nn_value_hidden, cfg.nn_value_hidden}, 1,
                cfg.nn_hidden_gain, 1.0, rng);
}

std::vector<nn::Tensor*> ValueNet::tensors() {
  std::vector<nn::Tensor*> out;
  mlp.collect(out);
  return out;
}

}  // namespace jump
