#pragma once

#include <string>
#include <vector>

#include "jump/env.hpp"
#include "jump/nn.hpp"

namespace jump {

enum class Kind { ours, residual, long_only, short_only, expert, rma_student, arma };

const char* kind_name(Kind k);
// Accepts both the full names and the CLI shorthands (long, short, rma).
Kind parse_kind(const std::string& s);

// Minibatch policy inputs, one sample per column.
struct PolicyInput {
  nn::Mat direct;     // always present
  nn::Mat long_hist;  // [kLongDim x B] for kinds with a conv path, else empty
  nn::Mat priv;       // [kPrivDim x B] for the expert, else empty
};

// One policy head of the ablation zoo. All kinds share the action interface:
// a diagonal-Gaussian over desired motor positions with fixed std.
//
//   ours / residual: direct = [goal, preview, short history], + conv features
//   long_only:       direct = [goal, preview, current (q^o, a) pair], + conv features
//   short_only:      direct only
//   expert:          direct + 8D extrinsics from the privileged-parameter MLP
//   rma_student/arma: direct + 8D extrinsics predicted from the long history
class Policy {
 public:
  Policy() = default;
  Policy(const Config& cfg, Kind kind, uint64_t init_seed);

  Kind kind() const { return kind_; }
  int direct_dim() const { return direct_dim_; }
  int input_dim() const { return direct_dim_ + feed_dim_; }
  int feed_dim() const { return feed_dim_; }
  bool uses_long() const { return uses_long_; }
  bool uses_priv() const { return kind_ == Kind::expert; }
  double action_std() const { return std_; }

  nn::Mat forward(const PolicyInput& in);
  void backward(const nn::Mat& dmean);

  // Extrinsics sub-paths, for distillation and its tests.
  nn::Mat expert_extrinsics(const nn::Mat& priv);
  nn::Mat student_extrinsics(const nn::Mat& long_hist);
  void student_extrinsics_backward(const nn::Mat& de);

  // Flattens one observation into the kind's input layout.
  void assemble(const Observation& o, PolicyInput& in, int column) const;
  PolicyInput make_input(int batch) const;

  std::vector<nn::Tensor*> tensors();
  std::vector<nn::Tensor*> base_tensors();
  std::vector<nn::Tensor*> encoder_tensors();
  void set_base_trainable(bool on);
  void set_encoder_trainable(bool on);

  nn::ConvEncoder conv;
  nn::Dense conv_head;  // conv flatten -> extrinsics, rma_student/arma only
  nn::Mlp priv_mlp;     // privileged parameters -> extrinsics, expert only
  nn::Mlp base;

 private:
  Kind kind_ = Kind::ours;
  int direct_dim_ = 0;
  int feed_dim_ = 0;
  bool uses_long_ = false;
  bool has_conv_head_ = false;
  double std_ = 0.1;
};

// Policy with the action head biased to the standing pose (zero for the
// residual kind, whose zero action already reproduces the reference).
Policy build_policy(const Config& cfg, Kind kind, uint64_t init_seed);

int policy_input_dim(const Config& cfg, Kind kind);

// residual: q_m^d = raw + q_m^r(t); every other kind passes raw through.
Vec4 action_postprocess(Kind kind, const Vec4& raw, const ReferenceMotion& ref, int ref_step);

class ValueNet {
 public:
  ValueNet() = default;
  ValueNet(const Config& cfg, uint64_t init_seed);
  nn::Mat forward(const nn::Mat& value_obs) { return mlp.forward(value_obs); }
  void backward(const nn::Mat& dv) { mlp.backward(dv); }
  std::vector<nn::Tensor*> tensors();
  nn::Mlp mlp;
};

}  // namespace jump
