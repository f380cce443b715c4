#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jump/rng.hpp"

namespace jump {
namespace nn {

// Activations and parameters are 32-bit; every reduction that aggregates over
// a batch (losses, gradient sums, log-probabilities) accumulates in 64-bit.
// Batches are stored one sample per column.
using Mat = Eigen::MatrixXf;
using MatD = Eigen::MatrixXd;

struct Tensor {
  std::string name;
  Mat value;
  Mat grad;
  Mat m, v;  // Adam moments, sized on first optimizer step
  bool trainable = true;

  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

// Gram-Schmidt-free orthogonal init: QR of a Gaussian draw, sign-corrected so
// the decomposition is unique, scaled by `gain`. Deterministic in rng.
void orthogonal_init(Tensor& w, double gain, Rng& rng);

class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, int in, int out, double gain, Rng& rng);

  Mat forward(const Mat& x);
  // Accumulates into w.grad / b.grad, returns dL/dx. Throws if no forward
  // pass is cached.
  Mat backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
  int in_dim() const { return int(w.value.cols()); }
  int out_dim() const { return int(w.value.rows()); }

  Tensor w, b;

 private:
  Mat x_;
  bool cached_ = false;
};

class Tanh {
 public:
  Mat forward(const Mat& x);
  Mat backward(const Mat& dy);

 private:
  Mat y_;
  bool cached_ = false;
};

class Relu {
 public:
  Mat forward(const Mat& x);
  Mat backward(const Mat& dy);

 private:
  Mat x_;
  bool cached_ = false;
};

struct ConvSpec {
  int kernel = 1;
  int filters = 1;
  int stride = 1;
  bool pad = false;  // zero padding, TF-"same" amounts
};

// 1D cross-correlation over a time-major flattened sequence: input column =
// [x(t=0, c=0..C-1), x(t=1, ...), ...] of length T*C, output column likewise
// [To * filters]. Weights: [filters x kernel*C].
class Conv1d {
 public:
  Conv1d() = default;
  Conv1d(const std::string& name, int in_channels, const ConvSpec& spec, double gain, Rng& rng);

  int out_len(int in_len) const;  // throws if in_len < kernel without padding
  Mat forward(const Mat& x);
  Mat backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
  int channels() const { return channels_; }
  const ConvSpec& spec() const { return spec_; }

  Tensor w, b;

 private:
  int channels_ = 0;
  ConvSpec spec_;
  Mat patches_;  // im2col cache, [kernel*C x B*To]
  int t_in_ = 0, t_out_ = 0, batch_ = 0, pad_left_ = 0;
  bool cached_ = false;
};

// Conv stack with relu after every layer; the time-major output of the last
// layer doubles as the flattened feature vector.
class ConvEncoder {
 public:
  ConvEncoder() = default;
  ConvEncoder(const std::string& prefix, int channels, const std::vector<ConvSpec>& specs,
              double gain, Rng& rng);

  int out_dim(int seq_len) const;
  Mat forward(const Mat& x);
  Mat backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out) {
    for (auto& c : convs) c.collect(out);
  }
  bool empty() const { return convs.empty(); }

  std::vector<Conv1d> convs;
  std::vector<Relu> acts;
};

// Dense stack, tanh on hidden layers, linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::string& prefix, int in, const std::vector<int>& hidden, int out,
      double hidden_gain, double final_gain, Rng& rng);

  Mat forward(const Mat& x);
  Mat backward(const Mat& dy);
  void collect(std::vector<Tensor*>& out) {
    for (auto& l : layers) l.collect(out);
  }
  int in_dim() const { return layers.front().in_dim(); }
  int out_dim() const { return layers.back().out_dim(); }

  std::vector<Dense> layers;
  std::vector<Tanh> acts;
};

// Diagonal-Gaussian head with a fixed, untrained standard deviation.
// Log-probabilities sum over action dimensions in 64-bit.
Eigen::VectorXd gaussian_logprob(const Mat& mean, const Mat& actions, double std);
// dL/dmean given per-sample scale: scale[i] * (action - mean) / std^2.
Mat gaussian_dlogp_dmean(const Mat& mean, const Mat& actions, double std,
                         const Eigen::VectorXd& scale);
double gaussian_entropy(int dim, double std);

struct AdamConfig {
  double lr = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  // Applies and clears grads of trainable tensors; frozen tensors only get
  // their grads cleared, their values and moments never move.
  void step(const std::vector<Tensor*>& params, const AdamConfig& cfg);
  int64_t steps() const { return t_; }

 private:
  int64_t t_ = 0;
};

// Global grad-norm clip across trainable tensors; returns the pre-clip norm.
double clip_grad_norm(const std::vector<Tensor*>& params, double max_norm);

// Checkpoint format: "JGCK", version u32, count u32; per tensor: name length
// u32, name bytes, rank u32, dims u32 each, row-major little-endian f32 data.
void save_checkpoint(const std::string& path, const std::vector<Tensor*>& tensors,
                     uint32_t version = 1);
// Fills each listed tensor from the file by exact name; throws if a name is
// missing or a shape differs. Extra tensors in the file are ignored.
void load_checkpoint(const std::string& path, const std::vector<Tensor*>& tensors);
struct TensorInfo {
  std::string name;
  std::vector<uint32_t> dims;
};
std::vector<TensorInfo> checkpoint_manifest(const std::string& path);

}  // namespace nn
}  // namespace jump
