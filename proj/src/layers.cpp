#include "jump/nn.hpp"

#include <cmath>
#include <stdexcept>

namespace jump {
namespace nn {

void orthogonal_init(Tensor& w, double gain, Rng& rng) {
  const int rows = int(w.value.rows()), cols = int(w.value.cols());
  const int r = rows >= cols ? rows : cols;
  const int c = rows >= cols ? cols : rows;
  MatD a(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<MatD> qr(a);
  MatD q = qr.householderQ() * MatD::Identity(r, c);
  MatD rr = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
  for (int j = 0; j < c; ++j)
    if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
  q *= gain;
  if (rows >= cols)
    w.value = q.cast<float>();
  else
    w.value = q.transpose().cast<float>();
}

Dense::Dense(const std::string& name, int in, int out, double gain, Rng& rng) {
  w.name = name + "/w";
  w.value.resize(out, in);
  orthogonal_init(w, gain, rng);
  b.name = name + "/b";
  b.value = Mat::Zero(out, 1);
}

Mat Dense::forward(const Mat& x) {
  if (x.rows() != w.value.cols())
    throw std::runtime_error("dense: input dim mismatch at " + w.name);
  x_ = x;
  cached_ = true;
  Mat y = w.value * x;
  y.colwise() += Eigen::VectorXf(b.value.col(0));
  return y;
}

Mat Dense::backward(const Mat& dy) {
  if (!cached_) throw std::runtime_error("dense: backward without forward at " + w.name);
  if (dy.rows() != w.value.rows() || dy.cols() != x_.cols())
    throw std::runtime_error("dense: gradient dim mismatch at " + w.name);
  if (w.grad.size() == 0) w.zero_grad();
  if (b.grad.size() == 0) b.zero_grad();
  w.grad += (dy.cast<double>() * x_.transpose().cast<double>()).cast<float>();
  b.grad.col(0) += dy.cast<double>().rowwise().sum().cast<float>();
  Mat dx = w.value.transpose() * dy;
  cached_ = false;
  return dx;
}

Mat Tanh::forward(const Mat& x) {
  y_ = x.array().tanh();
  cached_ = true;
  return y_;
}

Mat Tanh::backward(const Mat& dy) {
  if (!cached_) throw std::runtime_error("tanh: backward without forward");
  cached_ = false;
  return dy.array() * (1.0f - y_.array().square());
}

Mat Relu::forward(const Mat& x) {
  x_ = x;
  cached_ = true;
  return x.cwiseMax(0.0f);
}

Mat Relu::backward(const Mat& dy) {
  if (!cached_) throw std::runtime_error("relu: backward without forward");
  cached_ = false;
  return (x_.array() > 0.0f).select(dy, Mat::Zero(dy.rows(), dy.cols()));
}

Conv1d::Conv1d(const std::string& name, int in_channels, const ConvSpec& spec, double gain,
               Rng& rng)
    : channels_(in_channels), spec_(spec) {
  w.name = name + "/w";
  w.value.resize(spec.filters, spec.kernel * in_channels);
  orthogonal_init(w, gain, rng);
  b.name = name + "/b";
  b.value = Mat::Zero(spec.filters, 1);
}

int Conv1d::out_len(int in_len) const {
  if (spec_.pad) return (in_len + spec_.stride - 1) / spec_.stride;
  if (in_len < spec_.kernel)
    throw std::runtime_error("conv: input length shorter than kernel at " + w.name);
  return (in_len - spec_.kernel) / spec_.stride + 1;
}

Mat Conv1d::forward(const Mat& x) {
  const int c = channels_;
  if (x.rows() % c != 0)
    throw std::runtime_error("conv: input not a multiple of channel count at " + w.name);
  const int t_in = int(x.rows()) / c;
  const int t_out = out_len(t_in);
  const int batch = int(x.cols());
  const int k = spec_.kernel, s = spec_.stride, f = spec_.filters;
  int pad_left = 0;
  if (spec_.pad) {
    const int pad_total = std::max(0, (t_out - 1) * s + k - t_in);
    pad_left = pad_total / 2;
  }

  patches_.setZero(k * c, std::ptrdiff_t(batch) * t_out);
  for (int bcol = 0; bcol < batch; ++bcol)
    for (int t = 0; t < t_out; ++t) {
      auto col = patches_.col(std::ptrdiff_t(bcol) * t_out + t);
      for (int kk = 0; kk < k; ++kk) {
        const int src = t * s + kk - pad_left;
        if (src >= 0 && src < t_in) col.segment(kk * c, c) = x.col(bcol).segment(src * c, c);
      }
    }
  t_in_ = t_in;
  t_out_ = t_out;
  batch_ = batch;
  pad_left_ = pad_left;
  cached_ = true;

  Mat y = w.value * patches_;
  y.colwise() += Eigen::VectorXf(b.value.col(0));
  Mat out(t_out * f, batch);
  for (int bcol = 0; bcol < batch; ++bcol)
    for (int t = 0; t < t_out; ++t)
      out.col(bcol).segment(t * f, f) = y.col(std::ptrdiff_t(bcol) * t_out + t);
  return out;
}

Mat Conv1d::backward(const Mat& dy) {
  if (!cached_) throw std::runtime_error("conv: backward without forward at " + w.name);
  const int c = channels_, k = spec_.kernel, s = spec_.stride, f = spec_.filters;
  if (dy.rows() != t_out_ * f || dy.cols() != batch_)
    throw std::runtime_error("conv: gradient dim mismatch at " + w.name);

  Mat dy_flat(f, std::ptrdiff_t(batch_) * t_out_);
  for (int bcol = 0; bcol < batch_; ++bcol)
    for (int t = 0; t < t_out_; ++t)
      dy_flat.col(std::ptrdiff_t(bcol) * t_out_ + t) = dy.col(bcol).segment(t * f, f);

  if (w.grad.size() == 0) w.zero_grad();
  if (b.grad.size() == 0) b.zero_grad();
  w.grad += (dy_flat.cast<double>() * patches_.transpose().cast<double>()).cast<float>();
  b.grad.col(0) += dy_flat.cast<double>().rowwise().sum().cast<float>();

  Mat dpatches = w.value.transpose() * dy_flat;
  Mat dx = Mat::Zero(std::ptrdiff_t(t_in_) * c, batch_);
  for (int bcol = 0; bcol < batch_; ++bcol)
    for (int t = 0; t < t_out_; ++t) {
      auto col = dpatches.col(std::ptrdiff_t(bcol) * t_out_ + t);
      for (int kk = 0; kk < k; ++kk) {
        const int src = t * s + kk - pad_left_;
        if (src >= 0 && src < t_in_) dx.col(bcol).segment(src * c, c) += col.segment(kk * c, c);
      }
    }
  cached_ = false;
  return dx;
}

ConvEncoder::ConvEncoder(const std::string& prefix, int channels, const std::vector<ConvSpec>& specs,
                         double gain, Rng& rng) {
  int ch = channels;
  for (size_t i = 0; i < specs.size(); ++i) {
    convs.emplace_back(prefix + "/conv" + std::to_string(i), ch, specs[i], gain, rng);
    ch = specs[i].filters;
  }
  acts.resize(specs.size());
}

int ConvEncoder::out_dim(int seq_len) const {
  int t = seq_len;
  for (auto& cv : convs) t = cv.out_len(t);
  return t * convs.back().spec().filters;
}

Mat ConvEncoder::forward(const Mat& x) {
  Mat h = x;
  for (size_t i = 0; i < convs.size(); ++i) h = acts[i].forward(convs[i].forward(h));
  return h;
}

Mat ConvEncoder::backward(const Mat& dy) {
  Mat g = dy;
  for (size_t i = convs.size(); i-- > 0;) g = convs[i].backward(acts[i].backward(g));
  return g;
}

Mlp::Mlp(const std::string& prefix, int in, const std::vector<int>& hidden, int out,
         double hidden_gain, double final_gain, Rng& rng) {
  int d = in;
  for (size_t i = 0; i < hidden.size(); ++i) {
    layers.emplace_back(prefix + "/l" + std::to_string(i), d, hidden[i], hidden_gain, rng);
    d = hidden[i];
  }
  layers.emplace_back(prefix + "/l" + std::to_string(hidden.size()), d, out, final_gain, rng);
  acts.resize(hidden.size());
}

Mat Mlp::forward(const Mat& x) {
  Mat h = x;
  for (size_t i = 0; i + 1 < layers.size(); ++i) h = acts[i].forward(layers[i].forward(h));
  return layers.back().forward(h);
}

Mat Mlp::backward(const Mat& dy) {
  Mat g = layers.back().backward(dy);
  for (size_t i = layers.size() - 1; i-- > 0;) g = layers[i].backward(acts[i].backward(g));
  return g;
}

Eigen::VectorXd gaussian_logprob(const Mat& mean, const Mat& actions, double std) {
  if (mean.rows() != actions.rows() || mean.cols() != actions.cols())
    throw std::runtime_error("gaussian: mean/action shape mismatch");
  const double log_norm = -std::log(std) - 0.5 * std::log(2.0 * M_PI);
  const double inv2 = 1.0 / (2.0 * std * std);
  Eigen::VectorXd lp(mean.cols());
  for (int j = 0; j < mean.cols(); ++j) {
    double acc = 0.0;
    for (int i = 0; i < mean.rows(); ++i) {
      const double d = double(actions(i, j)) - double(mean(i, j));
      acc += log_norm - d * d * inv2;
    }
    lp[j] = acc;
  }
  return lp;
}

Mat gaussian_dlogp_dmean(const Mat& mean, const Mat& actions, double std,
                         const Eigen::VectorXd& scale) {
  const float inv_var = float(1.0 / (std * std));
  Mat g = (actions - mean) * inv_var;
  for (int j = 0; j < g.cols(); ++j) g.col(j) *= float(scale[j]);
  return g;
}

double gaussian_entropy(int dim, double std) {
  return dim * (0.5 * (1.0 + std::log(2.0 * M_PI)) + std::log(std));
}

void Adam::step(const std::vector<Tensor*>& params, const AdamConfig& cfg) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, double(t_));
  for (Tensor* p : params) {
    if (p->grad.size() == 0) continue;
    if (!p->trainable) {
      p->grad.setZero();
      continue;
    }
    if (p->m.size() == 0) {
      p->m = Mat::Zero(p->value.rows(), p->value.cols());
      p->v = Mat::Zero(p->value.rows(), p->value.cols());
    }
    p->m = float(cfg.beta1) * p->m + float(1.0 - cfg.beta1) * p->grad;
    p->v = float(cfg.beta2) * p->v + float(1.0 - cfg.beta2) * p->grad.cwiseProduct(p->grad);
    const float lr = float(cfg.lr);
    p->value.array() -= lr * (p->m.array() / float(bc1)) /
                        ((p->v.array() / float(bc2)).sqrt() + float(cfg.eps));
    p->grad.setZero();
  }
}

double clip_grad_norm(const std::vector<Tensor*>& params, double max_norm) {
  double total = 0.0;
  for (Tensor* p : params) {
    if (!p->trainable || p->grad.size() == 0) continue;
    total += p->grad.cast<double>().squaredNorm();
  }
  total = std::sqrt(total);
  if (total > max_norm && total > 0.0) {
    const float scale = float(max_norm / total);
    for (Tensor* p : params) {
      if (!p->trainable || p->grad.size() == 0) continue;
      p->grad *= scale;
    }
  }
  return total;
}

}  // namespace nn
}  // namespace jump
