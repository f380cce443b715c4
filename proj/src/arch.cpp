#include <stdexcept>

#include "jump/arch.hpp"

namespace jump {

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::ours: return "ours";
    case Kind::residual: return "residual";
    case Kind::long_only: return "long_only";
    case Kind::short_only: return "short_only";
    case Kind::expert: return "expert";
    case Kind::rma_student: return "rma_student";
    case Kind::arma: return "arma";
  }
  return "?";
}

Kind parse_kind(const std::string& s) {
  if (s == "ours") return Kind::ours;
  if (s == "residual") return Kind::residual;
  if (s == "long_only" || s == "long") return Kind::long_only;
  if (s == "short_only" || s == "short") return Kind::short_only;
  if (s == "expert") return Kind::expert;
  if (s == "rma_student" || s == "rma") return Kind::rma_student;
  if (s == "arma") return Kind::arma;
  throw std::runtime_error("unknown architecture kind '" + s + "'");
}

int policy_input_dim(const Config& cfg, Kind kind) {
  const int direct = kind == Kind::long_only ? kGoalDim + kPreviewDim + kPairDim
                                             : kGoalDim + kPreviewDim + kShortDim;
  switch (kind) {
    case Kind::short_only:
      return direct;
    case Kind::expert:
    case Kind::rma_student:
    case Kind::arma:
      return direct + cfg.nn_extrinsics_dim;
    default:
      break;
  }
  int t = kLongHist;
  int filters = 0;
  auto fold = [&](int kernel, int nf, int stride, bool pad) {
    t = pad ? (t + stride - 1) / stride : (t - kernel) / stride + 1;
    filters = nf;
  };
  if (cfg.nn_alt_encoder) {
    fold(cfg.nn_alt_conv1_kernel, cfg.nn_alt_conv1_filters, cfg.nn_alt_conv1_stride, true);
    fold(cfg.nn_alt_conv2_kernel, cfg.nn_alt_conv2_filters, cfg.nn_alt_conv2_stride, true);
    fold(cfg.nn_alt_conv3_kernel, cfg.nn_alt_conv3_filters, cfg.nn_alt_conv3_stride, true);
  } else {
    fold(cfg.nn_conv1_kernel, cfg.nn_conv1_filters, cfg.nn_conv1_stride, false);
    fold(cfg.nn_conv2_kernel, cfg.nn_conv2_filters, cfg.nn_conv2_stride, false);
  }
  return direct + t * filters;
}

Policy build_policy(const Config& cfg, Kind kind, uint64_t init_seed) {
  Policy p(cfg, kind, init_seed);
  if (kind != Kind::residual) {
    // Biasing the head at the standing pose makes the initial policy hold
    // still instead of folding under near-zero motor targets.
    const RobotModel m = default_model(cfg);
    const ReferenceMotion ref = build_jump_in_place(cfg, m);
    p.base.layers.back().b.value = ref.standing_motors.cast<float>();
  }
  return p;
}

Vec4 action_postprocess(Kind kind, const Vec4& raw, const ReferenceMotion& ref, int ref_step) {
  if (kind == Kind::residual) return raw + ref.motors_at(ref_step);
  return raw;
}

}  // namespace jump
