#pragma once

#include <string>
#include <vector>

#include "jump/ppo.hpp"

namespace jump {

struct DistillResult {
  std::string checkpoint;
  std::vector<double> mse;  // held-out extrinsics MSE, before training and at
                            // each measurement checkpoint
};

// Teacher-student phase: regresses the history encoder's extrinsics onto the
// privileged expert's, on states visited by the student itself. The base MLP
// is copied from the expert checkpoint and stays frozen. Requires the expert's
// stage-3 checkpoint in opt.out_dir; writes the student checkpoint and an
// MSE-series CSV next to it.
DistillResult distill_student(const Config& cfg, const TrainOptions& opt);

// Finetuning phase: continues policy-gradient training of the distilled
// student's base under a frozen history encoder. Requires the student
// checkpoint in opt.out_dir. Returns the final checkpoint path.
std::string finetune_arma(const Config& cfg, const TrainOptions& opt);

}  // namespace jump
