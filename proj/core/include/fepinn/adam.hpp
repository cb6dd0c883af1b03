#pragma once

#include "fepinn/tensor.hpp"

namespace fepinn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  Tensor m, v;
  long step = 0;
};

AdamState make_adam_state(const Tensor& param);

/// One bias-corrected Adam update. Deterministic given the inputs; throws on
/// lr <= 0 or shape mismatches.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamConfig& cfg);

}  // namespace fepinn
