#include "fepinn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace fepinn {

AdamState make_adam_state(const Tensor& param) {
  return AdamState{Tensor::zeros(param.shape()), Tensor::zeros(param.shape()), 0};
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, const AdamConfig& cfg) {
  if (cfg.lr <= 0.0) throw std::invalid_argument("adam_step: lr must be positive");
  require_same_shape(param, grad, "adam_step");
  require_same_shape(param, state.m, "adam_step(m)");
  require_same_shape(param, state.v, "adam_step(v)");

  ++state.step;
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    param[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
  }
}

}  // namespace fepinn
