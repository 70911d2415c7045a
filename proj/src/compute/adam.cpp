#include <cmath>

#include "transnet/tensor.hpp"

namespace transnet::compute {

void adam_step(std::span<Parameter* const> params, const AdamOptions& options) {
  for (Parameter* param : params) {
    if (!param->tensor().has_grad()) {
      throw std::logic_error("adam_step: parameter '" + param->name() + "' has no gradient");
    }
  }
  for (Parameter* param : params) {
    AdamState& state = param->adam();
    const Matrix& g = param->tensor().grad();
    state.step += 1;
    state.first_moment = options.beta1 * state.first_moment + (1.0 - options.beta1) * g;
    state.second_moment =
        options.beta2 * state.second_moment + (1.0 - options.beta2) * g.cwiseAbs2();
    const double c1 = 1.0 - std::pow(options.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(options.beta2, static_cast<double>(state.step));
    param->tensor().mutable_value().array() -=
        options.lr * (state.first_moment.array() / c1) /
        ((state.second_moment.array() / c2).sqrt() + options.eps);
    param->tensor().zero_grad();
  }
}

}  // namespace transnet::compute
