#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vstain/error.hpp"
#include "vstain/net/tensor.hpp"

namespace vstain::net {

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

// First and second moments, one vector per parameter in collection order.
template <typename T>
struct AdamState {
  long long step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;

  void reset(const std::vector<Param<T>*>& params) {
    step = 0;
    m.clear();
    v.clear();
    for (const auto* p : params) {
      m.emplace_back(p->value.size(), T{});
      v.emplace_back(p->value.size(), T{});
    }
  }
};

// One bias-corrected Adam update. Every gradient is checked before any value
// changes, so a failure leaves params and state untouched.
template <typename T>
void adam_step(const std::vector<Param<T>*>& params, AdamState<T>& state, const AdamConfig& cfg) {
  if (state.m.size() != params.size()) state.reset(params);
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = *params[k];
    if (p.grad.size() != p.value.size() || state.m[k].size() != p.value.size()) {
      throw DimensionError("optimizer state does not match parameter " + p.name);
    }
    for (std::size_t i = 0; i < p.grad.size(); ++i) {
      if (!std::isfinite(p.grad[i])) {
        throw NumericError("non-finite gradient at " + p.name + "[" + std::to_string(i) + "]");
      }
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(cfg.beta1, t);
  const double c2 = 1.0 - std::pow(cfg.beta2, t);
  const double b1 = cfg.beta1, b2 = cfg.beta2;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& p = *params[k];
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      const double mi = b1 * m[i] + (1.0 - b1) * g;
      const double vi = b2 * v[i] + (1.0 - b2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double mhat = mi / c1;
      const double vhat = vi / c2;
      p.value[i] = static_cast<T>(p.value[i] - cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon));
    }
  }
}

}  // namespace vstain::net
