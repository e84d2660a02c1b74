#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "framelet/graph.hpp"
#include "framelet/tensor.hpp"

namespace framelet {

// First/second moment accumulators per parameter; created lazily on the
// first step so the state always matches the parameter set.
template <typename T>
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::map<std::string, Tensor<T>> m;
  std::map<std::string, Tensor<T>> v;
};

// Bias-corrected Adam update. If any gradient entry is non-finite the
// step throws and neither parameters nor state are modified.
template <typename T>
void adam_step(std::map<std::string, Tensor<T>>& params, const GradTable<T>& grads,
               AdamState<T>& state, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adam_step: learning rate must be positive");
  for (const auto& [name, g] : grads)
    for (std::int64_t i = 0; i < g.size(); ++i)
      if (!std::isfinite(static_cast<double>(g[i])))
        throw std::runtime_error("adam_step: non-finite gradient for " + name);

  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (auto& [name, p] : params) {
    const auto git = grads.find(name);
    if (git == grads.end()) throw std::invalid_argument("adam_step: missing gradient for " + name);
    const Tensor<T>& g = git->second;
    if (!g.same_shape(p)) throw std::invalid_argument("adam_step: gradient shape mismatch for " + name);
    auto mit = state.m.find(name);
    if (mit == state.m.end()) {
      mit = state.m.emplace(name, Tensor<T>(p.shape())).first;
      state.v.emplace(name, Tensor<T>(p.shape()));
    }
    Tensor<T>& m = mit->second;
    Tensor<T>& v = state.v.at(name);
    for (std::int64_t i = 0; i < p.size(); ++i) {
      const double gi = static_cast<double>(g[i]);
      const double mi = state.beta1 * static_cast<double>(m[i]) + (1.0 - state.beta1) * gi;
      const double vi = state.beta2 * static_cast<double>(v[i]) + (1.0 - state.beta2) * gi * gi;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      p[i] = static_cast<T>(static_cast<double>(p[i]) -
                            lr * (mi / bc1) / (std::sqrt(vi / bc2) + state.eps));
    }
  }
}

}  // namespace framelet
