#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "framelet/graph.hpp"
#include "framelet/rng.hpp"
#include "framelet/wavelet_bank.hpp"

namespace framelet {

// One configuration digit per encoder stage: '2' selects the two-tap
// bank at stride 2, '4' the four-tap bank at stride 4. "4422" means two
// four-tap stages followed by two two-tap stages.
struct StageConfig {
  std::string digits = "4422";
  int base_channels = 64;
  static constexpr int conv_kernel = 3;

  int stages() const { return static_cast<int>(digits.size()); }

  void validate() const {
    if (digits.empty()) throw std::invalid_argument("StageConfig: empty digit string");
    for (char c : digits)
      if (c != '2' && c != '4')
        throw std::invalid_argument(std::string("StageConfig: invalid digit '") + c + "'");
    if (base_channels <= 0) throw std::invalid_argument("StageConfig: base_channels must be positive");
  }

  // Product of the stage strides; input sides must be divisible by it.
  int input_multiple() const {
    validate();
    int m = 1;
    for (char c : digits) m *= (c == '2' ? 2 : 4);
    return m;
  }
};

// Encoder-decoder denoiser with fixed wavelet pooling. Per encoder
// stage: two 3x3 convolutions (each with bias and ReLU), then a strided
// subband split; the LL band recurses, the three high bands skip to the
// mirrored decoder stage, which concatenates them ahead of the subband
// merge. A final 1x1 convolution maps back to one channel. Channel
// widths double per encoder stage. Immutable during forward evaluation,
// so a network may be shared across threads.
template <typename T>
struct Network {
  StageConfig config;
  bool residual = false;  // when set, the output is input + prediction
  std::vector<FilterBank2D> banks;         // per encoder stage
  std::map<std::string, Tensor<T>> params;  // name-ordered, deterministic

  int encoder_channels(int stage) const { return config.base_channels << stage; }

  Tensor<T>& param(const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("Network: unknown parameter " + name);
    return it->second;
  }
  const Tensor<T>& param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) throw std::invalid_argument("Network: unknown parameter " + name);
    return it->second;
  }
};

namespace detail {

template <typename T>
void add_conv_block(Network<T>& net, const std::string& prefix, int cin, int cout) {
  net.params.emplace(prefix + ".weight",
                     Tensor<T>({cout, cin, StageConfig::conv_kernel, StageConfig::conv_kernel}));
  net.params.emplace(prefix + ".bias", Tensor<T>({cout}));
}

}  // namespace detail

// Deterministic construction: weights uniform on +-sqrt(6/(fan_in+fan_out))
// drawn in name order from one stream keyed by `seed`; biases zero.
template <typename T>
Network<T> build_network(const StageConfig& config, std::uint64_t seed) {
  config.validate();
  Network<T> net;
  net.config = config;
  for (char c : config.digits) net.banks.push_back(to_2d(bank_from_digit(c)));

  const int stages = config.stages();
  for (int k = 0; k < stages; ++k) {
    const int cin = (k == 0) ? 1 : net.encoder_channels(k - 1);
    const int cout = net.encoder_channels(k);
    detail::add_conv_block(net, "enc" + std::to_string(k) + ".conv1", cin, cout);
    detail::add_conv_block(net, "enc" + std::to_string(k) + ".conv2", cout, cout);
  }
  const int deep = net.encoder_channels(stages - 1);
  detail::add_conv_block(net, "bottleneck.conv1", deep, deep);
  detail::add_conv_block(net, "bottleneck.conv2", deep, deep);
  for (int k = stages - 1; k >= 0; --k) {
    const int cin = net.encoder_channels(k);
    const int cout = (k == 0) ? config.base_channels : net.encoder_channels(k - 1);
    detail::add_conv_block(net, "dec" + std::to_string(k) + ".conv1", cin, cout);
    detail::add_conv_block(net, "dec" + std::to_string(k) + ".conv2", cout, cout);
  }
  net.params.emplace("head.weight", Tensor<T>({1, config.base_channels, 1, 1}));
  net.params.emplace("head.bias", Tensor<T>({1}));

  Rng rng(splitmix64(seed));
  for (auto& [name, tensor] : net.params) {
    if (tensor.rank() != 4) continue;  // biases stay zero
    const int fan_in = tensor.dim(1) * tensor.dim(2) * tensor.dim(3);
    const int fan_out = tensor.dim(0) * tensor.dim(2) * tensor.dim(3);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::int64_t i = 0; i < tensor.size(); ++i)
      tensor[i] = static_cast<T>(rng.uniform(-limit, limit));
  }
  return net;
}

// Records the full forward pass into `g` starting from node `input_id`
// (a [1,H,W] tensor with sides divisible by config.input_multiple()).
// Returns the output node id.
template <typename T>
int forward_into(const Network<T>& net, ValueGraph<T>& g, int input_id) {
  const Tensor<T>& x = g.value(input_id);
  if (x.rank() != 3 || x.dim(0) != 1)
    throw std::invalid_argument("forward: expected a [1,H,W] input tensor");
  const int multiple = net.config.input_multiple();
  if (x.dim(1) % multiple != 0 || x.dim(2) % multiple != 0)
    throw std::invalid_argument("forward: input sides must be divisible by " +
                                std::to_string(multiple));

  auto conv_block = [&](int node, const std::string& prefix) {
    node = g.conv(node, &net.param(prefix + ".weight"), prefix + ".weight");
    node = g.bias_add(node, &net.param(prefix + ".bias"), prefix + ".bias");
    return g.relu(node);
  };

  const int stages = net.config.stages();
  std::vector<int> skip_highs(static_cast<std::size_t>(stages), -1);
  int node = input_id;
  for (int k = 0; k < stages; ++k) {
    node = conv_block(node, "enc" + std::to_string(k) + ".conv1");
    node = conv_block(node, "enc" + std::to_string(k) + ".conv2");
    const int c = net.encoder_channels(k);
    const int packed = g.wavelet_analysis(node, &net.banks[static_cast<std::size_t>(k)]);
    node = g.slice(packed, 0, c);                                  // LL
    skip_highs[static_cast<std::size_t>(k)] = g.slice(packed, c, 3 * c);  // LH, HL, HH
  }
  node = conv_block(node, "bottleneck.conv1");
  node = conv_block(node, "bottleneck.conv2");
  for (int k = stages - 1; k >= 0; --k) {
    const int packed = g.concat(node, skip_highs[static_cast<std::size_t>(k)]);
    node = g.wavelet_synthesis(packed, &net.banks[static_cast<std::size_t>(k)]);
    node = conv_block(node, "dec" + std::to_string(k) + ".conv1");
    node = conv_block(node, "dec" + std::to_string(k) + ".conv2");
  }
  node = g.conv(node, &net.param("head.weight"), "head.weight");
  node = g.bias_add(node, &net.param("head.bias"), "head.bias");
  if (net.residual) node = g.add(node, input_id);
  return node;
}

// Convenience single-tensor forward. The graph's per-node finiteness
// check reports diverged activations as a numeric error.
template <typename T>
Tensor<T> forward(const Network<T>& net, const Tensor<T>& x,
                  kernels::Exec exec = kernels::Exec::parallel) {
  ValueGraph<T> g(exec);
  return g.value(forward_into(net, g, g.input(x)));
}

// Reverse sweep over a recorded forward pass. The returned table holds
// one gradient per network parameter; parameters the recorded
// computation never touched come back exactly zero.
template <typename T>
GradTable<T> backward(const Network<T>& net, ValueGraph<T>& g, int output_id,
                      const Tensor<T>& output_grad) {
  GradTable<T> table;
  for (const auto& [name, tensor] : net.params) table.emplace(name, Tensor<T>(tensor.shape()));
  g.backward(output_id, output_grad, table);
  return table;
}

// Binary model container; see README for the exact layout. Round-trips
// the config string and every parameter tensor bit-exactly.
void save_model(const Network<float>& net, const std::string& path);
Network<float> load_model(const std::string& path);

}  // namespace framelet
