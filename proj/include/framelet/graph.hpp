#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "framelet/kernels.hpp"
#include "framelet/tensor.hpp"

namespace framelet {

// Per-parameter gradient accumulators, keyed by parameter name.
template <typename T>
using GradTable = std::map<std::string, Tensor<T>>;

enum class OpKind {
  input,
  conv,
  bias_add,
  relu,
  wavelet_analysis,
  wavelet_synthesis,
  concat,
  slice,
  add,
};

// Define-by-run tape: every op evaluates immediately, caches its
// activation, and the reverse sweep walks the nodes once in reverse
// construction order (construction order is topological by design).
// A graph is single-use and confined to one thread.
template <typename T>
class ValueGraph {
 public:
  explicit ValueGraph(kernels::Exec exec = kernels::Exec::parallel) : exec_(exec) {}

  kernels::Exec exec() const { return exec_; }

  int input(Tensor<T> v) {
    Node n;
    n.kind = OpKind::input;
    n.value = std::move(v);
    return push(std::move(n));
  }

  // weight [Cout,Cin,k,k], stride 1, same zero padding. The weight
  // tensor must outlive the graph; param_name keys the gradient.
  int conv(int x, const Tensor<T>* weight, std::string param_name) {
    const Tensor<T>& xin = value(x);
    if (weight->rank() != 4 || weight->dim(1) != xin.dim(0))
      throw std::invalid_argument("graph conv: weight shape does not match input channels");
    Node n;
    n.kind = OpKind::conv;
    n.in0 = x;
    n.param = std::move(param_name);
    n.weights = weight;
    n.conv = {weight->dim(0), weight->dim(1), weight->dim(2), xin.dim(1), xin.dim(2)};
    n.value = Tensor<T>({n.conv.cout, n.conv.h, n.conv.w});
    kernels::conv2d_forward(xin.data(), weight->data(), n.value.data(), n.conv, exec_);
    return push(std::move(n));
  }

  int bias_add(int x, const Tensor<T>* bias, std::string param_name) {
    const Tensor<T>& xin = value(x);
    if (bias->rank() != 1 || bias->dim(0) != xin.dim(0))
      throw std::invalid_argument("graph bias_add: bias length does not match channels");
    Node n;
    n.kind = OpKind::bias_add;
    n.in0 = x;
    n.param = std::move(param_name);
    n.weights = bias;
    n.value = Tensor<T>(xin.shape());
    kernels::bias_add_forward(xin.data(), bias->data(), n.value.data(), xin.dim(0),
                              static_cast<std::int64_t>(xin.dim(1)) * xin.dim(2), exec_);
    return push(std::move(n));
  }

  int relu(int x) {
    const Tensor<T>& xin = value(x);
    Node n;
    n.kind = OpKind::relu;
    n.in0 = x;
    n.value = Tensor<T>(xin.shape());
    kernels::relu_forward(xin.data(), n.value.data(), xin.size(), exec_);
    return push(std::move(n));
  }

  // [C,H,W] -> packed [4C, H/s, W/s], subband-major (LL, LH, HL, HH).
  int wavelet_analysis(int x, const FilterBank2D* bank) {
    const Tensor<T>& xin = value(x);
    if (xin.dim(1) % bank->stride != 0 || xin.dim(2) % bank->stride != 0)
      throw std::invalid_argument("graph wavelet_analysis: spatial size not divisible by stride");
    Node n;
    n.kind = OpKind::wavelet_analysis;
    n.in0 = x;
    n.bank = bank;
    n.value = Tensor<T>({4 * xin.dim(0), xin.dim(1) / bank->stride, xin.dim(2) / bank->stride});
    kernels::wavelet_analysis(xin.data(), n.value.data(), xin.dim(0), xin.dim(1), xin.dim(2),
                              *bank, exec_);
    return push(std::move(n));
  }

  // packed [4C, h, w] -> [C, h*s, w*s]; adjoint of wavelet_analysis.
  int wavelet_synthesis(int x, const FilterBank2D* bank) {
    const Tensor<T>& xin = value(x);
    if (xin.dim(0) % 4 != 0)
      throw std::invalid_argument("graph wavelet_synthesis: channel count not a multiple of 4");
    const int c = xin.dim(0) / 4;
    Node n;
    n.kind = OpKind::wavelet_synthesis;
    n.in0 = x;
    n.bank = bank;
    n.value = Tensor<T>({c, xin.dim(1) * bank->stride, xin.dim(2) * bank->stride});
    kernels::wavelet_synthesis(xin.data(), n.value.data(), c, xin.dim(1), xin.dim(2), *bank, exec_);
    return push(std::move(n));
  }

  int concat(int a, int b) {
    const Tensor<T>& ta = value(a);
    const Tensor<T>& tb = value(b);
    if (ta.dim(1) != tb.dim(1) || ta.dim(2) != tb.dim(2))
      throw std::invalid_argument("graph concat: spatial shapes differ");
    Node n;
    n.kind = OpKind::concat;
    n.in0 = a;
    n.in1 = b;
    n.value = Tensor<T>({ta.dim(0) + tb.dim(0), ta.dim(1), ta.dim(2)});
    std::copy(ta.data(), ta.data() + ta.size(), n.value.data());
    std::copy(tb.data(), tb.data() + tb.size(), n.value.data() + ta.size());
    return push(std::move(n));
  }

  int slice(int x, int from, int count) {
    const Tensor<T>& xin = value(x);
    if (from < 0 || count <= 0 || from + count > xin.dim(0))
      throw std::invalid_argument("graph slice: channel range out of bounds");
    Node n;
    n.kind = OpKind::slice;
    n.in0 = x;
    n.slice_from = from;
    n.value = Tensor<T>({count, xin.dim(1), xin.dim(2)});
    const std::int64_t hw = static_cast<std::int64_t>(xin.dim(1)) * xin.dim(2);
    std::copy(xin.data() + from * hw, xin.data() + (from + count) * hw, n.value.data());
    return push(std::move(n));
  }

  int add(int a, int b) {
    const Tensor<T>& ta = value(a);
    const Tensor<T>& tb = value(b);
    if (!ta.same_shape(tb)) throw std::invalid_argument("graph add: shapes differ");
    Node n;
    n.kind = OpKind::add;
    n.in0 = a;
    n.in1 = b;
    n.value = Tensor<T>(ta.shape());
    kernels::add_forward(ta.data(), tb.data(), n.value.data(), ta.size(), exec_);
    return push(std::move(n));
  }

  const Tensor<T>& value(int id) const {
    if (id < 0 || id >= static_cast<int>(nodes_.size()))
      throw std::logic_error("graph: invalid node id");
    return nodes_[static_cast<std::size_t>(id)].value;
  }

  int size() const { return static_cast<int>(nodes_.size()); }

  // Reverse sweep seeded with dL/d(node `output`). Parameter gradients
  // accumulate into `table`; entries are created on demand, so callers
  // that need exact zeros for untouched parameters pre-fill the table.
  void backward(int output, const Tensor<T>& output_grad, GradTable<T>& table) {
    if (nodes_.empty()) throw std::logic_error("graph backward: no forward pass recorded");
    if (output < 0 || output >= size()) throw std::logic_error("graph backward: invalid output node");
    if (backward_done_) throw std::logic_error("graph backward: graph already consumed");
    backward_done_ = true;
    if (!output_grad.same_shape(nodes_[static_cast<std::size_t>(output)].value))
      throw std::invalid_argument("graph backward: output gradient shape mismatch");

    nodes_[static_cast<std::size_t>(output)].grad = output_grad;
    for (int id = output; id >= 0; --id) {
      Node& n = nodes_[static_cast<std::size_t>(id)];
      if (n.grad.empty()) continue;  // does not contribute to the output
      const Tensor<T>& dy = n.grad;
      switch (n.kind) {
        case OpKind::input:
          break;
        case OpKind::conv: {
          const Tensor<T>& xin = value(n.in0);
          Tensor<T> dx(xin.shape());
          kernels::conv2d_backward_input(dy.data(), n.weights->data(), dx.data(), n.conv, exec_);
          accumulate(n.in0, dx);
          Tensor<T>& dw = param_grad(table, n.param, n.weights->shape());
          kernels::conv2d_backward_weight(xin.data(), dy.data(), dw.data(), n.conv, exec_);
          break;
        }
        case OpKind::bias_add: {
          accumulate(n.in0, dy);
          Tensor<T>& db = param_grad(table, n.param, n.weights->shape());
          kernels::bias_backward(dy.data(), db.data(), dy.dim(0),
                                 static_cast<std::int64_t>(dy.dim(1)) * dy.dim(2), exec_);
          break;
        }
        case OpKind::relu: {
          const Tensor<T>& xin = value(n.in0);
          Tensor<T> dx(xin.shape());
          kernels::relu_backward(xin.data(), dy.data(), dx.data(), xin.size(), exec_);
          accumulate(n.in0, dx);
          break;
        }
        case OpKind::wavelet_analysis: {
          const Tensor<T>& xin = value(n.in0);
          Tensor<T> dx(xin.shape());
          kernels::wavelet_synthesis(dy.data(), dx.data(), xin.dim(0), dy.dim(1), dy.dim(2),
                                     *n.bank, exec_);
          accumulate(n.in0, dx);
          break;
        }
        case OpKind::wavelet_synthesis: {
          const Tensor<T>& xin = value(n.in0);
          Tensor<T> dx(xin.shape());
          kernels::wavelet_analysis(dy.data(), dx.data(), dy.dim(0), dy.dim(1), dy.dim(2), *n.bank,
                                    exec_);
          accumulate(n.in0, dx);
          break;
        }
        case OpKind::concat: {
          const Tensor<T>& ta = value(n.in0);
          const Tensor<T>& tb = value(n.in1);
          Tensor<T> da(ta.shape());
          Tensor<T> db(tb.shape());
          std::copy(dy.data(), dy.data() + ta.size(), da.data());
          std::copy(dy.data() + ta.size(), dy.data() + dy.size(), db.data());
          accumulate(n.in0, da);
          accumulate(n.in1, db);
          break;
        }
        case OpKind::slice: {
          const Tensor<T>& xin = value(n.in0);
          Tensor<T> dx(xin.shape());
          const std::int64_t hw = static_cast<std::int64_t>(xin.dim(1)) * xin.dim(2);
          std::copy(dy.data(), dy.data() + dy.size(), dx.data() + n.slice_from * hw);
          accumulate(n.in0, dx);
          break;
        }
        case OpKind::add: {
          accumulate(n.in0, dy);
          accumulate(n.in1, dy);
          break;
        }
      }
    }
  }

  // Gradient w.r.t. an input node, available after backward().
  const Tensor<T>& input_grad(int id) const {
    const Node& n = nodes_.at(static_cast<std::size_t>(id));
    if (n.grad.empty()) throw std::logic_error("graph: no gradient recorded for node");
    return n.grad;
  }

 private:
  struct Node {
    OpKind kind = OpKind::input;
    int in0 = -1;
    int in1 = -1;
    std::string param;
    const Tensor<T>* weights = nullptr;
    const FilterBank2D* bank = nullptr;
    int slice_from = 0;
    kernels::ConvShape conv{};
    Tensor<T> value;
    Tensor<T> grad;
  };

  int push(Node n) {
    // A NaN fed through ReLU comes out as 0, so divergence has to be
    // caught where it appears, not at the output.
    for (std::int64_t i = 0; i < n.value.size(); ++i)
      if (!std::isfinite(static_cast<double>(n.value[i])))
        throw std::runtime_error("graph: non-finite activation");
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  void accumulate(int id, const Tensor<T>& g) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.grad.empty()) {
      n.grad = g;
    } else {
      for (std::int64_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
    }
  }

  Tensor<T>& param_grad(GradTable<T>& table, const std::string& name,
                        const std::vector<int>& shape) {
    auto it = table.find(name);
    if (it == table.end()) it = table.emplace(name, Tensor<T>(shape)).first;
    return it->second;
  }

  std::vector<Node> nodes_;
  kernels::Exec exec_;
  bool backward_done_ = false;
};

}  // namespace framelet
