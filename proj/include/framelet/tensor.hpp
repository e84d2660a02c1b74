#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace framelet {

// Dense row-major tensor of small rank. Feature maps are [C,H,W],
// convolution weights [Cout,Cin,K,K], biases [C].
template <typename T>
class Tensor {
 public:
  Tensor() = default;

  explicit Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
    std::int64_t n = 1;
    for (int d : shape_) {
      if (d <= 0) throw std::invalid_argument("Tensor: non-positive dimension");
      n *= d;
    }
    data_.assign(static_cast<std::size_t>(n), T(0));
  }

  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& shape() const { return shape_; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  T operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  // [C,H,W] access
  T& at(int c, int y, int x) {
    return data_[static_cast<std::size_t>((static_cast<std::int64_t>(c) * shape_[1] + y) * shape_[2] + x)];
  }
  T at(int c, int y, int x) const {
    return data_[static_cast<std::size_t>((static_cast<std::int64_t>(c) * shape_[1] + y) * shape_[2] + x)];
  }

  void fill(T v) { data_.assign(data_.size(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

 private:
  std::vector<int> shape_;
  std::vector<T> data_;
};

}  // namespace framelet
