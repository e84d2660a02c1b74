#pragma once

// Internal: per-backend kernel entry points. The public API in
// framelet/kernels.hpp dispatches between these two namespaces.

#include <array>
#include <cstdint>
#include <vector>

#include "framelet/kernels.hpp"

namespace framelet::kernels {

template <typename T>
std::array<std::vector<T>, 4> typed_subbands(const FilterBank2D& bank) {
  std::array<std::vector<T>, 4> f;
  for (int b = 0; b < 4; ++b) {
    f[b].resize(bank.subbands[b].size());
    for (std::size_t i = 0; i < f[b].size(); ++i) f[b][i] = static_cast<T>(bank.subbands[b][i]);
  }
  return f;
}

#define FRAMELET_KERNEL_DECLS(T)                                                            \
  void conv2d_forward(const T* x, const T* weight, T* y, const ConvShape& s);               \
  void conv2d_backward_input(const T* dy, const T* weight, T* dx, const ConvShape& s);      \
  void conv2d_backward_weight(const T* x, const T* dy, T* dweight, const ConvShape& s);     \
  void bias_add_forward(const T* x, const T* bias, T* y, int c, std::int64_t hw);           \
  void bias_backward(const T* dy, T* dbias, int c, std::int64_t hw);                        \
  void relu_forward(const T* x, T* y, std::int64_t n);                                      \
  void relu_backward(const T* x, const T* dy, T* dx, std::int64_t n);                       \
  void add_forward(const T* a, const T* b, T* y, std::int64_t n);                           \
  void wavelet_analysis(const T* x, T* y, int c, int h, int w, const FilterBank2D& bank);   \
  void wavelet_synthesis(const T* y, T* x, int c, int h, int w, const FilterBank2D& bank);

namespace serial {
FRAMELET_KERNEL_DECLS(float)
FRAMELET_KERNEL_DECLS(double)
}  // namespace serial

namespace omp {
FRAMELET_KERNEL_DECLS(float)
FRAMELET_KERNEL_DECLS(double)
}  // namespace omp

#undef FRAMELET_KERNEL_DECLS

}  // namespace framelet::kernels
