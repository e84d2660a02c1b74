// Dispatch between the serial reference and the OpenMP kernels.

#include "framelet/kernels.hpp"

#include "kernels_detail.hpp"

namespace framelet::kernels {

template <typename T>
void conv2d_forward(const T* x, const T* weight, T* y, const ConvShape& s, Exec e) {
  e == Exec::serial ? serial::conv2d_forward(x, weight, y, s)
                    : omp::conv2d_forward(x, weight, y, s);
}

template <typename T>
void conv2d_backward_input(const T* dy, const T* weight, T* dx, const ConvShape& s, Exec e) {
  e == Exec::serial ? serial::conv2d_backward_input(dy, weight, dx, s)
                    : omp::conv2d_backward_input(dy, weight, dx, s);
}

template <typename T>
void conv2d_backward_weight(const T* x, const T* dy, T* dweight, const ConvShape& s, Exec e) {
  e == Exec::serial ? serial::conv2d_backward_weight(x, dy, dweight, s)
                    : omp::conv2d_backward_weight(x, dy, dweight, s);
}

template <typename T>
void bias_add_forward(const T* x, const T* bias, T* y, int c, std::int64_t hw, Exec e) {
  e == Exec::serial ? serial::bias_add_forward(x, bias, y, c, hw)
                    : omp::bias_add_forward(x, bias, y, c, hw);
}

template <typename T>
void bias_backward(const T* dy, T* dbias, int c, std::int64_t hw, Exec e) {
  e == Exec::serial ? serial::bias_backward(dy, dbias, c, hw) : omp::bias_backward(dy, dbias, c, hw);
}

template <typename T>
void relu_forward(const T* x, T* y, std::int64_t n, Exec e) {
  e == Exec::serial ? serial::relu_forward(x, y, n) : omp::relu_forward(x, y, n);
}

template <typename T>
void relu_backward(const T* x, const T* dy, T* dx, std::int64_t n, Exec e) {
  e == Exec::serial ? serial::relu_backward(x, dy, dx, n) : omp::relu_backward(x, dy, dx, n);
}

template <typename T>
void add_forward(const T* a, const T* b, T* y, std::int64_t n, Exec e) {
  e == Exec::serial ? serial::add_forward(a, b, y, n) : omp::add_forward(a, b, y, n);
}

template <typename T>
void wavelet_analysis(const T* x, T* y, int c, int h, int w, const FilterBank2D& bank, Exec e) {
  e == Exec::serial ? serial::wavelet_analysis(x, y, c, h, w, bank)
                    : omp::wavelet_analysis(x, y, c, h, w, bank);
}

template <typename T>
void wavelet_synthesis(const T* y, T* x, int c, int h, int w, const FilterBank2D& bank, Exec e) {
  e == Exec::serial ? serial::wavelet_synthesis(y, x, c, h, w, bank)
                    : omp::wavelet_synthesis(y, x, c, h, w, bank);
}

#define FRAMELET_INSTANTIATE(T)                                                                  \
  template void conv2d_forward<T>(const T*, const T*, T*, const ConvShape&, Exec);               \
  template void conv2d_backward_input<T>(const T*, const T*, T*, const ConvShape&, Exec);        \
  template void conv2d_backward_weight<T>(const T*, const T*, T*, const ConvShape&, Exec);       \
  template void bias_add_forward<T>(const T*, const T*, T*, int, std::int64_t, Exec);            \
  template void bias_backward<T>(const T*, T*, int, std::int64_t, Exec);                         \
  template void relu_forward<T>(const T*, T*, std::int64_t, Exec);                               \
  template void relu_backward<T>(const T*, const T*, T*, std::int64_t, Exec);                    \
  template void add_forward<T>(const T*, const T*, T*, std::int64_t, Exec);                      \
  template void wavelet_analysis<T>(const T*, T*, int, int, int, const FilterBank2D&, Exec);     \
  template void wavelet_synthesis<T>(const T*, T*, int, int, int, const FilterBank2D&, Exec);

FRAMELET_INSTANTIATE(float)
FRAMELET_INSTANTIATE(double)

#undef FRAMELET_INSTANTIATE

}  // namespace framelet::kernels
