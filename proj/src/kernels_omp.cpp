// OpenMP kernels. Each output element is produced by exactly one thread
// and the accumulation order inside an element matches the serial
// reference, so results are independent of the worker count.

#include "kernels_detail.hpp"

namespace framelet::kernels::omp {

namespace {

template <typename T>
void conv2d_forward_impl(const T* x, const T* weight, T* y, const ConvShape& s) {
  const int pad = s.k / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < s.cout; ++co) {
    for (int oy = 0; oy < s.h; ++oy) {
      for (int ox = 0; ox < s.w; ++ox) {
        T acc = 0;
        for (int ci = 0; ci < s.cin; ++ci) {
          const T* xc = x + static_cast<std::int64_t>(ci) * s.h * s.w;
          const T* wc = weight + ((static_cast<std::int64_t>(co) * s.cin + ci) * s.k) * s.k;
          for (int ku = 0; ku < s.k; ++ku) {
            const int iy = oy + ku - pad;
            if (iy < 0 || iy >= s.h) continue;
            for (int kv = 0; kv < s.k; ++kv) {
              const int ix = ox + kv - pad;
              if (ix < 0 || ix >= s.w) continue;
              acc += wc[ku * s.k + kv] * xc[static_cast<std::int64_t>(iy) * s.w + ix];
            }
          }
        }
        y[(static_cast<std::int64_t>(co) * s.h + oy) * s.w + ox] = acc;
      }
    }
  }
}

template <typename T>
void conv2d_backward_input_impl(const T* dy, const T* weight, T* dx, const ConvShape& s) {
  const int pad = s.k / 2;
#pragma omp parallel for collapse(2) schedule(static)
  for (int ci = 0; ci < s.cin; ++ci) {
    for (int iy = 0; iy < s.h; ++iy) {
      for (int ix = 0; ix < s.w; ++ix) {
        T acc = 0;
        for (int co = 0; co < s.cout; ++co) {
          const T* dyc = dy + static_cast<std::int64_t>(co) * s.h * s.w;
          const T* wc = weight + ((static_cast<std::int64_t>(co) * s.cin + ci) * s.k) * s.k;
          for (int ku = 0; ku < s.k; ++ku) {
            const int oy = iy - ku + pad;
            if (oy < 0 || oy >= s.h) continue;
            for (int kv = 0; kv < s.k; ++kv) {
              const int ox = ix - kv + pad;
              if (ox < 0 || ox >= s.w) continue;
              acc += wc[ku * s.k + kv] * dyc[static_cast<std::int64_t>(oy) * s.w + ox];
            }
          }
        }
        dx[(static_cast<std::int64_t>(ci) * s.h + iy) * s.w + ix] = acc;
      }
    }
  }
}

template <typename T>
void conv2d_backward_weight_impl(const T* x, const T* dy, T* dweight, const ConvShape& s) {
  const int pad = s.k / 2;
  // Each (co, ci) weight slice is owned by one thread.
#pragma omp parallel for collapse(2) schedule(static)
  for (int co = 0; co < s.cout; ++co) {
    for (int ci = 0; ci < s.cin; ++ci) {
      const T* dyc = dy + static_cast<std::int64_t>(co) * s.h * s.w;
      const T* xc = x + static_cast<std::int64_t>(ci) * s.h * s.w;
      T* wc = dweight + ((static_cast<std::int64_t>(co) * s.cin + ci) * s.k) * s.k;
      for (int ku = 0; ku < s.k; ++ku) {
        for (int kv = 0; kv < s.k; ++kv) {
          T acc = 0;
          for (int oy = 0; oy < s.h; ++oy) {
            const int iy = oy + ku - pad;
            if (iy < 0 || iy >= s.h) continue;
            for (int ox = 0; ox < s.w; ++ox) {
              const int ix = ox + kv - pad;
              if (ix < 0 || ix >= s.w) continue;
              acc += dyc[static_cast<std::int64_t>(oy) * s.w + ox] *
                     xc[static_cast<std::int64_t>(iy) * s.w + ix];
            }
          }
          wc[ku * s.k + kv] += acc;
        }
      }
    }
  }
}

template <typename T>
void bias_add_forward_impl(const T* x, const T* bias, T* y, int c, std::int64_t hw) {
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < c; ++ch) {
    const T b = bias[ch];
    for (std::int64_t i = 0; i < hw; ++i) y[ch * hw + i] = x[ch * hw + i] + b;
  }
}

template <typename T>
void bias_backward_impl(const T* dy, T* dbias, int c, std::int64_t hw) {
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < c; ++ch) {
    T acc = 0;
    for (std::int64_t i = 0; i < hw; ++i) acc += dy[ch * hw + i];
    dbias[ch] += acc;
  }
}

template <typename T>
void relu_forward_impl(const T* x, T* y, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void relu_backward_impl(const T* x, const T* dy, T* dx, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) dx[i] = x[i] > T(0) ? dy[i] : T(0);
}

template <typename T>
void add_forward_impl(const T* a, const T* b, T* y, std::int64_t n) {
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

template <typename T>
void wavelet_analysis_impl(const T* x, T* y, int c, int h, int w, const FilterBank2D& bank) {
  const int L = bank.length;
  const int oh = h / bank.stride;
  const int ow = w / bank.stride;
  const auto filt = typed_subbands<T>(bank);
#pragma omp parallel for collapse(2) schedule(static)
  for (int b = 0; b < 4; ++b) {
    for (int ch = 0; ch < c; ++ch) {
      const T* xc = x + static_cast<std::int64_t>(ch) * h * w;
      T* yc = y + static_cast<std::int64_t>(b * c + ch) * oh * ow;
      for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
          T acc = 0;
          for (int u = 0; u < L; ++u)
            for (int v = 0; v < L; ++v)
              acc += filt[b][static_cast<std::size_t>(u) * L + v] *
                     xc[static_cast<std::int64_t>(oy * L + u) * w + ox * L + v];
          yc[static_cast<std::int64_t>(oy) * ow + ox] = acc;
        }
      }
    }
  }
}

template <typename T>
void wavelet_synthesis_impl(const T* y, T* x, int c, int h, int w, const FilterBank2D& bank) {
  const int L = bank.length;
  const int xh = h * bank.stride;
  const int xw = w * bank.stride;
  const auto filt = typed_subbands<T>(bank);
#pragma omp parallel for collapse(2) schedule(static)
  for (int ch = 0; ch < c; ++ch) {
    for (int iy = 0; iy < xh; ++iy) {
      T* xc = x + static_cast<std::int64_t>(ch) * xh * xw;
      const int oy = iy / L, u = iy % L;
      for (int ix = 0; ix < xw; ++ix) {
        const int ox = ix / L, v = ix % L;
        T acc = 0;
        for (int b = 0; b < 4; ++b)
          acc += filt[b][static_cast<std::size_t>(u) * L + v] *
                 y[(static_cast<std::int64_t>(b * c + ch) * h + oy) * w + ox];
        xc[static_cast<std::int64_t>(iy) * xw + ix] = acc;
      }
    }
  }
}

}  // namespace

#define FRAMELET_KERNEL_DEFS(T)                                                              \
  void conv2d_forward(const T* x, const T* w, T* y, const ConvShape& s) {                    \
    conv2d_forward_impl(x, w, y, s);                                                         \
  }                                                                                          \
  void conv2d_backward_input(const T* dy, const T* w, T* dx, const ConvShape& s) {           \
    conv2d_backward_input_impl(dy, w, dx, s);                                                \
  }                                                                                          \
  void conv2d_backward_weight(const T* x, const T* dy, T* dw, const ConvShape& s) {          \
    conv2d_backward_weight_impl(x, dy, dw, s);                                               \
  }                                                                                          \
  void bias_add_forward(const T* x, const T* b, T* y, int c, std::int64_t hw) {              \
    bias_add_forward_impl(x, b, y, c, hw);                                                   \
  }                                                                                          \
  void bias_backward(const T* dy, T* db, int c, std::int64_t hw) {                           \
    bias_backward_impl(dy, db, c, hw);                                                       \
  }                                                                                          \
  void relu_forward(const T* x, T* y, std::int64_t n) { relu_forward_impl(x, y, n); }        \
  void relu_backward(const T* x, const T* dy, T* dx, std::int64_t n) {                       \
    relu_backward_impl(x, dy, dx, n);                                                        \
  }                                                                                          \
  void add_forward(const T* a, const T* b, T* y, std::int64_t n) {                           \
    add_forward_impl(a, b, y, n);                                                            \
  }                                                                                          \
  void wavelet_analysis(const T* x, T* y, int c, int h, int w, const FilterBank2D& bank) {   \
    wavelet_analysis_impl(x, y, c, h, w, bank);                                              \
  }                                                                                          \
  void wavelet_synthesis(const T* y, T* x, int c, int h, int w, const FilterBank2D& bank) {  \
    wavelet_synthesis_impl(y, x, c, h, w, bank);                                             \
  }

FRAMELET_KERNEL_DEFS(float)
FRAMELET_KERNEL_DEFS(double)

#undef FRAMELET_KERNEL_DEFS

}  // namespace framelet::kernels::omp
