#pragma once

#include <cstdint>

#include "framelet/wavelet_bank.hpp"

namespace framelet::kernels {

// Every kernel exists twice: a plain serial reference (kernels_serial.cpp)
// and an OpenMP version (kernels_omp.cpp). The parallel versions assign
// each output element to exactly one thread and keep the per-element
// accumulation order fixed, so results do not depend on the worker count.
enum class Exec { serial, parallel };

// Stride-1 convolution with same-size zero padding; k is odd (1 or 3 in
// practice). Input and output are [C,H,W]; weights [Cout,Cin,k,k].
struct ConvShape {
  int cout = 0;
  int cin = 0;
  int k = 0;
  int h = 0;
  int w = 0;
};

template <typename T>
void conv2d_forward(const T* x, const T* weight, T* y, const ConvShape& s, Exec e);

// dx = correlation of dy with the flipped weights (adjoint of forward).
template <typename T>
void conv2d_backward_input(const T* dy, const T* weight, T* dx, const ConvShape& s, Exec e);

// Accumulates into dweight (caller zeroes or chains batches).
template <typename T>
void conv2d_backward_weight(const T* x, const T* dy, T* dweight, const ConvShape& s, Exec e);

template <typename T>
void bias_add_forward(const T* x, const T* bias, T* y, int c, std::int64_t hw, Exec e);

// Accumulates per-channel sums of dy into dbias.
template <typename T>
void bias_backward(const T* dy, T* dbias, int c, std::int64_t hw, Exec e);

template <typename T>
void relu_forward(const T* x, T* y, std::int64_t n, Exec e);

// Subgradient at 0 is 0: passes dy only where x > 0.
template <typename T>
void relu_backward(const T* x, const T* dy, T* dx, std::int64_t n, Exec e);

template <typename T>
void add_forward(const T* a, const T* b, T* y, std::int64_t n, Exec e);

// Strided subband split. Input [C,H,W] with H, W multiples of the bank
// stride; output packed [4C, H/s, W/s] in subband-major order
// (LL block of C channels, then LH, HL, HH). Stride equals tap count,
// so this is a non-overlapping block transform.
template <typename T>
void wavelet_analysis(const T* x, T* y, int c, int h, int w, const FilterBank2D& bank, Exec e);

// Exact adjoint of wavelet_analysis: packed [4C, h, w] -> [C, h*s, w*s].
template <typename T>
void wavelet_synthesis(const T* y, T* x, int c, int h, int w, const FilterBank2D& bank, Exec e);

}  // namespace framelet::kernels
