#pragma once

#include "framelet/image.hpp"

namespace framelet {

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;  // L
  enum class Mode { global, windowed } mode = Mode::windowed;
  int window = 11;           // windowed mode: Gaussian window side
  double window_sigma = 1.5;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
};

struct MetricResult {
  double psnr_db = 0.0;
  double ssim = 0.0;
  double mse = 0.0;
};

double mse(const Image& ref, const Image& test);

// 20*log10(max_val/sqrt(MSE)); identical images give +infinity.
double psnr(const Image& ref, const Image& test, double max_val = 255.0);

// Global mode uses whole-image statistics (unbiased variances);
// windowed mode averages local statistics under a Gaussian window and
// falls back to global when the image is smaller than the window.
double ssim(const Image& ref, const Image& test, const SsimParams& params = {});

MetricResult evaluate(const Image& ref, const Image& test, double max_val = 255.0,
                      const SsimParams& params = {});

}  // namespace framelet
