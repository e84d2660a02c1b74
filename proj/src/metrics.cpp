#include "framelet/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace framelet {

namespace {

void check_shapes(const Image& a, const Image& b, const char* who) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument(std::string(who) + ": image shapes differ");
}

double ssim_global(const Image& ref, const Image& test, const SsimParams& p) {
  const std::size_t n = ref.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += ref.data()[i];
    my += test.data()[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double vx = 0.0, vy = 0.0, vxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = ref.data()[i] - mx;
    const double dy = test.data()[i] - my;
    vx += dx * dx;
    vy += dy * dy;
    vxy += dx * dy;
  }
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  vx /= denom;
  vy /= denom;
  vxy /= denom;
  return ((2.0 * mx * my + p.c1()) * (2.0 * vxy + p.c2())) /
         ((mx * mx + my * my + p.c1()) * (vx + vy + p.c2()));
}

// Normalized 2-D Gaussian window, side w, std sigma.
std::vector<double> gaussian_window(int w, double sigma) {
  std::vector<double> win(static_cast<std::size_t>(w) * w);
  const double c = (w - 1) / 2.0;
  double sum = 0.0;
  for (int y = 0; y < w; ++y)
    for (int x = 0; x < w; ++x) {
      const double dy = y - c, dx = x - c;
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      win[static_cast<std::size_t>(y) * w + x] = v;
      sum += v;
    }
  for (double& v : win) v /= sum;
  return win;
}

double ssim_windowed(const Image& ref, const Image& test, const SsimParams& p) {
  const int w = p.window;
  const std::vector<double> win = gaussian_window(w, p.window_sigma);
  const int oh = ref.height() - w + 1;
  const int ow = ref.width() - w + 1;
  double acc = 0.0;
  for (int oy = 0; oy < oh; ++oy)
    for (int ox = 0; ox < ow; ++ox) {
      double mx = 0.0, my = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (int u = 0; u < w; ++u)
        for (int v = 0; v < w; ++v) {
          const double g = win[static_cast<std::size_t>(u) * w + v];
          const double a = ref.at(oy + u, ox + v);
          const double b = test.at(oy + u, ox + v);
          mx += g * a;
          my += g * b;
          sxx += g * a * a;
          syy += g * b * b;
          sxy += g * a * b;
        }
      const double vx = sxx - mx * mx;
      const double vy = syy - my * my;
      const double vxy = sxy - mx * my;
      acc += ((2.0 * mx * my + p.c1()) * (2.0 * vxy + p.c2())) /
             ((mx * mx + my * my + p.c1()) * (vx + vy + p.c2()));
    }
  return acc / (static_cast<double>(oh) * ow);
}

}  // namespace

double mse(const Image& ref, const Image& test) {
  check_shapes(ref, test, "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double d = ref.data()[i] - test.data()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(ref.size());
}

double psnr(const Image& ref, const Image& test, double max_val) {
  check_shapes(ref, test, "psnr");
  if (max_val <= 0.0) throw std::invalid_argument("psnr: max_val must be positive");
  const double m = mse(ref, test);
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(max_val / std::sqrt(m));
}

double ssim(const Image& ref, const Image& test, const SsimParams& params) {
  check_shapes(ref, test, "ssim");
  if (params.mode == SsimParams::Mode::windowed && ref.width() >= params.window &&
      ref.height() >= params.window)
    return ssim_windowed(ref, test, params);
  return ssim_global(ref, test, params);
}

MetricResult evaluate(const Image& ref, const Image& test, double max_val,
                      const SsimParams& params) {
  MetricResult r;
  r.mse = mse(ref, test);
  r.psnr_db = psnr(ref, test, max_val);
  r.ssim = ssim(ref, test, params);
  return r;
}

}  // namespace framelet
