#include "framelet/noise.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "framelet/metrics.hpp"
#include "framelet/rng.hpp"

namespace framelet {

Image add_noise(const Image& img, const NoiseSpec& spec) {
  if (spec.sigma < 0.0) throw std::invalid_argument("add_noise: sigma must be non-negative");
  Image out = img;
  Rng rng(splitmix64(spec.seed));
  const int h = img.height(), w = img.width();
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double g = rng.normal();
      const double v = img.at(y, x);
      out.at(y, x) = spec.model == NoiseModel::speckle ? v * (1.0 + spec.sigma * g)
                                                       : v + spec.sigma * g;
    }
  if (spec.clip) out.clamp(0.0, 255.0);
  return out;
}

double calibrate_noise(const std::vector<Image>& images, double target_psnr_db, NoiseModel model,
                       std::uint64_t seed, bool clip) {
  if (images.empty()) throw std::invalid_argument("calibrate_noise: empty image set");
  if (!std::isfinite(target_psnr_db))
    throw std::invalid_argument("calibrate_noise: target PSNR must be finite");

  auto mean_psnr = [&](double sigma) {
    double acc = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      NoiseSpec spec;
      spec.model = model;
      spec.sigma = sigma;
      spec.seed = derive_seed(seed, 0x6e6f6973u, i);
      spec.clip = clip;
      acc += psnr(images[i], add_noise(images[i], spec));
    }
    return acc / static_cast<double>(images.size());
  };

  const double tol_db = 0.05;

  // Grow the upper bracket until the PSNR drops below target.
  double hi = 1.0;
  double hi_psnr = mean_psnr(hi);
  while (hi_psnr > target_psnr_db) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("calibrate_noise: target PSNR not bracketable");
    hi_psnr = mean_psnr(hi);
  }
  double lo = 0.0;  // PSNR(+0) is +infinity, always above target

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p = mean_psnr(mid);
    if (std::abs(p - target_psnr_db) <= tol_db) return mid;
    if (p > target_psnr_db)
      lo = mid;
    else
      hi = mid;
  }
  throw std::runtime_error("calibrate_noise: bisection failed to converge");
}

}  // namespace framelet
