#pragma once

#include <cstdint>
#include <vector>

#include "framelet/image.hpp"

namespace framelet {

enum class NoiseModel { speckle, additive_gaussian };

// sigma is in gray levels for the additive model and is the standard
// deviation of the unit-mean multiplier for speckle. Identical spec and
// input give an identical noise field.
struct NoiseSpec {
  NoiseModel model = NoiseModel::additive_gaussian;
  double sigma = 30.0;
  std::uint64_t seed = 0;
  bool clip = true;  // clamp to [0, 255] after injection
};

// speckle:  out = in .* (1 + sigma * g)
// additive: out = in + sigma * g
// with g a standard normal field drawn from spec.seed. The field does
// not depend on sigma, so the noisy output is continuous in sigma.
Image add_noise(const Image& img, const NoiseSpec& spec);

// Bisection on sigma until the mean noisy-input PSNR over the set is
// within 0.05 dB of target_psnr_db (fixed seed per evaluation).
double calibrate_noise(const std::vector<Image>& images, double target_psnr_db, NoiseModel model,
                       std::uint64_t seed = 0, bool clip = true);

}  // namespace framelet
