#pragma once

#include <cstdint>
#include <ostream>
#include <utility>
#include <vector>

#include "framelet/image.hpp"
#include "framelet/network.hpp"
#include "framelet/noise.hpp"

namespace framelet {

struct TrainPlan {
  double base_lr = 1e-4;
  int halve_every = 25;  // epochs between learning-rate halvings
  int epochs = 100;
  int batch_size = 8;
  int patch_size = 64;       // must be a multiple of the network's input_multiple
  int steps_per_epoch = 0;   // 0: ceil(#images / batch_size)
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double loss = 0.0;  // mean training loss over the epoch
  double psnr = 0.0;  // validation, on fixed noisy crops
  double ssim = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  // CSV: epoch,lr,loss,psnr,ssim (one row per epoch, `comment` lines first).
  void write_csv(std::ostream& os, const std::string& comment = {}) const;
};

// base_lr / 2^floor(epoch / halve_every)
double lr_schedule(int epoch, const TrainPlan& plan);

// Mean over all pixels of the batch of (pred - target)^2, plus the
// gradient of that mean with respect to each prediction tensor.
template <typename T>
std::pair<double, std::vector<Tensor<T>>> mse_loss(const std::vector<Tensor<T>>& pred,
                                                   const std::vector<Tensor<T>>& target);

// Scales intensities to [0,1], runs the network, rescales the
// prediction and clamps to [0,255]. Sides must be divisible by the
// network's input multiple.
Image denoise_image(const Network<float>& net, const Image& noisy,
                    kernels::Exec exec = kernels::Exec::parallel);

// Patch-sampled Adam training. Each step draws batch_size random crops,
// injects noise from a per-(epoch, step, sample) substream of plan.seed,
// and applies one update at the scheduled rate; one validation pass per
// epoch. Deterministic given the plan, images and single-threaded
// execution; batch items may be evaluated in parallel because gradients
// reduce in sample order.
TrainHistory train(Network<float>& net, const std::vector<Image>& images, const TrainPlan& plan);

}  // namespace framelet
