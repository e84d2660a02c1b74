#include "framelet/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "framelet/adam.hpp"
#include "framelet/metrics.hpp"
#include "framelet/rng.hpp"

namespace framelet {

double lr_schedule(int epoch, const TrainPlan& plan) {
  if (epoch < 0) throw std::invalid_argument("lr_schedule: negative epoch");
  if (plan.base_lr <= 0.0) throw std::invalid_argument("lr_schedule: base_lr must be positive");
  if (plan.halve_every <= 0) throw std::invalid_argument("lr_schedule: halve_every must be positive");
  return plan.base_lr / std::pow(2.0, static_cast<double>(epoch / plan.halve_every));
}

template <typename T>
std::pair<double, std::vector<Tensor<T>>> mse_loss(const std::vector<Tensor<T>>& pred,
                                                   const std::vector<Tensor<T>>& target) {
  if (pred.size() != target.size() || pred.empty())
    throw std::invalid_argument("mse_loss: batch sizes differ or empty");
  std::int64_t count = 0;
  for (std::size_t b = 0; b < pred.size(); ++b) {
    if (!pred[b].same_shape(target[b])) throw std::invalid_argument("mse_loss: shape mismatch");
    count += pred[b].size();
  }
  double loss = 0.0;
  std::vector<Tensor<T>> grads;
  grads.reserve(pred.size());
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t b = 0; b < pred.size(); ++b) {
    Tensor<T> g(pred[b].shape());
    for (std::int64_t i = 0; i < pred[b].size(); ++i) {
      const double d = static_cast<double>(pred[b][i]) - static_cast<double>(target[b][i]);
      loss += d * d * inv;
      g[i] = static_cast<T>(2.0 * d * inv);
    }
    grads.push_back(std::move(g));
  }
  return {loss, std::move(grads)};
}

template std::pair<double, std::vector<Tensor<float>>> mse_loss<float>(
    const std::vector<Tensor<float>>&, const std::vector<Tensor<float>>&);
template std::pair<double, std::vector<Tensor<double>>> mse_loss<double>(
    const std::vector<Tensor<double>>&, const std::vector<Tensor<double>>&);

namespace {

Tensor<float> to_tensor_scaled(const Image& img) {
  Tensor<float> t({1, img.height(), img.width()});
  for (std::size_t i = 0; i < img.size(); ++i)
    t[static_cast<std::int64_t>(i)] = static_cast<float>(img.data()[i] / 255.0);
  return t;
}

Image to_image_scaled(const Tensor<float>& t) {
  Image img(t.dim(2), t.dim(1));
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data()[i] = static_cast<double>(t[static_cast<std::int64_t>(i)]) * 255.0;
  img.clamp(0.0, 255.0);
  return img;
}

}  // namespace

// Networks operate on intensities scaled to [0, 1]; metrics on [0, 255].
Image denoise_image(const Network<float>& net, const Image& noisy, kernels::Exec exec) {
  const Tensor<float> out = forward(net, to_tensor_scaled(noisy), exec);
  return to_image_scaled(out);
}

TrainHistory train(Network<float>& net, const std::vector<Image>& images, const TrainPlan& plan) {
  if (images.empty()) throw std::invalid_argument("train: empty training set");
  const int multiple = net.config.input_multiple();
  if (plan.patch_size <= 0 || plan.patch_size % multiple != 0)
    throw std::invalid_argument("train: patch_size must be a positive multiple of " +
                                std::to_string(multiple));
  if (plan.batch_size <= 0) throw std::invalid_argument("train: batch_size must be positive");
  if (plan.epochs < 0) throw std::invalid_argument("train: negative epoch count");
  for (const Image& img : images)
    if (img.width() < plan.patch_size || img.height() < plan.patch_size)
      throw std::invalid_argument("train: image smaller than patch size");

  const int n_images = static_cast<int>(images.size());
  const int steps = plan.steps_per_epoch > 0
                        ? plan.steps_per_epoch
                        : (n_images + plan.batch_size - 1) / plan.batch_size;
  const int p = plan.patch_size;

#ifdef _OPENMP
  const bool sample_parallel = omp_get_max_threads() > 1;
#else
  const bool sample_parallel = false;
#endif
  // When the batch runs in parallel each sample uses serial kernels;
  // either way gradients reduce in sample order, so the result does not
  // depend on the worker count.
  const kernels::Exec sample_exec =
      sample_parallel ? kernels::Exec::serial : kernels::Exec::parallel;

  AdamState<float> adam;
  TrainHistory history;

  for (int epoch = 0; epoch < plan.epochs; ++epoch) {
    const double lr = lr_schedule(epoch, plan);
    double epoch_loss = 0.0;

    for (int step = 0; step < steps; ++step) {
      Rng crop_rng(derive_seed(plan.seed, 0x63726f70u, static_cast<std::uint64_t>(epoch),
                               static_cast<std::uint64_t>(step)));
      std::vector<Tensor<float>> noisy(static_cast<std::size_t>(plan.batch_size));
      std::vector<Tensor<float>> clean(static_cast<std::size_t>(plan.batch_size));
      for (int b = 0; b < plan.batch_size; ++b) {
        const Image& img = images[static_cast<std::size_t>(crop_rng.uniform_int(n_images))];
        const int x0 = img.width() == p ? 0 : crop_rng.uniform_int(img.width() - p + 1);
        const int y0 = img.height() == p ? 0 : crop_rng.uniform_int(img.height() - p + 1);
        const Image patch = img.crop(x0, y0, p, p);
        NoiseSpec ns = plan.noise;
        ns.seed = derive_seed(plan.seed, 0x6e7a31u,
                              static_cast<std::uint64_t>(epoch) * static_cast<std::uint64_t>(steps) +
                                  static_cast<std::uint64_t>(step),
                              static_cast<std::uint64_t>(b));
        noisy[static_cast<std::size_t>(b)] = to_tensor_scaled(add_noise(patch, ns));
        clean[static_cast<std::size_t>(b)] = to_tensor_scaled(patch);
      }

      std::vector<ValueGraph<float>> graphs;
      graphs.reserve(static_cast<std::size_t>(plan.batch_size));
      for (int b = 0; b < plan.batch_size; ++b) graphs.emplace_back(sample_exec);
      std::vector<int> outputs(static_cast<std::size_t>(plan.batch_size));
      std::vector<Tensor<float>> preds(static_cast<std::size_t>(plan.batch_size));

      // exceptions must not unwind out of an OpenMP region
      std::exception_ptr batch_error = nullptr;
      auto rethrow_with_context = [&](std::exception_ptr err) {
        try {
          std::rethrow_exception(err);
        } catch (const std::exception& e) {
          char msg[192];
          std::snprintf(msg, sizeof msg, "train: epoch %d step %d: %s", epoch, step, e.what());
          throw std::runtime_error(msg);
        }
      };
#pragma omp parallel for schedule(static) if (sample_parallel)
      for (int b = 0; b < plan.batch_size; ++b) {
        try {
          ValueGraph<float>& g = graphs[static_cast<std::size_t>(b)];
          outputs[static_cast<std::size_t>(b)] =
              forward_into(net, g, g.input(noisy[static_cast<std::size_t>(b)]));
          preds[static_cast<std::size_t>(b)] = g.value(outputs[static_cast<std::size_t>(b)]);
        } catch (...) {
#pragma omp critical
          if (!batch_error) batch_error = std::current_exception();
        }
      }
      if (batch_error) rethrow_with_context(batch_error);

      const auto [loss, pred_grads] = mse_loss(preds, clean);
      if (!std::isfinite(loss)) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "train: non-finite loss at epoch %d step %d", epoch, step);
        throw std::runtime_error(msg);
      }

      std::vector<GradTable<float>> tables(static_cast<std::size_t>(plan.batch_size));
#pragma omp parallel for schedule(static) if (sample_parallel)
      for (int b = 0; b < plan.batch_size; ++b) {
        try {
          tables[static_cast<std::size_t>(b)] =
              backward(net, graphs[static_cast<std::size_t>(b)],
                       outputs[static_cast<std::size_t>(b)], pred_grads[static_cast<std::size_t>(b)]);
        } catch (...) {
#pragma omp critical
          if (!batch_error) batch_error = std::current_exception();
        }
      }
      if (batch_error) rethrow_with_context(batch_error);

      // Index-ordered reduction into sample 0's table.
      GradTable<float>& total = tables[0];
      for (int b = 1; b < plan.batch_size; ++b)
        for (auto& [name, g] : total) {
          const Tensor<float>& gb = tables[static_cast<std::size_t>(b)].at(name);
          for (std::int64_t i = 0; i < g.size(); ++i) g[i] += gb[i];
        }

      adam_step(net.params, total, adam, lr);
      epoch_loss += loss;
    }

    // Validation on fixed center crops with a fixed noise stream.
    double val_psnr = 0.0, val_ssim = 0.0;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const Image& img = images[i];
      const Image clean = img.crop((img.width() - p) / 2, (img.height() - p) / 2, p, p);
      NoiseSpec ns = plan.noise;
      ns.seed = derive_seed(plan.seed, 0x76616cu, i);
      const Image denoised = denoise_image(net, add_noise(clean, ns), kernels::Exec::parallel);
      val_psnr += psnr(clean, denoised);
      val_ssim += ssim(clean, denoised);
    }
    val_psnr /= static_cast<double>(images.size());
    val_ssim /= static_cast<double>(images.size());

    history.epochs.push_back({epoch, lr, epoch_loss / steps, val_psnr, val_ssim});
  }
  return history;
}

void TrainHistory::write_csv(std::ostream& os, const std::string& comment) const {
  if (!comment.empty()) os << "# " << comment << "\n";
  os << "epoch,lr,loss,psnr,ssim\n";
  char row[192];
  for (const EpochRecord& r : epochs) {
    std::snprintf(row, sizeof row, "%d,%.10g,%.10g,%.10g,%.10g\n", r.epoch, r.lr, r.loss, r.psnr,
                  r.ssim);
    os << row;
  }
}

}  // namespace framelet
