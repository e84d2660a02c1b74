// Timing comparison of the serial reference kernels against the OpenMP
// versions, plus a whole-network forward/backward. Also reports the
// maximum absolute difference between the two backends.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "framelet/graph.hpp"
#include "framelet/kernels.hpp"
#include "framelet/network.hpp"
#include "framelet/rng.hpp"
#include "framelet/train.hpp"

using namespace framelet;
using kernels::Exec;

namespace {

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

Tensor<float> random_tensor(std::vector<int> shape, Rng& rng) {
  Tensor<float> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<float>(rng.uniform(-1.0, 1.0));
  return t;
}

double max_abs_diff(const Tensor<float>& a, const Tensor<float>& b) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])));
  return m;
}

struct Row {
  std::string name;
  double serial_ms, omp_ms, diff;
};

template <typename F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const double t0 = now_ms();
    fn();
    best = std::min(best, now_ms() - t0);
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  const int reps = quick ? 2 : 5;
  const int C = quick ? 8 : 32;
  const int S = quick ? 32 : 128;

#ifdef _OPENMP
  std::printf("threads: %d\n", omp_get_max_threads());
#else
  std::printf("threads: 1 (built without OpenMP)\n");
#endif
  std::printf("sizes: %d channels, %dx%d\n\n", C, S, S);

  Rng rng(42);
  std::vector<Row> rows;

  {
    kernels::ConvShape cs{C, C, 3, S, S};
    const Tensor<float> x = random_tensor({C, S, S}, rng);
    const Tensor<float> w = random_tensor({C, C, 3, 3}, rng);
    Tensor<float> ys({C, S, S}), yp({C, S, S});
    const double ts = time_best_of(reps, [&] {
      kernels::conv2d_forward(x.data(), w.data(), ys.data(), cs, Exec::serial);
    });
    const double tp = time_best_of(reps, [&] {
      kernels::conv2d_forward(x.data(), w.data(), yp.data(), cs, Exec::parallel);
    });
    rows.push_back({"conv2d_forward", ts, tp, max_abs_diff(ys, yp)});

    Tensor<float> dxs({C, S, S}), dxp({C, S, S});
    const double bs = time_best_of(reps, [&] {
      kernels::conv2d_backward_input(ys.data(), w.data(), dxs.data(), cs, Exec::serial);
    });
    const double bp = time_best_of(reps, [&] {
      kernels::conv2d_backward_input(ys.data(), w.data(), dxp.data(), cs, Exec::parallel);
    });
    rows.push_back({"conv2d_backward_input", bs, bp, max_abs_diff(dxs, dxp)});

    Tensor<float> dws({C, C, 3, 3}), dwp({C, C, 3, 3});
    const double ws_ms = time_best_of(reps, [&] {
      dws.fill(0);
      kernels::conv2d_backward_weight(x.data(), ys.data(), dws.data(), cs, Exec::serial);
    });
    const double wp_ms = time_best_of(reps, [&] {
      dwp.fill(0);
      kernels::conv2d_backward_weight(x.data(), ys.data(), dwp.data(), cs, Exec::parallel);
    });
    rows.push_back({"conv2d_backward_weight", ws_ms, wp_ms, max_abs_diff(dws, dwp)});
  }

  for (const char digit : {'2', '4'}) {
    const FilterBank2D bank = to_2d(bank_from_digit(digit));
    const Tensor<float> x = random_tensor({C, S, S}, rng);
    Tensor<float> ys({4 * C, S / bank.stride, S / bank.stride});
    Tensor<float> yp(ys.shape());
    const std::string tag(1, digit);
    const double ts = time_best_of(reps, [&] {
      kernels::wavelet_analysis(x.data(), ys.data(), C, S, S, bank, Exec::serial);
    });
    const double tp = time_best_of(reps, [&] {
      kernels::wavelet_analysis(x.data(), yp.data(), C, S, S, bank, Exec::parallel);
    });
    rows.push_back({"wavelet_analysis['" + tag + "']", ts, tp, max_abs_diff(ys, yp)});

    Tensor<float> xs({C, S, S}), xp({C, S, S});
    const double ss = time_best_of(reps, [&] {
      kernels::wavelet_synthesis(ys.data(), xs.data(), C, S / bank.stride, S / bank.stride, bank,
                                 Exec::serial);
    });
    const double sp = time_best_of(reps, [&] {
      kernels::wavelet_synthesis(ys.data(), xp.data(), C, S / bank.stride, S / bank.stride, bank,
                                 Exec::parallel);
    });
    rows.push_back({"wavelet_synthesis['" + tag + "']", ss, sp, max_abs_diff(xs, xp)});
  }

  {
    StageConfig cfg;
    cfg.digits = quick ? "22" : "4422";
    cfg.base_channels = quick ? 8 : 16;
    const Network<float> net = build_network<float>(cfg, 7);
    const int side = cfg.input_multiple() * (quick ? 2 : 2);
    const Tensor<float> x = random_tensor({1, side, side}, rng);
    Tensor<float> ys, yp;
    const double ts = time_best_of(reps, [&] { ys = forward(net, x, Exec::serial); });
    const double tp = time_best_of(reps, [&] { yp = forward(net, x, Exec::parallel); });
    rows.push_back({"network_forward[" + cfg.digits + "]", ts, tp, max_abs_diff(ys, yp)});

    Tensor<float> og(ys.shape());
    og.fill(1.0f);
    const double bs = time_best_of(reps, [&] {
      ValueGraph<float> g(Exec::serial);
      backward(net, g, forward_into(net, g, g.input(x)), og);
    });
    const double bp = time_best_of(reps, [&] {
      ValueGraph<float> g(Exec::parallel);
      backward(net, g, forward_into(net, g, g.input(x)), og);
    });
    rows.push_back({"network_backward[" + cfg.digits + "]", bs, bp, 0.0});
  }

  std::printf("%-28s %12s %12s %9s %12s\n", "kernel", "serial ms", "omp ms", "speedup",
              "max |diff|");
  for (const Row& r : rows)
    std::printf("%-28s %12.3f %12.3f %8.2fx %12.3e\n", r.name.c_str(), r.serial_ms, r.omp_ms,
                r.serial_ms / r.omp_ms, r.diff);
  return 0;
}
