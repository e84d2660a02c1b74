#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "framelet/network.hpp"
#include "framelet/rng.hpp"
#include "framelet/train.hpp"

using namespace framelet;

namespace {

template <typename T>
Tensor<T> random_input(int side, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Tensor<T> t({1, side, side});
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

// Sets a conv block to the identity map (center-tap delta, zero bias).
template <typename T>
void make_identity_conv(Network<T>& net, const std::string& prefix) {
  Tensor<T>& w = net.param(prefix + ".weight");
  REQUIRE(w.dim(0) == w.dim(1));
  w.fill(0);
  const int k = w.dim(2);
  for (int c = 0; c < w.dim(0); ++c)
    w[((static_cast<std::int64_t>(c) * w.dim(1) + c) * k + k / 2) * k + k / 2] = T(1);
  net.param(prefix + ".bias").fill(0);
}

}  // namespace

TEST_CASE("configuration arithmetic and validation") {
  StageConfig big;
  big.digits = "4422";
  CHECK(big.input_multiple() == 64);
  StageConfig small;
  small.digits = "2222";
  CHECK(small.input_multiple() == 16);

  StageConfig bad;
  bad.digits = "24x2";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.digits = "";
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(build_network<float>(bad, 0), std::invalid_argument);
}

TEST_CASE("channel plan doubles per encoder stage") {
  StageConfig cfg;
  cfg.digits = "4422";
  cfg.base_channels = 64;
  const Network<float> net = build_network<float>(cfg, 1);
  CHECK(net.param("enc0.conv1.weight").dim(0) == 64);
  CHECK(net.param("enc0.conv1.weight").dim(1) == 1);
  CHECK(net.param("enc1.conv1.weight").dim(0) == 128);
  CHECK(net.param("enc2.conv1.weight").dim(0) == 256);
  CHECK(net.param("enc3.conv1.weight").dim(0) == 512);
  CHECK(net.param("bottleneck.conv1.weight").dim(0) == 512);
  CHECK(net.param("head.weight").dim(0) == 1);
  CHECK(net.param("head.weight").dim(1) == 64);
  CHECK(net.banks.size() == 4);
  CHECK(net.banks[0].stride == 4);
  CHECK(net.banks[3].stride == 2);
}

TEST_CASE("same seed builds bit-identical parameters") {
  StageConfig cfg;
  cfg.digits = "22";
  cfg.base_channels = 4;
  const Network<float> a = build_network<float>(cfg, 42);
  const Network<float> b = build_network<float>(cfg, 42);
  const Network<float> c = build_network<float>(cfg, 43);
  bool all_equal = true, any_diff = false;
  for (const auto& [name, t] : a.params) {
    const Tensor<float>& tb = b.param(name);
    const Tensor<float>& tc = c.param(name);
    for (std::int64_t i = 0; i < t.size(); ++i) {
      if (t[i] != tb[i]) all_equal = false;
      if (t[i] != tc[i]) any_diff = true;
    }
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("forward conserves shape and halts on bad input") {
  Rng rng(10);
  for (const char* digits : {"2", "4", "22", "42"}) {
    StageConfig cfg;
    cfg.digits = digits;
    cfg.base_channels = 2;
    const Network<float> net = build_network<float>(cfg, 3);
    const int m = cfg.input_multiple();
    for (int mult : {1, 2, 3}) {
      const Tensor<float> x = random_input<float>(m * mult, rng);
      const Tensor<float> y = forward(net, x);
      CAPTURE(digits);
      CHECK(y.dim(0) == 1);
      CHECK(y.dim(1) == x.dim(1));
      CHECK(y.dim(2) == x.dim(2));
    }
    Tensor<float> bad({1, m + 1, m + 1});
    CHECK_THROWS_AS(forward(net, bad), std::invalid_argument);
  }
}

TEST_CASE("bottleneck spatial size follows the stride product") {
  // 256/(4*4*2*2) = 4 and 64/(2*2*2*2) = 4
  struct Case {
    const char* digits;
    int side;
  };
  for (const Case c : {Case{"4422", 256}, Case{"2222", 64}}) {
    StageConfig cfg;
    cfg.digits = c.digits;
    cfg.base_channels = 2;
    const Network<float> net = build_network<float>(cfg, 4);
    Rng rng(11);
    ValueGraph<float> g;
    forward_into(net, g, g.input(random_input<float>(c.side, rng)));
    int min_side = c.side;
    for (int i = 0; i < g.size(); ++i) min_side = std::min(min_side, g.value(i).dim(1));
    CAPTURE(c.digits);
    CHECK(min_side == 4);
  }
}

TEST_CASE("non-finite activations are reported") {
  StageConfig cfg;
  cfg.digits = "2";
  cfg.base_channels = 2;
  Network<float> net = build_network<float>(cfg, 30);
  for (auto& [name, t] : net.params)
    if (t.rank() == 4) t.fill(1e30f);  // overflow to inf inside the net
  Rng rng(31);
  const Tensor<float> x = random_input<float>(8, rng, 0.5, 1.0);
  CHECK_THROWS_AS(forward(net, x), std::runtime_error);
}

TEST_CASE("all-zero parameters give an all-zero output") {
  StageConfig cfg;
  cfg.digits = "22";
  cfg.base_channels = 2;
  Network<float> net = build_network<float>(cfg, 5);
  for (auto& [name, t] : net.params) t.fill(0);
  Rng rng(12);
  const Tensor<float> y = forward(net, random_input<float>(16, rng));
  for (std::int64_t i = 0; i < y.size(); ++i) CHECK(y[i] == 0.0f);
}

TEST_CASE("residual mode adds the input back") {
  StageConfig cfg;
  cfg.digits = "2";
  cfg.base_channels = 2;
  Network<float> net = build_network<float>(cfg, 6);
  for (auto& [name, t] : net.params) t.fill(0);
  net.residual = true;
  Rng rng(13);
  const Tensor<float> x = random_input<float>(8, rng);
  const Tensor<float> y = forward(net, x);
  for (std::int64_t i = 0; i < x.size(); ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("a two-tap stage pair with identity convolutions is lossless") {
  StageConfig cfg;
  cfg.digits = "2";
  cfg.base_channels = 1;
  Network<float> net = build_network<float>(cfg, 7);
  for (const char* block : {"enc0.conv1", "enc0.conv2", "bottleneck.conv1", "bottleneck.conv2",
                            "dec0.conv1", "dec0.conv2"})
    make_identity_conv(net, block);
  net.param("head.weight").fill(1.0f);
  net.param("head.bias").fill(0.0f);

  Rng rng(14);
  const Tensor<float> x = random_input<float>(16, rng, 0.0, 1.0);  // non-negative, ReLU is a no-op
  const Tensor<float> y = forward(net, x);
  double max_err = 0.0;
  for (std::int64_t i = 0; i < x.size(); ++i)
    max_err = std::max(max_err, std::abs(static_cast<double>(y[i]) - static_cast<double>(x[i])));
  CHECK(max_err < 1e-4);
}

TEST_CASE("gradients match central finite differences on a miniature network") {
  StageConfig cfg;
  cfg.digits = "22";
  cfg.base_channels = 2;
  // Seeds chosen so no ReLU pre-activation sits inside the finite-
  // difference window; a kink crossing would corrupt the reference.
  Network<double> net = build_network<double>(cfg, 12);
  Rng rng(15);
  const Tensor<double> x = random_input<double>(16, rng);
  Tensor<double> target({1, 16, 16});
  for (std::int64_t i = 0; i < target.size(); ++i) target[i] = rng.uniform(0.0, 1.0);

  auto loss_of = [&]() {
    const Tensor<double> y = forward(net, x, kernels::Exec::serial);
    double acc = 0.0;
    for (std::int64_t i = 0; i < y.size(); ++i) {
      const double d = y[i] - target[i];
      acc += d * d;
    }
    return acc / static_cast<double>(y.size());
  };

  ValueGraph<double> g(kernels::Exec::serial);
  const int out = forward_into(net, g, g.input(x));
  const Tensor<double>& y = g.value(out);
  Tensor<double> og(y.shape());
  for (std::int64_t i = 0; i < y.size(); ++i)
    og[i] = 2.0 * (y[i] - target[i]) / static_cast<double>(y.size());
  const GradTable<double> grads = backward(net, g, out, og);

  const double step = 1e-5;
  double worst = 0.0;
  for (auto& [name, p] : net.params) {
    const Tensor<double>& analytic = grads.at(name);
    for (std::int64_t i = 0; i < p.size(); ++i) {
      const double saved = p[i];
      p[i] = saved + step;
      const double lp = loss_of();
      p[i] = saved - step;
      const double lm = loss_of();
      p[i] = saved;
      const double fd = (lp - lm) / (2.0 * step);
      const double rel = std::abs(analytic[i] - fd) / std::max(std::abs(analytic[i]) + std::abs(fd), 1e-6);
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("backward bookkeeping") {
  StageConfig cfg;
  cfg.digits = "2";
  cfg.base_channels = 2;
  Network<float> net = build_network<float>(cfg, 16);
  Rng rng(17);
  const Tensor<float> x = random_input<float>(8, rng);

  SUBCASE("zero output gradient gives exactly zero parameter gradients") {
    ValueGraph<float> g;
    const int out = forward_into(net, g, g.input(x));
    Tensor<float> og(g.value(out).shape());  // zeros
    const GradTable<float> grads = backward(net, g, out, og);
    CHECK(grads.size() == net.params.size());
    for (const auto& [name, t] : grads)
      for (std::int64_t i = 0; i < t.size(); ++i) CHECK(t[i] == 0.0f);
  }

  SUBCASE("parameters outside the recorded computation get exact zeros") {
    ValueGraph<float> g;
    const int in = g.input(x);
    const int out = g.conv(in, &net.param("enc0.conv1.weight"), "enc0.conv1.weight");
    Tensor<float> og(g.value(out).shape());
    og.fill(1.0f);
    const GradTable<float> grads = backward(net, g, out, og);
    bool touched_nonzero = false;
    for (std::int64_t i = 0; i < grads.at("enc0.conv1.weight").size(); ++i)
      if (grads.at("enc0.conv1.weight")[i] != 0.0f) touched_nonzero = true;
    CHECK(touched_nonzero);
    for (const auto& [name, t] : grads) {
      if (name == "enc0.conv1.weight") continue;
      for (std::int64_t i = 0; i < t.size(); ++i) CHECK(t[i] == 0.0f);
    }
  }

  SUBCASE("gradient table keys exactly match the parameter table") {
    ValueGraph<float> g;
    const int out = forward_into(net, g, g.input(x));
    Tensor<float> og(g.value(out).shape());
    og.fill(0.5f);
    const GradTable<float> grads = backward(net, g, out, og);
    REQUIRE(grads.size() == net.params.size());
    for (const auto& [name, t] : net.params) CHECK(grads.count(name) == 1);
  }

  SUBCASE("backward before any forward is a state error") {
    ValueGraph<float> g;
    Tensor<float> og({1, 8, 8});
    GradTable<float> table;
    CHECK_THROWS_AS(g.backward(0, og, table), std::logic_error);
  }

  SUBCASE("a graph cannot be consumed twice") {
    ValueGraph<float> g;
    const int out = forward_into(net, g, g.input(x));
    Tensor<float> og(g.value(out).shape());
    GradTable<float> t1, t2;
    g.backward(out, og, t1);
    CHECK_THROWS_AS(g.backward(out, og, t2), std::logic_error);
  }
}

TEST_CASE("model file round-trips bit-exactly") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "framelet_model_test";
  fs::create_directories(dir);
  const std::string path = (dir / "model.frm").string();

  StageConfig cfg;
  cfg.digits = "42";
  cfg.base_channels = 3;
  const Network<float> net = build_network<float>(cfg, 21);
  save_model(net, path);
  const Network<float> back = load_model(path);

  CHECK(back.config.digits == "42");
  CHECK(back.config.base_channels == 3);
  CHECK(back.residual == false);
  REQUIRE(back.params.size() == net.params.size());
  for (const auto& [name, t] : net.params) {
    const Tensor<float>& tb = back.param(name);
    REQUIRE(t.same_shape(tb));
    for (std::int64_t i = 0; i < t.size(); ++i) CHECK(t[i] == tb[i]);
  }

  Rng rng(22);
  const Tensor<float> x = random_input<float>(16, rng);
  const Tensor<float> y1 = forward(net, x);
  const Tensor<float> y2 = forward(back, x);
  for (std::int64_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);

  // config string digits survive verbatim in the header:
  // magic(6) + version(2) + length(4), then the string itself
  {
    std::ifstream is(path, std::ios::binary);
    char header[14];
    is.read(header, 14);
    CHECK(std::string(header, 6) == "FRMLT1");
    CHECK(std::string(header + 12, header + 14) == "42");
  }

  SUBCASE("bad magic is rejected") {
    const std::string bad = (dir / "bad.frm").string();
    std::ofstream os(bad, std::ios::binary);
    os << "NOTFRMLT00000000";
    os.close();
    CHECK_THROWS_WITH_AS(load_model(bad), doctest::Contains("corrupt model"), std::runtime_error);
  }

  SUBCASE("truncation is rejected") {
    std::ifstream is(path, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const std::string trunc_path = (dir / "trunc.frm").string();
    std::ofstream os(trunc_path, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
    os.close();
    CHECK_THROWS_AS(load_model(trunc_path), std::runtime_error);
  }

  SUBCASE("residual flag survives the round trip") {
    Network<float> rnet = build_network<float>(cfg, 23);
    rnet.residual = true;
    const std::string rpath = (dir / "residual.frm").string();
    save_model(rnet, rpath);
    CHECK(load_model(rpath).residual == true);
  }
}
