#include "framelet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "framelet/hankel.hpp"
#include "framelet/image_io.hpp"
#include "framelet/metrics.hpp"
#include "framelet/network.hpp"
#include "framelet/noise.hpp"
#include "framelet/report.hpp"
#include "framelet/train.hpp"
#include "framelet/version.hpp"

namespace framelet {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, NoiseModel> kNoiseModels{
    {"gaussian", NoiseModel::additive_gaussian},
    {"speckle", NoiseModel::speckle},
};

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<Image> load_dataset(const std::string& dir) {
  std::vector<Image> images;
  for (const std::string& f : list_rasters(dir)) images.push_back(load_image(f));
  if (images.empty()) throw std::runtime_error("no .png/.pgm images found under " + dir);
  return images;
}

// Crop so the sides divide `multiple`; top-left anchored.
Image crop_to_multiple(const Image& img, int multiple) {
  const int w = img.width() - img.width() % multiple;
  const int h = img.height() - img.height() % multiple;
  if (w == 0 || h == 0)
    throw std::runtime_error("image smaller than the network input multiple " +
                             std::to_string(multiple));
  if (w == img.width() && h == img.height()) return img;
  return img.crop(0, 0, w, h);
}

// ---------------------------------------------------------------- train

struct TrainFileConfig {
  std::string dataset_dir;
  std::string out_dir;
  StageConfig stage;
  TrainPlan plan;
  bool residual = false;
};

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: boolean expected for " + key + ", got '" + v + "'");
}

TrainFileConfig parse_train_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  TrainFileConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key=value at line " + std::to_string(lineno));
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "dataset_dir") cfg.dataset_dir = value;
      else if (key == "out_dir") cfg.out_dir = value;
      else if (key == "digits") cfg.stage.digits = value;
      else if (key == "base_channels") cfg.stage.base_channels = std::stoi(value);
      else if (key == "epochs") cfg.plan.epochs = std::stoi(value);
      else if (key == "batch_size") cfg.plan.batch_size = std::stoi(value);
      else if (key == "patch_size") cfg.plan.patch_size = std::stoi(value);
      else if (key == "steps_per_epoch") cfg.plan.steps_per_epoch = std::stoi(value);
      else if (key == "lr") cfg.plan.base_lr = std::stod(value);
      else if (key == "halve_every") cfg.plan.halve_every = std::stoi(value);
      else if (key == "sigma") cfg.plan.noise.sigma = std::stod(value);
      else if (key == "noise_model") cfg.plan.noise.model = kNoiseModels.at(value);
      else if (key == "clip") cfg.plan.noise.clip = parse_bool(value, key);
      else if (key == "seed") cfg.plan.seed = std::stoull(value);
      else if (key == "residual") cfg.residual = parse_bool(value, key);
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("config: bad value for " + key + " at line " +
                                  std::to_string(lineno));
    }
  }
  if (cfg.dataset_dir.empty() || cfg.out_dir.empty())
    throw std::invalid_argument("config: dataset_dir and out_dir are required");
  return cfg;
}

int cmd_train(const std::string& config_path) {
  const TrainFileConfig cfg = parse_train_config(config_path);
  cfg.stage.validate();
  const std::vector<Image> images = load_dataset(cfg.dataset_dir);

  Network<float> net = build_network<float>(cfg.stage, cfg.plan.seed);
  net.residual = cfg.residual;
  const int steps = cfg.plan.steps_per_epoch > 0
                        ? cfg.plan.steps_per_epoch
                        : (static_cast<int>(images.size()) + cfg.plan.batch_size - 1) /
                              cfg.plan.batch_size;
  std::printf("training %s (base %d) on %zu images, %d epochs x %d steps, batch %d, patch %d\n",
              cfg.stage.digits.c_str(), cfg.stage.base_channels, images.size(), cfg.plan.epochs,
              steps, cfg.plan.batch_size, cfg.plan.patch_size);
  const TrainHistory history = train(net, images, cfg.plan);

  fs::create_directories(cfg.out_dir);
  const std::string model_path = (fs::path(cfg.out_dir) / "model.frm").string();
  save_model(net, model_path);
  char prov[256];
  std::snprintf(prov, sizeof prov, "framelet %s config=%s seed=%llu sigma=%g", kVersion,
                cfg.stage.digits.c_str(), static_cast<unsigned long long>(cfg.plan.seed),
                cfg.plan.noise.sigma);
  std::ofstream hist((fs::path(cfg.out_dir) / "history.csv").string(), std::ios::trunc);
  history.write_csv(hist, prov);
  if (!history.epochs.empty())
    std::printf("final epoch: loss %.6g, psnr %.4f, ssim %.4f\n", history.epochs.back().loss,
                history.epochs.back().psnr, history.epochs.back().ssim);
  std::printf("wrote %s\n", model_path.c_str());
  return 0;
}

// -------------------------------------------------------------- denoise

int cmd_denoise(const std::string& model_path, const std::string& in_path,
                const std::string& out_path) {
  const Network<float> net = load_model(model_path);
  const Image noisy = load_image(in_path);
  const Image cropped = crop_to_multiple(noisy, net.config.input_multiple());
  if (cropped.width() != noisy.width() || cropped.height() != noisy.height())
    std::fprintf(stderr, "note: input cropped to %dx%d to fit the network input multiple\n",
                 cropped.width(), cropped.height());
  const Image out = denoise_image(net, cropped);
  char prov[256];
  std::snprintf(prov, sizeof prov, "framelet %s config=%s model=%s", kVersion,
                net.config.digits.c_str(), stem_of(model_path).c_str());
  save_image(out, out_path, prov);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

// ----------------------------------------------------------------- eval

int cmd_eval(const std::vector<std::string>& dataset_dirs, const std::vector<std::string>& models,
             double sigma, const std::string& noise_model, std::uint64_t seed, bool clip,
             const std::string& out_dir) {
  std::vector<Network<float>> nets;
  std::vector<std::string> variant_names{"input"};
  std::string configs;
  int multiple = 1;
  for (const std::string& m : models) {
    nets.push_back(load_model(m));
    variant_names.push_back(stem_of(m));
    configs += (configs.empty() ? "" : "+") + nets.back().config.digits;
    multiple = std::max(multiple, nets.back().config.input_multiple());
  }

  EvalReport report;
  report.variants = variant_names;
  char prov[320];
  std::snprintf(prov, sizeof prov, "framelet %s config=%s seed=%llu sigma=%g noise=%s", kVersion,
                configs.c_str(), static_cast<unsigned long long>(seed), sigma,
                noise_model.c_str());
  report.provenance = prov;

  for (std::size_t di = 0; di < dataset_dirs.size(); ++di) {
    const std::string& dir = dataset_dirs[di];
    const std::string name = fs::path(dir).filename().string();
    report.datasets.push_back(name);
    const std::vector<std::string> files = list_rasters(dir);
    if (files.empty()) throw std::runtime_error("no .png/.pgm images found under " + dir);
    for (std::size_t i = 0; i < files.size(); ++i) {
      const Image clean = crop_to_multiple(load_image(files[i]), multiple);
      NoiseSpec ns;
      ns.model = kNoiseModels.at(noise_model);
      ns.sigma = sigma;
      ns.seed = derive_seed(seed, di, i);
      ns.clip = clip;
      const Image noisy = add_noise(clean, ns);
      const std::string image_name = stem_of(files[i]);
      const MetricResult in_m = evaluate(clean, noisy);
      report.per_image.push_back({name, image_name, "input", in_m.psnr_db, in_m.ssim});
      for (std::size_t mi = 0; mi < nets.size(); ++mi) {
        const Image denoised = denoise_image(nets[mi], noisy);
        const MetricResult m = evaluate(clean, denoised);
        report.per_image.push_back({name, image_name, variant_names[mi + 1], m.psnr_db, m.ssim});
      }
    }
  }

  write_report(report, out_dir);
  for (const std::string& d : report.datasets) {
    std::printf("%s:", d.c_str());
    for (const std::string& v : report.variants)
      std::printf(" %s=%.4f/%.4f", v.c_str(), report.mean_psnr(d, v), report.mean_ssim(d, v));
    std::printf("\n");
  }
  std::printf("wrote tables under %s\n", out_dir.c_str());
  return 0;
}

// ---------------------------------------------------------------- noise

int cmd_noise(const std::string& model, double sigma, std::uint64_t seed, bool clip,
              const std::string& in_path, const std::string& out_path) {
  NoiseSpec spec;
  spec.model = kNoiseModels.at(model);
  spec.sigma = sigma;
  spec.seed = seed;
  spec.clip = clip;
  const Image noisy = add_noise(load_image(in_path), spec);
  char prov[256];
  std::snprintf(prov, sizeof prov, "framelet %s noise=%s sigma=%g seed=%llu", kVersion,
                model.c_str(), sigma, static_cast<unsigned long long>(seed));
  save_image(noisy, out_path, prov);
  std::printf("wrote %s\n", out_path.c_str());
  return 0;
}

// -------------------------------------------------------------- metrics

int cmd_metrics(const std::string& ref_path, const std::string& test_path) {
  const Image ref = load_image(ref_path);
  const Image test = load_image(test_path);
  const MetricResult m = evaluate(ref, test);
  std::printf("psnr=%.6f ssim=%.6f\n", m.psnr_db, m.ssim);
  return 0;
}

// ------------------------------------------------------------ decompose

std::vector<double> read_signal(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open signal file " + path);
  std::vector<double> f;
  std::string tok;
  while (is >> tok) {
    std::replace(tok.begin(), tok.end(), ',', ' ');
    std::istringstream ts(tok);
    double v;
    while (ts >> v) f.push_back(v);
  }
  if (f.empty()) throw std::runtime_error("no numeric values in " + path);
  return f;
}

int cmd_decompose(const std::string& signal_path, int patch, double rank_tol,
                  const std::string& out_path, std::uint64_t seed) {
  const std::vector<double> f = read_signal(signal_path);
  const HankelSvd svd = hankel_svd(hankel_lift(f, patch), rank_tol);
  double total = 0.0;
  for (double s : svd.s) total += s * s;

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open " + out_path);
    os = &file;
  }
  char line[160];
  std::snprintf(line, sizeof line, "# framelet %s config=decompose seed=%llu sigma=0 patch=%d\n",
                kVersion, static_cast<unsigned long long>(seed), patch);
  *os << line << "rank,singular_value,energy_share,cumulative_energy\n";
  double cum = 0.0;
  for (std::size_t i = 0; i < svd.s.size(); ++i) {
    const double share = total > 0.0 ? svd.s[i] * svd.s[i] / total : 0.0;
    cum += share;
    std::snprintf(line, sizeof line, "%zu,%.12g,%.12g,%.12g\n", i, svd.s[i], share, cum);
    *os << line;
  }
  return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
  CLI::App app{"framelet: wavelet-pooled convolutional denoiser and framelet toolbox"};
  app.set_version_flag("--version", std::string("framelet ") + kVersion);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker thread count (0 keeps the runtime default)");

  // train
  auto* train_cmd = app.add_subcommand("train", "train a model from a key=value config file");
  std::string config_path;
  train_cmd->add_option("--config", config_path, "config file")
      ->required()
      ->check(CLI::ExistingFile);

  // denoise
  auto* den_cmd = app.add_subcommand("denoise", "run a saved model on one image");
  std::string model_path, in_path, out_path;
  den_cmd->add_option("--model", model_path, "model file")->required()->check(CLI::ExistingFile);
  den_cmd->add_option("--in", in_path, "input image (.png/.pgm)")
      ->required()
      ->check(CLI::ExistingFile);
  den_cmd->add_option("--out", out_path, "output image (.png/.pgm)")->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "noisy-input vs model metrics over datasets");
  std::vector<std::string> eval_dirs, eval_models;
  double eval_sigma = 30.0;
  std::string eval_noise = "gaussian";
  std::uint64_t eval_seed = 0;
  bool eval_no_clip = false;
  std::string eval_out;
  eval_cmd->add_option("--dataset", eval_dirs, "dataset directory (repeatable)")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--models", eval_models, "model files")
      ->required()
      ->delimiter(',')
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--sigma", eval_sigma, "noise level")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--noise-model", eval_noise, "gaussian|speckle")
      ->check(CLI::IsMember({"gaussian", "speckle"}));
  eval_cmd->add_option("--seed", eval_seed, "noise seed");
  eval_cmd->add_flag("--no-clip", eval_no_clip, "do not clamp noisy images to [0,255]");
  eval_cmd->add_option("--out", eval_out, "output directory")->required();

  // noise
  auto* noise_cmd = app.add_subcommand("noise", "inject noise into an image");
  std::string noise_model = "gaussian";
  double noise_sigma = 30.0;
  std::uint64_t noise_seed = 0;
  bool noise_no_clip = false;
  std::string noise_in, noise_out;
  noise_cmd->add_option("--model", noise_model, "gaussian|speckle")
      ->check(CLI::IsMember({"gaussian", "speckle"}));
  noise_cmd->add_option("--sigma", noise_sigma, "noise level")
      ->required()
      ->check(CLI::NonNegativeNumber);
  noise_cmd->add_option("--seed", noise_seed, "noise seed");
  noise_cmd->add_flag("--no-clip", noise_no_clip, "do not clamp to [0,255]");
  noise_cmd->add_option("--in", noise_in, "input image")->required()->check(CLI::ExistingFile);
  noise_cmd->add_option("--out", noise_out, "output image")->required();

  // metrics
  auto* met_cmd = app.add_subcommand("metrics", "PSNR/SSIM between two images");
  std::string met_ref, met_test;
  met_cmd->add_option("--ref", met_ref, "reference image")->required()->check(CLI::ExistingFile);
  met_cmd->add_option("--test", met_test, "test image")->required()->check(CLI::ExistingFile);

  // decompose
  auto* dec_cmd = app.add_subcommand("decompose", "singular values and energy of a signal lift");
  std::string dec_signal, dec_out;
  int dec_patch = 0;
  double dec_tol = 1e-10;
  std::uint64_t dec_seed = 0;
  dec_cmd->add_option("--signal", dec_signal, "text file of reals (comma/whitespace separated)")
      ->required()
      ->check(CLI::ExistingFile);
  dec_cmd->add_option("--patch", dec_patch, "patch size d")->required()->check(CLI::PositiveNumber);
  dec_cmd->add_option("--rank-tol", dec_tol, "relative truncation tolerance")
      ->check(CLI::NonNegativeNumber);
  dec_cmd->add_option("--seed", dec_seed, "recorded in the output provenance");
  dec_cmd->add_option("--out", dec_out, "output file (default: stdout)");

  std::vector<const char*> argv;
  argv.push_back("framelet");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << app.version() << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  try {
    if (*train_cmd) return cmd_train(config_path);
    if (*den_cmd) return cmd_denoise(model_path, in_path, out_path);
    if (*eval_cmd)
      return cmd_eval(eval_dirs, eval_models, eval_sigma, eval_noise, eval_seed, !eval_no_clip,
                      eval_out);
    if (*noise_cmd)
      return cmd_noise(noise_model, noise_sigma, noise_seed, !noise_no_clip, noise_in, noise_out);
    if (*met_cmd) return cmd_metrics(met_ref, met_test);
    if (*dec_cmd) return cmd_decompose(dec_signal, dec_patch, dec_tol, dec_out, dec_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace framelet
