#include "framelet/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace framelet {

namespace {

double mean_metric(const EvalReport& r, const std::string& dataset, const std::string& variant,
                   bool want_psnr) {
  double acc = 0.0;
  long n = 0;
  for (const EvalRow& row : r.per_image)
    if (row.dataset == dataset && row.variant == variant) {
      acc += want_psnr ? row.psnr : row.ssim;
      ++n;
    }
  if (n == 0) throw std::invalid_argument("EvalReport: no rows for " + dataset + "/" + variant);
  return acc / static_cast<double>(n);
}

std::ofstream open_csv(const std::string& dir, const char* name, const std::string& provenance) {
  std::ofstream os(std::filesystem::path(dir) / name, std::ios::trunc);
  if (!os)
    throw std::runtime_error(std::string("write_report: cannot open ") + name + " under " + dir);
  if (!provenance.empty()) os << "# " << provenance << "\n";
  return os;
}

void write_table(const EvalReport& r, const std::string& dir, const char* name, bool want_psnr) {
  std::ofstream os = open_csv(dir, name, r.provenance);
  os << "dataset";
  for (const std::string& v : r.variants) os << "," << v;
  os << "\n";
  char cell[64];
  for (const std::string& d : r.datasets) {
    os << d;
    for (const std::string& v : r.variants) {
      std::snprintf(cell, sizeof cell, ",%.4f", mean_metric(r, d, v, want_psnr));
      os << cell;
    }
    os << "\n";
  }
}

}  // namespace

double EvalReport::mean_psnr(const std::string& dataset, const std::string& variant) const {
  return mean_metric(*this, dataset, variant, true);
}

double EvalReport::mean_ssim(const std::string& dataset, const std::string& variant) const {
  return mean_metric(*this, dataset, variant, false);
}

void write_report(const EvalReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  write_table(report, dir, "table_psnr.csv", true);
  write_table(report, dir, "table_ssim.csv", false);
  std::ofstream os = open_csv(dir, "per_image.csv", report.provenance);
  os << "dataset,image,variant,psnr,ssim\n";
  char row[160];
  for (const EvalRow& r : report.per_image) {
    std::snprintf(row, sizeof row, ",%.6f,%.6f\n", r.psnr, r.ssim);
    os << r.dataset << "," << r.image << "," << r.variant << row;
  }
}

}  // namespace framelet
