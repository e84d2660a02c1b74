#pragma once

#include <string>
#include <vector>

namespace framelet {

struct EvalRow {
  std::string dataset;
  std::string image;
  std::string variant;
  double psnr = 0.0;
  double ssim = 0.0;
};

// Per-image metric rows plus the column/row order for the aggregate
// tables. `variants` starts with "input" followed by one entry per
// model; aggregates are arithmetic means of the per-image rows.
struct EvalReport {
  std::vector<std::string> datasets;
  std::vector<std::string> variants;
  std::vector<EvalRow> per_image;
  std::string provenance;  // embedded as a comment line in every file

  double mean_psnr(const std::string& dataset, const std::string& variant) const;
  double mean_ssim(const std::string& dataset, const std::string& variant) const;
};

// Emits table_psnr.csv, table_ssim.csv (one row per dataset, one column
// per variant) and per_image.csv into `dir`.
void write_report(const EvalReport& report, const std::string& dir);

}  // namespace framelet
