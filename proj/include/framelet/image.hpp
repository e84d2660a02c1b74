#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace framelet {

// Single-channel image, row-major, intensities as reals (nominally [0, 255]).
class Image {
 public:
  Image() = default;

  Image(int width, int height, double value = 0.0) : width_(width), height_(height) {
    if (width <= 0 || height <= 0) throw std::invalid_argument("Image: non-positive size");
    pix_.assign(static_cast<std::size_t>(width) * height, value);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return pix_.size(); }

  double& at(int y, int x) { return pix_[static_cast<std::size_t>(y) * width_ + x]; }
  double at(int y, int x) const { return pix_[static_cast<std::size_t>(y) * width_ + x]; }

  double* data() { return pix_.data(); }
  const double* data() const { return pix_.data(); }

  Image crop(int x0, int y0, int w, int h) const {
    if (x0 < 0 || y0 < 0 || w <= 0 || h <= 0 || x0 + w > width_ || y0 + h > height_)
      throw std::invalid_argument("Image::crop: window out of bounds");
    Image out(w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(y, x) = at(y0 + y, x0 + x);
    return out;
  }

  void clamp(double lo = 0.0, double hi = 255.0) {
    for (double& v : pix_) v = std::min(hi, std::max(lo, v));
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> pix_;
};

}  // namespace framelet
