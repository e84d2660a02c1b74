#include "framelet/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <png.h>

namespace framelet {

namespace {

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

Image load_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str()))
    throw std::runtime_error("load_image: cannot decode " + path + ": " + png.message);
  png.format = PNG_FORMAT_RGB;  // luminance conversion is done here, not by libpng
  std::vector<unsigned char> buf(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = png.message;
    png_image_free(&png);
    throw std::runtime_error("load_image: cannot decode " + path + ": " + msg);
  }
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  for (std::size_t i = 0; i < img.size(); ++i) {
    const unsigned char* p = buf.data() + 3 * i;
    img.data()[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
  }
  return img;
}

int pgm_next_token(std::istream& is) {
  // Skips whitespace and '#' comments, returns a non-negative integer.
  int c;
  while ((c = is.get()) != EOF) {
    if (c == '#') {
      while ((c = is.get()) != EOF && c != '\n') {
      }
    } else if (!std::isspace(c)) {
      break;
    }
  }
  if (c == EOF) throw std::runtime_error("load_image: truncated PGM header");
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = is.get();
  }
  if (!any) throw std::runtime_error("load_image: malformed PGM header");
  return value;
}

Image load_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_image: cannot open " + path);
  char p, kind;
  is.get(p);
  is.get(kind);
  if (p != 'P' || (kind != '2' && kind != '5'))
    throw std::runtime_error("load_image: not an 8-bit PGM: " + path);
  const int w = pgm_next_token(is);
  const int h = pgm_next_token(is);
  const int maxval = pgm_next_token(is);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw std::runtime_error("load_image: unsupported PGM header in " + path);
  Image img(w, h);
  if (kind == '5') {
    std::vector<unsigned char> buf(img.size());
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!is) throw std::runtime_error("load_image: truncated PGM data in " + path);
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = buf[i];
  } else {
    for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] = pgm_next_token(is);
  }
  return img;
}

unsigned char quantize(double v) {
  const double r = std::nearbyint(v);
  return static_cast<unsigned char>(std::min(255.0, std::max(0.0, r)));
}

}  // namespace

Image load_image(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error("load_image: no such file: " + path);
  const std::string ext = lower_ext(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm") return load_pgm(path);
  throw std::runtime_error("load_image: unsupported format (want .png or .pgm): " + path);
}

void save_png(const Image& img, const std::string& path) {
  std::vector<unsigned char> buf(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) buf[i] = quantize(img.data()[i]);
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(img.width());
  png.height = static_cast<png_uint_32>(img.height());
  png.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buf.data(), 0, nullptr))
    throw std::runtime_error("save_png: cannot write " + path + ": " + png.message);
}

void save_pgm(const Image& img, const std::string& path, const std::string& comment) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_pgm: cannot open " + path);
  os << "P5\n";
  if (!comment.empty()) os << "# " << comment << "\n";
  os << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> buf(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) buf[i] = quantize(img.data()[i]);
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!os) throw std::runtime_error("save_pgm: write failed for " + path);
}

void save_image(const Image& img, const std::string& path, const std::string& comment) {
  const std::string ext = lower_ext(path);
  if (ext == ".png")
    save_png(img, path);
  else if (ext == ".pgm")
    save_pgm(img, path, comment);
  else
    throw std::runtime_error("save_image: unsupported format (want .png or .pgm): " + path);
}

std::vector<std::string> list_rasters(const std::string& dir) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("list_rasters: not a directory: " + dir);
  std::vector<std::string> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower_ext(entry.path().string());
    if (ext == ".png" || ext == ".pgm") files.push_back(entry.path().string());
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace framelet
