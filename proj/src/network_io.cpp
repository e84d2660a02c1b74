// Model container: magic "FRMLT1", version u16, length-prefixed config
// string, tensor count u32, then per tensor (name-sorted): name, rank,
// dims as u32, raw little-endian f32 payload. All integers little-endian.

#include <cstring>
#include <fstream>

#include "framelet/network.hpp"

namespace framelet {

namespace {

constexpr char kMagic[6] = {'F', 'R', 'M', 'L', 'T', '1'};
constexpr std::uint16_t kVersion = 1;

void put_u16(std::ostream& os, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>(v >> 8)};
  os.write(reinterpret_cast<const char*>(b), 2);
}

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint16_t get_u16(std::istream& is) {
  unsigned char b[2];
  is.read(reinterpret_cast<char*>(b), 2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

std::string get_string(std::istream& is, std::uint32_t max_len) {
  const std::uint32_t len = get_u32(is);
  if (!is || len > max_len) throw std::runtime_error("corrupt model: bad string length");
  std::string s(len, '\0');
  is.read(s.data(), static_cast<std::streamsize>(len));
  return s;
}

void put_f32_le(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

float get_f32_le(std::istream& is) {
  const std::uint32_t bits = get_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

}  // namespace

void save_model(const Network<float>& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("save_model: cannot open " + path);
  os.write(kMagic, sizeof kMagic);
  put_u16(os, kVersion);
  std::string cfg = net.config.digits;
  if (net.residual) cfg += ";residual";
  put_string(os, cfg);
  put_u32(os, static_cast<std::uint32_t>(net.params.size()));
  for (const auto& [name, tensor] : net.params) {  // std::map iterates name-sorted
    put_string(os, name);
    put_u32(os, static_cast<std::uint32_t>(tensor.rank()));
    for (int i = 0; i < tensor.rank(); ++i) put_u32(os, static_cast<std::uint32_t>(tensor.dim(i)));
    for (std::int64_t i = 0; i < tensor.size(); ++i) put_f32_le(os, tensor[i]);
  }
  if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

Network<float> load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_model: cannot open " + path);
  char magic[6];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    throw std::runtime_error("corrupt model: bad magic in " + path);
  const std::uint16_t version = get_u16(is);
  if (!is || version != kVersion)
    throw std::runtime_error("corrupt model: unsupported version " + std::to_string(version));

  const std::string cfg = get_string(is, 1u << 10);
  std::string digits = cfg;
  bool residual = false;
  if (const auto sep = cfg.find(';'); sep != std::string::npos) {
    digits = cfg.substr(0, sep);
    residual = cfg.substr(sep + 1) == "residual";
  }

  const std::uint32_t count = get_u32(is);
  if (!is || count > (1u << 20)) throw std::runtime_error("corrupt model: bad tensor count");
  std::map<std::string, Tensor<float>> loaded;
  for (std::uint32_t t = 0; t < count; ++t) {
    const std::string name = get_string(is, 1u << 12);
    const std::uint32_t rank = get_u32(is);
    if (!is || rank == 0 || rank > 4) throw std::runtime_error("corrupt model: bad tensor rank");
    std::vector<int> shape(rank);
    for (std::uint32_t i = 0; i < rank; ++i) {
      const std::uint32_t dim = get_u32(is);
      if (!is || dim == 0 || dim > (1u << 24)) throw std::runtime_error("corrupt model: bad dim");
      shape[i] = static_cast<int>(dim);
    }
    Tensor<float> tensor(shape);
    for (std::int64_t i = 0; i < tensor.size(); ++i) tensor[i] = get_f32_le(is);
    if (!is) throw std::runtime_error("corrupt model: truncated tensor payload");
    loaded.emplace(name, std::move(tensor));
  }

  // Rebuild the skeleton and take every tensor from the file; the base
  // channel width is implied by the first encoder convolution.
  const auto first = loaded.find("enc0.conv1.weight");
  if (first == loaded.end() || first->second.rank() != 4)
    throw std::runtime_error("corrupt model: missing enc0.conv1.weight");
  StageConfig config;
  config.digits = digits;
  config.base_channels = first->second.dim(0);
  config.validate();

  Network<float> net = build_network<float>(config, 0);
  net.residual = residual;
  if (loaded.size() != net.params.size())
    throw std::runtime_error("corrupt model: unexpected tensor set");
  for (auto& [name, tensor] : net.params) {
    const auto it = loaded.find(name);
    if (it == loaded.end()) throw std::runtime_error("corrupt model: missing tensor " + name);
    if (it->second.shape() != tensor.shape())
      throw std::runtime_error("corrupt model: shape mismatch for " + name);
    tensor = std::move(it->second);
  }
  return net;
}

}  // namespace framelet
