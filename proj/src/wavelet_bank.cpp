#include "framelet/wavelet_bank.hpp"

#include <cmath>
#include <stdexcept>

namespace framelet {

namespace {

// high[k] = (-1)^k * low[L-1-k]
std::vector<double> alternating_flip(const std::vector<double>& low) {
  const int n = static_cast<int>(low.size());
  std::vector<double> high(low.size());
  for (int k = 0; k < n; ++k) high[k] = (k % 2 == 0 ? 1.0 : -1.0) * low[n - 1 - k];
  return high;
}

}  // namespace

FilterBank haar_bank() {
  const double s = 1.0 / std::sqrt(2.0);
  FilterBank b;
  b.name = "haar";
  b.low = {s, s};
  b.high = alternating_flip(b.low);  // {s, -s}
  b.stride = 2;
  b.length = 2;
  return b;
}

FilterBank d4_bank() {
  const double r3 = std::sqrt(3.0);
  const double c = 1.0 / (4.0 * std::sqrt(2.0));
  FilterBank b;
  b.name = "db2";
  b.low = {(1.0 + r3) * c, (3.0 + r3) * c, (3.0 - r3) * c, (1.0 - r3) * c};
  b.high = alternating_flip(b.low);
  b.stride = 4;
  b.length = 4;
  return b;
}

NonLocalBasis dct_basis(int n) {
  if (n <= 0) throw std::invalid_argument("dct_basis: dimension must be positive");
  NonLocalBasis basis;
  basis.n = n;
  basis.kind = BasisKind::dct;
  basis.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  const double pi = 3.14159265358979323846264338327950288;
  for (int k = 0; k < n; ++k) {
    const double alpha = std::sqrt((k == 0 ? 1.0 : 2.0) / n);
    for (int j = 0; j < n; ++j)
      basis.at(j, k) = alpha * std::cos(pi * (2.0 * j + 1.0) * k / (2.0 * n));
  }
  return basis;
}

NonLocalBasis identity_basis(int n) {
  if (n <= 0) throw std::invalid_argument("identity_basis: dimension must be positive");
  NonLocalBasis basis;
  basis.n = n;
  basis.kind = BasisKind::identity;
  basis.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) basis.at(i, i) = 1.0;
  return basis;
}

NonLocalBasis haar_block_basis(int n) {
  if (n <= 0 || n % 2 != 0)
    throw std::invalid_argument("haar_block_basis: dimension must be positive and even");
  const double s = 1.0 / std::sqrt(2.0);
  NonLocalBasis basis;
  basis.n = n;
  basis.kind = BasisKind::haar_block;
  basis.matrix.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n / 2; ++i) {
    basis.at(2 * i, i) = s;
    basis.at(2 * i + 1, i) = s;
    basis.at(2 * i, n / 2 + i) = s;
    basis.at(2 * i + 1, n / 2 + i) = -s;
  }
  return basis;
}

FilterBank bank_from_digit(char digit) {
  switch (digit) {
    case '2':
      return haar_bank();
    case '4':
      return d4_bank();
    default:
      throw std::invalid_argument(std::string("unknown wavelet code '") + digit +
                                  "' (expected '2' or '4')");
  }
}

FilterBank2D to_2d(const FilterBank& bank) {
  FilterBank2D b2;
  b2.base = bank;
  b2.stride = bank.stride;
  b2.length = bank.length;
  const std::vector<double>* factors[2] = {&bank.low, &bank.high};
  // subband index b = 2*vertical + horizontal, so LL, LH, HL, HH
  for (int b = 0; b < 4; ++b) {
    const std::vector<double>& fv = *factors[b >> 1];
    const std::vector<double>& fh = *factors[b & 1];
    b2.subbands[b].resize(static_cast<std::size_t>(bank.length) * bank.length);
    for (int u = 0; u < bank.length; ++u)
      for (int v = 0; v < bank.length; ++v)
        b2.subbands[b][static_cast<std::size_t>(u) * bank.length + v] = fv[u] * fh[v];
  }
  return b2;
}

void analyze_1d(const FilterBank& bank, const std::vector<double>& signal,
                std::vector<double>& low, std::vector<double>& high) {
  const int n = static_cast<int>(signal.size());
  if (n == 0 || n % bank.stride != 0)
    throw std::invalid_argument("analyze_1d: signal length must be a positive multiple of the stride");
  const int m = n / bank.stride;
  low.assign(static_cast<std::size_t>(m), 0.0);
  high.assign(static_cast<std::size_t>(m), 0.0);
  for (int k = 0; k < m; ++k) {
    double lo = 0.0, hi = 0.0;
    for (int t = 0; t < bank.length; ++t) {
      const double v = signal[static_cast<std::size_t>(k) * bank.stride + t];
      lo += bank.low[t] * v;
      hi += bank.high[t] * v;
    }
    low[k] = lo;
    high[k] = hi;
  }
}

std::vector<double> synthesize_1d(const FilterBank& bank, const std::vector<double>& low,
                                  const std::vector<double>& high) {
  if (low.size() != high.size())
    throw std::invalid_argument("synthesize_1d: band length mismatch");
  const int m = static_cast<int>(low.size());
  std::vector<double> signal(static_cast<std::size_t>(m) * bank.stride, 0.0);
  for (int k = 0; k < m; ++k)
    for (int t = 0; t < bank.length; ++t)
      signal[static_cast<std::size_t>(k) * bank.stride + t] =
          bank.low[t] * low[k] + bank.high[t] * high[k];
  return signal;
}

}  // namespace framelet
