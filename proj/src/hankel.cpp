#include "framelet/hankel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace framelet {

HankelLift hankel_lift(const std::vector<double>& f, int d) {
  const int n = static_cast<int>(f.size());
  if (d <= 0 || d > n) throw std::invalid_argument("hankel_lift: patch size must satisfy 1 <= d <= n");
  HankelLift h;
  h.source_length = n;
  h.patch_size = d;
  h.matrix.resize(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) h.matrix[static_cast<std::size_t>(i) * d + j] = f[(i + j) % n];
  return h;
}

HankelSvd hankel_svd(const HankelLift& h, double rank_tol) {
  if (rank_tol < 0.0) throw std::invalid_argument("hankel_svd: rank_tol must be non-negative");
  const int n = h.source_length;
  const int d = h.patch_size;
  for (double v : h.matrix)
    if (!std::isfinite(v)) throw std::invalid_argument("hankel_svd: non-finite matrix entry");

  // One-sided Jacobi: orthogonalize the columns of a working copy A,
  // accumulating the rotations into V. At convergence the column norms
  // are the singular values and the normalized columns are U.
  std::vector<double> a = h.matrix;                      // n x d
  std::vector<double> vmat(static_cast<std::size_t>(d) * d, 0.0);  // d x d
  for (int j = 0; j < d; ++j) vmat[static_cast<std::size_t>(j) * d + j] = 1.0;

  auto col_dot = [&](int p, int q) {
    double s = 0.0;
    for (int i = 0; i < n; ++i)
      s += a[static_cast<std::size_t>(i) * d + p] * a[static_cast<std::size_t>(i) * d + q];
    return s;
  };

  const double tol = 1e-14;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < d - 1; ++p) {
      for (int q = p + 1; q < d; ++q) {
        const double app = col_dot(p, p);
        const double aqq = col_dot(q, q);
        const double apq = col_dot(p, q);
        if (std::abs(apq) <= tol * std::sqrt(app * aqq) || apq == 0.0) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        for (int i = 0; i < n; ++i) {
          double& xp = a[static_cast<std::size_t>(i) * d + p];
          double& xq = a[static_cast<std::size_t>(i) * d + q];
          const double tp = cs * xp - sn * xq;
          xq = sn * xp + cs * xq;
          xp = tp;
        }
        for (int i = 0; i < d; ++i) {
          double& xp = vmat[static_cast<std::size_t>(i) * d + p];
          double& xq = vmat[static_cast<std::size_t>(i) * d + q];
          const double tp = cs * xp - sn * xq;
          xq = sn * xp + cs * xq;
          xp = tp;
        }
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sv(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) sv[static_cast<std::size_t>(j)] = std::sqrt(col_dot(j, j));

  std::vector<int> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return sv[static_cast<std::size_t>(x)] > sv[static_cast<std::size_t>(y)]; });

  const double smax = sv[static_cast<std::size_t>(order[0])];
  int rank = 0;
  for (int j = 0; j < d; ++j) {
    const double s = sv[static_cast<std::size_t>(order[static_cast<std::size_t>(j)])];
    if (s > 0.0 && s > rank_tol * smax) ++rank;
  }

  HankelSvd out;
  out.rows = n;
  out.cols = d;
  out.rank = rank;
  out.s.resize(static_cast<std::size_t>(rank));
  out.u.assign(static_cast<std::size_t>(n) * rank, 0.0);
  out.v.assign(static_cast<std::size_t>(d) * rank, 0.0);
  for (int j = 0; j < rank; ++j) {
    const int src = order[static_cast<std::size_t>(j)];
    const double s = sv[static_cast<std::size_t>(src)];
    out.s[static_cast<std::size_t>(j)] = s;
    for (int i = 0; i < n; ++i)
      out.u[static_cast<std::size_t>(i) * rank + j] = a[static_cast<std::size_t>(i) * d + src] / s;
    for (int i = 0; i < d; ++i)
      out.v[static_cast<std::size_t>(i) * rank + j] = vmat[static_cast<std::size_t>(i) * d + src];
  }
  return out;
}

FrameletDecomposition framelet_coeffs(const std::vector<double>& f, const NonLocalBasis& phi,
                                      const std::vector<double>& psi, int d) {
  const int n = static_cast<int>(f.size());
  if (phi.n != n) throw std::invalid_argument("framelet_coeffs: basis size does not match signal length");
  if (d <= 0 || d > n || psi.size() != static_cast<std::size_t>(d) * d)
    throw std::invalid_argument("framelet_coeffs: patch basis must be d x d with d <= n");

  const HankelLift h = hankel_lift(f, d);

  // t = H * psi  (n x d)
  std::vector<double> t(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) {
      const double hv = h.matrix[static_cast<std::size_t>(i) * d + k];
      if (hv == 0.0) continue;
      for (int j = 0; j < d; ++j)
        t[static_cast<std::size_t>(i) * d + j] += hv * psi[static_cast<std::size_t>(k) * d + j];
    }

  // coeffs = phi^T * t  (n x d)
  FrameletDecomposition dec;
  dec.phi = phi;
  dec.psi = psi;
  dec.n = n;
  dec.patch_size = d;
  dec.coeffs.assign(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double pv = phi.at(k, i);
      if (pv == 0.0) continue;
      for (int j = 0; j < d; ++j)
        dec.coeffs[static_cast<std::size_t>(i) * d + j] += pv * t[static_cast<std::size_t>(k) * d + j];
    }
  return dec;
}

namespace {

// Rank check via LU with partial pivoting.
bool is_invertible(const std::vector<double>& m, int d) {
  std::vector<double> a = m;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (int k = 0; k < d; ++k) {
    int piv = k;
    for (int i = k + 1; i < d; ++i)
      if (std::abs(a[static_cast<std::size_t>(i) * d + k]) >
          std::abs(a[static_cast<std::size_t>(piv) * d + k]))
        piv = i;
    if (std::abs(a[static_cast<std::size_t>(piv) * d + k]) < 1e-12 * scale) return false;
    if (piv != k)
      for (int j = 0; j < d; ++j)
        std::swap(a[static_cast<std::size_t>(k) * d + j], a[static_cast<std::size_t>(piv) * d + j]);
    for (int i = k + 1; i < d; ++i) {
      const double f = a[static_cast<std::size_t>(i) * d + k] / a[static_cast<std::size_t>(k) * d + k];
      for (int j = k; j < d; ++j)
        a[static_cast<std::size_t>(i) * d + j] -= f * a[static_cast<std::size_t>(k) * d + j];
    }
  }
  return true;
}

}  // namespace

std::vector<double> framelet_reconstruct(const FrameletDecomposition& dec) {
  const int n = dec.n;
  const int d = dec.patch_size;
  if (dec.phi.n != n || dec.coeffs.size() != static_cast<std::size_t>(n) * d)
    throw std::invalid_argument("framelet_reconstruct: inconsistent decomposition");
  if (!is_invertible(dec.psi, d))
    throw std::runtime_error("framelet_reconstruct: singular local basis, reconstruction impossible");

  // m = phi * coeffs * psi^T  (n x d)
  std::vector<double> t(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double pv = dec.phi.at(i, k);
      if (pv == 0.0) continue;
      for (int j = 0; j < d; ++j)
        t[static_cast<std::size_t>(i) * d + j] += pv * dec.coeffs[static_cast<std::size_t>(k) * d + j];
    }
  std::vector<double> m(static_cast<std::size_t>(n) * d, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) {
      const double tv = t[static_cast<std::size_t>(i) * d + k];
      if (tv == 0.0) continue;
      for (int j = 0; j < d; ++j)
        m[static_cast<std::size_t>(i) * d + j] += tv * dec.psi[static_cast<std::size_t>(j) * d + k];
    }

  // unlift: average the d entries that each signal position contributed to
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      const int row = ((k - j) % n + n) % n;
      acc += m[static_cast<std::size_t>(row) * d + j];
    }
    f[static_cast<std::size_t>(k)] = acc / d;
  }
  return f;
}

std::vector<double> patch_lift_2d(const Image& img, int p) {
  if (p <= 0) throw std::invalid_argument("patch_lift_2d: patch side must be positive");
  const int w = img.width();
  const int h = img.height();
  std::vector<double> m(static_cast<std::size_t>(w) * h * p * p);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const std::size_t row = (static_cast<std::size_t>(y) * w + x) * p * p;
      for (int u = 0; u < p; ++u)
        for (int v = 0; v < p; ++v)
          m[row + static_cast<std::size_t>(u) * p + v] = img.at((y + u) % h, (x + v) % w);
    }
  return m;
}

Image patch_unlift_2d(const std::vector<double>& m, int width, int height, int p) {
  if (p <= 0) throw std::invalid_argument("patch_unlift_2d: patch side must be positive");
  if (m.size() != static_cast<std::size_t>(width) * height * p * p)
    throw std::invalid_argument("patch_unlift_2d: matrix size mismatch");
  Image img(width, height);
  const double norm = 1.0 / (static_cast<double>(p) * p);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int u = 0; u < p; ++u)
        for (int v = 0; v < p; ++v) {
          const int ry = ((y - u) % height + height) % height;
          const int rx = ((x - v) % width + width) % width;
          acc += m[(static_cast<std::size_t>(ry) * width + rx) * p * p +
                   static_cast<std::size_t>(u) * p + v];
        }
      img.at(y, x) = acc * norm;
    }
  return img;
}

}  // namespace framelet
