#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "framelet/hankel.hpp"
#include "framelet/rng.hpp"
#include "framelet/wavelet_bank.hpp"

using namespace framelet;

namespace {

std::vector<double> random_signal(int n, Rng& rng, double lo = -5.0, double hi = 5.0) {
  std::vector<double> f(static_cast<std::size_t>(n));
  for (double& v : f) v = rng.uniform(lo, hi);
  return f;
}

// Independent oracle: circular cross-correlation of f with psi.
std::vector<double> circular_xcorr(const std::vector<double>& f, const std::vector<double>& psi) {
  const int n = static_cast<int>(f.size());
  const int d = static_cast<int>(psi.size());
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j)
      out[static_cast<std::size_t>(i)] += f[static_cast<std::size_t>((i + j) % n)] * psi[static_cast<std::size_t>(j)];
  return out;
}

double frob_err(const HankelLift& h, const HankelSvd& svd) {
  double err2 = 0.0;
  for (int i = 0; i < h.source_length; ++i)
    for (int j = 0; j < h.patch_size; ++j) {
      double rec = 0.0;
      for (int r = 0; r < svd.rank; ++r) rec += svd.u_at(i, r) * svd.s[static_cast<std::size_t>(r)] * svd.v_at(j, r);
      const double d = h.at(i, j) - rec;
      err2 += d * d;
    }
  return std::sqrt(err2);
}

double frob_norm(const HankelLift& h) {
  double s = 0.0;
  for (double v : h.matrix) s += v * v;
  return std::sqrt(s);
}

// Random orthonormal d x d matrix (Gram-Schmidt on a random matrix).
std::vector<double> random_rotation(int d, Rng& rng) {
  std::vector<double> q(static_cast<std::size_t>(d) * d);
  for (int c = 0; c < d; ++c) {
    std::vector<double> v(static_cast<std::size_t>(d));
    for (double& x : v) x = rng.normal();
    for (int prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (int i = 0; i < d; ++i) proj += v[static_cast<std::size_t>(i)] * q[static_cast<std::size_t>(i) * d + prev];
      for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] -= proj * q[static_cast<std::size_t>(i) * d + prev];
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (int i = 0; i < d; ++i) q[static_cast<std::size_t>(i) * d + c] = v[static_cast<std::size_t>(i)] / nrm;
  }
  return q;
}

}  // namespace

TEST_CASE("lift layout with circular wrap") {
  const HankelLift h = hankel_lift({1, 2, 3, 4}, 2);
  const double expect[4][2] = {{1, 2}, {2, 3}, {3, 4}, {4, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) CHECK(h.at(i, j) == expect[i][j]);

  const HankelLift impulse = hankel_lift({1, 0, 0, 0}, 2);
  const double expect2[4][2] = {{1, 0}, {0, 0}, {0, 0}, {0, 1}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 2; ++j) CHECK(impulse.at(i, j) == expect2[i][j]);

  const HankelLift c = hankel_lift({7, 7, 7, 7, 7}, 3);
  for (double v : c.matrix) CHECK(v == 7.0);

  CHECK_THROWS_AS(hankel_lift({1, 2, 3}, 0), std::invalid_argument);
  CHECK_THROWS_AS(hankel_lift({1, 2, 3}, 4), std::invalid_argument);
}

TEST_CASE("lift times a patch equals circular cross-correlation") {
  Rng rng(2024);
  double max_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 4 + rng.uniform_int(60);
    const int d = 1 + rng.uniform_int(std::min(n, 12));
    const std::vector<double> f = random_signal(n, rng);
    const std::vector<double> psi = random_signal(d, rng);
    const HankelLift h = hankel_lift(f, d);
    const std::vector<double> oracle = circular_xcorr(f, psi);
    for (int i = 0; i < n; ++i) {
      double prod = 0.0;
      for (int j = 0; j < d; ++j) prod += h.at(i, j) * psi[static_cast<std::size_t>(j)];
      max_err = std::max(max_err, std::abs(prod - oracle[static_cast<std::size_t>(i)]));
    }
  }
  CHECK(max_err < 1e-12);
}

TEST_CASE("svd of analytic cases") {
  // constant signal: rank 1, singular value = Frobenius norm = c*sqrt(n*d)
  const double c = 3.5;
  const HankelSvd s1 = hankel_svd(hankel_lift({c, c, c, c}, 2));
  CHECK(s1.rank == 1);
  CHECK(s1.s[0] == doctest::Approx(c * std::sqrt(8.0)).epsilon(1e-12));

  // impulse, d=2: the lift has orthonormal-up-to-scale columns; the Gram
  // matrix is the identity, so both singular values are 1.
  const HankelSvd s2 = hankel_svd(hankel_lift({1, 0, 0, 0}, 2));
  REQUIRE(s2.rank == 2);
  CHECK(s2.s[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s2.s[1] == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> bad = {1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 0.0};
  CHECK_THROWS_AS(hankel_svd(hankel_lift(bad, 2)), std::invalid_argument);
}

TEST_CASE("svd against the quadratic-formula oracle for d=2") {
  // For d=2 the singular values are the square roots of the eigenvalues
  // of the 2x2 Gram matrix, available in closed form.
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + rng.uniform_int(30);
    const std::vector<double> f = random_signal(n, rng);
    const HankelLift h = hankel_lift(f, 2);
    double a = 0.0, b = 0.0, cc = 0.0;
    for (int i = 0; i < n; ++i) {
      a += h.at(i, 0) * h.at(i, 0);
      b += h.at(i, 1) * h.at(i, 1);
      cc += h.at(i, 0) * h.at(i, 1);
    }
    const double tr = a + b;
    const double disc = std::sqrt((a - b) * (a - b) + 4.0 * cc * cc);
    const double hi = std::sqrt(0.5 * (tr + disc));
    const double lo = std::sqrt(std::max(0.0, 0.5 * (tr - disc)));
    const HankelSvd svd = hankel_svd(h);
    REQUIRE(svd.rank == 2);
    CHECK(svd.s[0] == doctest::Approx(hi).epsilon(1e-11));
    CHECK(svd.s[1] == doctest::Approx(lo).epsilon(1e-11));
  }
}

TEST_CASE("svd reconstruction, orthonormality and ordering") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = 8 + rng.uniform_int(40);
    const int d = 2 + rng.uniform_int(std::min(n - 1, 10));
    const HankelLift h = hankel_lift(random_signal(n, rng), d);
    const HankelSvd svd = hankel_svd(h);
    CHECK(frob_err(h, svd) < 1e-10 * frob_norm(h));
    for (int i = 0; i + 1 < svd.rank; ++i)
      CHECK(svd.s[static_cast<std::size_t>(i)] >= svd.s[static_cast<std::size_t>(i + 1)]);
    for (int p = 0; p < svd.rank; ++p)
      for (int q = 0; q < svd.rank; ++q) {
        double gu = 0.0, gv = 0.0;
        for (int i = 0; i < n; ++i) gu += svd.u_at(i, p) * svd.u_at(i, q);
        for (int i = 0; i < d; ++i) gv += svd.v_at(i, p) * svd.v_at(i, q);
        const double want = p == q ? 1.0 : 0.0;
        CHECK(std::abs(gu - want) < 1e-10);
        CHECK(std::abs(gv - want) < 1e-10);
      }
  }
}

TEST_CASE("rank-k truncation error matches the singular-value tail") {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 12 + rng.uniform_int(24);
    const int d = 4 + rng.uniform_int(6);
    const HankelLift h = hankel_lift(random_signal(n, rng), d);
    const HankelSvd svd = hankel_svd(h);
    for (int k = 0; k <= svd.rank; ++k) {
      HankelSvd trunc = svd;
      trunc.rank = k;
      // truncate by taking the leading k columns (layout is row-major with
      // stride svd.rank, so rebuild)
      trunc.u.assign(static_cast<std::size_t>(n) * k, 0.0);
      trunc.v.assign(static_cast<std::size_t>(d) * k, 0.0);
      trunc.s.assign(svd.s.begin(), svd.s.begin() + k);
      for (int i = 0; i < n; ++i)
        for (int r = 0; r < k; ++r) trunc.u[static_cast<std::size_t>(i) * k + r] = svd.u_at(i, r);
      for (int i = 0; i < d; ++i)
        for (int r = 0; r < k; ++r) trunc.v[static_cast<std::size_t>(i) * k + r] = svd.v_at(i, r);
      double tail = 0.0;
      for (int r = k; r < svd.rank; ++r) tail += svd.s[static_cast<std::size_t>(r)] * svd.s[static_cast<std::size_t>(r)];
      tail = std::sqrt(tail);
      CHECK(std::abs(frob_err(h, trunc) - tail) < 1e-10 * std::max(1.0, frob_norm(h)));
    }
  }
}

TEST_CASE("no random low-rank competitor beats the truncated svd") {
  Rng rng(47);
  const int n = 24, d = 8, k = 3;
  const HankelLift h = hankel_lift(random_signal(n, rng), d);
  const HankelSvd svd = hankel_svd(h);
  double tail = 0.0;
  for (int r = k; r < svd.rank; ++r) tail += svd.s[static_cast<std::size_t>(r)] * svd.s[static_cast<std::size_t>(r)];
  tail = std::sqrt(tail);
  for (int trial = 0; trial < 30; ++trial) {
    // random rank-k approximation B = L * R, L n-by-k, R k-by-d
    std::vector<double> l(static_cast<std::size_t>(n) * k), r(static_cast<std::size_t>(k) * d);
    for (double& v : l) v = rng.normal();
    for (double& v : r) v = rng.normal();
    double err2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) {
        double b = 0.0;
        for (int t = 0; t < k; ++t)
          b += l[static_cast<std::size_t>(i) * k + t] * r[static_cast<std::size_t>(t) * d + j];
        const double diff = h.at(i, j) - b;
        err2 += diff * diff;
      }
    CHECK(std::sqrt(err2) >= tail - 1e-9);
  }
}

TEST_CASE("coefficients with identity bases reproduce the lift") {
  Rng rng(8);
  const int n = 10, d = 3;
  const std::vector<double> f = random_signal(n, rng);
  std::vector<double> psi(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) psi[static_cast<std::size_t>(i) * d + i] = 1.0;
  const FrameletDecomposition dec = framelet_coeffs(f, identity_basis(n), psi, d);
  const HankelLift h = hankel_lift(f, d);
  for (std::size_t i = 0; i < h.matrix.size(); ++i) CHECK(dec.coeffs[i] == h.matrix[i]);

  CHECK_THROWS_AS(framelet_coeffs(f, identity_basis(n + 1), psi, d), std::invalid_argument);
  CHECK_THROWS_AS(framelet_coeffs(f, identity_basis(n), psi, d + 1), std::invalid_argument);
}

TEST_CASE("constant signal concentrates on the dc row") {
  const int n = 16, d = 4;
  std::vector<double> f(static_cast<std::size_t>(n), 2.5);
  std::vector<double> psi(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) psi[static_cast<std::size_t>(i) * d + i] = 1.0;
  const FrameletDecomposition dec = framelet_coeffs(f, dct_basis(n), psi, d);
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < d; ++j)
      CHECK(std::abs(dec.coeffs[static_cast<std::size_t>(i) * d + j]) < 1e-12);
  for (int j = 0; j < d; ++j)
    CHECK(std::abs(dec.coeffs[static_cast<std::size_t>(j)]) > 1.0);
}

TEST_CASE("coefficients match the convolution-form double loop") {
  Rng rng(12);
  const int n = 16, d = 4;
  const std::vector<double> f = random_signal(n, rng);
  const NonLocalBasis phi = dct_basis(n);
  std::vector<double> psi(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) psi[static_cast<std::size_t>(i) * d + i] = 1.0;
  const FrameletDecomposition dec = framelet_coeffs(f, phi, psi, d);

  // oracle: inner product of f with the circular convolution of the
  // basis column phi_i and the patch column psi_j
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) {
      double want = 0.0;
      for (int k = 0; k < n; ++k) {
        double conv = 0.0;
        for (int m = 0; m < d; ++m)
          conv += phi.at(((k - m) % n + n) % n, i) * psi[static_cast<std::size_t>(m) * d + j];
        want += f[static_cast<std::size_t>(k)] * conv;
      }
      CHECK(std::abs(dec.coeffs[static_cast<std::size_t>(i) * d + j] - want) < 1e-12);
    }
}

TEST_CASE("coefficients are linear in the signal") {
  Rng rng(90);
  const int n = 20, d = 5;
  const std::vector<double> f = random_signal(n, rng);
  const std::vector<double> g = random_signal(n, rng);
  const double a = 1.7, b = -0.4;
  std::vector<double> mix(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    mix[static_cast<std::size_t>(i)] = a * f[static_cast<std::size_t>(i)] + b * g[static_cast<std::size_t>(i)];
  const std::vector<double> psi = random_rotation(d, rng);
  const NonLocalBasis phi = dct_basis(n);
  const auto cf = framelet_coeffs(f, phi, psi, d).coeffs;
  const auto cg = framelet_coeffs(g, phi, psi, d).coeffs;
  const auto cm = framelet_coeffs(mix, phi, psi, d).coeffs;
  for (std::size_t i = 0; i < cm.size(); ++i) CHECK(std::abs(cm[i] - (a * cf[i] + b * cg[i])) < 1e-12);
}

TEST_CASE("reconstruction round-trips for orthogonal bases") {
  Rng rng(2718);
  int trials = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const int n = 2 * (3 + rng.uniform_int(14));  // even so the block basis exists
    const int d = 1 + rng.uniform_int(std::min(n, 6));
    const std::vector<double> f = random_signal(n, rng);
    NonLocalBasis phi;
    switch (trial % 3) {
      case 0: phi = identity_basis(n); break;
      case 1: phi = dct_basis(n); break;
      default: phi = haar_block_basis(n); break;
    }
    const std::vector<double> psi = trial % 2 == 0 ? random_rotation(d, rng) : [&] {
      std::vector<double> eye(static_cast<std::size_t>(d) * d, 0.0);
      for (int i = 0; i < d; ++i) eye[static_cast<std::size_t>(i) * d + i] = 1.0;
      return eye;
    }();
    const std::vector<double> back = framelet_reconstruct(framelet_coeffs(f, phi, psi, d));
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(back[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i)]) < 1e-10);
    ++trials;
  }
  CHECK(trials >= 100);
}

TEST_CASE("reconstruction edge cases") {
  const int n = 8, d = 2;
  std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  std::vector<double> psi = {1, 0, 0, 1};
  const std::vector<double> back = framelet_reconstruct(framelet_coeffs(zero, dct_basis(n), psi, d));
  for (double v : back) CHECK(v == 0.0);

  FrameletDecomposition dec = framelet_coeffs(zero, dct_basis(n), psi, d);
  dec.psi = {1, 1, 1, 1};  // rank deficient
  CHECK_THROWS_AS(framelet_reconstruct(dec), std::runtime_error);
}

TEST_CASE("2-D patch lift shape and round trip") {
  CHECK_THROWS_AS(patch_lift_2d(Image(2, 2, 1.0), 0), std::invalid_argument);

  const Image c(2, 2, 4.0);
  const std::vector<double> m = patch_lift_2d(c, 2);
  REQUIRE(m.size() == 16);
  for (double v : m) CHECK(v == 4.0);

  Rng rng(555);
  Image img(12, 8);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 12; ++x) img.at(y, x) = rng.uniform(0.0, 255.0);
  for (int p : {2, 3, 4}) {
    const std::vector<double> lifted = patch_lift_2d(img, p);
    CHECK(lifted.size() == static_cast<std::size_t>(12 * 8) * p * p);
    const Image back = patch_unlift_2d(lifted, 12, 8, p);
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 12; ++x) CHECK(std::abs(back.at(y, x) - img.at(y, x)) < 1e-12);
  }
}
