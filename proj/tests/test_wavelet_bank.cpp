#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "framelet/rng.hpp"
#include "framelet/wavelet_bank.hpp"

using namespace framelet;

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

}  // namespace

TEST_CASE("haar bank taps and shape") {
  const FilterBank b = haar_bank();
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(b.length == 2);
  CHECK(b.stride == 2);
  CHECK(b.low[0] == doctest::Approx(s).epsilon(1e-15));
  CHECK(b.low[1] == doctest::Approx(s).epsilon(1e-15));
  CHECK(b.high[0] == doctest::Approx(s).epsilon(1e-15));
  CHECK(b.high[1] == doctest::Approx(-s).epsilon(1e-15));
}

TEST_CASE("haar analysis of constant and alternating signals") {
  const FilterBank b = haar_bank();
  std::vector<double> low, high;
  analyze_1d(b, {1, 1, 1, 1}, low, high);
  const double r2 = std::sqrt(2.0);
  CHECK(low[0] == doctest::Approx(r2).epsilon(1e-14));
  CHECK(low[1] == doctest::Approx(r2).epsilon(1e-14));
  CHECK(std::abs(high[0]) < 1e-14);
  CHECK(std::abs(high[1]) < 1e-14);

  analyze_1d(b, {1, -1, 1, -1}, low, high);
  CHECK(std::abs(low[0]) < 1e-14);
  CHECK(std::abs(low[1]) < 1e-14);
  CHECK(high[0] == doctest::Approx(r2).epsilon(1e-14));
  CHECK(high[1] == doctest::Approx(r2).epsilon(1e-14));
}

TEST_CASE("four-tap bank identities") {
  const FilterBank b = d4_bank();
  CHECK(b.length == 4);
  CHECK(b.stride == 4);
  // scaling filter sums to sqrt(2)
  CHECK(std::abs(sum(b.low) - std::sqrt(2.0)) < 1e-12);
  // two vanishing moments: constants and ramps are annihilated
  CHECK(std::abs(sum(b.high)) < 1e-12);
  double ramp0 = 0.0, ramp1 = 0.0;
  for (int k = 0; k < 4; ++k) {
    ramp0 += static_cast<double>(k) * b.high[static_cast<std::size_t>(k)];
    ramp1 += static_cast<double>(k + 1) * b.high[static_cast<std::size_t>(k)];
  }
  CHECK(std::abs(ramp0) < 1e-12);
  CHECK(std::abs(ramp1) < 1e-12);
}

TEST_CASE("orthonormality for both banks") {
  for (char digit : {'2', '4'}) {
    const FilterBank b = bank_from_digit(digit);
    CAPTURE(digit);
    CHECK(std::abs(dot(b.low, b.low) - 1.0) < 1e-12);
    CHECK(std::abs(dot(b.high, b.high) - 1.0) < 1e-12);
    CHECK(std::abs(dot(b.low, b.high)) < 1e-12);
    CHECK(std::abs(sum(b.high)) < 1e-12);
  }
}

TEST_CASE("bank_from_digit mapping and errors") {
  CHECK(bank_from_digit('2').stride == 2);
  CHECK(bank_from_digit('4').stride == 4);
  CHECK_THROWS_AS(bank_from_digit('3'), std::invalid_argument);
  CHECK_THROWS_AS(bank_from_digit('x'), std::invalid_argument);
}

TEST_CASE("dct basis") {
  CHECK_THROWS_AS(dct_basis(0), std::invalid_argument);

  const NonLocalBasis one = dct_basis(1);
  CHECK(one.at(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  // n=2 coincides with the two-tap pair up to sign
  const NonLocalBasis two = dct_basis(2);
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(two.at(0, 0) == doctest::Approx(s).epsilon(1e-14));
  CHECK(two.at(1, 0) == doctest::Approx(s).epsilon(1e-14));
  CHECK(two.at(0, 1) == doctest::Approx(std::cos(3.14159265358979323846 / 4)).epsilon(1e-14));
  CHECK(two.at(1, 1) == doctest::Approx(-std::cos(3.14159265358979323846 / 4)).epsilon(1e-14));

  const NonLocalBasis eight = dct_basis(8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      double g = 0.0;
      for (int k = 0; k < 8; ++k) g += eight.at(k, i) * eight.at(k, j);
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("haar block basis is orthogonal") {
  CHECK_THROWS_AS(haar_block_basis(5), std::invalid_argument);
  const int n = 12;
  const NonLocalBasis b = haar_block_basis(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double g = 0.0;
      for (int k = 0; k < n; ++k) g += b.at(k, i) * b.at(k, j);
      CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("2-D subbands: outer products and orthonormality") {
  const FilterBank2D haar = to_2d(haar_bank());
  for (int i = 0; i < 4; ++i) CHECK(std::abs(haar.subbands[0][static_cast<std::size_t>(i)] - 0.5) < 1e-15);

  // HH annihilates a constant block
  double hh_sum = 0.0;
  for (double v : haar.subbands[3]) hh_sum += v;
  CHECK(std::abs(hh_sum) < 1e-14);

  for (char digit : {'2', '4'}) {
    const FilterBank2D b2 = to_2d(bank_from_digit(digit));
    CAPTURE(digit);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        const double g = dot(b2.subbands[static_cast<std::size_t>(a)],
                             b2.subbands[static_cast<std::size_t>(b)]);
        CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-12);
      }
  }
}

TEST_CASE("two-tap analysis/synthesis round-trips any even-length signal") {
  const FilterBank b = haar_bank();
  Rng rng(123);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 * (1 + rng.uniform_int(32));
    std::vector<double> f(static_cast<std::size_t>(n));
    for (double& v : f) v = rng.uniform(-10.0, 10.0);
    std::vector<double> low, high;
    analyze_1d(b, f, low, high);
    const std::vector<double> back = synthesize_1d(b, low, high);
    for (int i = 0; i < n; ++i)
      CHECK(std::abs(back[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i)]) < 1e-12);
  }
  std::vector<double> low, high;
  CHECK_THROWS_AS(analyze_1d(b, {1.0, 2.0, 3.0}, low, high), std::invalid_argument);
}

TEST_CASE("four-tap analysis/synthesis is a non-expansive projection, not the identity") {
  const FilterBank b = d4_bank();
  Rng rng(77);
  bool saw_contraction = false;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 4 * (1 + rng.uniform_int(16));
    std::vector<double> f(static_cast<std::size_t>(n));
    for (double& v : f) v = rng.uniform(-10.0, 10.0);
    std::vector<double> low, high;
    analyze_1d(b, f, low, high);
    const std::vector<double> back = synthesize_1d(b, low, high);
    CHECK(std::abs(dot(back, back)) <= dot(f, f) * (1.0 + 1e-9));
    if (dot(back, back) < dot(f, f) * 0.999) saw_contraction = true;
  }
  CHECK(saw_contraction);
}
