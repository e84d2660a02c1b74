#pragma once

#include <array>
#include <string>
#include <vector>

namespace framelet {

// A strided orthonormal analysis/synthesis filter pair. The decimation
// step equals the tap count for every bank shipped here, so both the
// 1-D and the separable 2-D transforms act on non-overlapping blocks.
struct FilterBank {
  std::string name;
  std::vector<double> low;   // analysis low-pass taps
  std::vector<double> high;  // analysis high-pass taps
  int stride = 0;            // decimation factor per spatial dimension
  int length = 0;            // tap count
};

enum class BasisKind { haar_block, dct, svd_derived, identity };

// Orthogonal n-by-n matrix whose columns are the basis vectors.
struct NonLocalBasis {
  int n = 0;
  BasisKind kind = BasisKind::identity;
  std::vector<double> matrix;  // row-major, n*n

  double at(int r, int c) const { return matrix[static_cast<std::size_t>(r) * n + c]; }
  double& at(int r, int c) { return matrix[static_cast<std::size_t>(r) * n + c]; }
};

// Separable 2-D extension of a FilterBank: the four subband filters are
// outer products of {low, high}, vertical factor first.
struct FilterBank2D {
  FilterBank base;
  // subband order: LL, LH, HL, HH; each filter is length*length, row-major
  std::array<std::vector<double>, 4> subbands;
  int stride = 0;
  int length = 0;
};

// Two-tap orthonormal bank, stride 2. Signs: high = [+1, -1]/sqrt(2).
FilterBank haar_bank();

// Four-tap Daubechies orthonormal bank at stride 4. The high-pass taps
// are the alternating flip of the low-pass taps.
FilterBank d4_bank();

// Orthonormal DCT-II basis of size n; column 0 is the constant vector.
NonLocalBasis dct_basis(int n);

NonLocalBasis identity_basis(int n);

// Block-diagonal basis built from the two Haar taps: the first n/2
// columns are shifted low-pass pairs, the last n/2 the high-pass pairs.
// n must be even.
NonLocalBasis haar_block_basis(int n);

// Configuration digit -> bank: '2' is the two-tap bank, '4' the four-tap.
FilterBank bank_from_digit(char digit);

FilterBank2D to_2d(const FilterBank& bank);

// Strided 1-D analysis into (low, high); signal length must be a
// multiple of the stride.
void analyze_1d(const FilterBank& bank, const std::vector<double>& signal,
                std::vector<double>& low, std::vector<double>& high);

// Adjoint of analyze_1d. Exact inverse when the bank is complete
// (stride == 2 with two taps); a non-expansive projection otherwise.
std::vector<double> synthesize_1d(const FilterBank& bank, const std::vector<double>& low,
                                  const std::vector<double>& high);

}  // namespace framelet
