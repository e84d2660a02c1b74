#pragma once

#include <vector>

#include "framelet/image.hpp"
#include "framelet/wavelet_bank.hpp"

namespace framelet {

// Circular patch lift of a 1-D signal: row i holds the length-d window
// of f starting at position i, indices taken mod n. Products H*psi
// realize circular cross-correlation of f with psi.
struct HankelLift {
  int source_length = 0;  // n
  int patch_size = 0;     // d
  std::vector<double> matrix;  // n*d, row-major

  double at(int i, int j) const { return matrix[static_cast<std::size_t>(i) * patch_size + j]; }
};

// Thin SVD of a lift, singular values non-increasing, small values
// truncated relative to the largest.
struct HankelSvd {
  int rows = 0;
  int cols = 0;
  int rank = 0;
  std::vector<double> u;  // rows*rank, column-orthonormal
  std::vector<double> s;  // rank
  std::vector<double> v;  // cols*rank, column-orthonormal

  double u_at(int i, int j) const { return u[static_cast<std::size_t>(i) * rank + j]; }
  double v_at(int i, int j) const { return v[static_cast<std::size_t>(i) * rank + j]; }
};

// Coefficients of a signal against a whole-signal basis (columns of phi)
// and a patch basis (columns of psi): coeffs = phi^T * lift(f) * psi.
struct FrameletDecomposition {
  NonLocalBasis phi;           // n x n
  std::vector<double> psi;     // d x d, row-major
  std::vector<double> coeffs;  // n x d, row-major
  int n = 0;
  int patch_size = 0;
};

HankelLift hankel_lift(const std::vector<double>& f, int d);

// One-sided Jacobi SVD. rank_tol is relative to the largest singular
// value; values at or below rank_tol*s_max are dropped.
HankelSvd hankel_svd(const HankelLift& h, double rank_tol = 1e-10);

FrameletDecomposition framelet_coeffs(const std::vector<double>& f, const NonLocalBasis& phi,
                                      const std::vector<double>& psi, int d);

// Expansion back to the signal: (1/d) times the diagonal-averaging
// unlift of phi * coeffs * psi^T. Exact inverse of framelet_coeffs when
// phi is orthogonal and psi has orthonormal rows.
std::vector<double> framelet_reconstruct(const FrameletDecomposition& dec);

// 2-D analogue of the lift: one row per pixel, each row a vectorized
// p-by-p patch with circular wrap. Returned matrix is (w*h) x (p*p).
std::vector<double> patch_lift_2d(const Image& img, int p);

// Adjoint averaging of patch_lift_2d; exact inverse with identity bases.
Image patch_unlift_2d(const std::vector<double>& m, int width, int height, int p);

}  // namespace framelet
