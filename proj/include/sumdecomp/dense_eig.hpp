#pragma once

#include <cstddef>
#include <vector>

#include "sumdecomp/mat.hpp"

namespace sumdecomp {

inline constexpr double kDefaultCutoff = 1e-12;
inline constexpr double kDefaultJacobiTol = 1e-15;

/// Symmetric eigendecomposition: vectors (n×r, orthonormal columns) and
/// eigenvalues sorted non-increasing.
struct SymEig {
  Mat vectors;
  std::vector<double> values;

  std::size_t rank() const noexcept { return values.size(); }
};

/// Singular triplets, sigma nonnegative and non-increasing.
struct SvdResult {
  Mat left;
  std::vector<double> sigma;
  Mat right;

  std::size_t rank() const noexcept { return sigma.size(); }
};

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm falls below tol * ||M||_F.
  double tol = kDefaultJacobiTol;
  bool want_vectors = true;
  /// Optional block starts. When set, the first sweep visits only pairs that
  /// straddle two blocks (the diagonal blocks are assumed already diagonal).
  std::vector<std::size_t> block_offsets;
  int max_sweeps = 100;
};

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// The input is symmetrized first; asymmetry beyond 1e-8 (1 + max|M|) is
/// rejected.
SymEig sym_eig_dense(const Mat& m, double tol = kDefaultJacobiTol);
SymEig sym_eig_dense(const Mat& m, const JacobiOptions& options);

/// Thin SVD by one-sided (Hestenes) Jacobi. Triplets with
/// sigma <= max(cutoff, max(rows, cols) * eps) * sigma_max are dropped.
SvdResult svd_dense(const Mat& m, double cutoff = kDefaultCutoff);

/// Largest singular value (0 for an empty or zero matrix).
double spectral_norm(const Mat& m);

/// Flip columns so the entry of largest magnitude is positive (ties go to
/// the lowest row index). When `partner` is given its matching columns are
/// flipped too, which keeps singular pairs consistent.
void normalize_signs(Mat& vectors, Mat* partner = nullptr);

/// max |VᵀV - I|.
double orthonormality_error(const Mat& v);

/// V diag(values) Vᵀ.
Mat reconstruct(const SymEig& e);
/// U diag(sigma) Vᵀ.
Mat reconstruct(const SvdResult& s);

}  // namespace sumdecomp
