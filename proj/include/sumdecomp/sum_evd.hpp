#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/mat.hpp"

namespace sumdecomp {

/// Low-rank PSD matrix basis * diag(roots^2) * basisᵀ with orthonormal basis
/// columns and strictly positive, non-increasing roots. Rank 0 (an n×0 basis)
/// is allowed and represents the zero matrix.
class PsdFactor {
 public:
  PsdFactor() = default;
  /// Validates the invariants (orthonormality within 1e-10, positive
  /// non-increasing roots).
  PsdFactor(Mat basis, std::vector<double> roots);

  static PsdFactor zero(std::size_t n) { return PsdFactor(Mat(n, 0), {}); }

  const Mat& basis() const noexcept { return basis_; }
  const std::vector<double>& roots() const noexcept { return roots_; }
  std::size_t dim() const noexcept { return basis_.rows(); }
  std::size_t rank() const noexcept { return roots_.size(); }

  /// basis * diag(roots^2) * basisᵀ formed densely.
  Mat dense() const;

 private:
  Mat basis_;
  std::vector<double> roots_;
};

/// The small k×k matrix ZᵀZ with the start column of every summand's block.
struct GramBlock {
  Mat gram;
  std::vector<std::size_t> offsets;
};

/// Z = [basis_1 diag(roots_1) | basis_2 diag(roots_2) | ...], so that
/// Z Zᵀ is the sum of the represented matrices.
Mat build_z(std::span<const PsdFactor> factors);

/// ZᵀZ. Diagonal blocks are written as diag(roots_i^2); only the cross
/// blocks diag(roots_i) basis_iᵀ basis_j diag(roots_j) are computed, and the
/// lower ones are copied as transposes of the upper ones.
GramBlock gram_block(std::span<const PsdFactor> factors);

struct SumEvdOptions {
  double cutoff = kDefaultCutoff;
  /// Start the Jacobi solve with a sweep over cross-block entries only.
  bool cross_block_first = false;
};

/// Eigenpairs of the sum of the represented matrices, from the eigenpairs of
/// the block Gram projected back through Z. Eigenvalues at or below
/// cutoff * lambda_max are dropped.
SymEig sum_evd(std::span<const PsdFactor> factors, double cutoff = kDefaultCutoff);
SymEig sum_evd(std::span<const PsdFactor> factors, const SumEvdOptions& options);

/// Keeps eigenpairs with value > cutoff * max and turns them into a factor
/// with roots sqrt(value). Values below -1e-10 * max are rejected.
PsdFactor truncate_to_factor(const SymEig& e, double cutoff = kDefaultCutoff);

/// Factor of a dense symmetric PSD matrix via the reference EVD.
/// Negative eigenvalues below -neg_tol * max |lambda| raise NegativeEigenvalue.
PsdFactor factor_from_dense(const Mat& m, double cutoff = kDefaultCutoff, double neg_tol = 1e-8);

}  // namespace sumdecomp
