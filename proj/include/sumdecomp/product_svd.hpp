#pragma once

#include <cstddef>
#include <utility>

#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/mat.hpp"
#include "sumdecomp/sum_evd.hpp"

namespace sumdecomp {

/// [[0, XᵀY], [YᵀX, 0]] for X (k×m) and Y (k×n).
Mat augmented_matrix(const Mat& x, const Mat& y);

/// Relative guard added on top of the largest eigenvalue of blockdiag(XᵀX, YᵀY).
inline constexpr double kAlphaGuard = 1e-8;

/// (1 + kAlphaGuard) * max(||X||_2^2, ||Y||_2^2): the smallest shift (plus
/// guard) for which alpha I - blockdiag(XᵀX, YᵀY) is positive semidefinite.
double choose_alpha(const Mat& x, const Mat& y);

/// The shifted summand alpha I - blockdiag(XᵀX, YᵀY), kept as one factor per
/// diagonal block. Each factor lives in R^(m+n) with support on its own block,
/// so the two are exactly orthogonal.
struct ShiftParts {
  PsdFactor x_block;
  PsdFactor y_block;
};

/// A = [X Y]ᵀ[X Y] from the thin SVD of the k×(m+n) matrix [X Y]; the
/// (m+n)×(m+n) product is never formed.
PsdFactor gram_summand(const Mat& x, const Mat& y, double cutoff = kDefaultCutoff);

/// B = alpha I - blockdiag(XᵀX, YᵀY) per block: the right singular
/// directions of X (and Y) with eigenvalue alpha - s^2, completed by an
/// orthonormal complement with eigenvalue alpha.
ShiftParts shift_parts(const Mat& x, const Mat& y, double alpha, double cutoff = kDefaultCutoff);

/// The pair (A, B) with B merged into a single factor.
std::pair<PsdFactor, PsdFactor> build_summands(const Mat& x, const Mat& y, double alpha,
                                               double cutoff = kDefaultCutoff);

/// Everything the product pipeline computes along the way.
struct ProductSvdDetail {
  SvdResult svd;
  double alpha = 0.0;
  /// Eigenpairs of C = A + B = augmented + alpha I.
  SymEig shifted;
  /// Side of the block Gram actually decomposed.
  std::size_t gram_side = 0;
};

/// SVD of XᵀY through the eigenpairs of A + B. Pairs with
/// sigma = lambda - alpha <= max(cutoff * sigma_max, roundoff floor) are not
/// emitted; the floor is 8 (k + m + n) eps alpha.
SvdResult product_svd(const Mat& x, const Mat& y, double cutoff = kDefaultCutoff);
ProductSvdDetail product_svd_detail(const Mat& x, const Mat& y, double cutoff = kDefaultCutoff);

/// min(k, m+n) + min(k, m) + min(k, n).
std::size_t block_dimension(std::size_t k, std::size_t m, std::size_t n);

}  // namespace sumdecomp
