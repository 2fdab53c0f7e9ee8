#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/mat.hpp"

namespace sumdecomp {

/// One summand given by its SVD: left (m×r) diag(sigma) rightᵀ (r×n), with
/// orthonormal columns and strictly positive, non-increasing sigma.
class FactorSvd {
 public:
  FactorSvd() = default;
  FactorSvd(Mat left, std::vector<double> sigma, Mat right);
  /// Wraps a computed SVD (any rank, including 0).
  static FactorSvd from(const SvdResult& s) { return FactorSvd(s.left, s.sigma, s.right); }

  const Mat& left() const noexcept { return left_; }
  const std::vector<double>& sigma() const noexcept { return sigma_; }
  const Mat& right() const noexcept { return right_; }
  std::size_t rows() const noexcept { return left_.rows(); }
  std::size_t cols() const noexcept { return right_.rows(); }
  std::size_t rank() const noexcept { return sigma_.size(); }

  Mat dense() const;

 private:
  Mat left_;
  std::vector<double> sigma_;
  Mat right_;
};

/// H = Σ F_i written as XᵀY.
struct ProductEmbedding {
  /// Xᵀ = [left_1 diag(sqrt sigma_1) | left_2 diag(sqrt sigma_2) | ...], m×K
  Mat xt;
  /// Y = [diag(sqrt sigma_1) right_1ᵀ ; diag(sqrt sigma_2) right_2ᵀ ; ...], K×n
  Mat y;
};

ProductEmbedding embed_as_product(std::span<const FactorSvd> summands);

/// SVD of the sum through the product embedding and product_svd.
SvdResult sum_svd(std::span<const FactorSvd> summands, double cutoff = kDefaultCutoff);

/// The two K×K Grams of the embedding: gx = X Xᵀ (left-vector alignment
/// between summands) and gy = Y Yᵀ (right-vector alignment). Diagonal blocks
/// are written as diag(sigma_i).
struct AlignedGrams {
  Mat gx;
  Mat gy;
  std::vector<std::size_t> offsets;

  std::size_t side() const noexcept { return gx.rows(); }
};

AlignedGrams aligned_grams(std::span<const FactorSvd> summands);
AlignedGrams aligned_grams(const FactorSvd& f, const FactorSvd& g);

/// One converged pair of the half-vector recurrence gy gx a = lambda^2 a,
/// with b = gx a / lambda. `a` has unit Euclidean norm.
struct HalfPair {
  double lambda = 0.0;
  std::vector<double> a;
  std::vector<double> b;
  /// Set when a neighbouring lambda lies within kClusterGap * lambda_max:
  /// the individual vectors are then only defined up to rotation in the
  /// cluster.
  bool clustered = false;
};

struct IterationOptions {
  /// Relative residual ||gy gx a - mu a|| <= tol * mu ||a|| for convergence
  /// (or the roundoff floor, whichever is larger).
  double tol = 1e-12;
  std::size_t maxit = 10000;
  std::uint64_t seed = 0x5eed;
};

/// Top `count` nonzero pairs of the swapped product, by power iteration on
/// a block of vectors with Rayleigh-Ritz extraction in the gx inner product
/// and locking of converged pairs. Only matrix-vector products with gx and
/// gy are used on the K-dimensional halves; everything stays real.
std::vector<HalfPair> half_vector_iterate(const AlignedGrams& g, std::size_t count,
                                          const IterationOptions& options = {});

/// Singular triplets of the sum from converged halves: u = Xᵀa, v = Yᵀb,
/// each normalized, sigma = lambda. Pairs with lambda <= cutoff * lambda_max
/// are skipped.
SvdResult triplets_from_halves(std::span<const FactorSvd> summands, std::span<const HalfPair> pairs,
                               double cutoff = kDefaultCutoff);

/// The full iterative pipeline: aligned_grams, half_vector_iterate for every
/// nonzero pair, triplets_from_halves.
SvdResult sum_svd_iterative(std::span<const FactorSvd> summands, double cutoff = kDefaultCutoff,
                            const IterationOptions& options = {});

}  // namespace sumdecomp
