#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include "sumdecomp/mat.hpp"
#include "sumdecomp/sum_evd.hpp"
#include "sumdecomp/sum_svd.hpp"

namespace sumdecomp {

/// 64-bit Mersenne Twister seeded through splitmix64. Uniform and normal
/// deviates are derived from the raw 64-bit stream directly so a seed gives
/// the same numbers with any standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller).
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

Mat gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng);

/// n×r matrix with orthonormal columns: seeded Gaussian columns run through
/// modified Gram-Schmidt twice.
Mat random_orthonormal(std::size_t n, std::size_t r, Rng& rng);

/// Rank-r factor in R^n with roots drawn uniformly from [lo, hi], sorted.
PsdFactor random_psd_factor(std::size_t n, std::size_t r, Rng& rng, double lo = 0.5, double hi = 2.0);

/// Rank-r summand of size m×n with singular values drawn from [lo, hi].
FactorSvd random_factor_svd(std::size_t m, std::size_t n, std::size_t r, Rng& rng, double lo = 0.5, double hi = 2.0);

}  // namespace sumdecomp
