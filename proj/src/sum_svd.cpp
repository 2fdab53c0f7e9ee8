#include "sumdecomp/sum_svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sumdecomp/error.hpp"
#include "sumdecomp/product_svd.hpp"
#include "sumdecomp/random.hpp"
#include "sumdecomp/subspace.hpp"

namespace sumdecomp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_shapes(std::span<const FactorSvd> summands) {
  if (summands.empty()) throw Error(ErrorCode::kEmptyInput, "no summands given");
  const std::size_t m = summands.front().rows();
  const std::size_t n = summands.front().cols();
  for (const auto& s : summands) {
    if (s.rows() != m || s.cols() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "summand sizes differ: " + std::to_string(m) + "x" +
                                                     std::to_string(n) + " vs " + std::to_string(s.rows()) + "x" +
                                                     std::to_string(s.cols()));
    }
  }
}

// Block Gram with diagonal blocks diag(sigma_i) and cross blocks
// sqrt(sigma_i) (V_iᵀ V_j) sqrt(sigma_j), V being left or right vectors.
Mat alignment_gram(std::span<const FactorSvd> summands, const std::vector<std::size_t>& offsets, bool use_left) {
  const std::size_t k = offsets.back() + summands.back().rank();
  Mat g(k, k);
  for (std::size_t a = 0; a < summands.size(); ++a) {
    const auto& fa = summands[a];
    for (std::size_t i = 0; i < fa.rank(); ++i) g(offsets[a] + i, offsets[a] + i) = fa.sigma()[i];
    for (std::size_t b = a + 1; b < summands.size(); ++b) {
      const auto& fb = summands[b];
      const Mat align = use_left ? matmul(Trans::kYes, fa.left(), Trans::kNo, fb.left())
                                 : matmul(Trans::kYes, fa.right(), Trans::kNo, fb.right());
      for (std::size_t i = 0; i < fa.rank(); ++i) {
        for (std::size_t j = 0; j < fb.rank(); ++j) {
          const double v = std::sqrt(fa.sigma()[i]) * align(i, j) * std::sqrt(fb.sigma()[j]);
          g(offsets[a] + i, offsets[b] + j) = v;
          g(offsets[b] + j, offsets[a] + i) = v;
        }
      }
    }
  }
  return g;
}

// Columns of `block` are the working vectors; everything below is in the
// (semi-)inner product <x, y> = xᵀ gx y.
struct RitzResult {
  Mat vectors;  // gx-orthonormal Ritz vectors, one per column
  std::vector<double> mu;
};

// `block` columns have unit Euclidean norm; Gram directions with weight at or
// below `drop` (absolute) lie in the numerical null space of gx and carry no
// singular pair.
RitzResult rayleigh_ritz(const Mat& gx, const Mat& gy, const Mat& block, double drop) {
  const Mat gx_block = matmul(gx, block);
  Mat gram = matmul(Trans::kYes, block, Trans::kNo, gx_block);
  const Mat proj = matmul(Trans::kYes, gx_block, Trans::kNo, matmul(gy, gx_block));
  gram = symmetrized(gram);

  // Canonical orthogonalization of the block Gram.
  const SymEig ge = sym_eig_dense(gram);
  std::size_t keep = 0;
  while (keep < ge.values.size() && ge.values[keep] > drop) ++keep;
  RitzResult out{Mat(block.rows(), 0), {}};
  if (keep == 0) return out;
  Mat xform = ge.vectors.col_range(0, keep);
  for (std::size_t i = 0; i < xform.rows(); ++i)
    for (std::size_t j = 0; j < keep; ++j) xform(i, j) /= std::sqrt(ge.values[j]);

  const Mat reduced = symmetrized(matmul(Trans::kYes, xform, Trans::kNo, matmul(proj, xform)));
  const SymEig re = sym_eig_dense(reduced);
  out.vectors = matmul(block, matmul(xform, re.vectors));
  out.mu = re.values;
  return out;
}

// Euclidean Gram-Schmidt with one reorthogonalization pass. Columns that
// are numerically dependent on earlier ones are dropped.
Mat orthonormalize_columns(const Mat& block) {
  const std::size_t k = block.rows();
  std::vector<std::vector<double>> kept;
  for (std::size_t j = 0; j < block.cols(); ++j) {
    std::vector<double> v = block.col(j);
    const double before = norm2(v);
    if (before == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : kept) {
        const double h = dot(q, v);
        for (std::size_t i = 0; i < k; ++i) v[i] -= h * q[i];
      }
    }
    const double after = norm2(v);
    if (after <= 1e-13 * before) continue;
    for (double& x : v) x /= after;
    kept.push_back(std::move(v));
  }
  Mat out(k, kept.size());
  for (std::size_t j = 0; j < kept.size(); ++j) out.set_col(j, kept[j]);
  return out;
}

std::vector<double> apply_operator(const Mat& gx, const Mat& gy, std::span<const double> a) {
  return matvec(Trans::kNo, gy, matvec(Trans::kNo, gx, a));
}

}  // namespace

FactorSvd::FactorSvd(Mat left, std::vector<double> sigma, Mat right)
    : left_(std::move(left)), sigma_(std::move(sigma)), right_(std::move(right)) {
  if (left_.cols() != sigma_.size() || right_.cols() != sigma_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "left/right column counts must equal the number of singular values");
  }
  if (!left_.all_finite() || !right_.all_finite()) throw Error(ErrorCode::kNonFinite, "summand has NaN or Inf");
  for (std::size_t i = 0; i < sigma_.size(); ++i) {
    if (!std::isfinite(sigma_[i]) || sigma_[i] <= 0.0)
      throw Error(ErrorCode::kBadCutoff, "singular values must be positive");
    if (i > 0 && sigma_[i] > sigma_[i - 1]) throw Error(ErrorCode::kBadCutoff, "singular values must be non-increasing");
  }
  if (orthonormality_error(left_) > 1e-10 || orthonormality_error(right_) > 1e-10) {
    throw Error(ErrorCode::kDimensionMismatch, "singular vectors are not orthonormal");
  }
}

Mat FactorSvd::dense() const { return reconstruct(SvdResult{left_, sigma_, right_}); }

ProductEmbedding embed_as_product(std::span<const FactorSvd> summands) {
  check_shapes(summands);
  const std::size_t m = summands.front().rows();
  const std::size_t n = summands.front().cols();
  std::size_t k = 0;
  for (const auto& s : summands) k += s.rank();
  ProductEmbedding out{Mat(m, k), Mat(k, n)};
  std::size_t offset = 0;
  for (const auto& s : summands) {
    for (std::size_t j = 0; j < s.rank(); ++j) {
      const double d = std::sqrt(s.sigma()[j]);
      for (std::size_t i = 0; i < m; ++i) out.xt(i, offset + j) = s.left()(i, j) * d;
      for (std::size_t i = 0; i < n; ++i) out.y(offset + j, i) = d * s.right()(i, j);
    }
    offset += s.rank();
  }
  return out;
}

SvdResult sum_svd(std::span<const FactorSvd> summands, double cutoff) {
  const ProductEmbedding e = embed_as_product(summands);
  return product_svd(e.xt.transposed(), e.y, cutoff);
}

AlignedGrams aligned_grams(std::span<const FactorSvd> summands) {
  check_shapes(summands);
  AlignedGrams out;
  std::size_t k = 0;
  for (const auto& s : summands) {
    out.offsets.push_back(k);
    k += s.rank();
  }
  out.gx = alignment_gram(summands, out.offsets, true);
  out.gy = alignment_gram(summands, out.offsets, false);
  return out;
}

AlignedGrams aligned_grams(const FactorSvd& f, const FactorSvd& g) {
  const FactorSvd pair[2] = {f, g};
  return aligned_grams(pair);
}

std::vector<HalfPair> half_vector_iterate(const AlignedGrams& g, std::size_t count, const IterationOptions& options) {
  const std::size_t k = g.side();
  if (g.gy.rows() != k || g.gx.cols() != k || g.gy.cols() != k) {
    throw Error(ErrorCode::kDimensionMismatch, "gx and gy must be square of equal side");
  }
  if (count > k) throw Error(ErrorCode::kDimensionMismatch, "count exceeds the Gram side");
  std::vector<HalfPair> pairs;
  if (count == 0 || k == 0) return pairs;

  const double scale = frob_norm(g.gx) * frob_norm(g.gy);
  const double res_floor = 64.0 * static_cast<double>(k) * kEps * scale;
  const double zero_mu = 256.0 * kEps * scale;
  const double null_weight = 1e3 * static_cast<double>(k) * kEps * frob_norm(g.gx);
  const std::size_t guard = 2;
  Rng rng(options.seed);

  std::vector<std::vector<double>> locked;     // converged a (gx-normalized)
  std::vector<std::vector<double>> locked_gx;  // gx a for deflation
  std::vector<double> locked_mu;
  bool exhausted = false;

  auto fill_block = [&](Mat& block, std::size_t from) {
    for (std::size_t j = from; j < block.cols(); ++j)
      for (std::size_t i = 0; i < k; ++i) block(i, j) = rng.normal();
  };
  auto deflate = [&](Mat& block) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t j = 0; j < block.cols(); ++j) {
        for (std::size_t l = 0; l < locked.size(); ++l) {
          double h = 0.0;
          for (std::size_t i = 0; i < k; ++i) h += locked_gx[l][i] * block(i, j);
          for (std::size_t i = 0; i < k; ++i) block(i, j) -= h * locked[l][i];
        }
      }
    }
  };

  std::size_t width = std::min(k, count + guard);
  Mat block(k, width);
  fill_block(block, 0);

  std::size_t it = 0;
  while (locked.size() < count && !exhausted) {
    if (it++ >= options.maxit) {
      throw Error(ErrorCode::kConvergenceFailure, "half-vector iteration stalled after " +
                                                      std::to_string(options.maxit) + " steps with " +
                                                      std::to_string(locked.size()) + " of " +
                                                      std::to_string(count) + " pairs converged");
    }
    // Power step, then deflation against converged pairs.
    Mat next(k, block.cols());
    for (std::size_t j = 0; j < block.cols(); ++j) next.set_col(j, apply_operator(g.gx, g.gy, block.col(j)));
    deflate(next);

    const RitzResult rr = rayleigh_ritz(g.gx, g.gy, orthonormalize_columns(next), null_weight);
    if (rr.mu.empty() || rr.mu.front() <= zero_mu) {
      exhausted = true;
      break;
    }

    std::size_t newly = 0;
    for (std::size_t j = 0; j < rr.mu.size() && locked.size() < count; ++j) {
      const double mu = rr.mu[j];
      if (mu <= zero_mu) {
        exhausted = true;
        break;
      }
      const auto a = rr.vectors.col(j);
      const auto ta = apply_operator(g.gx, g.gy, a);
      double res2 = 0.0;
      for (std::size_t i = 0; i < k; ++i) res2 += (ta[i] - mu * a[i]) * (ta[i] - mu * a[i]);
      const double res = std::sqrt(res2);
      if (res > std::max(options.tol * mu, res_floor) * norm2(a)) break;
      locked.push_back(a);
      locked_gx.push_back(matvec(Trans::kNo, g.gx, a));
      locked_mu.push_back(mu);
      ++newly;
    }
    if (exhausted || locked.size() >= count) break;

    // Keep the unconverged Ritz vectors, top up with fresh directions.
    width = std::min(k - locked.size(), count - locked.size() + guard);
    const std::size_t carried = std::min(width, rr.mu.size() - newly);
    block = Mat(k, width);
    for (std::size_t j = 0; j < carried; ++j) block.set_col(j, rr.vectors.col(newly + j));
    fill_block(block, carried);
    deflate(block);
  }

  // Order by decreasing mu and package.
  std::vector<std::size_t> order(locked.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return locked_mu[l] > locked_mu[r]; });
  pairs.reserve(order.size());
  for (std::size_t idx : order) {
    HalfPair p;
    p.lambda = std::sqrt(locked_mu[idx]);
    p.a = locked[idx];
    const double na = norm2(p.a);
    for (double& x : p.a) x /= na;
    p.b = matvec(Trans::kNo, g.gx, p.a);
    for (double& x : p.b) x /= p.lambda;
    pairs.push_back(std::move(p));
  }
  if (!pairs.empty()) {
    const double gap = kClusterGap * pairs.front().lambda;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const bool near_prev = i > 0 && pairs[i - 1].lambda - pairs[i].lambda <= gap;
      const bool near_next = i + 1 < pairs.size() && pairs[i].lambda - pairs[i + 1].lambda <= gap;
      pairs[i].clustered = near_prev || near_next;
    }
  }
  return pairs;
}

SvdResult triplets_from_halves(std::span<const FactorSvd> summands, std::span<const HalfPair> pairs, double cutoff) {
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::kBadCutoff, "cutoff must be nonnegative");
  const ProductEmbedding e = embed_as_product(summands);
  const std::size_t m = e.xt.rows();
  const std::size_t n = e.y.cols();
  double lmax = 0.0;
  for (const auto& p : pairs) lmax = std::max(lmax, p.lambda);

  std::vector<double> sigma;
  std::vector<std::vector<double>> us;
  std::vector<std::vector<double>> vs;
  for (const auto& p : pairs) {
    if (p.a.size() != e.xt.cols() || p.b.size() != e.y.rows()) {
      throw Error(ErrorCode::kDimensionMismatch, "half vectors do not match the embedding");
    }
    if (!(p.lambda > cutoff * lmax) || p.lambda <= 0.0) continue;
    auto u = matvec(Trans::kNo, e.xt, p.a);
    auto v = matvec(Trans::kYes, e.y, p.b);
    const double nu = norm2(u);
    const double nv = norm2(v);
    if (nu <= 0.0 || nv <= 0.0) throw Error(ErrorCode::kZeroVector, "projected half vector vanished");
    for (double& x : u) x /= nu;
    for (double& x : v) x /= nv;
    sigma.push_back(p.lambda);
    us.push_back(std::move(u));
    vs.push_back(std::move(v));
  }
  SvdResult out{Mat(m, sigma.size()), sigma, Mat(n, sigma.size())};
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    out.left.set_col(j, us[j]);
    out.right.set_col(j, vs[j]);
  }
  normalize_signs(out.left, &out.right);
  return out;
}

SvdResult sum_svd_iterative(std::span<const FactorSvd> summands, double cutoff, const IterationOptions& options) {
  const AlignedGrams g = aligned_grams(summands);
  const auto pairs = half_vector_iterate(g, g.side(), options);
  return triplets_from_halves(summands, pairs, cutoff);
}

}  // namespace sumdecomp
