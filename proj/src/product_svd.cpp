#include "sumdecomp/product_svd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sumdecomp/error.hpp"
#include "sumdecomp/subspace.hpp"

namespace sumdecomp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_shared_rows(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "X and Y must share their row count (" + std::to_string(x.rows()) +
                                                   " vs " + std::to_string(y.rows()) + ")");
  }
  if (!x.all_finite() || !y.all_finite()) throw Error(ErrorCode::kNonFinite, "X or Y has NaN or Inf");
}

// Eigenpairs of alpha I - MᵀM for one block, embedded at row `offset` of an
// (total)-dimensional space, sorted by decreasing eigenvalue.
PsdFactor shift_block(const Mat& m, double alpha, double cutoff, std::size_t offset, std::size_t total) {
  const std::size_t dim = m.cols();
  const SvdResult s = svd_dense(m);
  const Mat complement = orthonormal_complement(s.right);

  // Eigenvalues: alpha on the complement (largest), then alpha - s_i^2 for
  // the singular directions in increasing s_i.
  std::vector<double> values;
  Mat local(dim, dim);
  std::size_t col = 0;
  for (std::size_t j = 0; j < complement.cols(); ++j, ++col) {
    values.push_back(alpha);
    for (std::size_t i = 0; i < dim; ++i) local(i, col) = complement(i, j);
  }
  for (std::size_t j = s.rank(); j-- > 0; ++col) {
    const double ev = alpha - s.sigma[j] * s.sigma[j];
    if (ev < -1e-9 * alpha) {
      throw Error(ErrorCode::kShiftTooSmall, "alpha - s^2 = " + std::to_string(ev) + " is negative");
    }
    values.push_back(ev);
    for (std::size_t i = 0; i < dim; ++i) local(i, col) = s.right(i, j);
  }

  std::size_t keep = 0;
  while (keep < values.size() && values[keep] > cutoff * alpha) ++keep;
  Mat basis(total, keep);
  std::vector<double> roots(keep);
  for (std::size_t j = 0; j < keep; ++j) {
    roots[j] = std::sqrt(values[j]);
    for (std::size_t i = 0; i < dim; ++i) basis(offset + i, j) = local(i, j);
  }
  return PsdFactor(std::move(basis), std::move(roots));
}

}  // namespace

Mat augmented_matrix(const Mat& x, const Mat& y) {
  require_shared_rows(x, y);
  const std::size_t m = x.cols();
  const std::size_t n = y.cols();
  const Mat xty = matmul(Trans::kYes, x, Trans::kNo, y);
  Mat out(m + n, m + n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(i, m + j) = xty(i, j);
      out(m + j, i) = xty(i, j);
    }
  }
  return out;
}

double choose_alpha(const Mat& x, const Mat& y) {
  require_shared_rows(x, y);
  const double sx = spectral_norm(x);
  const double sy = spectral_norm(y);
  return (1.0 + kAlphaGuard) * std::max(sx * sx, sy * sy);
}

PsdFactor gram_summand(const Mat& x, const Mat& y, double cutoff) {
  require_shared_rows(x, y);
  const Mat xy = hcat(x, y);
  const SvdResult s = svd_dense(xy, cutoff);
  // A = (XY)ᵀ(XY) = V diag(s^2) Vᵀ
  return PsdFactor(s.right, s.sigma);
}

ShiftParts shift_parts(const Mat& x, const Mat& y, double alpha, double cutoff) {
  require_shared_rows(x, y);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(ErrorCode::kShiftTooSmall, "alpha must be finite and >= 0");
  const std::size_t m = x.cols();
  const std::size_t n = y.cols();
  return ShiftParts{shift_block(x, alpha, cutoff, 0, m + n), shift_block(y, alpha, cutoff, m, m + n)};
}

std::pair<PsdFactor, PsdFactor> build_summands(const Mat& x, const Mat& y, double alpha, double cutoff) {
  PsdFactor a = gram_summand(x, y, cutoff);
  ShiftParts b = shift_parts(x, y, alpha, cutoff);

  // Merge the two blocks, ordered by decreasing root.
  const auto& fx = b.x_block;
  const auto& fy = b.y_block;
  const std::size_t total = fx.rank() + fy.rank();
  std::vector<std::pair<double, std::pair<int, std::size_t>>> order;
  order.reserve(total);
  for (std::size_t j = 0; j < fx.rank(); ++j) order.push_back({fx.roots()[j], {0, j}});
  for (std::size_t j = 0; j < fy.rank(); ++j) order.push_back({fy.roots()[j], {1, j}});
  std::stable_sort(order.begin(), order.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  Mat basis(fx.dim(), total);
  std::vector<double> roots(total);
  for (std::size_t c = 0; c < total; ++c) {
    const auto& [root, src] = order[c];
    const Mat& from = src.first == 0 ? fx.basis() : fy.basis();
    roots[c] = root;
    for (std::size_t i = 0; i < basis.rows(); ++i) basis(i, c) = from(i, src.second);
  }
  return {std::move(a), PsdFactor(std::move(basis), std::move(roots))};
}

SvdResult product_svd(const Mat& x, const Mat& y, double cutoff) { return product_svd_detail(x, y, cutoff).svd; }

ProductSvdDetail product_svd_detail(const Mat& x, const Mat& y, double cutoff) {
  require_shared_rows(x, y);
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::kBadCutoff, "cutoff must be nonnegative");
  const std::size_t k = x.rows();
  const std::size_t m = x.cols();
  const std::size_t n = y.cols();

  ProductSvdDetail out;
  out.svd = SvdResult{Mat(m, 0), {}, Mat(n, 0)};
  out.shifted = SymEig{Mat(m + n, 0), {}};
  out.alpha = choose_alpha(x, y);
  if (out.alpha == 0.0) return out;

  // Three summands: A and the two diagonal blocks of B, whose cross block
  // in the Gram is identically zero.
  ShiftParts shift = shift_parts(x, y, out.alpha, cutoff);
  const std::array<PsdFactor, 3> summands{gram_summand(x, y, cutoff), std::move(shift.x_block),
                                          std::move(shift.y_block)};
  out.gram_side = summands[0].rank() + summands[1].rank() + summands[2].rank();
  out.shifted = sum_evd(summands, cutoff);

  const SymEig& e = out.shifted;
  const double sigma_max = e.values.empty() ? 0.0 : e.values.front() - out.alpha;
  const double floor = 8.0 * static_cast<double>(k + m + n) * kEps * out.alpha;
  const double threshold = std::max(cutoff * sigma_max, floor);
  std::size_t r = 0;
  while (r < e.values.size() && e.values[r] - out.alpha > threshold) ++r;

  std::vector<double> sigma(r);
  Mat left(m, r);
  Mat right(n, r);
  const double root2 = std::sqrt(2.0);
  for (std::size_t j = 0; j < r; ++j) {
    sigma[j] = e.values[j] - out.alpha;
    for (std::size_t i = 0; i < m; ++i) left(i, j) = root2 * e.vectors(i, j);
    for (std::size_t i = 0; i < n; ++i) right(i, j) = root2 * e.vectors(m + i, j);
  }

  // Halves of an augmented eigenvector are only orthonormal up to the
  // mixing allowed by the gap to neighbouring eigenvalues; restore it per
  // cluster of sigma.
  for (const Cluster& c : clusters_by_gap(sigma, kClusterGap, sigma_max)) {
    const Mat lc = lowdin_orthonormalize(left.col_range(c.begin, c.size()));
    const Mat rc = lowdin_orthonormalize(right.col_range(c.begin, c.size()));
    for (std::size_t j = 0; j < c.size(); ++j) {
      left.set_col(c.begin + j, lc.col(j));
      right.set_col(c.begin + j, rc.col(j));
    }
  }
  normalize_signs(left, &right);
  out.svd = SvdResult{std::move(left), std::move(sigma), std::move(right)};
  return out;
}

std::size_t block_dimension(std::size_t k, std::size_t m, std::size_t n) {
  return std::min(k, m + n) + std::min(k, m) + std::min(k, n);
}

}  // namespace sumdecomp
