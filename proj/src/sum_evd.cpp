#include "sumdecomp/sum_evd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sumdecomp/error.hpp"

namespace sumdecomp {

namespace {

std::size_t common_dim(std::span<const PsdFactor> factors) {
  if (factors.empty()) throw Error(ErrorCode::kEmptyInput, "no summands given");
  const std::size_t n = factors.front().dim();
  for (const auto& f : factors) {
    if (f.dim() != n) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "summands have different sizes: " + std::to_string(n) + " vs " + std::to_string(f.dim()));
    }
  }
  return n;
}

void check_cutoff(double cutoff) {
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::kBadCutoff, "cutoff must be nonnegative");
}

}  // namespace

PsdFactor::PsdFactor(Mat basis, std::vector<double> roots) : basis_(std::move(basis)), roots_(std::move(roots)) {
  if (basis_.cols() != roots_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "basis has " + std::to_string(basis_.cols()) + " columns but " +
                                                   std::to_string(roots_.size()) + " roots");
  }
  if (!basis_.all_finite()) throw Error(ErrorCode::kNonFinite, "factor basis has NaN or Inf");
  for (std::size_t i = 0; i < roots_.size(); ++i) {
    if (!std::isfinite(roots_[i]) || roots_[i] <= 0.0) throw Error(ErrorCode::kBadCutoff, "roots must be positive");
    if (i > 0 && roots_[i] > roots_[i - 1]) throw Error(ErrorCode::kBadCutoff, "roots must be non-increasing");
  }
  if (orthonormality_error(basis_) > 1e-10) {
    throw Error(ErrorCode::kDimensionMismatch, "factor basis columns are not orthonormal");
  }
}

Mat PsdFactor::dense() const {
  SymEig e{basis_, {}};
  e.values.reserve(roots_.size());
  for (double d : roots_) e.values.push_back(d * d);
  return reconstruct(e);
}

Mat build_z(std::span<const PsdFactor> factors) {
  const std::size_t n = common_dim(factors);
  std::size_t k = 0;
  for (const auto& f : factors) k += f.rank();
  Mat z(n, k);
  std::size_t offset = 0;
  for (const auto& f : factors) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < f.rank(); ++j) z(i, offset + j) = f.basis()(i, j) * f.roots()[j];
    offset += f.rank();
  }
  return z;
}

GramBlock gram_block(std::span<const PsdFactor> factors) {
  common_dim(factors);
  GramBlock out;
  std::size_t k = 0;
  for (const auto& f : factors) {
    out.offsets.push_back(k);
    k += f.rank();
  }
  out.gram = Mat(k, k);
  for (std::size_t a = 0; a < factors.size(); ++a) {
    const auto& fa = factors[a];
    const std::size_t oa = out.offsets[a];
    for (std::size_t i = 0; i < fa.rank(); ++i) out.gram(oa + i, oa + i) = fa.roots()[i] * fa.roots()[i];
    for (std::size_t b = a + 1; b < factors.size(); ++b) {
      const auto& fb = factors[b];
      const std::size_t ob = out.offsets[b];
      const Mat align = matmul(Trans::kYes, fa.basis(), Trans::kNo, fb.basis());
      for (std::size_t i = 0; i < fa.rank(); ++i) {
        for (std::size_t j = 0; j < fb.rank(); ++j) {
          const double v = fa.roots()[i] * align(i, j) * fb.roots()[j];
          out.gram(oa + i, ob + j) = v;
          out.gram(ob + j, oa + i) = v;
        }
      }
    }
  }
  return out;
}

SymEig sum_evd(std::span<const PsdFactor> factors, double cutoff) {
  SumEvdOptions options;
  options.cutoff = cutoff;
  return sum_evd(factors, options);
}

SymEig sum_evd(std::span<const PsdFactor> factors, const SumEvdOptions& options) {
  check_cutoff(options.cutoff);
  const std::size_t n = common_dim(factors);
  const GramBlock g = gram_block(factors);
  const std::size_t k = g.gram.rows();
  SymEig out{Mat(n, 0), {}};
  if (k == 0) return out;

  JacobiOptions jo;
  if (options.cross_block_first) jo.block_offsets.assign(g.offsets.begin() + 1, g.offsets.end());
  const SymEig small = sym_eig_dense(g.gram, jo);
  const double lmax = small.values.front();
  if (lmax <= 0.0) return out;

  std::size_t r = 0;
  while (r < k && small.values[r] > options.cutoff * lmax) ++r;

  // Column j of the result is Z w_j / sqrt(lambda_j).
  const Mat z = build_z(factors);
  Mat w = small.vectors.col_range(0, r);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < r; ++j) w(i, j) /= std::sqrt(small.values[j]);
  out.vectors = matmul(z, w);
  out.values.assign(small.values.begin(), small.values.begin() + static_cast<std::ptrdiff_t>(r));
  normalize_signs(out.vectors);
  return out;
}

PsdFactor truncate_to_factor(const SymEig& e, double cutoff) {
  check_cutoff(cutoff);
  const std::size_t n = e.vectors.rows();
  if (e.values.empty()) return PsdFactor::zero(n);
  const double vmax = *std::max_element(e.values.begin(), e.values.end());
  const double vmin = *std::min_element(e.values.begin(), e.values.end());
  if (vmin < -1e-10 * std::max(vmax, 0.0) || (vmax <= 0.0 && vmin < 0.0)) {
    throw Error(ErrorCode::kNegativeEigenvalue, "eigenvalue " + std::to_string(vmin) + " is negative");
  }
  if (vmax <= 0.0) return PsdFactor::zero(n);
  std::size_t r = 0;
  while (r < e.values.size() && e.values[r] > cutoff * vmax) ++r;
  std::vector<double> roots(r);
  for (std::size_t i = 0; i < r; ++i) roots[i] = std::sqrt(e.values[i]);
  return PsdFactor(e.vectors.col_range(0, r), std::move(roots));
}

PsdFactor factor_from_dense(const Mat& m, double cutoff, double neg_tol) {
  SymEig e = sym_eig_dense(m);
  double scale = 0.0;
  for (double v : e.values) scale = std::max(scale, std::abs(v));
  if (!e.values.empty() && e.values.back() < -neg_tol * scale) {
    throw Error(ErrorCode::kNegativeEigenvalue,
                "matrix is not positive semidefinite (eigenvalue " + std::to_string(e.values.back()) + ")");
  }
  // Clamp the roundoff-level negatives that were accepted above.
  for (double& v : e.values) v = std::max(v, 0.0);
  return truncate_to_factor(e, cutoff);
}

}  // namespace sumdecomp
