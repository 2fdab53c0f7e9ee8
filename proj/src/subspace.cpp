#include "sumdecomp/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/error.hpp"

namespace sumdecomp {

std::vector<Cluster> clusters_by_gap(std::span<const double> values, double rel_gap, double scale) {
  std::vector<Cluster> out;
  if (values.empty()) return out;
  if (scale <= 0.0) {
    for (double v : values) scale = std::max(scale, std::abs(v));
  }
  const double gap = rel_gap * scale;
  std::size_t begin = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (std::abs(values[i - 1] - values[i]) > gap) {
      out.push_back({begin, i});
      begin = i;
    }
  }
  out.push_back({begin, values.size()});
  return out;
}

double max_principal_angle(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::kDimensionMismatch, "principal angles need equal row counts");
  if (a.cols() != b.cols()) return std::numbers::pi / 2.0;
  if (a.cols() == 0) return 0.0;
  const Mat proj = matmul(a, matmul(Trans::kYes, a, Trans::kNo, b));
  const double s = spectral_norm(sub(b, proj));
  return std::asin(std::min(1.0, s));
}

Mat lowdin_orthonormalize(const Mat& v) {
  if (v.cols() == 0) return v;
  const Mat gram = matmul(Trans::kYes, v, Trans::kNo, v);
  const SymEig e = sym_eig_dense(gram);
  if (e.values.back() <= 0.0) throw Error(ErrorCode::kZeroVector, "columns are linearly dependent");
  // (vᵀv)^(-1/2) = W diag(1/sqrt(g)) Wᵀ
  Mat scaled = e.vectors;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) /= std::sqrt(e.values[j]);
  const Mat inv_sqrt = matmul(Trans::kNo, scaled, Trans::kYes, e.vectors);
  return matmul(v, inv_sqrt);
}

Mat orthonormal_complement(const Mat& v) {
  const std::size_t n = v.rows();
  const std::size_t r = v.cols();
  if (r > n) throw Error(ErrorCode::kDimensionMismatch, "more basis columns than rows");
  // Householder QR of v; the trailing n - r columns of Q span the complement.
  Mat work = v.transposed();  // reflector j acts on row j of `work`
  std::vector<std::vector<double>> reflectors;
  reflectors.reserve(r);
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<double> h(n, 0.0);
    auto col = work.row(j);
    for (std::size_t i = j; i < n; ++i) h[i] = col[i];
    const double nrm = norm2(h);
    if (nrm == 0.0) throw Error(ErrorCode::kZeroVector, "basis column is zero");
    h[j] += h[j] >= 0.0 ? nrm : -nrm;
    const double hn = norm2(h);
    for (double& x : h) x /= hn;
    for (std::size_t k = j; k < r; ++k) {
      auto c = work.row(k);
      const double d = 2.0 * dot(h, c);
      for (std::size_t i = j; i < n; ++i) c[i] -= d * h[i];
    }
    reflectors.push_back(std::move(h));
  }
  Mat qt(n - r, n);  // rows are complement vectors
  for (std::size_t c = 0; c < n - r; ++c) {
    auto q = qt.row(c);
    q[r + c] = 1.0;
    for (std::size_t j = r; j-- > 0;) {
      const auto& h = reflectors[j];
      const double d = 2.0 * dot(h, q);
      for (std::size_t i = j; i < n; ++i) q[i] -= d * h[i];
    }
  }
  return qt.transposed();
}

}  // namespace sumdecomp
