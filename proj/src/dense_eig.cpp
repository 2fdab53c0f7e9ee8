#include "sumdecomp/dense_eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "sumdecomp/error.hpp"

namespace sumdecomp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Working state for the two-sided rotation scheme. `a` is the full symmetric
// matrix; `vt` holds eigenvectors as rows so rotations touch contiguous memory.
struct JacobiState {
  Mat a;
  Mat vt;
  bool want_vectors;
};

double off_diagonal_norm(const Mat& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(2.0 * s);
}

void rotate(JacobiState& st, std::size_t p, std::size_t q) {
  Mat& a = st.a;
  const double apq = a(p, q);
  if (apq == 0.0) return;
  const double app = a(p, p);
  const double aqq = a(q, q);
  const double theta = (aqq - app) / (2.0 * apq);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const std::size_t n = a.rows();
  auto rp = a.row(p);
  auto rq = a.row(q);
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    const double akp = rp[k];
    const double akq = rq[k];
    rp[k] = c * akp - s * akq;
    rq[k] = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (k == p || k == q) continue;
    a(k, p) = rp[k];
    a(k, q) = rq[k];
  }
  a(p, p) = app - t * apq;
  a(q, q) = aqq + t * apq;
  a(p, q) = 0.0;
  a(q, p) = 0.0;

  if (st.want_vectors) {
    auto vp = st.vt.row(p);
    auto vq = st.vt.row(q);
    for (std::size_t k = 0; k < n; ++k) {
      const double x = vp[k];
      const double y = vq[k];
      vp[k] = c * x - s * y;
      vq[k] = s * x + c * y;
    }
  }
}

// Annihilate a(p,q) when it is negligible against both diagonal entries,
// otherwise rotate if it exceeds the sweep threshold.
void visit(JacobiState& st, std::size_t p, std::size_t q, double threshold, bool late_sweep) {
  Mat& a = st.a;
  const double g = 100.0 * std::abs(a(p, q));
  if (late_sweep && std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    return;
  }
  if (std::abs(a(p, q)) > threshold) rotate(st, p, q);
}

struct Rotation {
  std::size_t p;
  std::size_t q;
  double c;
  double s;
  double t;
  double apq;
};

// One sweep in round-robin (circle) order. Each round rotates disjoint index
// pairs, so J^T A J is applied as one pass over row pairs and one pass over
// the rows; neither pass touches memory with a column stride.
void round_robin_sweep(JacobiState& st, double threshold, bool late_sweep) {
  Mat& a = st.a;
  const std::size_t n = a.rows();
  const std::size_t players = n + n % 2;
  std::vector<Rotation> round;
  round.reserve(players / 2);
  for (std::size_t r = 0; r + 1 < players; ++r) {
    round.clear();
    for (std::size_t i = 0; i < players / 2; ++i) {
      std::size_t p = (r + i) % (players - 1);
      std::size_t q = i == 0 ? players - 1 : (r + players - 1 - i) % (players - 1);
      if (p > q) std::swap(p, q);
      if (q >= n) continue;
      const double apq = a(p, q);
      if (apq == 0.0) continue;
      const double g = 100.0 * std::abs(apq);
      if (late_sweep && std::abs(a(p, p)) + g == std::abs(a(p, p)) && std::abs(a(q, q)) + g == std::abs(a(q, q))) {
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        continue;
      }
      if (std::abs(apq) <= threshold) continue;
      const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
      double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
      if (theta < 0.0) t = -t;
      const double c = 1.0 / std::sqrt(t * t + 1.0);
      round.push_back({p, q, c, t * c, t, apq});
    }
    if (round.empty()) continue;

    auto rotate_rows = [n](Mat& m, const Rotation& rot) {
      auto rp = m.row(rot.p);
      auto rq = m.row(rot.q);
      for (std::size_t k = 0; k < n; ++k) {
        const double x = rp[k];
        const double y = rq[k];
        rp[k] = rot.c * x - rot.s * y;
        rq[k] = rot.s * x + rot.c * y;
      }
    };
    std::vector<double> app(round.size());
    std::vector<double> aqq(round.size());
    for (std::size_t j = 0; j < round.size(); ++j) {
      app[j] = a(round[j].p, round[j].p);
      aqq[j] = a(round[j].q, round[j].q);
    }
    for (const auto& rot : round) rotate_rows(a, rot);
    for (std::size_t i = 0; i < n; ++i) {
      auto row = a.row(i);
      for (const auto& rot : round) {
        const double x = row[rot.p];
        const double y = row[rot.q];
        row[rot.p] = rot.c * x - rot.s * y;
        row[rot.q] = rot.s * x + rot.c * y;
      }
    }
    // The 2x2 blocks are known in closed form; write them exactly.
    for (std::size_t j = 0; j < round.size(); ++j) {
      const auto& rot = round[j];
      a(rot.p, rot.p) = app[j] - rot.t * rot.apq;
      a(rot.q, rot.q) = aqq[j] + rot.t * rot.apq;
      a(rot.p, rot.q) = 0.0;
      a(rot.q, rot.p) = 0.0;
    }
    if (st.want_vectors)
      for (const auto& rot : round) rotate_rows(st.vt, rot);
  }
  // Row-then-column updates round differently on the two triangles.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = v;
      a(j, i) = v;
    }
}

std::size_t block_of(const std::vector<std::size_t>& offsets, std::size_t i) {
  auto it = std::upper_bound(offsets.begin(), offsets.end(), i);
  return static_cast<std::size_t>(it - offsets.begin());
}

void check_finite(const Mat& m, const char* what) {
  if (!m.all_finite()) throw Error(ErrorCode::kNonFinite, std::string(what) + ": matrix has NaN or Inf entries");
}

}  // namespace

SymEig sym_eig_dense(const Mat& m, double tol) {
  JacobiOptions options;
  options.tol = tol;
  return sym_eig_dense(m, options);
}

SymEig sym_eig_dense(const Mat& m, const JacobiOptions& options) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kNotSquare, "sym_eig_dense needs a square matrix");
  check_finite(m, "sym_eig_dense");
  if (asymmetry(m) > 1e-8 * (1.0 + max_abs(m))) {
    throw Error(ErrorCode::kNotSymmetric, "sym_eig_dense input is not symmetric within tolerance");
  }
  const std::size_t n = m.rows();
  JacobiState st{symmetrized(m), options.want_vectors ? Mat::identity(n) : Mat(), options.want_vectors};

  const double norm = frob_norm(st.a);
  const double target = options.tol * norm;
  if (norm > 0.0) {
    if (!options.block_offsets.empty()) {
      for (std::size_t p = 0; p + 1 < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q)
          if (block_of(options.block_offsets, p) != block_of(options.block_offsets, q)) visit(st, p, q, 0.0, false);
    }
    int sweep = 0;
    for (;; ++sweep) {
      const double off = off_diagonal_norm(st.a);
      if (off <= target || off == 0.0) break;
      if (sweep >= options.max_sweeps) {
        throw Error(ErrorCode::kConvergenceFailure,
                    "Jacobi did not converge in " + std::to_string(options.max_sweeps) + " sweeps");
      }
      // Early sweeps only rotate the larger entries.
      const double threshold = sweep < 3 ? 0.2 * off / (static_cast<double>(n) * static_cast<double>(n)) : 0.0;
      round_robin_sweep(st, threshold, sweep >= 3);
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return st.a(i, i) > st.a(j, j); });

  SymEig out;
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.values[i] = st.a(order[i], order[i]);
  if (options.want_vectors) {
    out.vectors = Mat(n, n);
    for (std::size_t j = 0; j < n; ++j) {
      const auto src = st.vt.row(order[j]);
      for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = src[i];
    }
    normalize_signs(out.vectors);
  }
  return out;
}

SvdResult svd_dense(const Mat& m, double cutoff) {
  check_finite(m, "svd_dense");
  if (cutoff < 0.0) throw Error(ErrorCode::kBadCutoff, "negative cutoff");
  // Work on the orientation with more rows than columns; the columns of the
  // working matrix are stored as rows of `w` for contiguous access.
  const bool flip = m.rows() < m.cols();
  const Mat w0 = flip ? m : m.transposed();
  const std::size_t ncol = w0.rows();
  const std::size_t len = w0.cols();
  Mat w = w0;
  Mat vt = Mat::identity(ncol);

  const double rotate_tol = kEps * 4.0;
  // Columns below this squared norm are rounding noise and are left alone.
  const double noise = std::pow(kEps * frob_norm(w0), 2);
  bool rotated = true;
  int sweep = 0;
  while (rotated) {
    if (sweep++ > 100) throw Error(ErrorCode::kConvergenceFailure, "one-sided Jacobi did not converge");
    rotated = false;
    for (std::size_t i = 0; i + 1 < ncol; ++i) {
      for (std::size_t j = i + 1; j < ncol; ++j) {
        auto wi = w.row(i);
        auto wj = w.row(j);
        const double alpha = dot(wi, wi);
        const double beta = dot(wj, wj);
        const double gamma = dot(wi, wj);
        if (gamma == 0.0 || std::min(alpha, beta) <= noise) continue;
        if (std::abs(gamma) <= rotate_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        double t = 1.0 / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        if (zeta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < len; ++k) {
          const double x = wi[k];
          const double y = wj[k];
          wi[k] = c * x - s * y;
          wj[k] = s * x + c * y;
        }
        auto vi = vt.row(i);
        auto vj = vt.row(j);
        for (std::size_t k = 0; k < ncol; ++k) {
          const double x = vi[k];
          const double y = vj[k];
          vi[k] = c * x - s * y;
          vj[k] = s * x + c * y;
        }
      }
    }
  }

  std::vector<double> norms(ncol);
  for (std::size_t i = 0; i < ncol; ++i) norms[i] = norm2(w.row(i));
  std::vector<std::size_t> order(ncol);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norms[i] > norms[j]; });

  const double smax = ncol == 0 ? 0.0 : norms[order[0]];
  const double rel = std::max(cutoff, static_cast<double>(std::max(m.rows(), m.cols())) * kEps);
  std::size_t r = 0;
  while (r < ncol && smax > 0.0 && norms[order[r]] > rel * smax) ++r;

  // Normalized working columns are singular vectors on the long side; the
  // accumulated rotations are singular vectors on the short side.
  Mat long_side(len, r);
  Mat short_side(ncol, r);
  std::vector<double> sigma(r);
  for (std::size_t c = 0; c < r; ++c) {
    const std::size_t src = order[c];
    sigma[c] = norms[src];
    const auto wc = w.row(src);
    const auto vc = vt.row(src);
    for (std::size_t k = 0; k < len; ++k) long_side(k, c) = wc[k] / sigma[c];
    for (std::size_t k = 0; k < ncol; ++k) short_side(k, c) = vc[k];
  }
  SvdResult out;
  out.sigma = std::move(sigma);
  if (flip) {
    out.left = std::move(short_side);
    out.right = std::move(long_side);
  } else {
    out.left = std::move(long_side);
    out.right = std::move(short_side);
  }
  normalize_signs(out.left, &out.right);
  return out;
}

double spectral_norm(const Mat& m) {
  if (m.empty()) return 0.0;
  const SvdResult s = svd_dense(m, 0.0);
  return s.sigma.empty() ? 0.0 : s.sigma.front();
}

void normalize_signs(Mat& vectors, Mat* partner) {
  for (std::size_t j = 0; j < vectors.cols(); ++j) {
    std::size_t best = 0;
    double best_abs = -1.0;
    for (std::size_t i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors.rows() == 0 || vectors(best, j) >= 0.0) continue;
    for (std::size_t i = 0; i < vectors.rows(); ++i) vectors(i, j) = -vectors(i, j);
    if (partner != nullptr)
      for (std::size_t i = 0; i < partner->rows(); ++i) (*partner)(i, j) = -(*partner)(i, j);
  }
}

double orthonormality_error(const Mat& v) {
  const Mat g = matmul(Trans::kYes, v, Trans::kNo, v);
  double e = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j) e = std::max(e, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return e;
}

Mat reconstruct(const SymEig& e) {
  Mat scaled = e.vectors;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= e.values[j];
  return matmul(Trans::kNo, scaled, Trans::kYes, e.vectors);
}

Mat reconstruct(const SvdResult& s) {
  Mat scaled = s.left;
  for (std::size_t i = 0; i < scaled.rows(); ++i)
    for (std::size_t j = 0; j < scaled.cols(); ++j) scaled(i, j) *= s.sigma[j];
  return matmul(Trans::kNo, scaled, Trans::kYes, s.right);
}

}  // namespace sumdecomp
