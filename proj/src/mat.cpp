#include "sumdecomp/mat.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sumdecomp/error.hpp"

namespace sumdecomp {

namespace {

void require_same_shape(const Mat& a, const Mat& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                    " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "entry count " + std::to_string(data_.size()) + " does not match " + std::to_string(rows_) +
                    "x" + std::to_string(cols_));
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw Error(ErrorCode::kDimensionMismatch, "ragged row list");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Mat(r, c, std::move(data));
}

Mat Mat::column(std::span<const double> v) { return Mat(v.size(), 1, std::vector<double>(v.begin(), v.end())); }

std::vector<double> Mat::col(std::size_t j) const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

void Mat::set_col(std::size_t j, std::span<const double> v) {
  if (v.size() != rows_) throw Error(ErrorCode::kDimensionMismatch, "set_col length");
  for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Mat Mat::col_range(std::size_t first, std::size_t count) const {
  if (first + count > cols_) throw Error(ErrorCode::kDimensionMismatch, "column range out of bounds");
  Mat out(rows_, count);
  for (std::size_t i = 0; i < rows_; ++i) {
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_ + first), count, out.row(i).begin());
  }
  return out;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Mat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Mat matmul(Trans ta, const Mat& a, Trans tb, const Mat& b) {
  const bool at = ta == Trans::kYes;
  const bool bt = tb == Trans::kYes;
  const std::size_t m = at ? a.cols() : a.rows();
  const std::size_t inner = at ? a.rows() : a.cols();
  const std::size_t inner_b = bt ? b.cols() : b.rows();
  const std::size_t n = bt ? b.rows() : b.cols();
  if (inner != inner_b) {
    throw Error(ErrorCode::kDimensionMismatch,
                "matmul inner dimensions " + std::to_string(inner) + " vs " + std::to_string(inner_b));
  }
  Mat c(m, n);
  if (bt) {
    // Rows of b are the columns of op(b): dot products over contiguous rows.
    const Mat a_rows = at ? a.transposed() : Mat();
    const Mat& lhs = at ? a_rows : a;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = dot(lhs.row(i), b.row(j));
    return c;
  }
  if (at) {
    for (std::size_t k = 0; k < inner; ++k) {
      const auto ak = a.row(k);
      const auto bk = b.row(k);
      for (std::size_t i = 0; i < m; ++i) {
        const double s = ak[i];
        if (s == 0.0) continue;
        auto ci = c.row(i);
        for (std::size_t j = 0; j < n; ++j) ci[j] += s * bk[j];
      }
    }
    return c;
  }
  for (std::size_t i = 0; i < m; ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < inner; ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < n; ++j) ci[j] += s * bk[j];
    }
  }
  return c;
}

std::vector<double> matvec(Trans ta, const Mat& a, std::span<const double> x) {
  if (ta == Trans::kNo) {
    if (x.size() != a.cols()) throw Error(ErrorCode::kDimensionMismatch, "matvec length");
    std::vector<double> y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
  }
  if (x.size() != a.rows()) throw Error(ErrorCode::kDimensionMismatch, "matvec length");
  std::vector<double> y(a.cols(), 0.0);
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const auto ak = a.row(k);
    for (std::size_t j = 0; j < a.cols(); ++j) y[j] += x[k] * ak[j];
  }
  return y;
}

Mat add(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "add");
  Mat c = a;
  auto ce = c.entries();
  auto be = b.entries();
  for (std::size_t i = 0; i < ce.size(); ++i) ce[i] += be[i];
  return c;
}

Mat sub(const Mat& a, const Mat& b) {
  require_same_shape(a, b, "sub");
  Mat c = a;
  auto ce = c.entries();
  auto be = b.entries();
  for (std::size_t i = 0; i < ce.size(); ++i) ce[i] -= be[i];
  return c;
}

Mat scale(double alpha, const Mat& a) {
  Mat c = a;
  for (double& x : c.entries()) x *= alpha;
  return c;
}

Mat hcat(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw Error(ErrorCode::kDimensionMismatch, "hcat row counts differ");
  Mat c(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    std::copy(a.row(i).begin(), a.row(i).end(), ci.begin());
    std::copy(b.row(i).begin(), b.row(i).end(), ci.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return c;
}

Mat vcat(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) throw Error(ErrorCode::kDimensionMismatch, "vcat column counts differ");
  std::vector<double> data(a.entries().begin(), a.entries().end());
  data.insert(data.end(), b.entries().begin(), b.entries().end());
  return Mat(a.rows() + b.rows(), a.cols(), std::move(data));
}

double frob_norm(const Mat& a) { return norm2(a.entries()); }

double max_abs(const Mat& a) {
  double m = 0.0;
  for (double x : a.entries()) m = std::max(m, std::abs(x));
  return m;
}

double asymmetry(const Mat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kNotSquare, "asymmetry of non-square matrix");
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - a(j, i)));
  return m;
}

Mat symmetrized(const Mat& a) {
  if (a.rows() != a.cols()) throw Error(ErrorCode::kNotSquare, "symmetrize non-square matrix");
  Mat s = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const double v = 0.5 * (a(i, j) + a(j, i));
      s(i, j) = v;
      s(j, i) = v;
    }
  }
  return s;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation so tiny and huge entries do not under/overflow.
  double scale = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

}  // namespace sumdecomp
