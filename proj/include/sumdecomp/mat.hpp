#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sumdecomp {

/// Dense real matrix, row-major.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Mat identity(std::size_t n);
  static Mat diagonal(std::span<const double> d);
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);
  /// Single column built from a vector.
  static Mat column(std::span<const double> v);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> entries() noexcept { return data_; }
  std::span<const double> entries() const noexcept { return data_; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  std::vector<double> col(std::size_t j) const;
  void set_col(std::size_t j, std::span<const double> v);

  /// Columns [first, first + count).
  Mat col_range(std::size_t first, std::size_t count) const;
  Mat transposed() const;
  bool all_finite() const noexcept;

  friend bool operator==(const Mat&, const Mat&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class Trans : bool { kNo = false, kYes = true };

/// op(a) * op(b), where op transposes when the flag says so.
Mat matmul(Trans ta, const Mat& a, Trans tb, const Mat& b);
inline Mat matmul(const Mat& a, const Mat& b) { return matmul(Trans::kNo, a, Trans::kNo, b); }
std::vector<double> matvec(Trans ta, const Mat& a, std::span<const double> x);

Mat add(const Mat& a, const Mat& b);
Mat sub(const Mat& a, const Mat& b);
Mat scale(double alpha, const Mat& a);

/// Columns of a and b side by side.
Mat hcat(const Mat& a, const Mat& b);
/// Rows of a above rows of b.
Mat vcat(const Mat& a, const Mat& b);

double frob_norm(const Mat& a);
double max_abs(const Mat& a);
/// max |a - aᵀ|; a must be square.
double asymmetry(const Mat& a);
Mat symmetrized(const Mat& a);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

}  // namespace sumdecomp
