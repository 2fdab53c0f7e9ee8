#include "sumdecomp/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "sumdecomp/error.hpp"

namespace sumdecomp {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) {
  std::uint64_t state = seed;
  engine_.seed(splitmix64(state));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Mat gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Mat m(rows, cols);
  for (double& x : m.entries()) x = rng.normal();
  return m;
}

Mat random_orthonormal(std::size_t n, std::size_t r, Rng& rng) {
  if (r > n) throw Error(ErrorCode::kDimensionMismatch, "cannot draw more orthonormal columns than rows");
  Mat cols = gaussian_matrix(r, n, rng);  // row j holds column j
  for (std::size_t j = 0; j < r; ++j) {
    auto v = cols.row(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        const auto q = cols.row(i);
        const double h = dot(q, v);
        for (std::size_t k = 0; k < n; ++k) v[k] -= h * q[k];
      }
    }
    const double nv = norm2(v);
    for (double& x : v) x /= nv;
  }
  return cols.transposed();
}

PsdFactor random_psd_factor(std::size_t n, std::size_t r, Rng& rng, double lo, double hi) {
  Mat basis = random_orthonormal(n, r, rng);
  std::vector<double> roots(r);
  for (double& d : roots) d = rng.uniform(lo, hi);
  std::sort(roots.begin(), roots.end(), std::greater<>());
  return PsdFactor(std::move(basis), std::move(roots));
}

FactorSvd random_factor_svd(std::size_t m, std::size_t n, std::size_t r, Rng& rng, double lo, double hi) {
  Mat left = random_orthonormal(m, r, rng);
  Mat right = random_orthonormal(n, r, rng);
  std::vector<double> sigma(r);
  for (double& s : sigma) s = rng.uniform(lo, hi);
  std::sort(sigma.begin(), sigma.end(), std::greater<>());
  return FactorSvd(std::move(left), std::move(sigma), std::move(right));
}

}  // namespace sumdecomp
