#include <gtest/gtest.h>

#include <cmath>

#include "sumdecomp/subspace.hpp"
#include "test_support.hpp"

namespace sumdecomp {
namespace {

TEST(Clusters, SplitOnRelativeGap) {
  const double v[] = {5.0, 5.0 + 1e-9, 3.0, 1.0, 1.0 - 1e-8};
  const auto c = clusters_by_gap(v);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].begin, 0u);
  EXPECT_EQ(c[0].end, 2u);
  EXPECT_EQ(c[1].size(), 1u);
  EXPECT_EQ(c[2].size(), 2u);
  EXPECT_TRUE(clusters_by_gap(std::span<const double>{}).empty());
}

TEST(PrincipalAngle, PlaneRotationAngleIsRecovered) {
  for (double theta : {1e-12, 1e-8, 1e-3, 0.5}) {
    const Mat a = Mat::from_rows({{1}, {0}, {0}});
    const Mat b = Mat::from_rows({{std::cos(theta)}, {std::sin(theta)}, {0}});
    EXPECT_NEAR(max_principal_angle(a, b), theta, 1e-15 + 1e-12 * theta);
  }
}

TEST(PrincipalAngle, SameSpanDifferentBasis) {
  const double h = 1.0 / std::sqrt(2.0);
  const Mat a = Mat::from_rows({{1, 0}, {0, 1}, {0, 0}});
  const Mat b = Mat::from_rows({{h, h}, {h, -h}, {0, 0}});
  EXPECT_LT(max_principal_angle(a, b), 1e-15);
  EXPECT_NEAR(max_principal_angle(a, a.col_range(0, 1)), std::acos(0.0), 1e-15);
}

TEST(Lowdin, ProducesOrthonormalColumnsNearInput) {
  Rng rng(4);
  Mat q = random_orthonormal(6, 3, rng);
  Mat perturbed = q;
  for (double& x : perturbed.entries()) x += 1e-7 * rng.normal();
  const Mat fixed = lowdin_orthonormalize(perturbed);
  EXPECT_LT(orthonormality_error(fixed), 1e-14);
  EXPECT_LT(testing::naive_frob_diff(fixed, perturbed), 1e-6);
}

TEST(Complement, CompletesAnOrthonormalBasis) {
  Rng rng(8);
  for (std::size_t r = 0; r <= 5; ++r) {
    const Mat v = random_orthonormal(5, r, rng);
    const Mat c = orthonormal_complement(v);
    ASSERT_EQ(c.cols(), 5 - r);
    EXPECT_LT(orthonormality_error(hcat(v, c)), 1e-14);
  }
}

}  // namespace
}  // namespace sumdecomp
