#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <complex>
#include <type_traits>

#include "sumdecomp/error.hpp"
#include "sumdecomp/product_svd.hpp"
#include "sumdecomp/sum_svd.hpp"
#include "test_support.hpp"

namespace sumdecomp {
namespace {

using testing::cluster_angle;
using testing::dense_svd_sum;
using testing::naive_frob;
using testing::naive_frob_diff;
using testing::naive_product;
using testing::value_error;

FactorSvd axis_summand(std::size_t i, std::size_t j, double sigma) {
  Mat l(2, 1), r(2, 1);
  l(i, 0) = 1.0;
  r(j, 0) = 1.0;
  return FactorSvd(std::move(l), {sigma}, std::move(r));
}

std::array<FactorSvd, 2> disjoint_pair() { return {axis_summand(0, 0, 3.0), axis_summand(1, 1, 2.0)}; }

FactorSvd negated(const FactorSvd& f) { return FactorSvd(f.left(), f.sigma(), scale(-1.0, f.right())); }

Mat negate_cols(Mat m) {
  for (double& v : m.entries()) v = -v;
  return m;
}

std::vector<FactorSvd> random_summands(Rng& rng, std::size_t m, std::size_t n,
                                       std::initializer_list<std::size_t> ranks) {
  std::vector<FactorSvd> out;
  for (std::size_t r : ranks) out.push_back(random_factor_svd(m, n, r, rng));
  return out;
}

// Residuals of the swapped product on one half pair.
struct PairResiduals {
  double power = 0.0;
  double swap = 0.0;
};

PairResiduals pair_residuals(const AlignedGrams& g, const HalfPair& p) {
  const auto gxa = matvec(Trans::kNo, g.gx, p.a);
  const auto gyb = matvec(Trans::kNo, g.gy, p.b);
  const auto gygxa = matvec(Trans::kNo, g.gy, gxa);
  double power = 0.0, swap = 0.0;
  for (std::size_t i = 0; i < p.a.size(); ++i) {
    power = std::max(power, std::abs(gygxa[i] - p.lambda * p.lambda * p.a[i]));
    swap = std::max(swap, std::abs(gxa[i] - p.lambda * p.b[i]));
    swap = std::max(swap, std::abs(gyb[i] - p.lambda * p.a[i]));
  }
  return {power, swap};
}

TEST(FactorSvd, RejectsBrokenInvariants) {
  EXPECT_THROW(FactorSvd(Mat::identity(2), {1, 2}, Mat::identity(2)), Error);
  EXPECT_THROW(FactorSvd(Mat::identity(2), {1}, Mat::identity(2)), Error);
  EXPECT_THROW(FactorSvd(Mat::from_rows({{1, 1}, {0, 1}}), {2, 1}, Mat::identity(2)), Error);
}

TEST(EmbedAsProduct, SingleSummandReproducesIt) {
  Rng rng(1);
  const FactorSvd f = random_factor_svd(6, 5, 3, rng);
  const ProductEmbedding e = embed_as_product(std::span(&f, 1));
  EXPECT_EQ(e.xt.rows(), 6u);
  EXPECT_EQ(e.y.cols(), 5u);
  EXPECT_LE(naive_frob_diff(naive_product(e.xt, false, e.y, false), f.dense()), 1e-14 * naive_frob(f.dense()));
}

TEST(EmbedAsProduct, DisjointSupports) {
  const auto fs = disjoint_pair();
  const ProductEmbedding e = embed_as_product(fs);
  EXPECT_LE(naive_frob_diff(naive_product(e.xt, false, e.y, false), Mat::from_rows({{3, 0}, {0, 2}})), 1e-15);
}

TEST(EmbedAsProduct, RandomMatchesDenseSum) {
  Rng rng(2);
  const auto fs = random_summands(rng, 6, 5, {2, 2});
  const ProductEmbedding e = embed_as_product(fs);
  const Mat h = dense_svd_sum(fs);
  EXPECT_LE(naive_frob_diff(naive_product(e.xt, false, e.y, false), h), 1e-12 * naive_frob(h));
}

TEST(EmbedAsProduct, Errors) {
  EXPECT_THROW(embed_as_product(std::span<const FactorSvd>{}), Error);
  Rng rng(3);
  const std::array<FactorSvd, 2> fs{random_factor_svd(3, 4, 1, rng), random_factor_svd(3, 5, 1, rng)};
  EXPECT_THROW(embed_as_product(fs), Error);
}

TEST(SumSvd, DisjointSupportsGiveDiagonal) {
  const auto fs = disjoint_pair();
  const SvdResult s = sum_svd(fs);
  ASSERT_EQ(s.rank(), 2u);
  EXPECT_NEAR(s.sigma[0], 3.0, 1e-12);
  EXPECT_NEAR(s.sigma[1], 2.0, 1e-12);
  EXPECT_LT(max_principal_angle(s.left, Mat::identity(2)), 1e-12);
}

TEST(SumSvd, NegationCancels) {
  Rng rng(4);
  const FactorSvd f = random_factor_svd(5, 4, 2, rng);
  const std::array<FactorSvd, 2> fs{f, negated(f)};
  EXPECT_EQ(sum_svd(fs).rank(), 0u);
  EXPECT_EQ(sum_svd_iterative(fs).rank(), 0u);
}

TEST(SumSvd, AlignedSummandsAddValues) {
  Rng rng(5);
  const FactorSvd f = random_factor_svd(6, 5, 3, rng);
  std::vector<double> g_sigma{2.5, 1.5, 0.25};
  const FactorSvd g(f.left(), g_sigma, f.right());
  const std::array<FactorSvd, 2> fs{f, g};
  const SvdResult s = sum_svd(fs);
  ASSERT_EQ(s.rank(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(s.sigma[i], f.sigma()[i] + g_sigma[i], 1e-10);
  EXPECT_LE(cluster_angle(s.sigma, f.left(), s.left), 1e-8);
  EXPECT_LE(cluster_angle(s.sigma, f.right(), s.right), 1e-8);
}

TEST(SumSvd, MatchesDenseOracle) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto fs = random_summands(rng, 6, 5, {2, 3});
    const Mat h = dense_svd_sum(fs);
    const SvdResult ref = svd_dense(h);
    const SvdResult s = sum_svd(fs);
    ASSERT_EQ(s.rank(), ref.rank());
    EXPECT_LE(value_error(s.sigma, ref.sigma, ref.sigma.front()), 1e-8);
    EXPECT_LE(cluster_angle(ref.sigma, ref.left, s.left), 1e-6);
    EXPECT_LE(cluster_angle(ref.sigma, ref.right, s.right), 1e-6);
    EXPECT_LE(naive_frob_diff(reconstruct(s), h), 1e-8 * (1.0 + naive_frob(h)));
  }
}

TEST(AlignedGrams, IdenticalSummands) {
  Rng rng(6);
  const FactorSvd f = random_factor_svd(5, 4, 2, rng);
  const AlignedGrams g = aligned_grams(f, f);
  ASSERT_EQ(g.side(), 4u);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double want = i % 2 == j % 2 ? f.sigma()[i % 2] : 0.0;
      EXPECT_NEAR(g.gx(i, j), want, 1e-14);
      EXPECT_NEAR(g.gy(i, j), want, 1e-14);
    }
}

TEST(AlignedGrams, OrthogonalSubspacesAreBlockDiagonal) {
  const auto fs = disjoint_pair();
  const AlignedGrams g = aligned_grams(fs[0], fs[1]);
  EXPECT_EQ(g.gx, Mat::from_rows({{3, 0}, {0, 2}}));
  EXPECT_EQ(g.gy, Mat::from_rows({{3, 0}, {0, 2}}));
  const auto pairs = half_vector_iterate(g, 2);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].lambda, 3.0, 1e-12);
  EXPECT_NEAR(pairs[1].lambda, 2.0, 1e-12);
}

TEST(AlignedGrams, MatchDenseEmbeddingGrams) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto fs = random_summands(rng, 7, 6, {3, 2, 2});
    const AlignedGrams g = aligned_grams(fs);
    const ProductEmbedding e = embed_as_product(fs);
    const Mat gx = naive_product(e.xt, true, e.xt, false);
    const Mat gy = naive_product(e.y, false, e.y, true);
    EXPECT_LE(naive_frob_diff(g.gx, gx), 1e-12 * naive_frob(gx));
    EXPECT_LE(naive_frob_diff(g.gy, gy), 1e-12 * naive_frob(gy));
  }
}

TEST(HalfVectorIterate, AlignedSummandsDoubleTheTopValue) {
  const FactorSvd f(Mat::identity(2), {4.0, 1.0}, Mat::identity(2));
  const AlignedGrams g = aligned_grams(f, f);
  const auto pairs = half_vector_iterate(g, 2);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_NEAR(pairs[0].lambda, 8.0, 1e-10);
  EXPECT_NEAR(pairs[1].lambda, 2.0, 1e-10);
}

TEST(HalfVectorIterate, MatchesAugmentedEmbeddingSpectrum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const auto fs = random_summands(rng, 6, 5, {2, 3});
    const AlignedGrams g = aligned_grams(fs);
    const auto pairs = half_vector_iterate(g, g.side());
    const ProductEmbedding e = embed_as_product(fs);
    const SymEig aug = sym_eig_dense(augmented_matrix(e.xt.transposed(), e.y));
    const double top = aug.values.front();
    std::size_t checked = 0;
    for (const auto& p : pairs) {
      if (p.lambda <= 1e-10 * top) continue;
      EXPECT_NEAR(p.lambda, aug.values[checked], 1e-8 * top) << "seed " << seed;
      ++checked;
    }
    EXPECT_EQ(checked, testing::count_above(aug.values, 1e-10));
  }
}

TEST(HalfVectorIterate, ResidualsAreSmall) {
  Rng rng(9);
  const auto fs = random_summands(rng, 8, 7, {4, 3});
  const AlignedGrams g = aligned_grams(fs);
  for (const auto& p : half_vector_iterate(g, 5)) {
    const PairResiduals r = pair_residuals(g, p);
    EXPECT_LE(r.power, 1e-8 * p.lambda * p.lambda);
    EXPECT_LE(r.swap, 1e-8 * p.lambda);
  }
}

TEST(TripletsFromHalves, DisjointSupports) {
  const auto fs = disjoint_pair();
  const auto pairs = half_vector_iterate(aligned_grams(fs), 2);
  const SvdResult s = triplets_from_halves(fs, pairs);
  ASSERT_EQ(s.rank(), 2u);
  EXPECT_NEAR(s.sigma[0], 3.0, 1e-12);
  EXPECT_NEAR(s.sigma[1], 2.0, 1e-12);
  EXPECT_NEAR(std::abs(s.left(0, 0)), 1.0, 1e-12);
  EXPECT_NEAR(std::abs(s.right(1, 1)), 1.0, 1e-12);
}

TEST(TripletsFromHalves, SingleSummandReproducesItsSvd) {
  Rng rng(10);
  const FactorSvd f = random_factor_svd(6, 5, 3, rng);
  const SvdResult s = sum_svd_iterative(std::span(&f, 1));
  ASSERT_EQ(s.rank(), 3u);
  EXPECT_LE(value_error(s.sigma, f.sigma(), f.sigma().front()), 1e-10);
  EXPECT_LE(cluster_angle(f.sigma(), f.left(), s.left), 1e-8);
  EXPECT_LE(cluster_angle(f.sigma(), f.right(), s.right), 1e-8);
}

TEST(TripletsFromHalves, SatisfiesSingularPairEquations) {
  Rng rng(11);
  const auto fs = random_summands(rng, 7, 6, {3, 3});
  const Mat h = dense_svd_sum(fs);
  const SvdResult s = sum_svd_iterative(fs);
  const double smax = s.sigma.front();
  for (std::size_t j = 0; j < s.rank(); ++j) {
    const auto hv = matvec(Trans::kNo, h, s.right.col(j));
    const auto htu = matvec(Trans::kYes, h, s.left.col(j));
    for (std::size_t i = 0; i < hv.size(); ++i) EXPECT_NEAR(hv[i], s.sigma[j] * s.left(i, j), 1e-7 * smax);
    for (std::size_t i = 0; i < htu.size(); ++i) EXPECT_NEAR(htu[i], s.sigma[j] * s.right(i, j), 1e-7 * smax);
  }
}

// The iterative path must never surface a complex scalar in its interface.
template <typename T>
struct is_complex : std::false_type {};
template <typename T>
struct is_complex<std::complex<T>> : std::true_type {};

static_assert(std::is_same_v<decltype(HalfPair::lambda), double>);
static_assert(std::is_same_v<decltype(HalfPair::a)::value_type, double>);
static_assert(std::is_same_v<decltype(HalfPair::b)::value_type, double>);
static_assert(std::is_same_v<std::remove_cvref_t<decltype(std::declval<Mat>()(0, 0))>, double>);
static_assert(std::is_same_v<decltype(SvdResult::sigma)::value_type, double>);
static_assert(!is_complex<decltype(IterationOptions::tol)>::value);
static_assert(std::is_same_v<decltype(&half_vector_iterate),
                             std::vector<HalfPair> (*)(const AlignedGrams&, std::size_t, const IterationOptions&)>);
static_assert(std::is_same_v<decltype(&triplets_from_halves),
                             SvdResult (*)(std::span<const FactorSvd>, std::span<const HalfPair>, double)>);
static_assert(std::is_same_v<decltype(static_cast<AlignedGrams (*)(std::span<const FactorSvd>)>(&aligned_grams)),
                             AlignedGrams (*)(std::span<const FactorSvd>)>);

TEST(IterativePath, InterfaceIsReal) { SUCCEED(); }

// Property sweeps over random instances.

TEST(SumSvdProperties, PathsAgree) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Rng rng(2000 + seed);
    const std::size_t m = 1 + rng.next() % 8;
    const std::size_t n = 1 + rng.next() % 8;
    const std::size_t rf = 1 + rng.next() % std::min<std::size_t>({4, m, n});
    const std::size_t rg = 1 + rng.next() % std::min<std::size_t>({4, m, n});
    const auto fs = random_summands(rng, m, n, {rf, rg});
    const SvdResult a = sum_svd(fs);
    const SvdResult b = sum_svd_iterative(fs);
    const SvdResult ref = svd_dense(dense_svd_sum(fs));
    ASSERT_EQ(a.rank(), ref.rank()) << "seed " << seed;
    ASSERT_EQ(b.rank(), ref.rank()) << "seed " << seed;
    const double top = ref.sigma.front();
    EXPECT_LE(value_error(a.sigma, b.sigma, top), 1e-7) << "seed " << seed;
    EXPECT_LE(value_error(a.sigma, ref.sigma, top), 1e-8) << "seed " << seed;
    EXPECT_LE(value_error(b.sigma, ref.sigma, top), 1e-8) << "seed " << seed;
    EXPECT_LE(cluster_angle(a.sigma, a.left, b.left), 1e-6) << "seed " << seed;
    EXPECT_LE(cluster_angle(a.sigma, a.right, b.right), 1e-6) << "seed " << seed;
  }
}

TEST(SumSvdProperties, ThreeSummandsEqualChainedPairs) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const auto fs = random_summands(rng, 7, 6, {2, 2, 1});
    const SvdResult direct = sum_svd(fs);
    const std::array<FactorSvd, 2> first{fs[0], fs[1]};
    const std::array<FactorSvd, 2> chained{FactorSvd::from(sum_svd(first)), fs[2]};
    const SvdResult iterated = sum_svd(chained);
    const double top = direct.sigma.front();
    EXPECT_LE(value_error(direct.sigma, iterated.sigma, top), 1e-7) << "seed " << seed;
    EXPECT_LE(cluster_angle(direct.sigma, direct.left, iterated.left), 1e-7) << "seed " << seed;
  }
}

TEST(SumSvdProperties, TopValueIsSubadditive) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    const auto fs = random_summands(rng, 6, 6, {2, 3});
    const double bound = fs[0].sigma().front() + fs[1].sigma().front();
    EXPECT_LE(sum_svd(fs).sigma.front(), bound + 1e-9 * bound);
  }
}

TEST(SumSvdProperties, ConvergedPairsSatisfyRecurrence) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    const auto fs = random_summands(rng, 8, 8, {4, 4});
    const AlignedGrams g = aligned_grams(fs);
    for (const auto& p : half_vector_iterate(g, 6)) {
      if (p.lambda <= 0.0) continue;
      const PairResiduals r = pair_residuals(g, p);
      EXPECT_LE(r.power, 1e-8 * p.lambda * p.lambda) << "seed " << seed;
      EXPECT_LE(r.swap, 1e-8 * p.lambda) << "seed " << seed;
    }
  }
}

}  // namespace
}  // namespace sumdecomp
