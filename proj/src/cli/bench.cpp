#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "sumdecomp/cli.hpp"
#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/matrix_io.hpp"
#include "sumdecomp/random.hpp"
#include "sumdecomp/sum_evd.hpp"
#include "sumdecomp/sum_svd.hpp"

namespace sumdecomp::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double max_relerr(const std::vector<double>& structured, const std::vector<double>& dense) {
  const double scale = dense.empty() ? 1.0 : std::max(std::abs(dense.front()), 1e-300);
  double err = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const double s = i < structured.size() ? structured[i] : 0.0;
    err = std::max(err, std::abs(s - dense[i]) / scale);
  }
  return err;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

BenchRow bench_trial(BenchScenario scenario, std::size_t n, std::size_t rank, std::uint64_t seed) {
  BenchRow row;
  row.n = n;
  row.rank = rank;
  row.seed = seed;
  Rng rng(seed);
  if (scenario == BenchScenario::kSumEvd) {
    const std::array<PsdFactor, 2> factors{random_psd_factor(n, rank, rng), random_psd_factor(n, rank, rng)};
    auto t0 = Clock::now();
    const SymEig fast = sum_evd(factors);
    row.t_structured = seconds_since(t0);
    row.gram_side = gram_block(factors).gram.rows();

    t0 = Clock::now();
    const Mat c = add(factors[0].dense(), factors[1].dense());
    // Values only: the oracle side is timed without eigenvector accumulation.
    JacobiOptions values_only;
    values_only.want_vectors = false;
    const SymEig slow = sym_eig_dense(c, values_only);
    row.t_dense_oracle = seconds_since(t0);
    std::vector<double> top(slow.values.begin(), slow.values.begin() + static_cast<std::ptrdiff_t>(fast.rank()));
    row.max_value_relerr = max_relerr(fast.values, top);
  } else {
    const std::array<FactorSvd, 2> summands{random_factor_svd(n, n, rank, rng), random_factor_svd(n, n, rank, rng)};
    auto t0 = Clock::now();
    const SvdResult fast = sum_svd_iterative(summands);
    row.t_structured = seconds_since(t0);
    row.gram_side = aligned_grams(summands).side();

    t0 = Clock::now();
    const SvdResult slow = svd_dense(add(summands[0].dense(), summands[1].dense()));
    row.t_dense_oracle = seconds_since(t0);
    row.max_value_relerr = max_relerr(fast.sigma, slow.sigma);
  }
  row.speedup = row.t_structured > 0.0 ? row.t_dense_oracle / row.t_structured : 0.0;
  return row;
}

std::vector<BenchRow> run_bench(BenchScenario scenario, const std::vector<std::size_t>& ns,
                                const std::vector<std::size_t>& ranks, const std::vector<std::uint64_t>& seeds) {
  std::vector<BenchRow> rows;
  for (std::size_t n : ns)
    for (std::size_t r : ranks)
      for (std::uint64_t s : seeds) rows.push_back(bench_trial(scenario, n, r, s));
  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.n, a.rank, a.seed) < std::tie(b.n, b.rank, b.seed);
  });
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "n,rank,seed,t_structured,t_dense_oracle,speedup,max_value_relerr,gram_side\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.rank << ',' << r.seed << ',' << io::format_real(r.t_structured) << ','
        << io::format_real(r.t_dense_oracle) << ',' << io::format_real(r.speedup) << ','
        << io::format_real(r.max_value_relerr) << ',' << r.gram_side << '\n';
  }
}

void write_bench_summary(std::ostream& out, const std::vector<BenchRow>& rows) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<const BenchRow*>> groups;
  for (const auto& r : rows) groups[{r.n, r.rank}].push_back(&r);
  out << "| n | rank | trials | gram side | median t_structured (s) | median t_dense (s) | median speedup |\n";
  out << "|---|---|---|---|---|---|---|\n";
  for (const auto& [key, members] : groups) {
    std::vector<double> ts;
    std::vector<double> td;
    std::vector<double> sp;
    for (const auto* r : members) {
      ts.push_back(r->t_structured);
      td.push_back(r->t_dense_oracle);
      sp.push_back(r->speedup);
    }
    out << "| " << key.first << " | " << key.second << " | " << members.size() << " | " << members.front()->gram_side
        << " | " << io::format_real(median(ts)) << " | " << io::format_real(median(td)) << " | "
        << io::format_real(median(sp)) << " |\n";
  }
}

}  // namespace sumdecomp::cli
