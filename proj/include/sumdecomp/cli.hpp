#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sumdecomp::cli {

/// Documented process exit statuses.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kBadInput = 2,       // usage, parse, or dimension errors
  kNotPsd = 3,         // an evd-sum input has a negative eigenvalue
  kNoConvergence = 4,  // an iterative solver gave up
};

/// What a subcommand did, printed as text or JSON.
struct RunReport {
  std::string command;
  std::map<std::string, std::size_t> dims;
  std::vector<std::size_t> ranks;
  std::map<std::string, double> residuals;
  std::optional<std::size_t> gram_side_claimed;
  std::optional<std::size_t> gram_side_realized;
  std::map<std::string, double> wall_times;
  std::optional<std::uint64_t> seed;
  /// Command-specific scalars (alpha, shift-law check, cross-path discrepancy).
  std::map<std::string, double> extra;
  std::vector<std::string> outputs;

  void print_text(std::ostream& out) const;
  std::string to_json() const;
};

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct BenchRow {
  std::size_t n = 0;
  std::size_t rank = 0;
  std::uint64_t seed = 0;
  double t_structured = 0.0;
  double t_dense_oracle = 0.0;
  double speedup = 0.0;
  double max_value_relerr = 0.0;
  std::size_t gram_side = 0;
};

enum class BenchScenario { kSumEvd, kSvdSum };

/// One trial: two random rank-`rank` summands of size n, timed through the
/// structured path and the dense oracle.
BenchRow bench_trial(BenchScenario scenario, std::size_t n, std::size_t rank, std::uint64_t seed);

/// Trials for every (n, rank, seed), sorted by (n, rank, seed).
std::vector<BenchRow> run_bench(BenchScenario scenario, const std::vector<std::size_t>& ns,
                                const std::vector<std::size_t>& ranks, const std::vector<std::uint64_t>& seeds);

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);
/// Median speedup per (n, rank) as a markdown table.
void write_bench_summary(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace sumdecomp::cli
