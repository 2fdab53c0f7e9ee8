#include "sumdecomp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/error.hpp"
#include "sumdecomp/matrix_io.hpp"
#include "sumdecomp/product_svd.hpp"
#include "sumdecomp/random.hpp"
#include "sumdecomp/sum_evd.hpp"
#include "sumdecomp/sum_svd.hpp"

namespace sumdecomp::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNegativeEigenvalue: return kNotPsd;
    case ErrorCode::kConvergenceFailure: return kNoConvergence;
    case ErrorCode::kParse:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kBadCutoff:
    case ErrorCode::kNonFinite:
    case ErrorCode::kNotSquare:
    case ErrorCode::kNotSymmetric: return kBadInput;
    default: return kFailure;
  }
}

struct Common {
  double cutoff = kDefaultCutoff;
  std::string out_dir;
  bool json = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--cutoff", c.cutoff, "Relative cutoff for retained eigen/singular values")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--out", c.out_dir, "Directory for result files");
  sub->add_flag("--json", c.json, "Print the report as JSON");
}

fs::path prepare_out(const std::string& dir) {
  if (dir.empty()) return {};
  fs::create_directories(dir);
  return fs::path(dir);
}

// ---------------------------------------------------------------- evd-sum

RunReport cmd_evd_sum(const std::vector<std::string>& inputs, const Common& c) {
  RunReport report;
  report.command = "evd-sum";
  auto t0 = Clock::now();
  std::vector<PsdFactor> factors;
  Mat dense_sum;
  for (const auto& path : inputs) {
    Mat part;
    switch (io::detect_kind(path)) {
      case io::FileKind::kFactorManifest: {
        factors.push_back(io::read_factor_manifest(path));
        part = factors.back().dense();
        break;
      }
      case io::FileKind::kMatrix: {
        part = io::read_matrix(path);
        factors.push_back(factor_from_dense(part, c.cutoff));
        break;
      }
      case io::FileKind::kSvdManifest:
        throw Error(ErrorCode::kParse, path + ": evd-sum takes matrices or factor manifests");
    }
    dense_sum = dense_sum.empty() ? part : add(dense_sum, part);
  }
  report.wall_times["load"] = seconds_since(t0);

  t0 = Clock::now();
  const SymEig e = sum_evd(factors, c.cutoff);
  report.wall_times["decompose"] = seconds_since(t0);

  const std::size_t n = dense_sum.rows();
  std::size_t side = 0;
  for (const auto& f : factors) {
    report.ranks.push_back(f.rank());
    side += f.rank();
  }
  report.dims["n"] = n;
  report.gram_side_claimed = side;
  report.gram_side_realized = gram_block(factors).gram.rows();
  report.extra["rank"] = static_cast<double>(e.rank());
  const double residual = frob_norm(sub(dense_sum, reconstruct(e)));
  report.residuals["reconstruction"] = residual;
  report.residuals["relative"] = residual / (1.0 + frob_norm(dense_sum));

  if (const fs::path dir = prepare_out(c.out_dir); !dir.empty()) {
    io::write_values(dir / "values.txt", e.values);
    io::write_matrix(dir / "vectors.mat", e.vectors);
    report.outputs = {(dir / "values.txt").string(), (dir / "vectors.mat").string()};
  }
  return report;
}

// ------------------------------------------------------------ svd-product

RunReport cmd_svd_product(const std::string& x_path, const std::string& y_path, const Common& c) {
  RunReport report;
  report.command = "svd-product";
  auto t0 = Clock::now();
  const Mat x = io::read_matrix(x_path);
  const Mat y = io::read_matrix(y_path);
  report.wall_times["load"] = seconds_since(t0);

  t0 = Clock::now();
  const ProductSvdDetail d = product_svd_detail(x, y, c.cutoff);
  report.wall_times["decompose"] = seconds_since(t0);

  const Mat xty = matmul(Trans::kYes, x, Trans::kNo, y);
  report.dims = {{"k", x.rows()}, {"m", x.cols()}, {"n", y.cols()}};
  report.ranks = {d.svd.rank()};
  report.gram_side_claimed = block_dimension(x.rows(), x.cols(), y.cols());
  report.gram_side_realized = d.gram_side;
  report.extra["alpha"] = d.alpha;

  // Shift law: the eigenvalue behind each triplet should sit at alpha plus
  // the triplet's own Rayleigh quotient uᵀ XᵀY v.
  double shift_err = 0.0;
  for (std::size_t j = 0; j < d.svd.rank(); ++j) {
    const auto v = d.svd.right.col(j);
    const double rq = dot(d.svd.left.col(j), matvec(Trans::kNo, xty, v));
    shift_err = std::max(shift_err, std::abs(d.shifted.values[j] - d.alpha - rq));
  }
  report.extra["shift_law_max"] = shift_err;
  const double residual = frob_norm(sub(xty, reconstruct(d.svd)));
  report.residuals["reconstruction"] = residual;
  report.residuals["relative"] = residual / (1.0 + frob_norm(xty));

  if (const fs::path dir = prepare_out(c.out_dir); !dir.empty()) {
    io::write_values(dir / "sigma.txt", d.svd.sigma);
    io::write_matrix(dir / "left.mat", d.svd.left);
    io::write_matrix(dir / "right.mat", d.svd.right);
    report.outputs = {(dir / "sigma.txt").string(), (dir / "left.mat").string(), (dir / "right.mat").string()};
  }
  return report;
}

// ---------------------------------------------------------------- svd-sum

RunReport cmd_svd_sum(const std::vector<std::string>& inputs, const std::string& path_select, std::size_t maxit,
                      const Common& c) {
  RunReport report;
  report.command = "svd-sum";
  auto t0 = Clock::now();
  std::vector<FactorSvd> summands;
  Mat dense_sum;
  for (const auto& path : inputs) {
    Mat part;
    switch (io::detect_kind(path)) {
      case io::FileKind::kSvdManifest:
        summands.push_back(io::read_svd_manifest(path));
        part = summands.back().dense();
        break;
      case io::FileKind::kMatrix:
        part = io::read_matrix(path);
        summands.push_back(FactorSvd::from(svd_dense(part, c.cutoff)));
        break;
      case io::FileKind::kFactorManifest:
        throw Error(ErrorCode::kParse, path + ": svd-sum takes matrices or svd manifests");
    }
    if (!dense_sum.empty() && (dense_sum.rows() != part.rows() || dense_sum.cols() != part.cols())) {
      throw Error(ErrorCode::kDimensionMismatch, path + ": summand shape differs from the first input");
    }
    dense_sum = dense_sum.empty() ? part : add(dense_sum, part);
  }
  report.wall_times["load"] = seconds_since(t0);

  const bool run_a = path_select == "A" || path_select == "both";
  const bool run_b = path_select == "B" || path_select == "both";
  std::size_t side = 0;
  for (const auto& s : summands) {
    report.ranks.push_back(s.rank());
    side += s.rank();
  }
  report.dims = {{"m", dense_sum.rows()}, {"n", dense_sum.cols()}};
  report.gram_side_claimed = block_dimension(side, dense_sum.rows(), dense_sum.cols());

  SvdResult result_a;
  SvdResult result_b;
  if (run_a) {
    t0 = Clock::now();
    const ProductEmbedding emb = embed_as_product(summands);
    const ProductSvdDetail d = product_svd_detail(emb.xt.transposed(), emb.y, c.cutoff);
    report.wall_times["path_a"] = seconds_since(t0);
    result_a = d.svd;
    report.gram_side_realized = d.gram_side;
  }
  if (run_b) {
    t0 = Clock::now();
    IterationOptions iteration;
    iteration.maxit = maxit;
    result_b = sum_svd_iterative(summands, c.cutoff, iteration);
    report.wall_times["path_b"] = seconds_since(t0);
    report.extra["gram_side_path_b"] = static_cast<double>(side);
    if (!run_a) report.gram_side_realized = side;
  }
  if (run_a && run_b) {
    const double scale = result_a.sigma.empty() ? 1.0 : result_a.sigma.front();
    double disc = result_a.rank() == result_b.rank() ? 0.0 : INFINITY;
    for (std::size_t i = 0; i < std::min(result_a.rank(), result_b.rank()); ++i)
      disc = std::max(disc, std::abs(result_a.sigma[i] - result_b.sigma[i]) / scale);
    report.extra["cross_path_discrepancy"] = disc;
  }

  const SvdResult& result = run_a ? result_a : result_b;
  const double residual = frob_norm(sub(dense_sum, reconstruct(result)));
  report.residuals["reconstruction"] = residual;
  report.residuals["relative"] = residual / (1.0 + frob_norm(dense_sum));
  report.extra["rank"] = static_cast<double>(result.rank());

  if (const fs::path dir = prepare_out(c.out_dir); !dir.empty()) {
    io::write_values(dir / "sigma.txt", result.sigma);
    io::write_matrix(dir / "left.mat", result.left);
    io::write_matrix(dir / "right.mat", result.right);
    report.outputs = {(dir / "sigma.txt").string(), (dir / "left.mat").string(), (dir / "right.mat").string()};
  }
  return report;
}

// -------------------------------------------------------------------- gen

struct GenArgs {
  std::string kind;
  std::size_t n = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t rank = 0;
  std::uint64_t seed = 1;
};

RunReport cmd_gen(const GenArgs& g, const Common& c) {
  RunReport report;
  report.command = "gen";
  report.seed = g.seed;
  if (c.out_dir.empty()) throw Error(ErrorCode::kParse, "gen needs --out");
  const fs::path dir = prepare_out(c.out_dir);
  Rng rng(g.seed);
  if (g.kind == "psd-factor") {
    if (g.n == 0 || g.rank > g.n) throw Error(ErrorCode::kDimensionMismatch, "need n >= 1 and rank <= n");
    report.dims["n"] = g.n;
    report.ranks = {g.rank};
    report.outputs = {io::write_factor(dir, random_psd_factor(g.n, g.rank, rng)).string()};
  } else if (g.kind == "matrix") {
    if (g.rows == 0 || g.cols == 0) throw Error(ErrorCode::kDimensionMismatch, "need rows >= 1 and cols >= 1");
    report.dims = {{"rows", g.rows}, {"cols", g.cols}};
    io::write_matrix(dir / "matrix.mat", gaussian_matrix(g.rows, g.cols, rng));
    report.outputs = {(dir / "matrix.mat").string()};
  } else {
    if (g.rows == 0 || g.cols == 0 || g.rank > std::min(g.rows, g.cols)) {
      throw Error(ErrorCode::kDimensionMismatch, "need rows, cols >= 1 and rank <= min(rows, cols)");
    }
    report.dims = {{"rows", g.rows}, {"cols", g.cols}};
    report.ranks = {g.rank};
    report.outputs = {io::write_factor_svd(dir, random_factor_svd(g.rows, g.cols, g.rank, rng)).string()};
  }
  return report;
}

// ------------------------------------------------------------------ bench

int cmd_bench(const std::string& scenario, const std::vector<std::size_t>& ns, const std::vector<std::size_t>& ranks,
              std::size_t seed_count, const Common& c, std::ostream& out) {
  for (std::size_t n : ns)
    for (std::size_t r : ranks)
      if (n == 0 || r == 0 || r > n) throw Error(ErrorCode::kDimensionMismatch, "need 1 <= rank <= n");
  if (seed_count == 0) throw Error(ErrorCode::kParse, "--seeds must be at least 1");
  std::vector<std::uint64_t> seeds(seed_count);
  for (std::size_t i = 0; i < seed_count; ++i) seeds[i] = i + 1;
  const auto kind = scenario == "sum-evd" ? BenchScenario::kSumEvd : BenchScenario::kSvdSum;
  const auto rows = run_bench(kind, ns, ranks, seeds);

  if (const fs::path dir = prepare_out(c.out_dir); !dir.empty()) {
    std::ofstream csv(dir / "bench.csv", std::ios::binary);
    write_bench_csv(csv, rows);
    std::ofstream md(dir / "bench_summary.md", std::ios::binary);
    write_bench_summary(md, rows);
  }
  if (c.json) {
    json j;
    j["command"] = "bench";
    j["scenario"] = scenario;
    j["rows"] = json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.n},
                           {"rank", r.rank},
                           {"seed", r.seed},
                           {"t_structured", r.t_structured},
                           {"t_dense_oracle", r.t_dense_oracle},
                           {"speedup", r.speedup},
                           {"max_value_relerr", r.max_value_relerr},
                           {"gram_side", r.gram_side}});
    }
    out << j.dump(2) << '\n';
  } else {
    write_bench_csv(out, rows);
  }
  return kOk;
}

}  // namespace

void RunReport::print_text(std::ostream& out) const {
  out << "command: " << command << '\n';
  for (const auto& [k, v] : dims) out << "dim." << k << ": " << v << '\n';
  if (!ranks.empty()) {
    out << "ranks:";
    for (auto r : ranks) out << ' ' << r;
    out << '\n';
  }
  if (seed) out << "seed: " << *seed << '\n';
  if (gram_side_claimed) out << "gram_side_claimed: " << *gram_side_claimed << '\n';
  if (gram_side_realized) out << "gram_side_realized: " << *gram_side_realized << '\n';
  for (const auto& [k, v] : extra) out << k << ": " << io::format_real(v) << '\n';
  for (const auto& [k, v] : residuals) out << "residual." << k << ": " << io::format_real(v) << '\n';
  for (const auto& [k, v] : wall_times) out << "time." << k << ": " << io::format_real(v) << '\n';
  for (const auto& o : outputs) out << "wrote: " << o << '\n';
}

std::string RunReport::to_json() const {
  json j;
  j["command"] = command;
  j["dims"] = json::object();
  for (const auto& [k, v] : dims) j["dims"][k] = v;
  j["ranks"] = ranks;
  j["residuals"] = json::object();
  for (const auto& [k, v] : residuals) j["residuals"][k] = v;
  j["gram_side_claimed"] = gram_side_claimed ? json(*gram_side_claimed) : json(nullptr);
  j["gram_side_realized"] = gram_side_realized ? json(*gram_side_realized) : json(nullptr);
  j["wall_times"] = json::object();
  for (const auto& [k, v] : wall_times) j["wall_times"][k] = v;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  for (const auto& [k, v] : extra) j[k] = std::isfinite(v) ? json(v) : json(nullptr);
  j["outputs"] = outputs;
  return j.dump(2);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigen/singular decompositions of matrix sums and products from their parts", "sumdecomp"};
  app.require_subcommand(1);

  Common evd_c;
  std::vector<std::string> evd_inputs;
  auto* evd = app.add_subcommand("evd-sum", "Eigendecomposition of a sum of PSD matrices");
  evd->add_option("inputs", evd_inputs, "Matrix files or factor manifests")->required();
  add_common(evd, evd_c);

  Common prod_c;
  std::string x_path;
  std::string y_path;
  auto* prod = app.add_subcommand("svd-product", "SVD of XᵀY");
  prod->add_option("X", x_path, "k×m matrix file")->required();
  prod->add_option("Y", y_path, "k×n matrix file")->required();
  add_common(prod, prod_c);

  Common sum_c;
  std::vector<std::string> sum_inputs;
  std::string path_select = "A";
  auto* ssum = app.add_subcommand("svd-sum", "SVD of a sum from the summands' SVDs");
  ssum->add_option("inputs", sum_inputs, "Matrix files or svd manifests")->required();
  ssum->add_option("--path", path_select, "A: product route, B: half-vector iteration, both: run and compare")
      ->check(CLI::IsMember({"A", "B", "both"}))
      ->capture_default_str();
  std::size_t maxit = IterationOptions{}.maxit;
  ssum->add_option("--maxit", maxit, "Step limit for the half-vector iteration (path B)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  add_common(ssum, sum_c);

  Common gen_c;
  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate seeded random instances");
  gen->add_option("kind", gen_args.kind, "psd-factor | matrix | svd-triplet")
      ->required()
      ->check(CLI::IsMember({"psd-factor", "matrix", "svd-triplet"}));
  gen->add_option("--n", gen_args.n, "Dimension of a psd-factor");
  gen->add_option("--rows", gen_args.rows, "Rows of a matrix or svd-triplet");
  gen->add_option("--cols", gen_args.cols, "Columns of a matrix or svd-triplet");
  gen->add_option("--rank", gen_args.rank, "Rank of a psd-factor or svd-triplet");
  gen->add_option("--seed", gen_args.seed, "Generator seed")->capture_default_str();
  add_common(gen, gen_c);

  Common bench_c;
  std::string scenario;
  std::vector<std::size_t> bench_ns{50, 100, 200};
  std::vector<std::size_t> bench_ranks{4};
  std::size_t seed_count = 3;
  auto* bench = app.add_subcommand("bench", "Time structured paths against the dense oracle");
  bench->add_option("scenario", scenario, "sum-evd | svd-sum")
      ->required()
      ->check(CLI::IsMember({"sum-evd", "svd-sum"}));
  bench->add_option("--n", bench_ns, "Comma-separated sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--rank", bench_ranks, "Comma-separated summand ranks")->delimiter(',')->capture_default_str();
  bench->add_option("--seeds", seed_count, "Number of seeds (1..N) per configuration")->capture_default_str();
  add_common(bench, bench_c);

  std::vector<std::string> argv_store{"sumdecomp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    RunReport report;
    const Common* common = nullptr;
    if (*evd) {
      report = cmd_evd_sum(evd_inputs, evd_c);
      common = &evd_c;
    } else if (*prod) {
      report = cmd_svd_product(x_path, y_path, prod_c);
      common = &prod_c;
    } else if (*ssum) {
      report = cmd_svd_sum(sum_inputs, path_select, maxit, sum_c);
      common = &sum_c;
    } else if (*gen) {
      report = cmd_gen(gen_args, gen_c);
      common = &gen_c;
    } else {
      return cmd_bench(scenario, bench_ns, bench_ranks, seed_count, bench_c, out);
    }
    if (common->json) {
      out << report.to_json() << '\n';
    } else {
      report.print_text(out);
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace sumdecomp::cli
