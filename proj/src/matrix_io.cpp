#include "sumdecomp/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sumdecomp/error.hpp"

namespace sumdecomp::io {

namespace fs = std::filesystem;

namespace {

double parse_real(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw Error(ErrorCode::kParse, "not a real number: '" + token + "'");
  if (!std::isfinite(v)) throw Error(ErrorCode::kNonFinite, "non-finite value '" + token + "'");
  return v;
}

std::size_t parse_count(const std::string& token) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::kParse, "not a count: '" + token + "'");
  }
  return v;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParse, "cannot write " + path.string());
  return out;
}

fs::path resolve(const fs::path& manifest, const std::string& entry) {
  fs::path p(entry);
  return p.is_absolute() ? p : manifest.parent_path() / p;
}

std::vector<std::string> manifest_tokens(const fs::path& path) {
  auto in = open_in(path);
  std::vector<std::string> tokens;
  std::string t;
  while (in >> t) tokens.push_back(t);
  return tokens;
}

}  // namespace

std::string format_real(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

Mat read_matrix(std::istream& in) {
  std::string r_tok;
  std::string c_tok;
  if (!(in >> r_tok >> c_tok)) throw Error(ErrorCode::kParse, "missing 'rows cols' header");
  const std::size_t rows = parse_count(r_tok);
  const std::size_t cols = parse_count(c_tok);
  std::vector<double> data;
  data.reserve(rows * cols);
  std::string tok;
  for (std::size_t i = 0; i < rows * cols; ++i) {
    if (!(in >> tok)) {
      throw Error(ErrorCode::kParse, "expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(i));
    }
    data.push_back(parse_real(tok));
  }
  if (in >> tok) throw Error(ErrorCode::kParse, "trailing content after matrix entries: '" + tok + "'");
  return Mat(rows, cols, std::move(data));
}

Mat read_matrix(const fs::path& path) {
  auto in = open_in(path);
  try {
    return read_matrix(in);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_matrix(std::ostream& out, const Mat& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << format_real(m(i, j));
    }
    out << '\n';
  }
}

void write_matrix(const fs::path& path, const Mat& m) {
  auto out = open_out(path);
  write_matrix(out, m);
}

std::vector<double> read_values(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) values.push_back(parse_real(tok));
  return values;
}

void write_values(const fs::path& path, std::span<const double> values) {
  auto out = open_out(path);
  for (double v : values) out << format_real(v) << '\n';
}

std::vector<double> read_vector(const fs::path& path) {
  const Mat m = read_matrix(path);
  if (m.rows() != 1 && m.cols() != 1 && !m.empty()) {
    throw Error(ErrorCode::kParse, path.string() + ": expected a single row or column");
  }
  return {m.entries().begin(), m.entries().end()};
}

FileKind detect_kind(const fs::path& path) {
  auto in = open_in(path);
  std::string first;
  in >> first;
  if (first == "factor") return FileKind::kFactorManifest;
  if (first == "svd") return FileKind::kSvdManifest;
  return FileKind::kMatrix;
}

PsdFactor read_factor_manifest(const fs::path& path) {
  const auto t = manifest_tokens(path);
  if (t.size() != 3 || t[0] != "factor") {
    throw Error(ErrorCode::kParse, path.string() + ": expected 'factor <basis> <roots>'");
  }
  return PsdFactor(read_matrix(resolve(path, t[1])), read_vector(resolve(path, t[2])));
}

FactorSvd read_svd_manifest(const fs::path& path) {
  const auto t = manifest_tokens(path);
  if (t.size() != 4 || t[0] != "svd") {
    throw Error(ErrorCode::kParse, path.string() + ": expected 'svd <left> <sigma> <right>'");
  }
  return FactorSvd(read_matrix(resolve(path, t[1])), read_vector(resolve(path, t[2])),
                   read_matrix(resolve(path, t[3])));
}

fs::path write_factor(const fs::path& dir, const PsdFactor& f) {
  fs::create_directories(dir);
  write_matrix(dir / "basis.mat", f.basis());
  write_matrix(dir / "roots.mat", Mat::column(f.roots()));
  const fs::path manifest = dir / "factor.txt";
  auto out = open_out(manifest);
  out << "factor basis.mat roots.mat\n";
  return manifest;
}

fs::path write_factor_svd(const fs::path& dir, const FactorSvd& f) {
  fs::create_directories(dir);
  write_matrix(dir / "left.mat", f.left());
  write_matrix(dir / "sigma.mat", Mat::column(f.sigma()));
  write_matrix(dir / "right.mat", f.right());
  const fs::path manifest = dir / "svd.txt";
  auto out = open_out(manifest);
  out << "svd left.mat sigma.mat right.mat\n";
  return manifest;
}

}  // namespace sumdecomp::io
