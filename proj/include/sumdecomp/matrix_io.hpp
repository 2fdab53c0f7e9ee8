#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sumdecomp/mat.hpp"
#include "sumdecomp/sum_evd.hpp"
#include "sumdecomp/sum_svd.hpp"

namespace sumdecomp::io {

/// Text matrix format: a `rows cols` header line followed by `rows` lines of
/// `cols` whitespace-separated reals. Values are written with 17 significant
/// digits so a write/read cycle reproduces every double exactly.
Mat read_matrix(std::istream& in);
Mat read_matrix(const std::filesystem::path& path);
void write_matrix(std::ostream& out, const Mat& m);
void write_matrix(const std::filesystem::path& path, const Mat& m);

/// One value per line.
std::vector<double> read_values(const std::filesystem::path& path);
void write_values(const std::filesystem::path& path, std::span<const double> values);

/// A single column (r×1) or row (1×r) matrix file flattened to a list.
std::vector<double> read_vector(const std::filesystem::path& path);

std::string format_real(double x);

/// Manifests tie multi-file objects together:
///   factor <basis-path> <roots-path>
///   svd <left-path> <sigma-path> <right-path>
/// Relative paths resolve against the manifest's directory.
enum class FileKind { kMatrix, kFactorManifest, kSvdManifest };
FileKind detect_kind(const std::filesystem::path& path);

PsdFactor read_factor_manifest(const std::filesystem::path& path);
FactorSvd read_svd_manifest(const std::filesystem::path& path);

/// Writes basis.mat, roots.mat and factor.txt into `dir`; returns the manifest path.
std::filesystem::path write_factor(const std::filesystem::path& dir, const PsdFactor& f);
/// Writes left.mat, sigma.mat, right.mat and svd.txt into `dir`.
std::filesystem::path write_factor_svd(const std::filesystem::path& dir, const FactorSvd& f);

}  // namespace sumdecomp::io
