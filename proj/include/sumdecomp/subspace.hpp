#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sumdecomp/mat.hpp"

namespace sumdecomp {

inline constexpr double kClusterGap = 1e-6;

/// Half-open index range [begin, end) into a sorted value list.
struct Cluster {
  std::size_t begin;
  std::size_t end;
  std::size_t size() const noexcept { return end - begin; }
};

/// Groups a non-increasing list into runs whose consecutive gaps are at most
/// rel_gap * scale. scale <= 0 means "use max |value|".
std::vector<Cluster> clusters_by_gap(std::span<const double> values, double rel_gap = kClusterGap,
                                     double scale = 0.0);

/// Largest principal angle (radians) between the column spans of a and b,
/// both with orthonormal columns. Computed from the sine, ||(I - a aᵀ) b||_2,
/// so tiny angles are resolved to roundoff. Spans of different dimension are
/// pi/2 apart.
double max_principal_angle(const Mat& a, const Mat& b);

/// Symmetric (Löwdin) orthonormalization v (vᵀv)^(-1/2): the orthonormal
/// matrix closest to v. Columns must be linearly independent.
Mat lowdin_orthonormalize(const Mat& v);

/// Orthonormal basis of the complement of span(v) in R^rows (v orthonormal).
Mat orthonormal_complement(const Mat& v);

}  // namespace sumdecomp
