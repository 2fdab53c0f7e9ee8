#include <string>
#include <tuple>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sumdecomp/dense_eig.hpp"
#include "sumdecomp/error.hpp"
#include "sumdecomp/product_svd.hpp"
#include "sumdecomp/sum_evd.hpp"
#include "sumdecomp/sum_svd.hpp"

namespace py = pybind11;
using namespace sumdecomp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Mat to_mat(const Array& a) {
  if (a.ndim() != 2) throw Error(ErrorCode::kDimensionMismatch, "expected a 2-d array");
  const auto rows = static_cast<std::size_t>(a.shape(0));
  const auto cols = static_cast<std::size_t>(a.shape(1));
  return Mat(rows, cols, std::vector<double>(a.data(), a.data() + rows * cols));
}

std::vector<double> to_vec(const Array& a) {
  if (a.ndim() != 1) throw Error(ErrorCode::kDimensionMismatch, "expected a 1-d array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

Array from_mat(const Mat& m) {
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())};
  return Array(shape, m.entries().data());
}

Array from_vec(const std::vector<double>& v) {
  const std::vector<py::ssize_t> shape{static_cast<py::ssize_t>(v.size())};
  return Array(shape, v.data());
}

py::tuple eig_tuple(const SymEig& e) { return py::make_tuple(from_vec(e.values), from_mat(e.vectors)); }

py::tuple svd_tuple(const SvdResult& s) {
  return py::make_tuple(from_mat(s.left), from_vec(s.sigma), from_mat(s.right));
}

std::vector<PsdFactor> to_factors(const std::vector<std::tuple<Array, Array>>& parts) {
  std::vector<PsdFactor> out;
  for (const auto& [basis, roots] : parts) out.emplace_back(to_mat(basis), to_vec(roots));
  return out;
}

std::vector<FactorSvd> to_summands(const std::vector<std::tuple<Array, Array, Array>>& parts) {
  std::vector<FactorSvd> out;
  for (const auto& [left, sigma, right] : parts) out.emplace_back(to_mat(left), to_vec(sigma), to_mat(right));
  return out;
}

}  // namespace

PYBIND11_MODULE(_sumdecomp, m) {
  m.doc() = "Eigen and singular value decompositions of matrix sums and products from their parts";

  py::register_exception<Error>(m, "SumdecompError", PyExc_ValueError);

  m.attr("DEFAULT_CUTOFF") = kDefaultCutoff;

  m.def(
      "sym_eig_dense", [](const Array& a, double tol) { return eig_tuple(sym_eig_dense(to_mat(a), tol)); },
      py::arg("m"), py::arg("tol") = kDefaultJacobiTol,
      "Dense Jacobi EVD of a symmetric matrix. Returns (values descending, vectors as columns).");
  m.def(
      "svd_dense", [](const Array& a, double cutoff) { return svd_tuple(svd_dense(to_mat(a), cutoff)); },
      py::arg("m"), py::arg("cutoff") = kDefaultCutoff, "Dense one-sided Jacobi SVD. Returns (U, sigma, V).");
  m.def(
      "sum_evd",
      [](const std::vector<std::tuple<Array, Array>>& factors, double cutoff) {
        return eig_tuple(sum_evd(to_factors(factors), cutoff));
      },
      py::arg("factors"), py::arg("cutoff") = kDefaultCutoff,
      "EVD of sum_i P_i diag(d_i)^2 P_i^T from (P_i, d_i) pairs. Returns (values, vectors).");
  m.def(
      "product_svd",
      [](const Array& x, const Array& y, double cutoff) { return svd_tuple(product_svd(to_mat(x), to_mat(y), cutoff)); },
      py::arg("x"), py::arg("y"), py::arg("cutoff") = kDefaultCutoff, "SVD of X^T Y. Returns (U, sigma, V).");
  m.def(
      "sum_svd",
      [](const std::vector<std::tuple<Array, Array, Array>>& summands, double cutoff, const std::string& path) {
        const auto parts = to_summands(summands);
        if (path == "A") return svd_tuple(sum_svd(parts, cutoff));
        if (path == "B") return svd_tuple(sum_svd_iterative(parts, cutoff));
        throw Error(ErrorCode::kParse, "path must be 'A' or 'B'");
      },
      py::arg("summands"), py::arg("cutoff") = kDefaultCutoff, py::arg("path") = "A",
      "SVD of sum_i U_i diag(s_i) V_i^T from (U_i, s_i, V_i) triplets. Path 'A' goes through the product "
      "route, 'B' through the half-vector iteration. Returns (U, sigma, V).");
  m.def("block_dimension", &block_dimension, py::arg("k"), py::arg("m"), py::arg("n"),
        "min(k, m+n) + min(k, m) + min(k, n)");
}
