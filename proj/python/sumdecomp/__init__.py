"""Eigen and singular value decompositions of matrix sums and products,
computed from the decompositions of their parts."""

from ._sumdecomp import (
    DEFAULT_CUTOFF,
    SumdecompError,
    block_dimension,
    product_svd,
    sum_evd,
    sum_svd,
    svd_dense,
    sym_eig_dense,
)

__all__ = [
    "DEFAULT_CUTOFF",
    "SumdecompError",
    "block_dimension",
    "product_svd",
    "sum_evd",
    "sum_svd",
    "svd_dense",
    "sym_eig_dense",
]
