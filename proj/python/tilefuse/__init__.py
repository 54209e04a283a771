"""Sparsity-fused chained matrix products D = A @ (B @ C)."""

from tilefuse._core import (
    Csr,
    fused_gemm_spmm,
    fused_ratio,
    fused_spmm_spmm,
    gen_banded,
    gen_random_sparse,
    load_matrix_market,
    schedule_json,
    unfused_gemm_spmm,
    unfused_spmm_spmm,
)

__all__ = [
    "Csr",
    "fused_gemm_spmm",
    "fused_ratio",
    "fused_spmm_spmm",
    "gen_banded",
    "gen_random_sparse",
    "load_matrix_market",
    "schedule_json",
    "unfused_gemm_spmm",
    "unfused_spmm_spmm",
]
