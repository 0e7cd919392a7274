"""Constructive-interference block-level precoding (CI-BLP).

Thin wrapper over the C++ core: constellations and symbol decompositions,
the dual simplex-QP solvers, the CI-BLP/CI-SLP/ZF/RZF precoders, and a
seeded Monte Carlo SER sweep.
"""

from ._core import (
    CiError,
    ci_blp,
    ci_slp,
    classify_qam,
    constellation,
    decompose,
    kkt_residuals,
    project_partial_simplex,
    rzf,
    ser_sweep,
    solve_simplex_qp,
    zf,
)

__all__ = [
    "CiError",
    "ci_blp",
    "ci_slp",
    "classify_qam",
    "constellation",
    "decompose",
    "kkt_residuals",
    "project_partial_simplex",
    "rzf",
    "ser_sweep",
    "solve_simplex_qp",
    "zf",
]
