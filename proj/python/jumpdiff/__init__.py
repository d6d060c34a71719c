"""Numerics for Cauchy problems driven by time-inhomogeneous jump processes."""

from ._core import (
    bernstein_ids,
    bernstein_value,
    build_filtration,
    check_symbol,
    hormander,
    kernel,
    mc_solution,
    phi_ids,
    registry_ids,
    run_command,
    scaling_factor,
    solve,
    symbol_value,
    verify_cf,
    verify_fs_hl,
)

__all__ = [
    "bernstein_ids",
    "bernstein_value",
    "build_filtration",
    "check_symbol",
    "hormander",
    "kernel",
    "mc_solution",
    "phi_ids",
    "registry_ids",
    "run_command",
    "scaling_factor",
    "solve",
    "symbol_value",
    "verify_cf",
    "verify_fs_hl",
]
