"""Provable and heuristic lattice sieves for SVP and CVP in the ℓ∞ norm."""

from .errors import NotFound, OracleRefusal
from .lattice import (
    Basis,
    Lambda1Estimate,
    estimate_lambda1,
    is_lattice_member,
    lll_reduce,
    mod_parallelepiped,
    norm,
    parse_basis,
    scale_to_window,
)
from .oracle import brute_cvp, brute_svp
from .provable import (
    SieveConfig,
    approx_cvp,
    approx_svp,
    approx_svp_auto,
    birthday_exact_svp,
    embed_cvp_basis,
    exact_svp,
    exact_svp_auto,
    grid_index,
    grid_sieve,
)
from .heuristic import HeuristicConfig, lattice_sieve, nv_svp, nv_svp_two_level, two_level_sieve

__version__ = "0.1.0"
