"""ExperimentReport records, the volume table, and schema access."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from importlib import resources
from typing import Iterable, Sequence

from .geometry import (
    DEFAULT_SEED,
    mc_nv_fraction,
    mc_two_level_fraction,
    nv_expected_fraction,
    two_level_expected_fraction,
)
from .lattice import Basis

DECIMAL_PLACES = 12


def rational_str(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def decimal_str(x, places: int = DECIMAL_PLACES) -> str:
    """Round-half-away decimal rendering of a rational, exact to ``places``."""
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    scaled = abs(x) * 10**places
    q = int(scaled + Fraction(1, 2))
    whole, frac = divmod(q, 10**places)
    if q == 0:
        sign = ""
    return f"{sign}{whole}.{frac:0{places}d}"


def basis_hash(B: Basis) -> str:
    return hashlib.sha256(B.to_text().encode()).hexdigest()


def load_schema() -> dict:
    text = resources.files("infsieve").joinpath("schema/experiment_report.schema.json").read_text()
    return json.loads(text)


def _jsonable(v):
    if isinstance(v, Fraction):
        return rational_str(v)
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def make_report(algorithm: str, params: dict, B: Basis, vector: Sequence | None, seed: int,
                oracle_norm=None, success=None, iterations: int = 0,
                centre_counts: Iterable[int] = (), wall_time_ms: int = 0, **extra) -> dict:
    from .lattice import norm

    out_norm = norm(vector) if vector is not None else None
    rep = {
        "algorithm": algorithm,
        "params": _jsonable(params),
        "basis_hash": basis_hash(B),
        "n": B.n,
        "output_vector": None if vector is None else [rational_str(x) for x in vector],
        "output_norm": None if out_norm is None else rational_str(out_norm),
        "output_norm_decimal": None if out_norm is None else decimal_str(out_norm),
        "oracle_norm": None if oracle_norm is None else rational_str(oracle_norm),
        "oracle_norm_decimal": None if oracle_norm is None else decimal_str(oracle_norm),
        "success": success,
        "iterations": int(iterations),
        "centre_counts": [int(c) for c in centre_counts],
        "wall_time_ms": int(wall_time_ms),
        "seed": int(seed),
    }
    rep.update(_jsonable(extra))
    return rep


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True)


# --------------------------------------------------------------------------
# volume table

def emit_volume_table(n_list, gamma_list, samples: int = 1_000_000, seed: int = DEFAULT_SEED,
                      two_level: Sequence[tuple] = ()) -> str:
    """CSV of closed form vs Monte Carlo for the corona-overlap lemmas."""
    if samples < 100_000:
        raise ValueError("samples must be at least 1e5")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "gamma", "gamma1", "gamma2", "closed_form", "mc_estimate", "std_err", "rel_err"])
    for n in n_list:
        for g in gamma_list:
            cf = nv_expected_fraction(g, n)
            mc = mc_nv_fraction(g, n, samples, seed)
            w.writerow([n, g, "", "", f"{cf:.8g}", f"{mc.estimate:.8g}", f"{mc.std_err:.3g}",
                        f"{abs(mc.estimate - cf) / cf:.4g}"])
        for g1, g2 in two_level:
            cf = two_level_expected_fraction(g1, g2, n)
            mc = mc_two_level_fraction(g1, g2, n, samples, seed)
            w.writerow([n, "", g1, g2, f"{cf:.8g}", f"{mc.estimate:.8g}", f"{mc.std_err:.3g}",
                        f"{abs(mc.estimate - cf) / cf:.4g}"])
    return buf.getvalue()
