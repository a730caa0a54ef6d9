"""Heuristic ℓ∞ sieves: the Nguyen–Vidick loop and its two-level variant.

The sieve passes decide in double precision and record what to subtract from
what; the lattice vectors themselves are tracked as integer coefficient
vectors, so zero detection and the returned vector are exact.  The
``lattice_sieve``/``two_level_sieve`` entry points accept exact vectors and
make every decision in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import NotFound
from .lattice import Basis, Vector, as_vector, gram_schmidt, lll_reduce, norm
from .samplers import KleinParams, KleinSampler, klein_parameter, make_rng

GAMMA = 0.97
GAMMA1 = 1.267952
GAMMA2 = 0.97


def default_sample_count(n: int) -> int:
    """⌈(4/3)ⁿ·n²⌉."""
    return math.ceil((4 / 3) ** n * n * n)


def _check_single(gamma: float):
    if not 0.5 < gamma < 1:
        raise ValueError("gamma must lie in (1/2, 1)")


def _check_two(g1: float, g2: float):
    if not (0.5 < g2 < 1 < g1 < math.sqrt(2) * g2):
        raise ValueError("need 1/2 < gamma2 < 1 < gamma1 < sqrt(2)*gamma2")


@dataclass
class HeuristicConfig:
    gamma: float = GAMMA
    gamma1: float = GAMMA1
    gamma2: float = GAMMA2
    N: int | None = None
    seed: int = 0
    max_iterations: int | None = None


@dataclass
class PassStats:
    centres: int = 0
    comparisons: int = 0
    sieved: int = 0  # vectors that went through the centre scan
    inner_sizes: list = field(default_factory=list)


# --------------------------------------------------------------------------
# exact single passes (small inputs, reference semantics)

def _dist(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


def lattice_sieve(S: Sequence[Sequence], gamma) -> list[Vector]:
    """One NV pass with exact decisions; centres are scanned in insertion order."""
    g = Fraction(repr(gamma)) if isinstance(gamma, float) else Fraction(gamma)
    if not Fraction(1, 2) < g < 1:
        raise ValueError("gamma must lie in (1/2, 1)")
    S = [as_vector(v) for v in S]
    if not S:
        return []
    R = max(norm(v) for v in S)
    lim = g * R
    centres, out = [], []
    for v in S:
        if norm(v) <= lim:
            out.append(v)
            continue
        c = next((c for c in centres if _dist(v, c) <= lim), None)
        if c is None:
            centres.append(v)
        else:
            out.append(tuple(a - b for a, b in zip(v, c)))
    return out


def two_level_sieve(S: Sequence[Sequence], gamma1, gamma2) -> list[Vector]:
    """One two-level pass with exact decisions."""
    g1 = Fraction(repr(gamma1)) if isinstance(gamma1, float) else Fraction(gamma1)
    g2 = Fraction(repr(gamma2)) if isinstance(gamma2, float) else Fraction(gamma2)
    _check_two(float(g1), float(g2))
    S = [as_vector(v) for v in S]
    if not S:
        return []
    R = max(norm(v) for v in S)
    lim1, lim2 = g1 * R, g2 * R
    outer: list = []  # (centre, inner centres)
    out = []
    for v in S:
        if norm(v) <= lim2:
            out.append(v)
            continue
        hit = next((entry for entry in outer if _dist(v, entry[0]) <= lim1), None)
        if hit is None:
            outer.append((v, [v]))
            continue
        c2 = next((c for c in hit[1] if _dist(v, c) <= lim2), None)
        if c2 is None:
            hit[1].append(v)
        else:
            out.append(tuple(a - b for a, b in zip(v, c2)))
    return out


# --------------------------------------------------------------------------
# float planners used by the drivers

def _plan_single(X: np.ndarray, gamma: float):
    """Returns (src, sub, stats): output k is row src[k] minus row sub[k] (sub −1: none)."""
    m, n = X.shape
    norms = np.abs(X).max(axis=1)
    R = norms.max()
    lim = gamma * R
    src, sub = [], []
    cent = np.empty((m, n))
    cidx = np.empty(m, dtype=np.int64)
    nc = 0
    st = PassStats()
    for i in range(m):
        if norms[i] <= lim:
            src.append(i)
            sub.append(-1)
            continue
        st.sieved += 1
        if nc:
            hits = np.flatnonzero(np.abs(cent[:nc] - X[i]).max(axis=1) <= lim)
        else:
            hits = ()
        if len(hits):
            st.comparisons += int(hits[0]) + 1
            src.append(i)
            sub.append(int(cidx[hits[0]]))
        else:
            st.comparisons += nc
            cent[nc] = X[i]
            cidx[nc] = i
            nc += 1
    st.centres = nc
    return np.array(src, dtype=np.int64), np.array(sub, dtype=np.int64), st


def _plan_two_level(X: np.ndarray, g1: float, g2: float):
    m, n = X.shape
    norms = np.abs(X).max(axis=1)
    R = norms.max()
    lim1, lim2 = g1 * R, g2 * R
    src, sub = [], []
    outer = np.empty((m, n))
    nout = 0
    inner_rows: list[list[int]] = []
    inner_vecs: list[list[np.ndarray]] = []
    st = PassStats()
    for i in range(m):
        if norms[i] <= lim2:
            src.append(i)
            sub.append(-1)
            continue
        st.sieved += 1
        hits = np.flatnonzero(np.abs(outer[:nout] - X[i]).max(axis=1) <= lim1) if nout else ()
        if not len(hits):
            st.comparisons += nout
            outer[nout] = X[i]
            nout += 1
            inner_rows.append([i])
            inner_vecs.append([X[i]])
            continue
        h = int(hits[0])
        st.comparisons += h + 1
        block = np.array(inner_vecs[h])
        ih = np.flatnonzero(np.abs(block - X[i]).max(axis=1) <= lim2)
        if len(ih):
            st.comparisons += int(ih[0]) + 1
            src.append(i)
            sub.append(inner_rows[h][int(ih[0])])
        else:
            st.comparisons += len(block)
            inner_rows[h].append(i)
            inner_vecs[h].append(X[i])
    st.centres = nout + sum(len(r) - 1 for r in inner_rows)
    st.inner_sizes = [len(r) for r in inner_rows]
    return np.array(src, dtype=np.int64), np.array(sub, dtype=np.int64), st


def sieve_coefficients(Z: np.ndarray, cols: np.ndarray, gamma=None, two_level=None):
    """One float-decided pass over coefficient rows; returns (Z', stats)."""
    X = Z @ cols
    if two_level is None:
        src, sub, st = _plan_single(X, gamma)
    else:
        src, sub, st = _plan_two_level(X, *two_level)
    Zout = Z[src].copy()
    has = sub >= 0
    Zout[has] -= Z[sub[has]]
    return Zout, st


# --------------------------------------------------------------------------
# drivers

@dataclass
class NvRun:
    vector: Vector | None
    norm: Fraction | None
    iterations: int
    trace: list = field(default_factory=list)
    initial_size: int = 0
    capped: bool = False


def _iteration_cap(R0: float, reduced: Basis, gamma: float) -> int:
    _, _, Bn = gram_schmidt(reduced)
    lam_lo = math.sqrt(float(min(Bn)) / reduced.n)
    ratio = max(R0 / (0.1 * lam_lo), 1.0)
    return math.ceil(math.log(ratio) / math.log(1 / gamma)) + reduced.n


def _run(B: Basis, cfg: HeuristicConfig, two_level: bool) -> NvRun:
    n = B.n
    if two_level:
        _check_two(cfg.gamma1, cfg.gamma2)
        shrink = cfg.gamma2
    else:
        _check_single(cfg.gamma)
        shrink = cfg.gamma
    N = cfg.N if cfg.N is not None else default_sample_count(n)
    if N < 1:
        raise ValueError("N must be positive")
    rng = make_rng(cfg.seed)
    reduced = lll_reduce(B)
    sampler = KleinSampler(KleinParams(klein_parameter(reduced), reduced))
    Z = np.array([sampler.sample_coeffs(rng) for _ in range(N)], dtype=np.int64)
    cols = np.array([[float(x) for x in c] for c in reduced.columns])
    Z = Z[np.any(Z != 0, axis=1)]
    run = NvRun(None, None, 0, initial_size=len(Z))
    if not len(Z):
        raise NotFound("every Klein sample was zero")
    R0 = float(np.abs(Z @ cols).max())
    cap = cfg.max_iterations if cfg.max_iterations is not None else _iteration_cap(R0, reduced, shrink)
    S0 = Z
    it = 0
    while len(Z) and it < cap:
        S0 = Z
        radius = float(np.abs(Z @ cols).max())
        Z, st = sieve_coefficients(Z, cols, cfg.gamma, (cfg.gamma1, cfg.gamma2) if two_level else None)
        nz = np.any(Z != 0, axis=1)
        zeros = int((~nz).sum())
        Z = Z[nz]
        it += 1
        rec = {
            "iteration": it,
            "radius": radius,
            "size": int(len(S0)),
            "centres": st.centres,
            "zeros": zeros,
            "comparisons": st.comparisons,
            "sieved": st.sieved,
        }
        if two_level:
            rec["outer_centres"] = len(st.inner_sizes)
            rec["inner_centres_max"] = max(st.inner_sizes, default=0)
        run.trace.append(rec)
    run.iterations = it
    run.capped = bool(len(Z))
    final = Z if len(Z) else S0
    best = None
    for z in {tuple(int(x) for x in r) for r in final}:
        v = reduced.apply(z)
        key = (norm(v), v)
        if best is None or key < best:
            best = key
    run.vector, run.norm = best[1], best[0]
    return run


def run_nv_svp(B: Basis, cfg: HeuristicConfig | None = None) -> NvRun:
    return _run(B, cfg or HeuristicConfig(), False)


def run_nv_svp_two_level(B: Basis, cfg: HeuristicConfig | None = None) -> NvRun:
    return _run(B, cfg or HeuristicConfig(), True)


def nv_svp(B: Basis, cfg: HeuristicConfig | None = None) -> Vector:
    """Shortest vector of the last nonempty list of the NV loop."""
    return run_nv_svp(B, cfg).vector


def nv_svp_two_level(B: Basis, cfg: HeuristicConfig | None = None) -> Vector:
    return run_nv_svp_two_level(B, cfg).vector
