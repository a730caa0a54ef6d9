"""Brute-force SVP/CVP in the ℓ∞ norm for small dimensions.

Candidates are enumerated Fincke–Pohst style inside the ℓ₂ ball of radius
√n·r, which contains the ℓ∞ ball of radius r.  Pruning uses floats with a
relative slack of 1e-9; every leaf is evaluated exactly, so the returned
minimum and witness are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

from .errors import OracleRefusal
from .lattice import Basis, as_vector, gram_schmidt, lll_reduce, norm

MAX_DIM = 8
_SLACK = 1e-9


def _check_dim(B: Basis):
    if B.n > MAX_DIM:
        raise OracleRefusal(f"brute force refuses n={B.n} > {MAX_DIM}")


def _enumerate(R: Basis, target, radius_ref, exclude_zero, visit):
    """Walk every x with ‖R·x − target‖₂² ≤ n·r², r read from radius_ref[0]."""
    n = R.n
    bstar, mu_q, Bn_q = gram_schmidt(R)
    mu = [[float(x) for x in row] for row in mu_q]
    Bn = [float(x) for x in Bn_q]
    tau = [
        float(sum((Fraction(a) * b for a, b in zip(target, bs)), Fraction(0)) / Bq)
        for bs, Bq in zip(bstar, Bn_q)
    ]
    x = [0] * n

    def bound():
        r = float(radius_ref[0])
        return n * r * r * (1 + _SLACK) + _SLACK

    def rec(j, partial):
        c = tau[j] - sum(x[i] * mu[i][j] for i in range(j + 1, n))
        rem = bound() - partial
        if rem < 0:
            return
        w = math.sqrt(rem / Bn[j])
        lo, hi = math.ceil(c - w), math.floor(c + w)
        for v in range(lo, hi + 1):
            p = partial + (v - c) ** 2 * Bn[j]
            if p > bound():
                continue
            x[j] = v
            if j == 0:
                if not (exclude_zero and not any(x)):
                    visit(tuple(x))
            else:
                rec(j - 1, p)
        x[j] = 0

    rec(n - 1, 0.0)


def brute_svp(B: Basis) -> tuple[tuple, Fraction]:
    """Exact shortest non-zero vector in ℓ∞; ties go to the lexicographically smallest."""
    _check_dim(B)
    R = lll_reduce(B)
    radius = [min(norm(c) for c in R.columns)]
    best: list = [None]

    def visit(x):
        v = R.apply(x)
        nv = norm(v)
        if nv < radius[0] or (nv == radius[0] and (best[0] is None or v < best[0])):
            radius[0] = nv
            best[0] = v

    _enumerate(R, [0] * B.n, radius, True, visit)
    return best[0], radius[0]


def babai_nearest_plane(B: Basis, t: Sequence) -> tuple:
    """Babai's nearest-plane lattice point for t (exact)."""
    bstar, _, Bn = gram_schmidt(B)
    rest = list(as_vector(t))
    z = [Fraction(0)] * B.n
    for j in range(B.n - 1, -1, -1):
        c = sum((a * b for a, b in zip(rest, bstar[j])), Fraction(0)) / Bn[j]
        k = round(c)
        if k:
            col = B.columns[j]
            rest = [r - k * b for r, b in zip(rest, col)]
            z = [zi + k * b for zi, b in zip(z, col)]
    return tuple(z)


def brute_cvp(B: Basis, t: Sequence) -> tuple[tuple, Fraction]:
    """Exact ℓ∞-closest lattice vector to t, lexicographic tie-break."""
    _check_dim(B)
    t = as_vector(t)
    if len(t) != B.n:
        raise ValueError("target dimension mismatch")
    R = lll_reduce(B)
    z0 = babai_nearest_plane(R, t)
    radius = [norm([a - b for a, b in zip(z0, t)])]
    best = [z0]

    def visit(x):
        z = R.apply(x)
        d = norm([a - b for a, b in zip(z, t)])
        if d < radius[0] or (d == radius[0] and z < best[0]):
            radius[0] = d
            best[0] = z

    _enumerate(R, t, radius, False, visit)
    return best[0], radius[0]
