"""Random test lattices."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import Basis

KINDS = ("identity", "diagonal", "random-integer", "knapsack")


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    n: int
    entry_bound: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown instance kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.entry_bound < 1:
            raise ValueError("entry bound must be positive")


def generate(spec: InstanceSpec) -> Basis:
    """Build the basis described by ``spec``; singular draws are redrawn."""
    rng = np.random.default_rng(spec.seed)
    n, b = spec.n, spec.entry_bound
    if spec.kind == "identity":
        return Basis.identity(n)
    if spec.kind == "diagonal":
        return Basis.diagonal([int(x) for x in rng.integers(1, b + 1, size=n)])
    while True:
        try:
            if spec.kind == "random-integer":
                rows = rng.integers(-b, b + 1, size=(n, n)).tolist()
                return Basis.from_rows(rows)
            # subset-sum embedding: columns eᵢ + aᵢ·e_n (i < n) and s·e_n
            if n == 1:
                return Basis([[int(rng.integers(1, b + 1))]])
            a = [int(x) for x in rng.integers(1, b + 1, size=n - 1)]
            pick = rng.integers(0, 2, size=n - 1)
            s = sum(x for x, p in zip(a, pick) if p) or a[0]
            cols = []
            for i in range(n - 1):
                col = [0] * n
                col[i] = 1
                col[n - 1] = a[i]
                cols.append(col)
            cols.append([0] * (n - 1) + [s])
            return Basis(cols)
        except ValueError:
            continue
