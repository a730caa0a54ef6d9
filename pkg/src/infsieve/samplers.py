"""Random sources: uniform boxes, perturbation pairs and Klein's sampler.

Perturbations are dyadic rationals with 128 fractional bits so that reduction
modulo the parallelepiped stays exact.  Pairs are stored as integer numerators
over one shared denominator, which keeps the provable sieve in integer
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .lattice import Basis, Vector, lll_reduce, norm

PRECISION_BITS = 128
_ONE = 1 << PRECISION_BITS
TAIL_SIGMAS = 12


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def spawn(seed: int, count: int) -> list[np.random.Generator]:
    """Independent per-trial streams derived from one seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def _dyadic_numerators(rng: np.random.Generator, n: int) -> list[int]:
    """n integers uniform on [0, 2^128)."""
    words = rng.integers(0, 1 << 64, size=2 * n, dtype=np.uint64).tolist()
    return [(words[2 * i] << 64) | words[2 * i + 1] for i in range(n)]


def uniform_box(n: int, d, rng) -> Vector:
    """Uniform point of B∞(0, d) on the 2^-128 dyadic grid."""
    d = Fraction(d)
    if d <= 0:
        raise ValueError("d must be positive")
    rng = make_rng(rng)
    return tuple(d * Fraction(2 * k - _ONE, _ONE) for k in _dyadic_numerators(rng, n))


@dataclass(slots=True)
class LatticePair:
    """A perturbation e and representative y with y − e = B·coeffs.

    Coordinates are stored as integer numerators over ``denom``.
    """

    e_num: tuple
    y_num: tuple
    coeffs: tuple
    denom: int

    @property
    def e(self) -> Vector:
        return tuple(Fraction(x, self.denom) for x in self.e_num)

    @property
    def y(self) -> Vector:
        return tuple(Fraction(x, self.denom) for x in self.y_num)

    @property
    def lattice_vector(self) -> Vector:
        return tuple(Fraction(a - b, self.denom) for a, b in zip(self.y_num, self.e_num))


class PairSampler:
    """Draws (e, y) with e uniform in B∞(d) and y = e mod P(B), exactly.

    With B = M/D and A·M = det·I:  x = B⁻¹e = D·A·E/(det·De) where e = E/De.
    y = B·frac(x) and y − e = −B·⌊x⌋.
    """

    def __init__(self, B: Basis, d):
        self.B = B
        self.d = Fraction(d)
        if self.d <= 0:
            raise ValueError("d must be positive")
        self.M, self.D = B.integer_form
        self.A, self.det = B.integer_adjugate
        self.De = self.d.denominator * _ONE
        self.Mq = self.det * self.De
        self.denom = self.D * self.Mq
        self._e_factor = self.D * self.det

    def from_numerators(self, E: Sequence[int]) -> LatticePair:
        n = self.B.n
        T = [self.D * sum(a * x for a, x in zip(row, E)) for row in self.A]
        floors = [t // self.Mq for t in T]
        F = [t - f * self.Mq for t, f in zip(T, floors)]
        Y = tuple(sum(m * f for m, f in zip(row, F)) for row in self.M)
        e = tuple(x * self._e_factor for x in E)
        return LatticePair(e, Y, tuple(-f for f in floors), self.denom)

    def is_member(self, pair: LatticePair) -> bool:
        """y − e ∈ L, checked through the adjugate (independent of ``coeffs``)."""
        diff = [a - b for a, b in zip(pair.y_num, pair.e_num)]
        mod = self.det * self.Mq
        return all(sum(a * x for a, x in zip(row, diff)) % mod == 0 for row in self.A)

    def sample(self, rng) -> LatticePair:
        dn = self.d.numerator
        E = [dn * (2 * k - _ONE) for k in _dyadic_numerators(rng, self.B.n)]
        return self.from_numerators(E)

    def sample_many(self, count: int, rng) -> list[LatticePair]:
        return [self.sample(rng) for _ in range(count)]


def sample_pair(B: Basis, d, rng) -> LatticePair:
    return PairSampler(B, d).sample(make_rng(rng))


# --------------------------------------------------------------------------
# discrete Gaussians

def sample_z(center: float, s: float, rng: np.random.Generator) -> int:
    """Integer x with probability ∝ exp(−π(x−c)²/s²), tails cut at 12σ.

    Narrow widths use an explicit table; wider ones use rejection from a
    two-sided geometric proposal around round(c).
    """
    sigma = s / math.sqrt(2 * math.pi)
    lo = math.floor(center - TAIL_SIGMAS * sigma)
    hi = math.ceil(center + TAIL_SIGMAS * sigma)
    if hi - lo <= 64:
        lo = min(lo, math.floor(center))
        hi = max(hi, math.floor(center) + 1)
        xs = np.arange(lo, hi + 1)
        logw = -math.pi * (xs - center) ** 2 / (s * s)
        w = np.exp(logw - logw.max())
        return int(xs[np.searchsorted(np.cumsum(w), rng.random() * w.sum(), side="right")])
    a = 1.0 / sigma
    r = math.exp(-a)
    c0 = round(center)
    log_m = a * a * s * s / (4 * math.pi) + a / 2 + math.log(2.0)
    while True:
        m = int(rng.geometric(1 - r)) - 1
        x = c0 + m if rng.random() < 0.5 else c0 - m
        if x < lo or x > hi:
            continue
        log_g = -a * m + (0.0 if m == 0 else -math.log(2.0))
        log_rho = -math.pi * (x - center) ** 2 / (s * s)
        if math.log(rng.random()) < log_rho - log_g - log_m:
            return x


def klein_parameter(B: Basis) -> float:
    """‖B‖₂·√(ln(2n+4)/π), ‖B‖₂ the longest column."""
    longest = math.sqrt(float(max(norm(c, 2) for c in B.columns)))
    return longest * math.sqrt(math.log(2 * B.n + 4) / math.pi)


@dataclass(frozen=True)
class KleinParams:
    s: float
    B: Basis

    def __post_init__(self):
        if self.s < klein_parameter(self.B) * (1 - 1e-12):
            raise ValueError("s below ||B||_2*sqrt(ln(2n+4)/pi)")


class KleinSampler:
    """Randomized nearest plane; returns integer coefficient vectors."""

    def __init__(self, params: KleinParams):
        from .lattice import gram_schmidt

        self.params = params
        B = params.B
        bstar, _, Bn = gram_schmidt(B)
        self.basis = np.array([[float(x) for x in c] for c in B.columns])  # rows = columns of B
        self.bstar = np.array([[float(x) for x in v] for v in bstar])
        self.bn = np.array([float(x) for x in Bn])
        self.widths = params.s / np.sqrt(self.bn)

    def sample_coeffs(self, rng, center=None) -> np.ndarray:
        n = len(self.bn)
        c = np.zeros(n) if center is None else np.array([float(x) for x in center])
        z = np.zeros(n, dtype=np.int64)
        for i in range(n - 1, -1, -1):
            ci = float(c @ self.bstar[i]) / self.bn[i]
            zi = sample_z(ci, float(self.widths[i]), rng)
            z[i] = zi
            if zi:
                c = c - zi * self.basis[i]
        return z


def klein_sample(params: KleinParams, center: Sequence, rng) -> Vector:
    """One lattice vector ≈ D_{L,s,center}, returned exactly."""
    z = KleinSampler(params).sample_coeffs(make_rng(rng), center)
    return params.B.apply([int(x) for x in z])


def initial_klein_coefficients(B: Basis, N: int, rng) -> tuple[Basis, np.ndarray]:
    """N Klein samples on the LLL-reduced basis, as coefficients of that basis."""
    if N < 1:
        raise ValueError("N must be positive")
    rng = make_rng(rng)
    reduced = lll_reduce(B)
    sampler = KleinSampler(KleinParams(klein_parameter(reduced), reduced))
    return reduced, np.array([sampler.sample_coeffs(rng) for _ in range(N)], dtype=np.int64)


def sample_initial_lattice_vectors(B: Basis, N: int, rng) -> list[Vector]:
    reduced, Z = initial_klein_coefficients(B, N, rng)
    return [reduced.apply([int(x) for x in z]) for z in Z]
