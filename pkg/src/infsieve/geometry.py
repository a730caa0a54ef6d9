"""ℓ∞ volume lemmas, complexity constants and their Monte Carlo checks.

Closed forms are implemented as written; the ``mc_*`` estimators are
independent numerical oracles for them.  Exponents are base 2 and per
dimension, so ``space_exp = 0.415`` means 2^(0.415 n).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_SEED = 20180917


def _frac(x) -> Fraction:
    """Exact rational from int/Fraction/str; floats go through their repr."""
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


# --------------------------------------------------------------------------
# lattice-point counting and box overlaps

def lattice_point_count_bound(R, lambda1, n: int) -> int:
    """(1 + ⌊2R/λ₁⌋)ⁿ, as an exact Python int (never wraps)."""
    R, lambda1 = _frac(R), _frac(lambda1)
    if R <= 0 or lambda1 <= 0:
        raise ValueError("R and lambda1 must be positive")
    return (1 + math.floor(2 * R / lambda1)) ** n


def box_overlap_volume(v: Sequence, a):
    """|B∞(0,a) ∩ B∞(v,a)| = ∏(2a − |vᵢ|).

    Exact for rational input, float otherwise.
    """
    if any(isinstance(x, float) for x in v) or isinstance(a, float):
        vals = [float(x) for x in v]
        a = float(a)
    else:
        vals = [Fraction(x) for x in v]
        a = Fraction(a)
    if a <= 0:
        raise ValueError("radius must be positive")
    if max((abs(x) for x in vals), default=0) > 2 * a:
        raise ValueError("requires 2a >= ||v||_inf")
    out = 1 if not isinstance(a, float) else 1.0
    for x in vals:
        out *= 2 * a - abs(x)
    return out


def good_pair_probability(xi, u: Sequence, lam, n: int | None = None) -> float:
    """Fraction of B∞(ξλ) covered by D₁ ∪ D₂ (the two u-translated overlaps)."""
    xi, lam = float(xi), float(lam)
    u = np.abs(np.asarray(u, dtype=float))
    if n is not None and len(u) != n:
        raise ValueError("u has wrong dimension")
    if xi <= 0.5:
        raise ValueError("xi must exceed 1/2")
    r = xi * lam
    if u.max() > 2 * r:
        return 0.0
    single = float(np.prod((2 * r - u) / (2 * r)))
    both = float(np.prod(np.clip(2 * r - 2 * u, 0, None) / (2 * r)))
    return 2 * single - both


# --------------------------------------------------------------------------
# expected corona intersections

def _log_ratio(g: float) -> float:
    """ln(g)/(1−g), continuous at g = 1 (value −1)."""
    if g == 1:
        return -1.0
    return math.log(g) / (1 - g)


def nv_expected_fraction(gamma, n: int) -> float:
    """Expected |B∞(r,γ) ∩ B∞| / |B∞| for r uniform in the corona B∞(γ,1).

    ``gamma == 1`` returns the γ→1 limit ½(¾)^(n−1).
    """
    g = float(gamma)
    if not 0 < g <= 1:
        raise ValueError("gamma must lie in (0, 1)")
    base = 3 / 8 * (1 + g) + (1 - g) / 4 * (math.log(g) if g < 1 else 0.0)
    return 0.25 * (1 + g) * base ** (n - 1)


def _check_two_level(g1: float, g2: float):
    if not (0.5 < g2 <= 1 and 1 < g1 < math.sqrt(2) * g2):
        raise ValueError("need 1/2 < gamma2 < 1 < gamma1 < sqrt(2)*gamma2")


def two_level_expected_fraction(gamma1, gamma2, n: int) -> float:
    """Expected |B∞(r,γ₁) ∩ B∞| / |B∞| for r uniform in B∞(γ₂,1).

    ``gamma2 == 1`` returns the γ₂→1 limit (γ₁/2)·[¼ + γ₁/2 − (γ₁−1)²/4]^(n−1),
    the continuous extension of the general formula.
    """
    g1, g2 = float(gamma1), float(gamma2)
    _check_two_level(g1, g2)
    if g2 == 1:
        return g1 / 2 * (0.25 + g1 / 2 - (g1 - 1) ** 2 / 4) ** (n - 1)
    head = (1 - g2) / 4 + g1 / 2
    base = (3 - g2) / 8 + g1 / 2 + (g1 - 1) ** 2 / 4 * _log_ratio(g2)
    return head * base ** (n - 1)


def _side_integral(radius: float, lo: float, hi: float) -> float:
    """∫_lo^hi (min(1, radius+x) − max(−1, x−radius)) dx, piecewise linear."""
    knots = sorted({lo, hi, *(k for k in (1 - radius, radius - 1) if lo < k < hi)})
    f = lambda x: min(1.0, radius + x) - max(-1.0, x - radius)
    return sum((b - a) * (f(a) + f(b)) / 2 for a, b in zip(knots, knots[1:]))


def exact_corona_fraction(radius, inner, n: int) -> float:
    """E|B∞(r,radius) ∩ B∞|/|B∞| for r uniform in B∞(inner,1), by direct integration.

    Integrates the product of side lengths over the cube minus the inner cube.
    Diagnostic only; the closed forms above are not derived from it.
    """
    radius, inner = float(radius), float(inner)
    A = _side_integral(radius, -1.0, 1.0)
    Bi = _side_integral(radius, -inner, inner)
    return (A**n - Bi**n) / (2.0**n - (2 * inner) ** n) / 2.0**n


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    std_err: float
    samples: int

    def agrees(self, value: float, rel: float = 0.02, sigmas: float = 5.0) -> bool:
        tol = max(rel * abs(value), sigmas * self.std_err)
        return abs(self.estimate - value) <= tol


def sample_corona(rng: np.random.Generator, n: int, inner: float, size: int) -> np.ndarray:
    """Uniform points of the ℓ∞ corona {inner < ‖r‖∞ ≤ 1}."""
    u = rng.random(size)
    m = (inner**n + u * (1 - inner**n)) ** (1.0 / n)
    pts = rng.uniform(-1.0, 1.0, size=(size, n)) * m[:, None]
    axis = rng.integers(0, n, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    pts[np.arange(size), axis] = sign * m
    return pts


def _mc_overlap(radius, inner, n, samples, seed, chunk=200_000) -> MCEstimate:
    rng = np.random.default_rng(seed)
    total = total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        r = sample_corona(rng, n, inner, m)
        sides = np.minimum(1.0, r + radius) - np.maximum(-1.0, r - radius)
        vals = np.prod(sides, axis=1) / 2.0**n
        total += vals.sum()
        total_sq += (vals**2).sum()
        done += m
    mean = total / samples
    var = max(total_sq / samples - mean**2, 0.0)
    return MCEstimate(float(mean), math.sqrt(var / samples), samples)


def mc_nv_fraction(gamma, n: int, samples: int = 1_000_000, seed: int = DEFAULT_SEED) -> MCEstimate:
    g = float(gamma)
    return _mc_overlap(g, g, n, samples, seed)


def mc_two_level_fraction(gamma1, gamma2, n: int, samples: int = 1_000_000,
                          seed: int = DEFAULT_SEED) -> MCEstimate:
    return _mc_overlap(float(gamma1), float(gamma2), n, samples, seed)


def mc_box_overlap(v: Sequence, a, samples: int = 1_000_000, seed: int = DEFAULT_SEED,
                   chunk=250_000) -> MCEstimate:
    """Point-membership estimate of |B∞(0,a) ∩ B∞(v,a)|."""
    rng = np.random.default_rng(seed)
    v = np.asarray(v, dtype=float)
    a = float(a)
    hits = 0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        pts = rng.uniform(-a, a, size=(m, len(v)))
        hits += int(np.count_nonzero(np.max(np.abs(pts - v), axis=1) <= a))
        done += m
    vol = (2 * a) ** len(v)
    p = hits / samples
    return MCEstimate(p * vol, vol * math.sqrt(p * (1 - p) / samples), samples)


# --------------------------------------------------------------------------
# complexity constants

@dataclass(frozen=True)
class ProvableConstants:
    c_c: float
    c_s: float
    c_b: float
    c_space: float
    c_time: float

    def as_dict(self):
        return asdict(self)


def provable_constants(gamma, xi, birthday: bool = False) -> ProvableConstants:
    """Space/time exponents of the grid-sieve SVP algorithm.

    Floors are taken on exact rationals so γ = 2/3 really gives ⌊2/γ⌋ = 3.
    """
    g, x = _frac(gamma), _frac(xi)
    if not 0 < g < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if x <= Fraction(1, 2):
        raise ValueError("xi must exceed 1/2")
    c_c = math.log2(1 + math.floor(2 / g))
    c_s = -math.log2(1 - 1 / (2 * float(x)))
    c_b = math.log2(1 + math.floor(2 * x * (2 - g) / (1 - g)))
    if birthday:
        c_space = c_s + max(c_c, c_b / 2)
        c_time = max(c_space, c_b)
    else:
        c_space = c_s + max(c_c, c_b)
        c_time = max(c_space, 2 * c_b)
    return ProvableConstants(c_c, c_s, c_b, c_space, c_time)


def approx_constants(gamma, xi) -> tuple[float, float]:
    """(τ, c_s + c_c) for approximate SVP/CVP."""
    g, x = _frac(gamma), _frac(xi)
    if not 0 < g < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if x <= Fraction(1, 2):
        raise ValueError("xi must exceed 1/2")
    tau = float(x * (2 - g) / (1 - g))
    c_c = math.log2(1 + math.floor(2 / g))
    c_s = -math.log2(1 - 1 / (2 * float(x)))
    return tau, c_s + c_c


@dataclass(frozen=True)
class HeuristicConstants:
    k_C: float | None
    k_C1: float | None
    k_C2: float | None
    space_exp: float
    time_exp: float

    def as_dict(self):
        return asdict(self)


def heuristic_constants(gamma) -> HeuristicConstants:
    g = float(gamma)
    if not 0.5 < g <= 1:
        raise ValueError("gamma must lie in (1/2, 1)")
    k = 1 / (3 / 8 * (1 + g) + ((1 - g) / 4 * math.log(g) if g < 1 else 0.0))
    return HeuristicConstants(k, None, None, math.log2(k), 2 * math.log2(k))


def two_level_constants(gamma1, gamma2) -> HeuristicConstants:
    g1, g2 = float(gamma1), float(gamma2)
    _check_two_level(g1, g2)
    lr = _log_ratio(g2)
    k1 = 1 / ((3 - g2) / 8 + g1 / 2 + (g1 - 1) ** 2 / 4 * lr)
    inner = 3 / 4 * (1 + g2) + (1 - g2) / 2 * (math.log(g2) if g2 < 1 else 0.0)
    outer = (3 - g2) / 4 + g1 + (g1 - 1) ** 2 / 2 * lr
    k2 = outer / inner
    space = math.log2(k1 * k2)
    return HeuristicConstants(None, k1, k2, space, space + math.log2(max(k1, k2)))


def collision_loss(N: int, p: int) -> float:
    """Expected repeats among p draws with replacement from N items."""
    if N < 1 or p < 0:
        raise ValueError("need N >= 1 and p >= 0")
    return p - N + N * (1 - 1 / N) ** p


def collision_loss_variance(N: int, p: int) -> float:
    """Variance of the number of distinct items (hence of the loss)."""
    q1 = (1 - 1 / N) ** p
    q2 = (1 - 2 / N) ** p if N > 1 else 0.0
    return N * (N - 1) * q2 + N * q1 - (N * q1) ** 2
