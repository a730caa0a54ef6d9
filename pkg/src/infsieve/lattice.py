"""Exact lattice arithmetic over the rationals.

Vectors are tuples of :class:`fractions.Fraction`; a :class:`Basis` holds the
generating columns of a full-rank lattice.  Everything here is exact, so the
membership tests used to audit the sieves never depend on rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Vector = tuple  # tuple[Fraction, ...]

_ENTRY = re.compile(r"^[+-]?\d+(/[+-]?\d+)?$")


def as_vector(values: Iterable) -> Vector:
    return tuple(Fraction(v) for v in values)


def norm(v: Sequence, p="inf") -> Fraction:
    """ℓ∞ norm, or the *squared* ℓ₂ norm for ``p=2``.

    Both are exact for rational input; callers comparing ℓ₂ lengths compare
    squares.
    """
    if not len(v):
        raise ValueError("empty vector")
    if p in ("inf", math.inf, float("inf")):
        return max(abs(Fraction(x)) for x in v)
    if p == 2:
        return sum((Fraction(x) * x for x in v), Fraction(0))
    raise ValueError(f"unsupported norm p={p!r}")


def _det(rows: list[list[Fraction]]) -> Fraction:
    a = [list(r) for r in rows]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return det


def _inverse(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ValueError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


class Basis:
    """Columns of a full-rank n×n rational matrix."""

    def __init__(self, columns: Iterable[Iterable]):
        cols = tuple(as_vector(c) for c in columns)
        n = len(cols)
        if n < 1:
            raise ValueError("basis needs at least one column")
        if any(len(c) != n for c in cols):
            raise ValueError("basis must be square (full rank)")
        self.columns = cols
        self.n = n
        if self.det == 0:
            raise ValueError("basis columns are linearly dependent")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Basis":
        n = len(rows)
        return cls([[rows[i][j] for i in range(n)] for j in range(n)])

    @classmethod
    def identity(cls, n: int) -> "Basis":
        return cls([[int(i == j) for i in range(n)] for j in range(n)])

    @classmethod
    def diagonal(cls, entries: Sequence) -> "Basis":
        n = len(entries)
        return cls([[entries[j] if i == j else 0 for i in range(n)] for j in range(n)])

    @property
    def rows(self) -> list[list[Fraction]]:
        return [[c[i] for c in self.columns] for i in range(self.n)]

    @cached_property
    def det(self) -> Fraction:
        return _det(self.rows)

    @cached_property
    def inverse_rows(self) -> list[list[Fraction]]:
        return _inverse(self.rows)

    @cached_property
    def integer_form(self) -> tuple[list[list[int]], int]:
        """(M, D) with M an integer matrix (rows) and B = M / D."""
        D = 1
        for c in self.columns:
            for x in c:
                D = math.lcm(D, x.denominator)
        return [[int(x * D) for x in row] for row in self.rows], D

    @cached_property
    def integer_adjugate(self) -> tuple[list[list[int]], int]:
        """(A, d) with A·M = d·I for the integer form M; d > 0."""
        M, _ = self.integer_form
        d = _det([[Fraction(x) for x in r] for r in M])
        inv = _inverse([[Fraction(x) for x in r] for r in M])
        A = [[int(x * d) for x in r] for r in inv]
        if d < 0:
            A = [[-x for x in r] for r in A]
            d = -d
        return A, int(d)

    def apply(self, coeffs: Sequence) -> Vector:
        """B·x."""
        out = [Fraction(0)] * self.n
        for x, col in zip(coeffs, self.columns):
            if x:
                for i in range(self.n):
                    out[i] += x * col[i]
        return tuple(out)

    def solve(self, v: Sequence) -> Vector:
        """B⁻¹·v, exactly."""
        return tuple(
            sum((a * Fraction(b) for a, b in zip(row, v)), Fraction(0))
            for row in self.inverse_rows
        )

    def scaled(self, s) -> "Basis":
        s = Fraction(s)
        return Basis([[s * x for x in c] for c in self.columns])

    def max_column_norm(self) -> Fraction:
        return max(norm(c) for c in self.columns)

    def to_text(self) -> str:
        lines = [str(self.n)]
        for row in self.rows:
            lines.append(" ".join(str(x) for x in row))
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return isinstance(other, Basis) and self.columns == other.columns

    def __hash__(self):
        return hash(self.columns)

    def __repr__(self):
        return f"Basis({[[str(x) for x in c] for c in self.columns]})"


def parse_basis(text: str) -> Basis:
    """Parse the shared basis text format.

    Line 1 holds n, then n rows of n entries (integers or ``p/q``).  Entry
    (i, j) is coordinate i of column j.
    """
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or len(lines[0]) != 1:
        raise ValueError("first line must hold the dimension n")
    n = int(lines[0][0])
    if n < 1:
        raise ValueError("dimension must be positive")
    rows = lines[1:]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    parsed = []
    for r in rows:
        row = []
        for tok in r:
            if not _ENTRY.match(tok):
                raise ValueError(f"bad entry {tok!r}")
            try:
                row.append(Fraction(tok))
            except ZeroDivisionError:
                raise ValueError(f"zero denominator in {tok!r}") from None
        parsed.append(row)
    return Basis.from_rows(parsed)


def mod_parallelepiped(z: Sequence, B: Basis) -> Vector:
    """The unique y in the half-open parallelepiped P(B) with z − y ∈ L(B)."""
    if len(z) != B.n:
        raise ValueError("dimension mismatch")
    x = B.solve(z)
    return B.apply([xi - math.floor(xi) for xi in x])


def is_lattice_member(v: Sequence, B: Basis) -> bool:
    if len(v) != B.n:
        raise ValueError("dimension mismatch")
    return all(x.denominator == 1 for x in B.solve(v))


def _gram_schmidt(b: list[list[Fraction]]):
    n = len(b)
    bstar: list[list[Fraction]] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    Bn: list[Fraction] = []
    for i in range(n):
        v = list(b[i])
        for j in range(i):
            mu[i][j] = sum((x * y for x, y in zip(b[i], bstar[j])), Fraction(0)) / Bn[j]
            v = [x - mu[i][j] * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        Bn.append(sum((x * x for x in v), Fraction(0)))
    return bstar, mu, Bn


def gram_schmidt(B: Basis):
    """(b*, μ, ‖b*‖²) for the columns of B, exact."""
    return _gram_schmidt([list(c) for c in B.columns])


def lll_reduce(B: Basis, delta=Fraction(3, 4)) -> Basis:
    """Textbook exact LLL with incremental Gram–Schmidt updates."""
    delta = Fraction(delta)
    b = [list(c) for c in B.columns]
    n = len(b)
    if n == 1:
        return B
    _, mu, Bn = _gram_schmidt(b)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                for i in range(j):
                    mu[k][i] -= q * mu[j][i]
                mu[k][j] -= q
        if Bn[k] >= (delta - mu[k][k - 1] ** 2) * Bn[k - 1]:
            k += 1
            continue
        b[k], b[k - 1] = b[k - 1], b[k]
        m = mu[k][k - 1]
        Bk = Bn[k] + m * m * Bn[k - 1]
        mu[k][k - 1] = m * Bn[k - 1] / Bk
        Bn[k] = Bn[k - 1] * Bn[k] / Bk
        Bn[k - 1] = Bk
        for j in range(k - 1):
            mu[k - 1][j], mu[k][j] = mu[k][j], mu[k - 1][j]
        for i in range(k + 1, n):
            t = mu[i][k]
            mu[i][k] = mu[i][k - 1] - m * t
            mu[i][k - 1] = t + mu[k][k - 1] * mu[i][k]
        k = max(k - 1, 1)
    return Basis(b)


def sqrt_upper(q, bits: int = 32) -> Fraction:
    """A rational r ≥ √q within 2^-bits/den(q) of it."""
    q = Fraction(q)
    p, d = q.numerator, q.denominator
    val = p * d * 4**bits
    r = math.isqrt(val)
    if r * r < val:
        r += 1
    return Fraction(r, d * 2**bits)


@dataclass(frozen=True)
class Lambda1Estimate:
    lambda_star: Fraction
    guesses: tuple
    n: int

    def bracketing(self, lambda1) -> Fraction | None:
        """The first guess g with λ₁ ≤ g ≤ (1+1/n)λ₁, if any."""
        for g in self.guesses:
            if lambda1 <= g <= (1 + Fraction(1, self.n)) * lambda1:
                return g
        return None


def guess_count(n: int) -> int:
    """Smallest m with (1+1/n)^m ≥ 2^n·√n (compared squared, exactly)."""
    ratio = Fraction(n + 1, n) ** 2
    target = 4**n * n
    m, acc = 0, Fraction(1)
    while acc < target:
        acc *= ratio
        m += 1
    return m


def estimate_lambda1(B: Basis) -> Lambda1Estimate:
    """λ* from the first LLL vector plus the descending guess ladder."""
    reduced = lll_reduce(B)
    lam = sqrt_upper(norm(reduced.columns[0], 2))
    n = B.n
    step = Fraction(n, n + 1)
    guesses = tuple(lam * step**i for i in range(guess_count(n) + 1))
    return Lambda1Estimate(lam, guesses, n)


def scale_to_window(B: Basis, lambda_guess) -> tuple[Basis, Fraction]:
    """Scale B by s = 5/(2·guess) so a good guess puts λ₁ in [2, 3)."""
    lambda_guess = Fraction(lambda_guess)
    if lambda_guess <= 0:
        raise ValueError("lambda guess must be positive")
    s = Fraction(5, 2) / lambda_guess
    return B.scaled(s), s
