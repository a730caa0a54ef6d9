"""Provable ℓ∞ sieves: grid sieve, exact SVP, birthday variant, approximate SVP/CVP.

All state is exact.  Pairs carry integer numerators over one denominator q
(see :class:`~infsieve.samplers.PairSampler`); radii and γ, ξ are Fractions,
so every comparison made by the sieve and by the audits is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .audit import AUDIT
from .errors import NotFound
from .lattice import Basis, Vector, as_vector, estimate_lambda1, gram_schmidt, lll_reduce, norm, scale_to_window
from .samplers import LatticePair, PairSampler, make_rng

GAMMA_EXACT = Fraction(67, 100)
XI_EXACT = Fraction(868, 1000)


def _frac(x) -> Fraction:
    return Fraction(repr(x)) if isinstance(x, float) else Fraction(x)


def cells_per_axis(gamma) -> int:
    """ℓ = 1 + ⌊2/γ⌋."""
    return 1 + math.floor(2 / _frac(gamma))


def grid_index(y: Sequence, gamma, R) -> tuple:
    """Cell index (1-based) of y in the γR grid over [−R, R]ⁿ."""
    gamma, R = _frac(gamma), _frac(R)
    y = as_vector(y)
    if norm(y) > R:
        raise ValueError("||y||_inf exceeds R")
    step = gamma * R
    return tuple(math.floor((yi + R) / step) + 1 for yi in y)


def iteration_count(gamma, xi, n: int, R0) -> int:
    """Sieve iterations: one more than ⌈log_γ(ξ/(nR₀(1−γ)))⌉, at least 1.

    The extra iteration makes the final-radius bound hold exactly rather
    than up to a factor 1/γ on its second term.
    """
    gamma, xi, R0 = _frac(gamma), _frac(xi), _frac(R0)
    target = xi / (n * R0 * (1 - gamma))
    k, acc = 0, Fraction(1)
    while acc > target:
        acc *= gamma
        k += 1
    return k + 1


def final_radius_bound(gamma, xi, lam, n: int) -> Fraction:
    """ξ(2−γ)λ/(1−γ) + γξ/(n(1−γ))."""
    gamma, xi, lam = _frac(gamma), _frac(xi), _frac(lam)
    return xi * (2 - gamma) * lam / (1 - gamma) + gamma * xi / (n * (1 - gamma))


# --------------------------------------------------------------------------
# sample-count policies

def _q_lower(xi, n):
    return (1 - 1 / (2 * float(xi))) ** n


def lemma_sample_count(n: int, gamma, xi, k: int, variant: str = "exact") -> int:
    """N from the success lemmas: exact, birthday or approx."""
    ell = cells_per_axis(gamma)
    g, x = _frac(gamma), _frac(xi)
    cb = 1 + math.floor(2 * x * (2 - g) / (1 - g))
    q = _q_lower(x, n)
    C = ell**n
    if variant == "exact":
        body = k * C + cb**n + 1
    elif variant == "birthday":
        body = n**3 * k * C + n * math.sqrt(cb**n)
    elif variant == "approx":
        body = k * C + 1
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return math.ceil(2 / q * body)


def desk_sample_count(n: int, gamma=GAMMA_EXACT, xi=XI_EXACT) -> int:
    """Default N: enough survivors for a collision at n ≤ 5, far below the lemma."""
    return 400 + 40 * cells_per_axis(gamma) ** n


# --------------------------------------------------------------------------
# configuration and results

@dataclass(frozen=True)
class SieveConfig:
    gamma: Fraction
    xi: Fraction
    lam: Fraction  # λ for SVP, d for CVP
    N: int
    seed: int = 0
    birthday: bool = False
    iterations: int | None = None

    def __post_init__(self):
        for name in ("gamma", "xi", "lam"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if not 0 < self.gamma < 1:
            raise ValueError("gamma must lie in (0, 1)")
        if self.xi <= Fraction(1, 2):
            raise ValueError("xi must exceed 1/2")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")
        if self.N < 1:
            raise ValueError("N must be positive")


@dataclass
class SieveRun:
    """Everything a driver learned; ``vector`` is None when nothing was found."""

    vector: Vector | None
    norm: Fraction | None
    iterations: int
    centre_counts: list = field(default_factory=list)
    survivors: list = field(default_factory=list)
    radii: list = field(default_factory=list)


# --------------------------------------------------------------------------
# grid sieve

def _sieve_pass(pairs: list, gamma: Fraction, R: Fraction, denom: int, n: int):
    """One pass of the grid sieve over integer pairs; returns (out, centres)."""
    gn, gd = gamma.numerator, gamma.denominator
    Rn, Rd = R.numerator, R.denominator
    # j − 1 = ⌊(y + R)/(γR)⌋ with y = Y/q
    mul = Rd * gd
    add = Rn * denom * gd
    div = denom * gn * Rn
    # ‖y‖ ≤ γR  ⇔  max|Y|·Rd·gd ≤ gn·Rn·q
    pass_bound = gn * Rn * denom
    centres: dict = {}
    out = []
    checking = AUDIT.enabled
    ell = 1 + (2 * gd) // gn
    intervals = lookups = 0
    for p in pairs:
        Y = p.y_num
        if max(map(abs, Y)) * mul <= pass_bound:
            out.append(p)
            continue
        key = tuple((y * mul + add) // div for y in Y)
        intervals += n
        c = centres.get(key)
        lookups += 1
        if c is None:
            centres[key] = p
            continue
        newY = tuple(a - b + e for a, b, e in zip(Y, c.y_num, c.e_num))
        newC = tuple(a - b for a, b in zip(p.coeffs, c.coeffs))
        if checking:
            AUDIT.require(
                max(abs(a - b) for a, b in zip(Y, c.y_num)) * mul <= pass_bound,
                "pairs sharing a grid key are further apart than gamma*R",
            )
            AUDIT.counters["same_key_checks"] += 1
        out.append(LatticePair(p.e_num, newY, newC, p.denom))
    if checking:
        bound = ell**n
        AUDIT.require(len(centres) <= bound, f"{len(centres)} centres exceed (1+floor(2/gamma))^n = {bound}")
        AUDIT.require(all(1 <= j + 1 <= ell for key in centres for j in key), "grid index out of range")
        AUDIT.max_centre_fill = max(AUDIT.max_centre_fill, len(centres) / bound)
        c = AUDIT.counters
        c["grid_sieves"] += 1
        c["grid_pairs"] += len(pairs)
        c["interval_computations"] += intervals
        c["map_lookups"] += lookups
        c["map_inserts"] += len(centres)
        c["sieved_pairs"] += lookups
        c["max_intervals_per_pair"] = max(c["max_intervals_per_pair"], n if lookups else 0)
    return out, centres


def grid_sieve(S: list, gamma, R, xi_lambda=None) -> list:
    """One grid-sieve pass; pairs with ‖y‖∞ ≤ γR pass through unchanged.

    ``xi_lambda`` only documents the output radius γR + ξλ; the pass itself
    does not need it.
    """
    if not S:
        return []
    gamma, R = _frac(gamma), _frac(R)
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    denom = S[0].denom
    if any(p.denom != denom for p in S):
        raise ValueError("pairs must share a denominator")
    n = len(S[0].y_num)
    limit = R * denom
    if any(max(map(abs, p.y_num)) > limit for p in S):
        raise ValueError("a pair lies outside B_inf(R)")
    out, _ = _sieve_pass(S, gamma, R, denom, n)
    return out


# --------------------------------------------------------------------------
# invariant audits

def _check_invariants(sampler: PairSampler, S: list, R: Fraction):
    bound = R * sampler.denom
    for p in S:
        AUDIT.require(sampler.is_member(p), "y - e is not a lattice vector")
        AUDIT.require(max(map(abs, p.y_num)) <= bound, "||y||_inf exceeds the current R")
    AUDIT.counters["claim1_pair_checks"] += len(S)


def _check_final_radius(sampler: PairSampler, S: list, bound: Fraction):
    lim = bound * sampler.denom
    for p in S:
        AUDIT.require(
            max(abs(a - b) for a, b in zip(p.y_num, p.e_num)) <= lim,
            "survivor exceeds the final-radius bound",
        )
    AUDIT.counters["final_radius_checks"] += len(S)


# --------------------------------------------------------------------------
# final steps

def _to_int64(rows: list, M: list) -> np.ndarray | None:
    """Integer lattice vectors M·c as int64, or None if they might overflow."""
    if not rows:
        return np.zeros((0, len(M)), dtype=np.int64)
    cmax = max(max(map(abs, r)) for r in rows)
    mmax = max(max(map(abs, r)) for r in M)
    if 4 * len(M) * cmax * mmax >= 2**62:
        return None
    C = np.array(rows, dtype=np.int64)
    return C @ np.array(M, dtype=np.int64).T


def _lex_min(rows) -> tuple:
    return min(tuple(int(x) for x in r) for r in rows)


def shortest_difference(B: Basis, coeff_rows: list) -> tuple | None:
    """Minimum nonzero ℓ∞ pairwise difference of the lattice vectors B·c.

    Returns the vector as a tuple of Fractions (lexicographic tie-break), or
    None when all differences vanish.
    """
    M, D = B.integer_form
    rows = sorted(set(tuple(r) for r in coeff_rows))
    if len(rows) < 2:
        return None
    W = _to_int64(rows, M)
    if W is None:
        vecs = [tuple(sum(m * c for m, c in zip(row, r)) for row in M) for r in rows]
        best, best_v = None, None
        for i, a in enumerate(vecs):
            for b in vecs[i + 1:]:
                for v in (tuple(x - y for x, y in zip(a, b)), tuple(y - x for x, y in zip(a, b))):
                    m = max(map(abs, v))
                    if m and (best is None or m < best or (m == best and v < best_v)):
                        best, best_v = m, v
        return tuple(Fraction(x, D) for x in best_v)
    m, n = W.shape
    chunk = max(1, 2_000_000 // (m * n))
    best = None
    cands = []
    for s in range(0, m, chunk):
        diff = W[s:s + chunk, None, :] - W[None, :, :]
        nrm = np.abs(diff).max(axis=2)
        nrm[nrm == 0] = np.iinfo(np.int64).max
        lo = int(nrm.min())
        if best is None or lo < best:
            best, cands = lo, []
        if lo == best:
            ii, jj = np.nonzero(nrm == lo)
            cands.append(_lex_min(diff[ii, jj]))
    return tuple(Fraction(x, D) for x in min(cands))


def shortest_survivor(B: Basis, coeff_rows: list) -> tuple | None:
    """Minimum-norm nonzero vector among B·c, lexicographic tie-break."""
    M, D = B.integer_form
    best = None
    for r in set(tuple(r) for r in coeff_rows):
        if not any(r):
            continue
        v = tuple(sum(m * c for m, c in zip(row, r)) for row in M)
        key = (max(map(abs, v)), v)
        if best is None or key < best:
            best = key
    return None if best is None else tuple(Fraction(x, D) for x in best[1])


# --------------------------------------------------------------------------
# drivers

def _sieve_loop(B: Basis, cfg: SieveConfig, R0: Fraction, rng, run: SieveRun):
    """Sample, then run the k grid-sieve iterations; returns (sampler, S)."""
    n = B.n
    xl = cfg.xi * cfg.lam
    sampler = PairSampler(B, xl)
    S = sampler.sample_many(cfg.N, rng)
    k = cfg.iterations if cfg.iterations is not None else iteration_count(cfg.gamma, cfg.xi, n, R0)
    R = R0
    if AUDIT.enabled:
        _check_invariants(sampler, S, R)
    for _ in range(k):
        S, centres = _sieve_pass(S, cfg.gamma, R, sampler.denom, n)
        run.centre_counts.append(len(centres))
        R = cfg.gamma * R + xl
        run.radii.append(R)
        if AUDIT.enabled:
            _check_invariants(sampler, S, R)
    run.iterations = k
    return sampler, S


def run_exact_svp(B: Basis, cfg: SieveConfig, approx: bool = False) -> SieveRun:
    rng = make_rng(cfg.seed)
    R0 = B.n * B.max_column_norm()
    run = SieveRun(None, None, 0)
    if cfg.birthday:
        sampler, S = _birthday_loop(B, cfg, rng, run)
    else:
        sampler, S = _sieve_loop(B, cfg, R0, rng, run)
    if AUDIT.enabled and cfg.iterations is None:
        _check_final_radius(sampler, S, final_radius_bound(cfg.gamma, cfg.xi, cfg.lam, B.n))
    run.survivors = S
    rows = [p.coeffs for p in S]
    v = shortest_survivor(B, rows) if approx else shortest_difference(B, rows)
    if v is not None:
        run.vector, run.norm = v, norm(v)
    return run


def exact_svp(B: Basis, cfg: SieveConfig) -> Vector:
    """Grid-sieve SVP at one λ guess; raises NotFound if all differences vanish."""
    run = run_exact_svp(B, cfg)
    if run.vector is None:
        raise NotFound("all pairwise differences are zero")
    return run.vector


def approx_svp(B: Basis, cfg: SieveConfig) -> Vector:
    """Same sieve, returning the shortest nonzero survivor."""
    run = run_exact_svp(B, cfg, approx=True)
    if run.vector is None:
        raise NotFound("all survivors are zero")
    return run.vector


def level_radii(R, gamma, xi_lambda, k: int) -> list[Fraction]:
    """R₁ … R_{k+1} with Rᵢ = γ^{i−1}R + ξλ(1−γ^{i−1})/(1−γ)."""
    R, g, xl = _frac(R), _frac(gamma), _frac(xi_lambda)
    out = [R]
    for _ in range(k):
        out.append(g * out[-1] + xl)
    return out


def _birthday_loop(B: Basis, cfg: SieveConfig, rng, run: SieveRun):
    """Pre-committed level grids; each pair is routed until it settles."""
    n = B.n
    xl = cfg.xi * cfg.lam
    sampler = PairSampler(B, xl)
    S = sampler.sample_many(cfg.N, rng)
    q = sampler.denom
    R = Fraction(max(max(map(abs, p.y_num)) for p in S), q)
    if R == 0:
        R = Fraction(1)
    k = cfg.iterations if cfg.iterations is not None else iteration_count(cfg.gamma, cfg.xi, n, R)
    radii = level_radii(R, cfg.gamma, xl, k)
    g = cfg.gamma
    gn, gd = g.numerator, g.denominator
    ell = cells_per_axis(g)
    levels = []
    for Ri in radii[:-1]:
        Rn, Rd = Ri.numerator, Ri.denominator
        levels.append((Rd * gd, Rn * q * gd, q * gn * Rn, gn * Rn * q, {}))
    # ‖y‖ ≤ Rᵢ  ⇔  max|Y|·den(Rᵢ) ≤ num(Rᵢ)·q
    caps = [(Ri.denominator, Ri.numerator * q) for Ri in radii]
    checking = AUDIT.enabled
    out = []
    for p in S:
        i = 0
        while True:
            m = max(map(abs, p.y_num))
            if m * caps[k][0] <= caps[k][1]:
                out.append(p)
                break
            while i + 1 < k and m * caps[i + 1][0] <= caps[i + 1][1]:
                i += 1
            mul, add, div, pass_bound, centres = levels[i]
            key = tuple((y * mul + add) // div for y in p.y_num)
            c = centres.get(key)
            if c is None:
                centres[key] = p
                break
            if checking:
                AUDIT.require(
                    max(abs(a - b) for a, b in zip(p.y_num, c.y_num)) * mul <= pass_bound,
                    "pairs sharing a grid key are further apart than gamma*R",
                )
                AUDIT.counters["same_key_checks"] += 1
            p = LatticePair(
                p.e_num,
                tuple(a - b + e for a, b, e in zip(p.y_num, c.y_num, c.e_num)),
                tuple(a - b for a, b in zip(p.coeffs, c.coeffs)),
                q,
            )
            i += 1
            if i >= k:
                out.append(p)
                break
    for lv in levels:
        run.centre_counts.append(len(lv[4]))
        if checking:
            AUDIT.require(len(lv[4]) <= ell**n, "level centre count exceeds (1+floor(2/gamma))^n")
            AUDIT.max_centre_fill = max(AUDIT.max_centre_fill, len(lv[4]) / ell**n)
            AUDIT.counters["grid_sieves"] += 1
    run.radii = radii[1:]
    run.iterations = k
    if checking:
        _check_invariants(sampler, out, radii[-1])
    return sampler, out


def birthday_exact_svp(B: Basis, cfg: SieveConfig) -> Vector:
    if not cfg.birthday:
        raise ValueError("birthday_exact_svp needs cfg.birthday = True")
    return exact_svp(B, cfg)


# --------------------------------------------------------------------------
# λ-guess wrappers

def _sample_count(N_policy, n, gamma, xi) -> int:
    if N_policy is None:
        return desk_sample_count(n, gamma, xi)
    if callable(N_policy):
        return int(N_policy(n, gamma, xi))
    return int(N_policy)


def candidate_guesses(B: Basis) -> list[Fraction]:
    """λ guesses that can bracket λ₁, ascending.

    The ladder is cut to [min‖b*ᵢ‖₂/√n, (1+1/n)·min‖bᵢ‖∞] of the LLL basis;
    λ₁ lies in that range, so every dropped guess is a provably wrong one.
    """
    est = estimate_lambda1(B)
    n = B.n
    red = lll_reduce(B)
    _, _, Bn = gram_schmidt(red)
    low_sq = min(Bn) / n
    high = (1 + Fraction(1, n)) * min(norm(c) for c in red.columns)
    keep = [g for g in est.guesses if g * g >= low_sq and g <= high]
    return sorted(keep) or [min(est.guesses, key=lambda g: abs(g - high))]


@dataclass
class AutoResult:
    vector: Vector
    norm: Fraction
    guess: Fraction
    runs: list


def exact_svp_auto_run(B: Basis, gamma=GAMMA_EXACT, xi=XI_EXACT, N_policy=None, seed: int = 0,
                       birthday: bool = False, approx: bool = False) -> AutoResult:
    n = B.n
    N = _sample_count(N_policy, n, gamma, xi)
    guesses = candidate_guesses(B)
    seeds = np.random.SeedSequence(seed).spawn(len(guesses))
    best = None
    runs = []
    for g, ss in zip(guesses, seeds):
        if best is not None and g > (1 + Fraction(1, n)) * best[0]:
            break
        scaled, s = scale_to_window(B, g)
        cfg = SieveConfig(gamma, xi, g * s, N, seed=int(ss.generate_state(1, np.uint64)[0]), birthday=birthday)
        run = run_exact_svp(scaled, cfg, approx=approx)
        runs.append((g, run))
        if run.vector is None:
            continue
        v = tuple(x / s for x in run.vector)
        key = (norm(v), v)
        if best is None or key < best:
            best = key
            best_guess = g
        if approx:
            break
    if best is None:
        raise NotFound("no lambda guess produced a nonzero vector")
    return AutoResult(best[1], best[0], best_guess, runs)


def exact_svp_auto(B: Basis, gamma=GAMMA_EXACT, xi=XI_EXACT, N_policy=None, seed: int = 0) -> Vector:
    """Exact SVP over the λ-guess ladder; the global minimum, unscaled."""
    return exact_svp_auto_run(B, gamma, xi, N_policy, seed).vector


def approx_svp_auto(B: Basis, gamma=Fraction(2, 3), xi=Fraction(1), N_policy=None, seed: int = 0) -> Vector:
    """Approximate SVP; the first (smallest) guess that yields a nonzero survivor."""
    return exact_svp_auto_run(B, gamma, xi, N_policy, seed, approx=True).vector


# --------------------------------------------------------------------------
# approximate CVP

@dataclass(frozen=True)
class EmbeddedBasis:
    base: Basis
    tau_d_half: Fraction


def embed_cvp_basis(B: Basis, t: Sequence, tau, d) -> EmbeddedBasis:
    """[(b₁,0), …, (b_n,0), (t, τd/2)]."""
    t = as_vector(t)
    tau, d = _frac(tau), _frac(d)
    if len(t) != B.n:
        raise ValueError("target dimension mismatch")
    if tau <= 1 or d <= 0:
        raise ValueError("need tau > 1 and d > 0")
    h = tau * d / 2
    cols = [tuple(c) + (Fraction(0),) for c in B.columns] + [t + (h,)]
    return EmbeddedBasis(Basis(cols), h)


def cvp_xi_range(tau, gamma) -> tuple[Fraction, Fraction]:
    """Open lower and closed upper end for ξ: (½max(1, τ/2), (1−γ)τ/(2−γ)]."""
    tau, gamma = _frac(tau), _frac(gamma)
    return max(Fraction(1), tau / 2) / 2, (1 - gamma) * tau / (2 - gamma)


@dataclass
class CvpRun:
    vector: Vector | None
    distance: Fraction | None
    candidates: list = field(default_factory=list)  # (d, z, distance)
    far_survivors: int = 0  # survivors with |last coefficient| ≥ 2
    survivor_count: int = 0


def run_approx_cvp(B: Basis, t: Sequence, tau=2, gamma=Fraction(1, 2), xi=None, alpha=Fraction(1, 4),
                   N: int = 1000, seed: int = 0) -> CvpRun:
    t = as_vector(t)
    tau, gamma = _frac(tau), _frac(gamma)
    xi = tau / 3 if xi is None else _frac(xi)
    alpha = _frac(alpha)
    lo, hi = cvp_xi_range(tau, gamma)
    if not lo < xi <= hi:
        raise ValueError(f"xi must lie in ({lo}, {hi}]")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = B.n
    top = n * B.max_column_norm()
    d = 1 + alpha
    ds = []
    while d <= top:
        ds.append(d)
        d *= 1 + alpha
    if not ds:
        ds = [top]
    seeds = np.random.SeedSequence(seed).spawn(len(ds))
    out = CvpRun(None, None)
    best = None
    for d, ss in zip(ds, seeds):
        emb = embed_cvp_basis(B, t, tau, d)
        Bp = emb.base
        cfg = SieveConfig(gamma, xi, d, N, seed=int(ss.generate_state(1, np.uint64)[0]))
        run = SieveRun(None, None, 0)
        R0 = (n + 1) * Bp.max_column_norm()
        sampler, S = _sieve_loop(Bp, cfg, R0, make_rng(cfg.seed), run)
        out.survivor_count += len(S)
        local = None
        for coeffs in {p.coeffs for p in S}:
            kt = coeffs[-1]
            if kt == 0:
                continue
            if abs(kt) != 1:
                out.far_survivors += 1
                continue
            # the lattice point is ±B·c[:n]; its offset from t is the survivor's head
            z = B.apply(coeffs[:n])
            z = z if kt == -1 else tuple(-x for x in z)
            dist = norm([a - b for a, b in zip(z, t)])
            key = (dist, z)
            if local is None or key < local:
                local = key
        if local is not None:
            out.candidates.append((d, local[1], local[0]))
            if best is None or local < best:
                best = local
    if best is not None:
        out.vector, out.distance = best[1], best[0]
    return out


def approx_cvp(B: Basis, t: Sequence, tau=2, gamma=Fraction(1, 2), xi=None, alpha=Fraction(1, 4),
               N: int = 1000, seed: int = 0) -> Vector:
    """2τ-approximate closest vector through the embedding lattice."""
    run = run_approx_cvp(B, t, tau, gamma, xi, alpha, N, seed)
    if run.vector is None:
        raise NotFound("no survivor with a nonzero last coordinate")
    return run.vector
