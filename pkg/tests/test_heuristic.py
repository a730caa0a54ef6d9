import math
from fractions import Fraction as F

import numpy as np
import pytest

from infsieve.errors import NotFound
from infsieve.geometry import heuristic_constants
from infsieve.heuristic import (
    HeuristicConfig,
    _plan_two_level,
    default_sample_count,
    lattice_sieve,
    nv_svp,
    nv_svp_two_level,
    run_nv_svp,
    run_nv_svp_two_level,
    sieve_coefficients,
    two_level_sieve,
)
from infsieve.instances import InstanceSpec, generate
from infsieve.lattice import Basis, is_lattice_member, norm
from infsieve.oracle import brute_svp


def test_lattice_sieve_constructed():
    S = [(1, 0), (F(9, 10), 0)]
    # with γ = 0.95 the second vector already has norm ≤ γR and passes through
    assert lattice_sieve(S, 0.95) == [(F(9, 10), 0)]
    # below 0.9 it is reduced against the first centre
    assert lattice_sieve(S, 0.85) == [(F(-1, 10), 0)]


def test_lattice_sieve_pass_through_and_bound():
    rng = np.random.default_rng(0)
    S = [tuple(int(x) for x in rng.integers(-20, 21, 3)) for _ in range(200)]
    R = max(norm(v) for v in S)
    out = lattice_sieve(S, 0.8)
    assert all(norm(v) <= F(4, 5) * R for v in out)
    short = [v for v in S if norm(v) <= F(4, 5) * R]
    assert all(v in out for v in short)
    with pytest.raises(ValueError):
        lattice_sieve(S, 0.4)


def test_two_level_outer_hit_inner_miss():
    # R = 1; c is the outer centre, v is within γ₁ of c but not within γ₂
    c = (1, 0)
    v = (0, 1)
    out = two_level_sieve([c, v], F(6, 5), F(9, 10))
    assert out == []


def test_two_level_inner_hit():
    c = (1, 0)
    v = (F(19, 20), F(1, 2))
    out = two_level_sieve([c, v], F(6, 5), F(9, 10))
    assert out == [(F(-1, 20), F(1, 2))]
    assert norm(out[0]) <= F(9, 10)


def test_two_level_bad_parameters():
    with pytest.raises(ValueError):
        two_level_sieve([(1, 0)], 1.5, 0.9)
    with pytest.raises(ValueError):
        two_level_sieve([(1, 0)], 0.95, 0.9)


def test_two_level_and_single_share_postcondition():
    rng = np.random.default_rng(1)
    S = [tuple(int(x) for x in rng.integers(-30, 31, 4)) for _ in range(300)]
    R = max(norm(v) for v in S)
    for out in (lattice_sieve(S, 0.9), two_level_sieve(S, 1.2, 0.9)):
        assert all(norm(v) <= F(9, 10) * R for v in out)


def test_float_planner_agrees_with_exact_pass():
    rng = np.random.default_rng(2)
    Z = rng.integers(-6, 7, size=(400, 3))
    cols = np.eye(3)
    Zs, _ = sieve_coefficients(Z, cols, 0.9)
    exact = lattice_sieve([tuple(int(x) for x in r) for r in Z], F(9, 10))
    assert sorted(map(tuple, Zs.tolist())) == sorted(tuple(int(x) for x in v) for v in exact)
    Zt, _ = sieve_coefficients(Z, cols, two_level=(1.2, 0.9))
    exact2 = two_level_sieve([tuple(int(x) for x in r) for r in Z], F(6, 5), F(9, 10))
    assert sorted(map(tuple, Zt.tolist())) == sorted(tuple(int(x) for x in v) for v in exact2)


def test_two_level_comparisons_bounded():
    rng = np.random.default_rng(3)
    X = rng.uniform(-1, 1, size=(3000, 6))
    _, _, st = _plan_two_level(X, 1.267952, 0.97)
    per_vector = st.comparisons / st.sieved
    assert per_vector <= len(st.inner_sizes) + max(st.inner_sizes)


SMALL_N = pytest.param(
    2, marks=pytest.mark.xfail(strict=True, reason="N = 8 Klein samples on Z^2 are usually all zero (NotFound)")
)


def _identity_wins(run, n, trials=20):
    wins = 0
    for s in range(trials):
        try:
            wins += run(Basis.identity(n), HeuristicConfig(seed=s)).norm == 1
        except NotFound:
            pass
    return wins


@pytest.mark.parametrize("n", [SMALL_N, 3, 5, 7, 9, 10])
def test_nv_identity(n):
    assert _identity_wins(run_nv_svp, n) >= 16


@pytest.mark.parametrize("n", [SMALL_N, 3, 5, 7, 9, 10])
def test_nv_two_level_identity(n):
    assert _identity_wins(run_nv_svp_two_level, n) >= 16


def test_nv_random_bases_and_membership():
    for seed in range(6):
        B = generate(InstanceSpec("random-integer", 4, 10, seed))
        lam = brute_svp(B)[1]
        for run in (run_nv_svp(B, HeuristicConfig(seed=seed)), run_nv_svp_two_level(B, HeuristicConfig(seed=seed))):
            assert is_lattice_member(run.vector, B) and any(run.vector)
            assert run.norm >= lam
            assert run.trace and run.trace[0]["size"] == run.initial_size


def test_nv_radius_shrinks():
    B = generate(InstanceSpec("random-integer", 6, 1000, 2))
    run = run_nv_svp(B, HeuristicConfig(seed=1))
    radii = [t["radius"] for t in run.trace]
    assert all(b <= 0.97 * a * (1 + 1e-9) for a, b in zip(radii, radii[1:]))


def test_nv_centre_counts_within_poly_bound():
    k = heuristic_constants(0.97).k_C
    for n in (4, 6, 8):
        B = generate(InstanceSpec("random-integer", n, 1000, n))
        run = run_nv_svp(B, HeuristicConfig(seed=n))
        worst = max(t["centres"] for t in run.trace)
        assert worst <= (n + 1) * k**n * n, (n, worst)


def test_nv_notfound_when_all_samples_vanish():
    B = Basis.diagonal([1000])
    hit = False
    for seed in range(50):
        try:
            run_nv_svp(B, HeuristicConfig(N=1, seed=seed))
        except NotFound:
            hit = True
            break
    assert hit


def test_sample_count_default():
    assert default_sample_count(4) == math.ceil((4 / 3) ** 4 * 16)
    assert default_sample_count(10) == 1776


def test_iteration_cap_honoured():
    run = run_nv_svp(Basis.identity(4), HeuristicConfig(seed=0, max_iterations=1))
    assert run.iterations <= 1
