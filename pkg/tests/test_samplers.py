import math
from fractions import Fraction as F

import numpy as np
import pytest

from infsieve.geometry import collision_loss
from infsieve.instances import InstanceSpec, generate
from infsieve.lattice import Basis, is_lattice_member, norm
from infsieve.samplers import (
    KleinParams,
    KleinSampler,
    PairSampler,
    klein_parameter,
    klein_sample,
    make_rng,
    sample_initial_lattice_vectors,
    sample_pair,
    sample_z,
    uniform_box,
)


def test_uniform_box_bounds_and_mean():
    rng = make_rng(1)
    d = F(3, 2)
    pts = [uniform_box(3, d, rng) for _ in range(2000)]
    assert all(norm(p) <= d for p in pts)
    rng = make_rng(2)
    xs = np.array([float(uniform_box(1, 1, rng)[0]) for _ in range(100_000)])
    se = 1 / math.sqrt(3 * 100_000)
    assert abs(xs.mean()) < 4 * se
    frac = (xs > 0).mean()
    assert abs(frac - 0.5) < 4 * math.sqrt(0.25 / 100_000)


def test_pair_identity_is_fractional_part():
    rng = make_rng(3)
    for _ in range(200):
        p = sample_pair(Basis.identity(2), 2, rng)
        assert p.y == tuple(x - math.floor(x) for x in p.e)


def test_pair_membership_random_bases():
    for seed in range(10):
        B = generate(InstanceSpec("random-integer", 3, 10, seed))
        S = PairSampler(B, F(7, 3))
        rng = make_rng(seed)
        for _ in range(50):
            p = S.sample(rng)
            assert S.is_member(p)
            assert is_lattice_member(p.lattice_vector, B)
            assert B.apply(p.coeffs) == p.lattice_vector
            x = B.solve(p.y)
            assert all(0 <= xi < 1 for xi in x)


def test_pair_diag10():
    B = Basis.diagonal([10, 10])
    rng = make_rng(4)
    for _ in range(1000):
        p = sample_pair(B, 1, rng)
        diff = p.lattice_vector
        assert all(x.denominator == 1 and x % 10 == 0 for x in diff)
        assert p.y == tuple(x % 10 for x in p.e)


def test_pairs_start_inside_initial_radius():
    B = generate(InstanceSpec("random-integer", 4, 10, 9))
    R0 = B.n * B.max_column_norm()
    S = PairSampler(B, F(1, 2))
    rng = make_rng(0)
    for _ in range(200):
        p = S.sample(rng)
        assert norm(p.y) <= R0 and S.is_member(p)


def test_sampler_determinism():
    B = Basis([[2, 0], [1, 2]])
    a = PairSampler(B, 2).sample_many(20, make_rng(11))
    b = PairSampler(B, 2).sample_many(20, make_rng(11))
    assert a == b
    P = KleinParams(klein_parameter(B), B)
    za = [tuple(KleinSampler(P).sample_coeffs(make_rng(5))) for _ in range(3)]
    assert len(set(za)) == 1


@pytest.mark.parametrize("s", [0.8, 3.0, 10.0])
def test_sample_z_matches_exact_pmf(s):
    rng = make_rng(6)
    m = 40_000
    xs = np.array([sample_z(0.0, s, rng) for _ in range(m)])
    ks = np.arange(-int(15 * s) - 2, int(15 * s) + 3)
    w = np.exp(-np.pi * ks**2 / s**2)
    w /= w.sum()
    for k, p in zip(ks, w):
        if p * m < 5:
            continue
        seen = int((xs == k).sum())
        assert abs(seen - p * m) <= 5 * math.sqrt(m * p * (1 - p)), (k, seen, p * m)
    assert xs.var() == pytest.approx(float((w * ks**2).sum()), rel=0.1 if s > 1 else 0.3)


def test_sample_z_off_centre():
    rng = make_rng(7)
    xs = np.array([sample_z(2.3, 5.0, rng) for _ in range(20_000)])
    assert xs.mean() == pytest.approx(2.3, abs=0.05)


def test_klein_identity_one_dim():
    B = Basis.identity(1)
    P = KleinParams(10.0, B)
    rng = make_rng(8)
    xs = np.array([float(klein_sample(P, (0,), rng)[0]) for _ in range(20_000)])
    ks = np.arange(-100, 101)
    w = np.exp(-np.pi * ks**2 / 100)
    var = float((w * ks**2).sum() / w.sum())
    assert abs(xs.mean()) < 4 * math.sqrt(var / len(xs))
    assert xs.var() == pytest.approx(100 / (2 * math.pi), rel=0.10)
    assert xs.var() == pytest.approx(var, rel=0.05)


def test_klein_symmetry():
    B = generate(InstanceSpec("random-integer", 2, 6, 1))
    P = KleinParams(klein_parameter(B) * 2, B)
    S = KleinSampler(P)
    rng = make_rng(9)
    Z = np.array([S.sample_coeffs(rng) for _ in range(20_000)])
    X = Z @ np.array([[float(x) for x in c] for c in B.columns])
    # v and −v equally likely: the sign of the first nonzero coordinate is balanced
    lead = np.array([np.sign(r[np.flatnonzero(r)[0]]) for r in X if np.any(r)])
    pos = (lead > 0).mean()
    assert abs(pos - 0.5) < 4 * math.sqrt(0.25 / len(lead))


def test_klein_params_validated():
    B = Basis.identity(3)
    with pytest.raises(ValueError):
        KleinParams(klein_parameter(B) / 2, B)


def test_initial_vectors_members_and_scale():
    for seed in range(5):
        B = generate(InstanceSpec("random-integer", 4, 10, seed))
        vs = sample_initial_lattice_vectors(B, 1000, seed)
        assert all(is_lattice_member(v, B) for v in vs[:200])
        from infsieve.lattice import lll_reduce
        s = klein_parameter(lll_reduce(B))
        n = B.n
        assert max(norm(v) for v in vs) <= n * s * math.sqrt(n) * 10


def test_initial_vectors_collision_count():
    # identity₂ with the default small s has a tiny support, so repeats follow the collision formula
    B = Basis.identity(2)
    N = 30
    rng = np.random.default_rng(10)
    P = KleinParams(klein_parameter(B), B)
    S = KleinSampler(P)
    pool = np.array([S.sample_coeffs(rng) for _ in range(200_000)])
    _, counts = np.unique(pool, axis=0, return_counts=True)
    probs = counts / counts.sum()
    trials = []
    for t in range(300):
        vs = sample_initial_lattice_vectors(B, N, 1000 + t)
        trials.append(N - len(set(vs)))
    # expected repeats for a non-uniform law: Σ over items of E[copies − 1 | present]
    expected = N - float(np.sum(1 - (1 - probs) ** N))
    assert np.mean(trials) == pytest.approx(expected, rel=0.1)
    # and the uniform-law formula bounds it from below
    assert expected >= collision_loss(len(probs), N) - 1e-9
