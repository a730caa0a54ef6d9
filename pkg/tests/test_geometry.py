import itertools
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infsieve import geometry as g
from infsieve.report import emit_volume_table


def test_lattice_point_count_examples():
    assert g.lattice_point_count_bound(1, 1, 2) == 9
    assert g.lattice_point_count_bound(F(2, 5), 1, 3) == 1
    assert g.lattice_point_count_bound(F(5, 2), 1, 2) == 36
    pts = sum(1 for x in itertools.product(range(-3, 4), repeat=2) if max(map(abs, x)) <= 2.5)
    assert pts <= 36
    # exact Python int, no wraparound
    assert g.lattice_point_count_bound(100, 1, 40) == 201**40


def test_box_overlap_examples():
    assert g.box_overlap_volume((0, 0, 0), 1) == 8
    assert g.box_overlap_volume((1, 1), 1) == 1
    assert g.box_overlap_volume((F(1, 2), F(6, 5)), 1) == F(6, 5)
    mc = g.mc_box_overlap((0.5, 1.2), 1.0)
    assert abs(mc.estimate - 1.2) / 1.2 < 0.01
    with pytest.raises(ValueError):
        g.box_overlap_volume((3, 0), 1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.fractions(-2, 2, max_denominator=30), min_size=1, max_size=5),
       st.fractions(1, 3, max_denominator=30))
def test_box_overlap_exact_product(v, a):
    expected = math.prod(2 * a - abs(x) for x in v)
    assert g.box_overlap_volume(v, a) == expected
    assert isinstance(g.box_overlap_volume(v, a), F)


def test_good_pair_examples():
    lam = 1.0
    # all coordinates equal to λ, ξ = 1: each overlap covers (1/2)^n
    n = 3
    single = math.prod((2 - 1) / 2 for _ in range(n))
    assert single == 0.5**n
    q = g.good_pair_probability(1, [1.0] * n, lam, n)
    assert q == pytest.approx(2 * 0.5**n)
    q1 = g.good_pair_probability(1, [1.0, 0, 0], lam, 3)
    assert q1 == pytest.approx(2 * 0.5 - 0)
    assert g.good_pair_probability(1, [3.0, 0], lam) == 0.0


def test_good_pair_lower_bound_random():
    rng = np.random.default_rng(5)
    xi, n = 0.868, 4
    cs = -math.log2(1 - 1 / (2 * xi))
    for _ in range(2000):
        u = rng.uniform(-1, 1, n)
        u[rng.integers(n)] = rng.choice([-1.0, 1.0])
        assert g.good_pair_probability(xi, u, 1.0, n) >= 2 ** (-cs * n) - 1e-12


def test_nv_fraction_limits():
    assert g.nv_expected_fraction(1, 1) == pytest.approx(0.5)
    assert g.nv_expected_fraction(1, 4) == pytest.approx(27 / 128)
    assert g.nv_expected_fraction(0.9, 2) == pytest.approx(0.25 * 1.9 * (0.375 * 1.9 + 0.025 * math.log(0.9)))
    with pytest.raises(ValueError):
        g.nv_expected_fraction(0, 3)


def test_nv_fraction_mc_example():
    cf = g.nv_expected_fraction(0.9, 2)
    assert cf == pytest.approx(0.3372, abs=5e-4)
    assert g.mc_nv_fraction(0.9, 2).agrees(cf, rel=0.02)


def test_two_level_limit_and_mc():
    g1 = 1.267952
    n = 3
    lim = g1 / 2 * (0.25 + g1 / 2 - (g1 - 1) ** 2 / 4) ** (n - 1)
    assert g.two_level_expected_fraction(g1, 1, n) == pytest.approx(lim)
    assert g.two_level_expected_fraction(g1, 0.999999, n) == pytest.approx(lim, rel=1e-4)
    assert g.mc_two_level_fraction(g1, 0.9999, n).agrees(lim, rel=0.005)
    cf = g.two_level_expected_fraction(1.2, 0.95, 2)
    assert g.mc_two_level_fraction(1.2, 0.95, 2).agrees(cf, rel=0.02)
    with pytest.raises(ValueError):
        g.two_level_expected_fraction(1.5, 0.9, 2)


def test_two_level_at_unit_radius_tracks_nv():
    # with γ₁ → 1 the inner-radius corona overlap approaches the NV one
    a = g.two_level_expected_fraction(1.000001, 0.9, 3)
    b = g.exact_corona_fraction(1.0, 0.9, 3)
    assert a == pytest.approx(b, rel=0.05)


def test_provable_constants_birthday():
    c = g.provable_constants(0.67, 0.868, birthday=True)
    assert c.c_c == pytest.approx(math.log2(3))
    assert c.c_b == pytest.approx(math.log2(7))
    assert abs(c.c_time - 2.82) <= 0.01
    assert g.provable_constants(0.999, 0.868).c_c == pytest.approx(math.log2(3))
    with pytest.raises(ValueError):
        g.provable_constants(0.67, 0.5)


def test_approx_constants():
    tau, _ = g.approx_constants(F(2, 3), 1)
    assert tau == pytest.approx(4)
    # the 3ⁿ and 4ⁿ forms hold for γ just above 2/3 and 1/2, where ⌊2/γ⌋ drops
    eps = F(1, 10**6)
    for gamma, c, xi_of in ((F(2, 3) + eps, 3, lambda t: t / 4), (F(1, 2) + eps, 4, lambda t: t / 3)):
        for tau in (F(3), F(4), F(6)):
            _, e = g.approx_constants(gamma, xi_of(tau))
            factor = tau / (tau - 2) if c == 3 else 2 * tau / (2 * tau - 3)
            assert e == pytest.approx(math.log2(c) + math.log2(factor))
    # exactly at γ = 1/2 the grid has five cells per axis
    _, e = g.approx_constants(F(1, 2), F(2, 3))
    assert e == pytest.approx(math.log2(5) + 2)


def test_heuristic_constants():
    h = g.heuristic_constants(1)
    assert h.k_C == pytest.approx(4 / 3)
    assert h.space_exp == pytest.approx(0.415, abs=0.001)
    assert h.time_exp == pytest.approx(0.83, abs=0.001)
    t = g.two_level_constants(1.267952, 0.999999)
    assert t.k_C1 == pytest.approx(1.1547, abs=1e-3)
    assert t.k_C2 == pytest.approx(1.1547, abs=1e-3)
    assert t.k_C1 * t.k_C2 == pytest.approx(4 / 3, abs=1e-3)
    assert t.time_exp == pytest.approx(0.62, abs=0.01)


def test_collision_loss():
    assert g.collision_loss(10, 1) == 0
    assert g.collision_loss(2, 2) == pytest.approx(0.5)
    assert g.collision_loss(10**6, 100) == pytest.approx(0.00495, rel=0.01)
    rng = np.random.default_rng(1)
    draws = rng.integers(0, 2, size=(100_000, 2))
    lost = (draws[:, 0] == draws[:, 1]).mean()
    assert lost == pytest.approx(0.5, abs=0.01)


def test_collision_variance_matches_simulation():
    N, p = 8, 20
    rng = np.random.default_rng(3)
    losses = [p - len(set(rng.integers(0, N, p))) for _ in range(20_000)]
    assert np.mean(losses) == pytest.approx(g.collision_loss(N, p), abs=0.05)
    assert np.var(losses) == pytest.approx(g.collision_loss_variance(N, p), rel=0.05)


def test_exact_integral_agrees_with_closed_form_near_one():
    for n in (2, 5):
        assert g.exact_corona_fraction(0.97, 0.97, n) == pytest.approx(g.nv_expected_fraction(0.97, n), rel=0.02)


def test_volume_table_rows():
    text = emit_volume_table([1, 2], [0.9, 0.999], samples=200_000, two_level=[(1.2, 0.95)])
    rows = [r.split(",") for r in text.strip().splitlines()]
    assert rows[0] == ["n", "gamma", "gamma1", "gamma2", "closed_form", "mc_estimate", "std_err", "rel_err"]
    by = {(r[0], r[1], r[2], r[3]): r for r in rows[1:]}
    assert float(by[("1", "0.999", "", "")][4]) == pytest.approx(0.5, abs=1e-3)
    assert float(by[("2", "0.9", "", "")][7]) <= 0.02
    assert float(by[("2", "", "1.2", "0.95")][7]) <= 0.02
    with pytest.raises(ValueError):
        emit_volume_table([2], [0.9], samples=10)
