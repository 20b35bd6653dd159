import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from proxilab import (Euclidean, Hyperboloid, InputError, PointCloud, Segment,
                      SemimetricContext, UnsupportedError, cat0_ball_identity_check,
                      compatibility_profile, d1_eval, extract_proximinal_core,
                      flat_quadrilateral_check, lift_map, semimetric_picard,
                      verify_d1_contraction, verify_domination, verify_semimetric_axioms)
from proxilab.scenarios import fermi, load_scenario, semimetric_context


@pytest.fixture
def ctx(plane):
    return SemimetricContext(Segment(plane, [1, 0], [1, 1]), 1.0, h=[1, 0])


def test_d1_examples(ctx):
    assert d1_eval(ctx, [1, 0.3], [1, 0.3]) == 0
    assert d1_eval(ctx, [1, 0], [1, 0.5]) == pytest.approx(math.sqrt(1.25) - 1, abs=1e-15)
    grid = oracles.d1_grid_infimum([1, 0], [1, 0.5], [1, 0], 1.0)
    assert abs(grid - (math.sqrt(1.25) - 1)) <= 1e-6


def test_d1_outside_core_rejected(ctx):
    with pytest.raises(InputError):
        d1_eval(ctx, [1, 0], [0, 0])


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_d1_symmetric_and_dominated(s, t):
    ctx = SemimetricContext(Segment(Euclidean(2), [1, 0], [1, 1]), 1.0, h=[1, 0])
    a = d1_eval(ctx, [1, s], [1, t])
    assert a == d1_eval(ctx, [1, t], [1, s])
    assert 0 <= a <= abs(s - t) + 1e-15


def test_axioms(ctx, plane):
    assert verify_semimetric_axioms(ctx).verdict == "PASS"
    wrong = SemimetricContext(ctx.B0, 1.0, h=[1.1, 0])
    rep = verify_semimetric_axioms(wrong)
    assert rep.verdict == "FAIL"
    assert rep.witness["axiom"] == "zero"
    point = SemimetricContext(PointCloud(plane, [[1, 0]]), 1.0, h=[1, 0])
    rep = verify_semimetric_axioms(point)
    assert rep.verdict == "PASS" and rep.vacuous


def test_domination(ctx):
    rep = verify_domination(ctx)
    assert rep.verdict == "PASS" and rep.checked >= 1000


def test_compatibility_profile(ctx):
    prof = compatibility_profile(ctx, [1, 0.5], eps_grid=(0.1, 0.01))
    for e, f, g in zip(prof.grid, prof.f, prof.g):
        assert f == pytest.approx(math.sqrt(2 * e + e * e), abs=1e-9)
        assert g == pytest.approx(math.sqrt(1 + e * e) - 1, abs=1e-9)
    assert not any(prof.saturated_f) and not any(prof.saturated_g)
    big = compatibility_profile(ctx, [1, 0.5], eps_grid=(5.0,))
    assert big.saturated_f[0]
    env = big.envelope
    assert all(a >= b for a, b in zip(env, env[1:]))


def test_lifted_map(strips, ctx):
    Tp = lift_map(strips, ctx)
    assert np.allclose(Tp([[1, 0.8]]), [[1, 0.4]])
    assert Tp.commute_defect == 0
    rep = verify_d1_contraction(Tp, ctx, 0.5)
    assert rep.verdict == "PASS"
    # the unit-gap example
    before = d1_eval(ctx, [1, 0], [1, 1])
    after = d1_eval(ctx, *Tp([[1, 0], [1, 1]]))
    assert after == pytest.approx(math.sqrt(1.25) - 1)
    assert after <= 0.5 * before


def test_picard(strips, ctx):
    Tp = lift_map(strips, ctx)
    b0, tr = semimetric_picard(Tp, ctx, [1, 1])
    assert np.linalg.norm(b0 - [1, 0]) <= 1e-9
    for n, b in enumerate(tr.points[:10]):
        assert b[1] == 2.0 ** -n
    b0, tr = semimetric_picard(Tp, ctx, [1, 0])
    assert len(tr.points) == 1
    with pytest.raises(InputError):
        semimetric_picard(Tp, ctx, [0, 0])


def test_flat_quadrilateral(plane, ctx):
    assert flat_quadrilateral_check(plane, [1, 0], [1, 1], ctx).verdict == "PASS"
    same = flat_quadrilateral_check(plane, [1, 0.5], [1, 0.5], ctx)
    assert same.verdict == "PASS" and same.vacuous
    with pytest.raises(UnsupportedError):
        flat_quadrilateral_check(Euclidean(2, 3.0), [1, 0], [1, 1], ctx)


def test_ball_identity(ctx):
    assert cat0_ball_identity_check(ctx, [1, 0.2]).verdict == "PASS"
    assert cat0_ball_identity_check(ctx, [1, 0.2], r=0.3).verdict == "PASS"
    sp = Euclidean(2, 4.0)
    lp = SemimetricContext(Segment(sp, [1, 0], [1, 1]), 1.0, h=[1, 0])
    with pytest.raises(UnsupportedError):
        cat0_ball_identity_check(lp, [1, 0])


def test_h2_geodesic_mode():
    sc = load_scenario("h2-geodesic-pair")
    ctx = semimetric_context(sc)
    assert ctx.mode == "geodesic"
    assert ctx.pairing_defect() <= 1e-9
    assert verify_semimetric_axioms(ctx).verdict == "PASS"
    assert verify_domination(ctx).verdict == "PASS"
    x = ctx.B0.sample(1, np.random.default_rng(0))[0]
    assert cat0_ball_identity_check(ctx, x, samples=200).verdict == "PASS"


def test_fermi_coordinates():
    H = Hyperboloid()
    p, q = fermi(0.3, 0.5), fermi(0.3, -0.5)
    assert H.distance(p, q) == pytest.approx(1.0, abs=1e-12)
    assert H.distance(fermi(0, 0), fermi(1.5, 0)) == pytest.approx(1.5, abs=1e-12)


def test_geodesic_mode_from_core(plane):
    A, B = Segment(plane, [0, 0], [0, 1]), Segment(plane, [1, 0], [1, 1])
    core = extract_proximinal_core(A, B)
    g = SemimetricContext(core.B0, core.dist, A0=core.A0)
    assert np.allclose(g.partner([[1, 0.25]]), [[0, 0.25]])
    with pytest.raises(InputError):
        SemimetricContext(core.B0, 1.0)
