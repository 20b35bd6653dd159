import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from proxilab import (AffinePiece, CyclicMap, Euclidean, InputError, MembershipError,
                      PointCloud, Segment, SolverConfig, orbit_bound, rate_estimate,
                      solve_best_proximity, uniqueness_probe, verify_cyclic_contraction,
                      verify_suzuki_condition)


def test_contraction_examples(strips, flats):
    assert verify_cyclic_contraction(strips).verdict == "PASS"
    assert verify_cyclic_contraction(flats).verdict == "PASS"
    assert verify_suzuki_condition(strips).verdict == "PASS"
    assert verify_suzuki_condition(flats).verdict == "PASS"


def test_identity_like_map_fails(plane):
    A = Segment(plane, [0, 0], [0, 1])
    B = Segment(plane, [1, 0], [1, 1])
    T = CyclicMap(A, B, AffinePiece(np.eye(2), [1, 0]), AffinePiece(np.eye(2), [-1, 0]), 0.01)
    rep = verify_cyclic_contraction(T)
    assert rep.verdict == "FAIL" and rep.worst_slack < 0
    x, y = rep.witness
    # k d(x,y) + (1-k) dist < d(Tx,Ty) on the reported pair
    lhs = oracles.pnorm(T(x) - T(y), 2)
    assert lhs > 0.01 * oracles.pnorm(np.subtract(x, y), 2) + 0.99


def test_suzuki_violation_on_clouds():
    sp = Euclidean(1)
    A = PointCloud(sp, [[float(i)] for i in range(5)])
    B = PointCloud(sp, [[float(i) + 10] for i in range(5)])
    # reverses the order and blows gaps up: violates both conditions
    flip = AffinePiece([[-1.0]], [14.0])
    back = AffinePiece([[-1.0]], [14.0])
    T = CyclicMap(A, B, flip, back, 0.5)
    assert verify_cyclic_contraction(T, samples=10).verdict == "FAIL"
    rep = verify_suzuki_condition(T, samples=10)
    assert rep.verdict == "FAIL"


def test_orbit_bound_examples(strips):
    assert orbit_bound(strips, [0, 1], 10) == pytest.approx(math.sqrt(1.25))
    assert orbit_bound(strips, [0, 0], 7) == 1
    assert orbit_bound(strips, [0, 0.5], 0) == pytest.approx(oracles.pnorm([1, -0.25], 2))
    with pytest.raises(InputError):
        orbit_bound(strips, [0, 0], -1)


def test_solver_fixed_start_and_flats(strips, flats):
    z, tr = solve_best_proximity(strips, [0, 0])
    assert np.array_equal(z, [0, 0]) and len(tr.points) == 1
    z, tr = solve_best_proximity(flats, [0.3, 0])
    assert tr.converged and tr.residuals[0] == 0
    assert np.allclose(z, [0.3, 0])


def test_solver_trace_csv(strips):
    _, tr = solve_best_proximity(strips, [0, 1])
    lines = tr.to_csv().splitlines()
    assert lines[0] == "step,x0,x1,residual"
    assert lines[1] == "0,0,1,0.1180339887498949"
    assert len(lines) == len(tr.points) + 1


def test_membership_checked(plane):
    A = Segment(plane, [0, 0], [0, 1])
    B = Segment(plane, [1, 0], [1, 1])
    bad = CyclicMap(A, B, AffinePiece(np.eye(2), [2, 0]), AffinePiece(np.eye(2), [-1, 0]), 0.5)
    with pytest.raises(MembershipError) as err:
        solve_best_proximity(bad, [0, 0.5])
    assert np.allclose(err.value.image, [2, 0.5])
    with pytest.raises(InputError):
        solve_best_proximity(bad, [5, 5])


def test_divergence_is_reported():
    # a rotation by 90 degrees on two circles never settles
    sp = Euclidean(2)
    ang = np.linspace(0, 2 * np.pi, 4, endpoint=False)
    circ = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    A, B = PointCloud(sp, circ), PointCloud(sp, 3 * circ)
    R = np.array([[0, -1], [1, 0]])
    T = CyclicMap(A, B, AffinePiece(3 * R, [0, 0]), AffinePiece(R / 3, [0, 0]), 0.5)
    z, tr = solve_best_proximity(T, [1, 0], SolverConfig(max_steps=500))
    assert tr.termination == "diverged"
    assert len(tr.points) <= 60


def test_max_steps_cap(strips):
    _, tr = solve_best_proximity(strips, [0, 1], SolverConfig(max_steps=3))
    assert tr.termination == "max_steps" and len(tr.points) == 4


def test_rate_examples(strips):
    _, tr = solve_best_proximity(strips, [0, 1])
    fit = rate_estimate(tr)
    assert abs(fit.rate - 1 / 16) < 5e-3 and not fit.flagged
    geo = rate_estimate([0.3 ** n for n in range(12)])
    assert abs(geo.rate - 0.3) < 1e-12
    flat = rate_estimate([0.5] * 8)
    assert flat.rate == 1.0 and flat.flagged
    assert rate_estimate([1.0, 0.1]).rate is None


def test_uniqueness_examples(strips, flats):
    assert uniqueness_probe(strips, 10, seed=3).verdict == "PASS"
    rep = uniqueness_probe(flats, [[0.2, 0], [0.8, 0]])
    assert rep.verdict == "FAIL"
    assert sorted(w[0] for w in rep.witness) == pytest.approx([0.2, 0.8])
    one = uniqueness_probe(strips, [[0, 1]])
    assert one.verdict == "PASS" and one.vacuous


def test_config_validation():
    with pytest.raises(InputError):
        SolverConfig(tol=0)
    with pytest.raises(InputError):
        SolverConfig(max_steps=0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0.05, 0.95))
def test_strips_orbit_matches_closed_form(s, k):
    sp = Euclidean(2)
    A = Segment(sp, [0, 0], [0, 1])
    B = Segment(sp, [1, 0], [1, 1])
    M = [[0, 0], [0, k]]
    T = CyclicMap(A, B, AffinePiece(M, [1, 0]), AffinePiece(M, [0, 0]), max(k, 0.5))
    _, tr = solve_best_proximity(T, [0, s], SolverConfig(max_steps=5))
    for n, x in enumerate(tr.points):
        assert x[1] == pytest.approx(s * k ** (2 * n), rel=1e-12, abs=1e-300)
