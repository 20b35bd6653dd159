"""Numbered acceptance criteria; a summary line per criterion is printed at the
end of the run (see conftest.py)."""

import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

import oracles
from proxilab import (CyclicMap, AffinePiece, Euclidean, Hyperboloid, PointCloud, Segment,
                      SemimetricContext, SolverConfig, StarTree, cat0_ball_identity_check,
                      chebyshev_for_proximinal, d1_eval, diameter, extract_proximinal_core,
                      flat_quadrilateral_check, lift_map, metric_projection, semimetric_picard,
                      set_pair_distance, solve_best_proximity, uc_check, uniqueness_probe,
                      verify_cyclic_contraction, verify_d1_contraction, verify_domination,
                      verify_semimetric_axioms, wuc_check)
from proxilab.scenarios import GALLERY
from proxilab.semimetric import d1_batch
from proxilab.spaces import brute_force_modulus, cat0_modulus, make_rng

crit = pytest.mark.criterion


@crit(1, "strips: residual < 1e-9 within 20 double-steps, limit (0,0), < 1 s")
def test_strips_convergence(plane):
    t0 = time.perf_counter()
    A = Segment(plane, [0, 0], [0, 1])
    B = Segment(plane, [1, 0], [1, 1])
    half = [[0, 0], [0, 0.5]]
    T = CyclicMap(A, B, AffinePiece(half, [1, 0]), AffinePiece(half, [0, 0]), 0.5)
    z, trace = solve_best_proximity(T, [0, 1], SolverConfig(tol=1e-9))
    elapsed = time.perf_counter() - t0
    steps = len(trace.points) - 1
    assert trace.converged
    assert steps <= 20
    assert min(trace.residuals) < 1e-9
    assert np.linalg.norm(z - [0, 0]) <= 1e-9
    assert elapsed < 1.0
    # iterates follow the closed-form orbit
    for n, x in enumerate(trace.points):
        assert np.allclose(x, oracles.strips_orbit(1.0, n), atol=1e-15)


@crit(2, "strips: 10 seeded random starts, pairwise spread <= 1e-8")
def test_strips_uniqueness(strips):
    rep = uniqueness_probe(strips, 10, SolverConfig(tol=1e-9), seed=7)
    assert rep.verdict == "PASS"
    assert len(rep.limits) == 10
    L = rep.limits
    spread = max(np.linalg.norm(a - b) for a in L for b in L)
    assert spread <= 1e-8


@crit(3, "strips: d*_n <= k^(2n) d*_0 + 1e-6 along the trace")
def test_residual_bound(strips):
    _, trace = solve_best_proximity(strips, [0, 1])
    r = np.asarray(trace.residuals)
    n = np.arange(len(r))
    assert len(r) > 5
    assert np.all(r <= strips.k ** (2 * n) * r[0] + 1e-6)


@crit(4, "max-norm flats: contraction PASS; UC, WUC, Chebyshev, uniqueness FAIL")
def test_maxnorm_degeneracy(flats):
    assert verify_cyclic_contraction(flats).verdict == "PASS"

    uc = uc_check(flats.A, flats.B, [0.5])
    assert uc.verdict == "FAIL"
    w = uc.witness
    # re-verify: a max-norm ball of radius 1+delta around the anchor holds A's
    # whole width, on a dense grid
    grid = np.stack([np.linspace(0, 1, 1001), np.zeros(1001)], axis=1)
    near = grid[oracles.pnorm(grid - w["anchor"], np.inf) <= 1 + w["delta"]]
    assert oracles.cloud_diam(near, np.inf) > 0.5
    assert uc_check(flats.A, flats.B, [0.5]).witness == w

    wuc = wuc_check(flats.A, flats.B)
    assert wuc.verdict == "FAIL"
    seq = wuc.witness["sequence"]
    assert seq[0] == [0.0, 0.0] and seq[1] == [1.0, 0.0]
    assert wuc.witness["anchor"] == [0.5, 1.0]
    for x in seq:
        assert oracles.pnorm(np.subtract(x, [0.5, 1.0]), np.inf) <= 1.0 + 1e-12

    cheb = chebyshev_for_proximinal(flats.A, flats.B)
    assert cheb.verdict == "FAIL"
    assert cheb.spread > 10 * 1e-9

    probe = uniqueness_probe(flats, [[0.2, 0], [0.8, 0]])
    assert probe.verdict == "FAIL"
    assert probe.spread == pytest.approx(0.6)


@crit(5, "strips: bisected delta(eps) meets the diameter bound on 100 anchors; table monotone")
def test_uc_characterization(strips):
    rep = uc_check(strips.A, strips.B, [0.5, 0.1, 0.01], samples=100)
    assert rep.verdict == "PASS"
    assert rep.samples == 100
    deltas = {row["eps"]: row["delta"] for row in rep.table}
    anchors = strips.B.sample(100, make_rng(0))
    for eps, delta in deltas.items():
        assert delta >= 1e-9
        worst = max(oracles.strips_near_diam(s, delta) for s in anchors[:, 1])
        assert worst <= eps + 1e-12
    ordered = [deltas[e] for e in sorted(deltas)]
    assert ordered == sorted(ordered)


@crit(6, "d1 closed form = grid infimum (1e-6) on 1000 pairs; axioms and domination")
def test_d1_correctness(plane):
    B0 = Segment(plane, [1, 0], [1, 1])
    ctx = SemimetricContext(B0, 1.0, h=[1, 0])
    rng = np.random.default_rng(11)
    s = rng.uniform(0, 1, (1000, 2))
    for a, b in s:
        x, y = [1.0, a], [1.0, b]
        grid = oracles.d1_grid_infimum(x, y, [1, 0], 1.0)
        assert abs(d1_eval(ctx, x, y) - grid) <= 1e-6
    axioms = verify_semimetric_axioms(ctx, samples=48)
    dom = verify_domination(ctx, samples=48)
    assert axioms.verdict == "PASS" and axioms.checked >= 1000
    assert dom.verdict == "PASS" and dom.worst <= 1e-9


@crit(7, "strips: d1 ratio <= 0.5 + 1e-9 on 1000 separated pairs; Picard limit matches solver")
def test_d1_contraction(strips, plane):
    ctx = SemimetricContext(Segment(plane, [1, 0], [1, 1]), 1.0, h=[1, 0])
    Tp = lift_map(strips, ctx)
    rep = verify_d1_contraction(Tp, ctx, 0.5, samples=48)
    assert rep.verdict == "PASS" and rep.checked >= 1000
    assert rep.worst <= 0.5 + 1e-9
    rng = np.random.default_rng(3)
    P = np.column_stack([np.ones(1000), rng.uniform(0, 1, 1000)])
    Q = np.column_stack([np.ones(1000), rng.uniform(0, 1, 1000)])
    sep = np.abs(P[:, 1] - Q[:, 1]) >= 1e-3
    ratio = d1_batch(ctx, Tp(P[sep]), Tp(Q[sep])) / d1_batch(ctx, P[sep], Q[sep])
    assert sep.sum() >= 990 and ratio.max() <= 0.5 + 1e-9

    b0, _ = semimetric_picard(Tp, ctx, [1, 1])
    z, _ = solve_best_proximity(strips, [1, 1])
    assert np.linalg.norm(b0 - [1, 0]) <= 1e-9
    assert np.linalg.norm(b0 - z) <= 1e-8


@crit(8, "CAT(0): d1 = sqrt(d^2 + d(x,y)^2) - d on 1000 pairs; flat rectangles vs tree")
def test_cat0_identity(plane):
    ctx = SemimetricContext(Segment(plane, [1, 0], [1, 1]), 1.0, h=[1, 0])
    rng = np.random.default_rng(5)
    X = np.column_stack([np.ones(1000), rng.uniform(0, 1, 1000)])
    Y = np.column_stack([np.ones(1000), rng.uniform(0, 1, 1000)])
    t = np.abs(X[:, 1] - Y[:, 1])
    assert np.max(np.abs(d1_batch(ctx, X, Y) - (np.sqrt(1 + t ** 2) - 1))) <= 1e-9
    assert cat0_ball_identity_check(ctx, [1, 0], samples=1000).verdict == "PASS"
    assert flat_quadrilateral_check(plane, [1, 0], [1, 1], ctx).verdict == "PASS"

    tree = StarTree(3)
    A = Segment(tree, [1, 1], [1, 2])
    B = Segment(tree, [2, 1], [2, 2])
    core = extract_proximinal_core(A, B)
    assert core.dist == pytest.approx(2.0)
    tctx = SemimetricContext(core.B0, core.dist, A0=core.A0)
    x = core.B0.a
    for y in ([2, 1.5], [2, 2], [3, 1], [1, 1.5]):
        assert oracles.tree_dist(tuple(x), tuple(y)) > 0
        assert flat_quadrilateral_check(tree, x, y, tctx).verdict == "FAIL"


@crit(9, "CAT(0) modulus matches brute force at eps 0.5, 1, 2 (plane, h2); CN on 1e4 triples")
@pytest.mark.parametrize("space,r", [(Euclidean(2, 2.0), 1.0), (Hyperboloid(), 1e-3)],
                         ids=["plane", "h2"])
def test_modulus(space, r):
    a = space.point([0, 0] if isinstance(space, Euclidean) else [0, 0, 1])
    for eps in (0.5, 1.0, 2.0):
        exact = 1 - math.sqrt(1 - eps * eps / 4)
        assert cat0_modulus(eps) == pytest.approx(exact, abs=1e-15)
        assert abs(brute_force_modulus(space, a, r, eps) - exact) <= 1e-6

    rng = np.random.default_rng(9)
    if isinstance(space, Euclidean):
        P = rng.uniform(-3, 3, (3, 10_000, 2))
    else:
        uv = rng.uniform(-2, 2, (3, 10_000, 2))
        P = np.concatenate([uv, np.sqrt(1 + (uv ** 2).sum(-1, keepdims=True))], axis=-1)
    x, y, z = P
    m = space.midpoint(x, y)
    d = space.distance
    lhs = d(m, z) ** 2
    rhs = (d(x, z) ** 2 + d(y, z) ** 2) / 2 - d(x, y) ** 2 / 4
    assert np.all(lhs <= rhs + 1e-9)


@crit(9, "CAT(0) modulus matches brute force at eps 0.5, 1, 2 (plane, h2); CN on 1e4 triples")
def test_cn_tree():
    tree = StarTree(4)
    rng = np.random.default_rng(2)
    pts = np.column_stack([rng.integers(1, 5, (30_000,)), rng.uniform(0, 3, 30_000)])
    x, y, z = pts.reshape(3, 10_000, 2)
    m = tree.midpoint(x, y)
    d = tree.distance
    assert np.all(d(m, z) ** 2 <= (d(x, z) ** 2 + d(y, z) ** 2) / 2 - d(x, y) ** 2 / 4 + 1e-9)


@crit(10, "point clouds up to 200 points: dist, diam, projections, cores = exhaustive search")
@pytest.mark.parametrize("seed", range(5))
def test_cloud_oracles(seed):
    rng = np.random.default_rng(seed)
    sp = Euclidean(2, [1.0, 2.0, 3.0, math.inf, 2.0][seed])
    n, m = rng.integers(2, 200, 2)
    # integer coordinates produce ties on purpose
    Ap = rng.integers(0, 12, (n, 2)).astype(float)
    Bp = rng.integers(0, 12, (m, 2)).astype(float) + [13, 0]
    A, B = PointCloud(sp, Ap), PointCloud(sp, Bp)
    assert set_pair_distance(A, B) == oracles.cloud_dist(Ap, Bp, sp.p)
    assert diameter(A) == oracles.cloud_diam(Ap, sp.p)
    for x in Bp[:20]:
        got = metric_projection(x, A).points
        want = oracles.cloud_projection(x, Ap, sp.p)
        assert sorted(map(tuple, got)) == sorted(map(tuple, np.unique(want, axis=0)))
    core = extract_proximinal_core(A, B)
    A0, B0 = oracles.cloud_cores(Ap, Bp, sp.p)
    assert sorted(map(tuple, core.A0.points)) == sorted(map(tuple, A0))
    assert sorted(map(tuple, core.B0.points)) == sorted(map(tuple, B0))


@crit(11, "proxilab solve: byte-identical report.json across two runs, every gallery scenario")
@pytest.mark.parametrize("name", GALLERY)
def test_determinism(name, tmp_path):
    outs = []
    for run in ("a", "b"):
        out = tmp_path / run
        proc = subprocess.run([sys.executable, "-m", "proxilab", "solve", name, "--seed", "3",
                               "--out", str(out)], capture_output=True, text=True)
        assert proc.returncode in (0, 2, 3), proc.stderr
        outs.append((out / "report.json").read_bytes())
    assert outs[0] == outs[1]
    report = json.loads(outs[0])
    assert report["seed"] == 3
