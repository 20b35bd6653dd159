"""Metric operations on regions: projections, pair distance, diameter,
proximinal cores, parallel translations and Chebyshev probes.

Minimizer *sets* are estimated, not just minimizers.  On a segment in a
smooth space (1 < p < inf, hyperbolic plane) the argmin interval of a convex
distance function is read off the sign of its derivative, which is exact up to
a rounding-level dead zone.  In the piecewise-linear spaces the sublevel set
``{f <= min f + tau}`` is measured at three geometrically spaced ``tau`` and
its endpoints are extrapolated to ``tau -> 0`` (Aitken delta^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import optimize
from scipy.optimize import linprog

from .errors import ConvergenceError, InputError, UnsupportedError
from .regions import Ball, PointCloud, Polytope, Region, Segment
from .spaces import DEFAULT_TOL, Euclidean, Hyperboloid, StarTree, make_rng, minkowski

SINGLETON_FACTOR = 10.0
ALTERNATING_CAP = 100_000
_TAU_LADDER = (1e-6, 1e-8, 1e-10)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


# -- one-dimensional convex helpers --------------------------------------------

def _golden_min(f, k: int, iters: int = 90):
    """Vectorized golden-section search of ``k`` convex functions on [0, 1]."""
    lo = np.zeros(k)
    hi = np.ones(k)
    for _ in range(iters):
        c = hi - _GOLDEN * (hi - lo)
        d = lo + _GOLDEN * (hi - lo)
        left = f(c) <= f(d)
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
    t = 0.5 * (lo + hi)
    ft = f(t)
    f0, f1 = f(np.zeros(k)), f(np.ones(k))
    t = np.where(f0 <= ft, 0.0, np.where(f1 < np.minimum(ft, f0), 1.0, t))
    return t, np.minimum(ft, np.minimum(f0, f1))


def _bisect_level(f, left, right, level, iters: int = 80):
    """Boundary of ``{f <= level}`` between ``left`` (outside) and ``right``
    (inside); works in either orientation."""
    left = np.array(left, dtype=float)
    right = np.array(right, dtype=float)
    inside_left = f(left) <= level
    for _ in range(iters):
        mid = 0.5 * (left + right)
        ok = f(mid) <= level
        right = np.where(ok, mid, right)
        left = np.where(ok, left, mid)
    return np.where(inside_left, left, right)


def _aitken(x0, x1, x2):
    d1 = x1 - x0
    d2 = x2 - x1
    denom = d2 - d1
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d1 != 0, d2 / d1, np.nan)
        acc = x2 - d2 * d2 / denom
    geometric = np.isfinite(ratio) & (ratio > 0) & (ratio < 0.9) & (denom != 0)
    return np.where(geometric & np.isfinite(acc), acc, x2)


def _argmin_interval(seg: Segment, tstar, fmin, f, witness):
    """Argmin interval ``[lo, hi]`` of the convex function ``f`` on ``seg``.

    ``witness(t)`` returns, for each ``t``, the point ``w`` whose distance to
    ``seg(t)`` defines ``f(t)``.  In smooth spaces the derivative sign of
    ``t -> d(seg(t), w)`` at fixed ``w`` (envelope theorem) locates the
    interval exactly; elsewhere ``f`` is piecewise linear near its minimum and
    the sublevel-set endpoints are extrapolated.
    """
    if _has_slope(seg.space) and seg.length > 0:
        def rising(t):
            return _slope(seg, t, witness(t)) > 0

        def falling(t):
            return _slope(seg, t, witness(t)) < 0

        # falling on [0, lo), rising on (hi, 1]: no need to trust tstar
        lo = _bisect_pred(falling, np.zeros_like(tstar), np.ones_like(tstar))
        hi = _bisect_pred(rising, np.ones_like(tstar), np.zeros_like(tstar))
        return lo, np.maximum(hi, lo)
    scale = np.maximum(1.0, np.abs(fmin))
    los, his = [], []
    for tau in _TAU_LADDER:
        level = fmin + tau * scale
        los.append(_bisect_level(f, np.zeros_like(tstar), tstar, level))
        his.append(_bisect_level(f, np.ones_like(tstar), tstar, level))
    lo = np.clip(_aitken(*los), 0.0, tstar)
    hi = np.clip(_aitken(*his), tstar, 1.0)
    return lo, hi


def _bisect_pred(outside, left, right, iters: int = 80):
    """Boundary between ``outside`` points (near ``left``) and the rest."""
    left = np.array(left, dtype=float)
    right = np.array(right, dtype=float)
    start_in = ~outside(left)
    for _ in range(iters):
        mid = 0.5 * (left + right)
        out = outside(mid)
        left = np.where(out, mid, left)
        right = np.where(out, right, mid)
    return np.where(start_in, left, right)


def _ball_interval(f, tstar, fmin, radius):
    """Exact ``{t : f(t) <= radius}`` for convex ``f``; empty where fmin > radius."""
    nonempty = fmin <= radius
    lo = _bisect_level(f, np.zeros_like(tstar), tstar, radius)
    hi = _bisect_level(f, np.ones_like(tstar), tstar, radius)
    return lo, hi, nonempty


# -- segment feet --------------------------------------------------------------

def segment_foot(seg: Segment, X: np.ndarray) -> np.ndarray:
    """Parameter of a nearest point of ``seg`` for each row of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    k = len(X)
    sp = seg.space
    if seg.length == 0:
        return np.zeros(k)
    if isinstance(sp, Euclidean) and sp.p == 2:
        d = seg.b - seg.a
        return np.clip((X - seg.a) @ d / (d @ d), 0.0, 1.0)
    if _has_slope(sp):
        neg0 = _slope(seg, np.zeros(k), X, 0.0) < 0
        pos1 = _slope(seg, np.ones(k), X, 0.0) > 0
        lo, hi = np.zeros(k), np.ones(k)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            s = _slope(seg, mid, X, 0.0)
            lo = np.where(s < 0, mid, lo)
            hi = np.where(s < 0, hi, mid)
        t = 0.5 * (lo + hi)
        return np.where(~neg0, 0.0, np.where(~pos1, 1.0, t))
    if isinstance(sp, StarTree):
        return _tree_foot(seg, X)
    t, _ = _golden_min(lambda t: sp.distance(seg.at(t), X), k)
    return t


def _tree_foot(seg: Segment, X: np.ndarray) -> np.ndarray:
    # the foot is an endpoint, the center, or X itself when X lies on seg
    sp, L = seg.space, seg.length
    center = np.array([1.0, 0.0])
    cand = [np.zeros(len(X)), np.ones(len(X))]
    for c in (np.broadcast_to(center, X.shape), X):
        da = sp.distance(seg.a, c)
        on = np.abs(da + sp.distance(c, seg.b) - L) <= 1e-12 * max(1.0, L)
        cand.append(np.where(on, da / L, 0.0))
    T = np.stack(cand, axis=1)
    D = sp.distance(seg.at(T), X[:, None, :])
    return T[np.arange(len(X)), np.argmin(D, axis=1)]


def _has_slope(space) -> bool:
    return isinstance(space, Hyperboloid) or (
        isinstance(space, Euclidean) and 1 < space.p < math.inf)


def _slope(seg: Segment, t, X, snap: float = 1e-13):
    """Derivative of ``t -> d(seg(t), x)`` for each row ``x`` of ``X``, up to a
    positive factor, with values at rounding level snapped to zero."""
    sp = seg.space
    t = np.asarray(t, dtype=float)
    if isinstance(sp, Euclidean):
        d = seg.b - seg.a
        v = seg.a + t[:, None] * d - X
        big = np.maximum(np.abs(v).max(axis=1, keepdims=True), 1.0)
        v = np.where(np.abs(v) <= snap * big, 0.0, v)
        terms = np.abs(v) ** (sp.p - 1) * np.sign(v) * d
        s = terms.sum(axis=1)
        return np.where(np.abs(s) <= snap * np.abs(terms).sum(axis=1), 0.0, s)
    L = seg.length
    tangent = -np.cosh((1 - t) * L)[:, None] * seg.a + np.cosh(t * L)[:, None] * seg.b
    s = -minkowski(tangent, X)
    size = np.linalg.norm(tangent, axis=1) * np.linalg.norm(X, axis=1)
    return np.where(np.abs(s) <= snap * size, 0.0, s)


# -- distances from points to regions ------------------------------------------

def _check_space(x_space, region: Region):
    if x_space is not None and x_space != region.space:
        raise InputError("point and region live in different spaces")


def _lexmin(points: np.ndarray) -> np.ndarray:
    order = np.lexsort(points.T[::-1])
    return points[order[0]]


def dist_batch(X, region: Region, tol: float = DEFAULT_TOL):
    """Distances and witnesses from each row of ``X`` to ``region``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    sp = region.space
    if isinstance(region, PointCloud):
        D = sp.distance(X[:, None, :], region.points[None, :, :])
        d = D.min(axis=1)
        W = np.empty_like(X, shape=(len(X), sp.coord_dim))
        for i in range(len(X)):
            W[i] = _lexmin(region.points[D[i] <= d[i] + tol])
        return d, W
    if isinstance(region, Segment):
        t = segment_foot(region, X)
        W = region.at(t)
        return sp.distance(W, X), W
    if isinstance(region, Ball):
        if region.polytope is not None:
            return dist_batch(X, region.polytope, tol)
        dc = sp.distance(X, region.center)
        outside = dc > region.radius
        frac = np.where(outside, region.radius / np.where(dc > 0, dc, 1.0), 1.0)
        W = sp.geodesic_point(np.broadcast_to(region.center, X.shape), X, frac)
        W = np.where(outside[:, None], W, X)
        return np.maximum(dc - region.radius, 0.0), W
    if isinstance(region, Polytope):
        out = [_polytope_project(x, region, tol) for x in X]
        return np.array([o[0] for o in out]), np.array([o[1] for o in out])
    raise InputError(f"unsupported region {region!r}")


def _polytope_lp(x, P: Polytope, extra=None):
    """LP data for ``min ||z - x||`` (1- or inf-norm).  Variables ``[z, s]``."""
    n = P.space.dim
    G, h = P.normals, P.offsets
    I = np.eye(n)
    if P.space.p == math.inf:
        c = np.concatenate([np.zeros(n), [1.0]])
        A = np.block([[G, np.zeros((len(h), 1))],
                      [I, -np.ones((n, 1))],
                      [-I, -np.ones((n, 1))]])
        b = np.concatenate([h, x, -x])
        nvar = n + 1
    else:
        c = np.concatenate([np.zeros(n), np.ones(n)])
        A = np.block([[G, np.zeros((len(h), n))],
                      [I, -I],
                      [-I, -I]])
        b = np.concatenate([h, x, -x])
        nvar = 2 * n
    return c, A, b, nvar


def _polytope_project(x, P: Polytope, tol):
    """(distance, lexicographically smallest witness, probes of the minimizer set)."""
    x = np.asarray(x, dtype=float)
    n = P.space.dim
    if P.contains(x, 0.0):
        return 0.0, x.copy(), x[None, :]
    if P.space.p in (1.0, math.inf):
        c, A, b, nvar = _polytope_lp(x, P)
        bounds = [(None, None)] * n + [(0, None)] * (nvar - n)
        res = linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
        m = float(res.fun)
        A2 = np.vstack([A, c])
        b2 = np.concatenate([b, [m + tol]])
        probes = []
        for i in range(n):
            for sign in (1.0, -1.0):
                obj = np.zeros(nvar)
                obj[i] = sign
                r = linprog(obj, A_ub=A2, b_ub=b2, bounds=bounds, method="highs")
                probes.append(r.x[:n])
        # lexicographic minimum by successive LPs
        A3, b3 = A2, b2
        for i in range(n):
            obj = np.zeros(nvar)
            obj[i] = 1.0
            r = linprog(obj, A_ub=A3, b_ub=b3, bounds=bounds, method="highs")
            row = np.zeros(nvar)
            row[i] = 1.0
            A3 = np.vstack([A3, row])
            b3 = np.concatenate([b3, [r.x[i] + tol]])
        w = r.x[:n]
        return float(P.space.distance(w, x)), w, np.unique(np.round(probes, 12), axis=0)
    p = P.space.p
    # start from the inf-norm projection, which is feasible
    c, A, b, nvar = _polytope_lp(x, Polytope(Euclidean(n, math.inf), P.normals, P.offsets))
    z0 = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * n + [(0, None)],
                 method="highs").x[:n]
    scale = max(float(P.space.distance(z0, x)), 1e-300)

    def F(z):
        return np.sum(np.abs((z - x) / scale) ** p)

    def dF(z):
        v = (z - x) / scale
        return p * np.abs(v) ** (p - 1) * np.sign(v) / scale

    res = optimize.minimize(F, z0, jac=dF, method="SLSQP",
                            constraints=[{"type": "ineq",
                                          "fun": lambda z: P.offsets - P.normals @ z,
                                          "jac": lambda z: -P.normals}],
                            options={"ftol": 1e-16, "maxiter": 1000})
    w = res.x
    return float(P.space.distance(w, x)), w, w[None, :]


def point_set_distance(x, A: Region, tol: float = DEFAULT_TOL):
    """``(dist(x, A), witness)``; ties are broken lexicographically."""
    x = A.space.point(x)
    if isinstance(A, Segment):
        proj = metric_projection(x, A, tol)
        return proj.distance, _lexmin(proj.points)
    d, W = dist_batch(x[None, :], A, tol)
    return float(d[0]), W[0]


@dataclass
class Projection:
    distance: float
    points: np.ndarray
    singleton: bool
    spread: float


def metric_projection(x, A: Region, tol: float = DEFAULT_TOL) -> Projection:
    """Nearest points of ``A`` to ``x``, deduplicated at resolution ``tol``."""
    if tol <= 0:
        raise InputError("tol must be positive")
    sp = A.space
    x = sp.point(x)
    if isinstance(A, Segment):
        pts, d = _segment_projection_set(A, x)
    elif isinstance(A, PointCloud):
        D = sp.distance(A.points, x)
        d = float(D.min())
        pts = A.points[D <= d + tol]
    elif isinstance(A, Polytope) or (isinstance(A, Ball) and A.polytope is not None):
        P = A if isinstance(A, Polytope) else A.polytope
        d, w, probes = _polytope_project(x, P, tol)
        pts = np.concatenate([w[None, :], probes])
    else:
        dd, W = dist_batch(x[None, :], A, tol)
        d, pts = float(dd[0]), W
    pts = _dedupe(sp, pts, tol)
    spread = _diameter_of_points(sp, pts)
    return Projection(float(d), pts, spread <= SINGLETON_FACTOR * tol, spread)


def _segment_projection_set(A: Segment, x):
    sp = A.space
    X = x[None, :]
    tstar = segment_foot(A, X)

    def f(t):
        return sp.distance(A.at(t), X)

    fmin = np.minimum(f(tstar), np.minimum(f(np.zeros(1)), f(np.ones(1))))
    lo, hi = _argmin_interval(A, tstar, fmin, f, lambda t: np.broadcast_to(x, (len(t), len(x))))
    ts = np.array([lo[0], tstar[0], hi[0]])
    return A.at(ts), float(fmin[0])


def _dedupe(space, pts, tol):
    keep = []
    for p in pts:
        if all(space.distance(p, q) > tol for q in keep):
            keep.append(p)
    return np.array(keep)


def _diameter_of_points(space, pts) -> float:
    if len(pts) < 2:
        return 0.0
    D = space.distance(pts[:, None, :], pts[None, :, :])
    return float(D.max())


# -- pairs of regions ----------------------------------------------------------

@dataclass
class ClosestPair:
    distance: float
    a: np.ndarray
    b: np.ndarray
    iterations: int = 0


@lru_cache(maxsize=256)
def closest_pair(A: Region, B: Region, tol: float = DEFAULT_TOL) -> ClosestPair:
    """Witnesses ``a, b`` of ``dist(A, B)``.  Results are memoized per region
    pair (regions are immutable); treat them as read-only."""
    if A.space != B.space:
        raise InputError("regions live in different spaces")
    if tol <= 0:
        raise InputError("tol must be positive")
    sp = A.space
    if isinstance(A, PointCloud) or isinstance(B, PointCloud):
        swap = not isinstance(A, PointCloud)
        C, R = (B, A) if swap else (A, B)
        d, W = dist_batch(C.points, R, tol)
        m = d.min()
        idx = np.flatnonzero(d <= m + tol)
        # lexicographic tie-break on the cloud side
        i = idx[np.lexsort(C.points[idx].T[::-1])[0]]
        c, r = C.points[i], W[i]
        return ClosestPair(float(m), r, c) if swap else ClosestPair(float(m), c, r)
    if isinstance(A, Segment) and isinstance(B, Segment):
        def g(t):
            return float(dist_batch(A.at(np.array([t])), B, tol)[0][0])
        res = optimize.minimize_scalar(g, bounds=(0.0, 1.0), method="bounded",
                                       options={"xatol": 1e-12, "maxiter": 200})
        t = min((0.0, 1.0, float(res.x)), key=g)
        a = A.at(np.array([t]))[0]
        d, W = dist_batch(a[None, :], B, tol)
        return ClosestPair(float(d[0]), a, W[0])
    return _alternating(A, B, tol)


def _alternating(A: Region, B: Region, tol) -> ClosestPair:
    sp = A.space
    a = A.sample(1, make_rng(0))[0]
    best = math.inf
    for it in range(1, ALTERNATING_CAP + 1):
        _, b = dist_batch(a[None, :], B, tol)
        b = b[0]
        _, a_new = dist_batch(b[None, :], A, tol)
        a_new = a_new[0]
        d = float(sp.distance(a_new, b))
        best = min(best, d)
        if sp.distance(a_new, a) < tol:
            return ClosestPair(d, a_new, b, it)
        a = a_new
    raise ConvergenceError(f"alternating projections did not settle in {ALTERNATING_CAP} rounds",
                           best=best, iterations=ALTERNATING_CAP)
    raise ConvergenceError("alternating projections hit the iteration cap", best=best,
                           iterations=ALTERNATING_CAP)


def set_pair_distance(A: Region, B: Region, tol: float = DEFAULT_TOL) -> float:
    return closest_pair(A, B, tol).distance


def diameter(A: Region, tol: float = DEFAULT_TOL) -> float:
    sp = A.space
    if isinstance(A, PointCloud):
        return _diameter_of_points(sp, A.points)
    if isinstance(A, Segment):
        return A.length
    if isinstance(A, Ball):
        # every implemented space extends geodesics through the center
        return 2.0 * A.radius
    if isinstance(A, Polytope):
        return _diameter_of_points(sp, A.vertices)
    raise InputError(f"unsupported region {A!r}")


# -- proximinal cores ----------------------------------------------------------

@dataclass
class PairGeometry:
    dist: float
    A0: Region | None
    B0: Region | None
    witness: tuple
    h: np.ndarray | None = None
    sharp: bool = False
    parallel: bool = False
    approximate: bool = False
    notes: list = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.A0 is None or self.B0 is None

    @property
    def C0(self) -> Region | None:
        """The third parallel set ``A0 + 2h`` (linear mode only)."""
        if self.h is None or self.A0 is None:
            return None
        from .regions import translate
        return translate(self.A0, 2.0 * self.h)


def _core_side(R: Region, other: Region, dist: float, witness, tol, samples):
    """Points of ``R`` realizing ``dist`` to ``other``."""
    sp = R.space
    if isinstance(R, PointCloud):
        d, _ = dist_batch(R.points, other, tol)
        keep = R.points[d <= dist + tol]
        return (PointCloud(sp, keep) if len(keep) else None), False
    if isinstance(R, Segment):
        def f(t):
            return dist_batch(R.at(t), other, tol)[0]
        tstar = segment_foot(R, witness[None, :])
        fmin = np.minimum(f(tstar), dist)
        lo, hi = _argmin_interval(R, tstar, fmin, f,
                                  lambda t: dist_batch(R.at(t), other, tol)[1])
        a, b = R.at(lo[0]), R.at(hi[0])
        if sp.distance(a, b) <= tol:
            b = a
        return Segment(sp, a, b), False
    # sampled convex region: project samples of the other side onto R
    rng = make_rng(0)
    cand = [witness]
    cand.extend(dist_batch(other.sample(samples, rng), R, tol)[1])
    cand.extend(R.sample(samples, rng))
    cand = np.array(cand)
    d, _ = dist_batch(cand, other, tol)
    keep = _dedupe(sp, cand[d <= dist + tol], tol)
    return (PointCloud(sp, keep, approximate=True) if len(keep) else None), True


@lru_cache(maxsize=256)
def extract_proximinal_core(A: Region, B: Region, tol: float = DEFAULT_TOL,
                            samples: int = 64) -> PairGeometry:
    """Proximinal cores ``A0, B0`` with sharpness and translation data.
    Memoized like :func:`closest_pair`."""
    pair = closest_pair(A, B, tol)
    A0, approx_a = _core_side(A, B, pair.distance, pair.a, tol, samples)
    B0, approx_b = _core_side(B, A, pair.distance, pair.b, tol, samples)
    core = PairGeometry(pair.distance, A0, B0, (pair.a, pair.b),
                        approximate=approx_a or approx_b)
    if core.empty:
        core.notes.append("empty core at tolerance")
        return core
    core.sharp = _is_sharp(core, A, B, tol)
    if A.space.is_linear:
        h = detect_parallel_translation(core, tol)
        if h is not None:
            core.h = h
            core.parallel = core.sharp
    return core


def _probe_points(R: Region, n: int = 5) -> np.ndarray:
    return R.sample(n, make_rng(1))


def _is_sharp(core: PairGeometry, A: Region, B: Region, tol) -> bool:
    sp = A.space
    if isinstance(A, PointCloud) and isinstance(B, PointCloud):
        D = sp.distance(core.A0.points[:, None, :], core.B0.points[None, :, :])
        near = D <= core.dist + tol
        return bool(np.all(near.sum(axis=1) == 1) and np.all(near.sum(axis=0) == 1))
    for x in _probe_points(core.A0):
        if not metric_projection(x, B, tol).singleton:
            return False
    for y in _probe_points(core.B0):
        if not metric_projection(y, A, tol).singleton:
            return False
    return True


def hausdorff_gap(R: Region, S: Region, shift, tol: float = DEFAULT_TOL,
                  samples: int = 64) -> float:
    """Sampled Hausdorff distance between ``R + shift`` and ``S``."""
    rng = make_rng(2)
    r = R.sample(samples, rng) + shift
    s = S.sample(samples, rng) - shift
    return float(max(dist_batch(r, S, tol)[0].max(), dist_batch(s, R, tol)[0].max()))


def detect_parallel_translation(core: PairGeometry, tol: float = DEFAULT_TOL):
    """Shift ``h`` with ``B0 = A0 + h`` and ``||h|| = dist``, or None."""
    if core.empty:
        return None
    sp = core.A0.space
    if not sp.is_linear:
        raise UnsupportedError("parallel translation needs a linear space")
    A0, B0 = core.A0, core.B0
    cands = []
    if isinstance(A0, Segment) and isinstance(B0, Segment):
        cands = [B0.a - A0.a, B0.a - A0.b]
    elif isinstance(A0, PointCloud) and isinstance(B0, PointCloud):
        a = _lexmin(A0.points)
        d = sp.distance(B0.points, a)
        cands = list(B0.points[d <= core.dist + tol] - a)
    cands.append(core.witness[1] - core.witness[0])
    for h in cands:
        if abs(float(sp.norm(h)) - core.dist) > tol:
            continue
        if hausdorff_gap(A0, B0, h, tol) <= tol:
            return h
    return None


@dataclass
class ChebyshevReport:
    verdict: str
    checked: int
    vacuous: bool = False
    witness: np.ndarray | None = None
    projections: np.ndarray | None = None
    spread: float = 0.0

    def to_json(self):
        out = {"verdict": self.verdict, "checked": self.checked, "vacuous": self.vacuous}
        if self.witness is not None:
            out["witness"] = self.witness.tolist()
            out["projections"] = self.projections.tolist()
            out["spread"] = self.spread
        return out


def chebyshev_for_proximinal(A: Region, B: Region, tol: float = DEFAULT_TOL,
                             samples: int = 33, seed: int = 0) -> ChebyshevReport:
    """Is ``P_A(x)`` a singleton for every sampled proximinal ``x`` in ``B``?"""
    core = extract_proximinal_core(A, B, tol)
    if core.B0 is None:
        return ChebyshevReport("PASS", 0, vacuous=True)
    xs = core.B0.sample(samples, make_rng(seed))
    for x in xs:
        proj = metric_projection(x, A, tol)
        if not proj.singleton:
            far = proj.points[np.argmax(A.space.distance(proj.points, proj.points[0]))]
            return ChebyshevReport("FAIL", len(xs), witness=x,
                                   projections=np.array([proj.points[0], far]),
                                   spread=proj.spread)
    return ChebyshevReport("PASS", len(xs))
