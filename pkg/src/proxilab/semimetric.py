"""The semimetric d1 on the proximinal core B0 and the lifted map T'.

For ``x, y`` in ``B0`` with partners ``x', y'`` in ``A0`` (``x' = x - h`` in a
linear space) the two-ball definition reduces to

    d1(x, y) = max(d(y, x'), d(y', x)) - d,

because each ball condition ``d(., .) <= d + r`` is a threshold on ``r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InputError, MembershipError, UnsupportedError
from .regions import Region, Segment
from .setgeom import _bisect_level, dist_batch, segment_foot
from .solver import DECREASE, PATIENCE, CyclicMap, IterationTrace, SolverConfig
from .spaces import DEFAULT_TOL, make_rng


class SemimetricContext:
    """``B0``, the gap ``d`` and a pairing of ``B0`` with ``A0``.

    Linear mode takes a shift ``h`` (partner ``b - h``).  Geodesic mode takes a
    ``partner`` callable on batches, or projects onto ``A0`` when only that
    region is given.
    """

    def __init__(self, B0: Region, d: float, h=None, partner: Callable | None = None,
                 A0: Region | None = None, tol: float = DEFAULT_TOL):
        self.space = B0.space
        self.B0, self.d, self.tol = B0, float(d), float(tol)
        self.A0 = A0
        if h is not None:
            if not self.space.is_linear:
                raise UnsupportedError("linear mode needs a linear space")
            self.h = np.asarray(h, dtype=float)
            if self.h.shape != (self.space.coord_dim,):
                raise InputError("h has the wrong dimension")
            self.mode = "linear"
            self._partner = None
        else:
            if partner is None and A0 is None:
                raise InputError("geodesic mode needs a partner map or A0")
            self.h = None
            self.mode = "geodesic"
            self._partner = partner

    def partner(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.mode == "linear":
            return X - self.h
        if self._partner is not None:
            return np.atleast_2d(self._partner(X))
        return dist_batch(X, self.A0, self.tol)[1]

    def in_core(self, X) -> np.ndarray:
        return dist_batch(np.atleast_2d(X), self.B0, self.tol)[0] <= self.tol

    def pairing_defect(self, samples: int = 64, seed=0) -> float:
        """``max |d(b, partner b) - d|`` over sampled ``b``."""
        X = self.B0.sample(samples, make_rng(seed))
        return float(np.max(np.abs(self.space.distance(X, self.partner(X)) - self.d)))


def d1_batch(ctx: SemimetricContext, X, Y) -> np.ndarray:
    sp = ctx.space
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if ctx.mode == "linear":
        lo = sp.distance(Y, X - ctx.h)
        hi = sp.distance(Y, X + ctx.h)
    else:
        lo = sp.distance(Y, ctx.partner(X))
        hi = sp.distance(ctx.partner(Y), X)
    return np.maximum(lo, hi) - ctx.d


def d1_eval(ctx: SemimetricContext, x, y) -> float:
    x, y = ctx.space.point(x), ctx.space.point(y)
    if not ctx.in_core(np.stack([x, y])).all():
        raise InputError("d1 is defined on B0 only")
    return float(d1_batch(ctx, x, y)[0])


# -- sampled checks ------------------------------------------------------------

@dataclass
class CheckReport:
    verdict: str
    checked: int
    worst: float = 0.0
    witness: dict | None = None
    vacuous: bool = False
    notes: list = field(default_factory=list)

    def to_json(self):
        out = {"verdict": self.verdict, "checked": self.checked, "worst": self.worst,
               "vacuous": self.vacuous, "notes": list(self.notes)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _core_pairs(ctx, samples, seed):
    X = ctx.B0.sample(samples, make_rng(seed))
    i, j = np.triu_indices(len(X), 1)
    return X, X[i], X[j]


def verify_semimetric_axioms(ctx: SemimetricContext, samples: int = 48, seed=0) -> CheckReport:
    """Nonnegativity, symmetry and zero-iff-equal on sampled pairs of ``B0``.

    d1 grows quadratically near the diagonal, so "distinct" means
    ``d(x, y) > sqrt(tol)``; closer pairs are below resolution.
    """
    sp, tol = ctx.space, ctx.tol
    X, P, Q = _core_pairs(ctx, samples, seed)
    diag = d1_batch(ctx, X, X)
    i = int(np.argmax(np.abs(diag)))
    if abs(diag[i]) > tol:
        return CheckReport("FAIL", len(X), float(diag[i]),
                           {"axiom": "zero", "x": X[i].tolist(), "d1": float(diag[i])})
    if len(P) == 0:
        return CheckReport("PASS", len(X), vacuous=True)
    a, b = d1_batch(ctx, P, Q), d1_batch(ctx, Q, P)
    for name, bad in (("nonnegative", a < -tol), ("symmetric", np.abs(a - b) > tol),
                      ("zero", (a <= 0) & (sp.distance(P, Q) > math.sqrt(tol)))):
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            return CheckReport("FAIL", len(P), float(a[k]),
                               {"axiom": name, "x": P[k].tolist(), "y": Q[k].tolist(),
                                "d1": float(a[k]), "d1_swapped": float(b[k])})
    return CheckReport("PASS", len(P), float(np.max(np.abs(a - b))))


def verify_domination(ctx: SemimetricContext, samples: int = 48, seed=0) -> CheckReport:
    """``d1(x, y) <= d(x, y)`` on sampled pairs."""
    X, P, Q = _core_pairs(ctx, samples, seed)
    if len(P) == 0:
        return CheckReport("PASS", len(X), vacuous=True)
    gap = d1_batch(ctx, P, Q) - ctx.space.distance(P, Q)
    k = int(np.argmax(gap))
    if gap[k] > ctx.tol:
        return CheckReport("FAIL", len(P), float(gap[k]),
                           {"x": P[k].tolist(), "y": Q[k].tolist()})
    return CheckReport("PASS", len(P), float(gap[k]))


# -- compatibility -------------------------------------------------------------

@dataclass
class CompatibilityProfile:
    x: np.ndarray
    grid: list
    f: list
    g: list
    saturated_f: list
    saturated_g: list
    envelope: list
    flagged: bool = False
    notes: list = field(default_factory=list)

    def to_json(self):
        return {"x": self.x.tolist(), "grid": self.grid, "f": self.f, "g": self.g,
                "saturated_f": self.saturated_f, "saturated_g": self.saturated_g,
                "envelope": self.envelope, "flagged": self.flagged, "notes": list(self.notes)}


def _core_sample(ctx, n=512):
    return ctx.B0.sample(n, make_rng(5))


def _segment_reach(ctx, x, fn, level):
    """Endpoints of ``{t : fn(x, B0(t)) <= level}`` on both sides of ``x``."""
    B0 = ctx.B0
    tx = float(segment_foot(B0, x[None, :])[0])

    def f(t):
        return fn(np.broadcast_to(x, (len(t), len(x))), B0.at(t))

    lo = _bisect_level(f, np.zeros(1), np.full(1, tx), level)[0]
    hi = _bisect_level(f, np.ones(1), np.full(1, tx), level)[0]
    return B0.at(np.array([lo, hi]))


def _ball_diam(ctx, x, fn, level) -> float:
    sp = ctx.space
    if isinstance(ctx.B0, Segment):
        P = _segment_reach(ctx, x, fn, level)
        return float(sp.distance(P[0], P[1]))
    S = _core_sample(ctx)
    S = S[fn(np.broadcast_to(x, S.shape), S) <= level]
    if len(S) < 2:
        return 0.0
    return float(np.max(sp.distance(S[:, None, :], S[None, :, :])))


def _inner_radius(ctx, x, fn_in, fn_out, eps):
    """Largest ``rho`` with ``{fn_in(x,.) <= rho} ⊆ {fn_out(x,.) <= eps}``, and
    whether the whole region already fits."""
    sp = ctx.space
    if isinstance(ctx.B0, Segment):
        P = _segment_reach(ctx, x, fn_out, eps)
        ends = ctx.B0.at(np.array([0.0, 1.0]))
        out = fn_in(np.broadcast_to(x, P.shape), P)
        # boundary points strictly inside the segment bound the radius
        inner = sp.distance(P, ends) > ctx.tol
        if not inner.any():
            return float(np.max(fn_in(np.broadcast_to(x, ends.shape), ends))), True
        return float(np.min(out[inner])), False
    S = _core_sample(ctx)
    X = np.broadcast_to(x, S.shape)
    outside = fn_out(X, S) > eps
    if not outside.any():
        return float(np.max(fn_in(X, S))), True
    return float(np.min(fn_in(X, S)[outside])), False


def compatibility_profile(ctx: SemimetricContext, x, eps_grid=(0.5, 0.1, 0.01),
                          envelope_n: int = 10) -> CompatibilityProfile:
    """Radii ``f_x(e)`` (metric balls inside d1-balls) and ``g_x(e)`` (d1-balls
    inside metric balls) on ``B0``, plus ``diam B1(x, 1/n)`` for ``n <= envelope_n``.

    Saturated entries (the whole of ``B0`` fits) are capped at the region size.
    """
    sp = ctx.space
    x = sp.point(x)
    if not ctx.in_core(x)[0]:
        raise InputError("base point must lie in B0")

    def metric(X, Y):
        return sp.distance(X, Y)

    def semi(X, Y):
        return d1_batch(ctx, X, Y)

    eps_grid = [float(e) for e in eps_grid]
    f, g, sf, sg = [], [], [], []
    for e in eps_grid:
        rho, sat = _inner_radius(ctx, x, metric, semi, e)
        f.append(rho)
        sf.append(sat)
        s, sat = _inner_radius(ctx, x, semi, metric, e)
        g.append(s)
        sg.append(sat)
    env = [_ball_diam(ctx, x, semi, 1.0 / n) for n in range(1, envelope_n + 1)]
    notes = []
    flagged = False
    if isinstance(ctx.B0, Segment) and ctx.B0.length <= ctx.tol:
        flagged = True
        notes.append("B0 is a single point")
    elif not isinstance(ctx.B0, Segment) and len(ctx.B0.sample(2, make_rng(0))) < 2:
        flagged = True
        notes.append("B0 is a single point")
    if any(sf) or any(sg):
        notes.append("some radii saturate at the size of B0")
    return CompatibilityProfile(x, eps_grid, f, g, sf, sg, env, flagged, notes)


# -- lifted map ----------------------------------------------------------------

class LiftedMap:
    """``T'(b) = T b + h`` on ``B0`` (geodesic mode: the ``B0``-partner of ``T b``)."""

    def __init__(self, T: CyclicMap, ctx: SemimetricContext, commute_defect: float):
        self.T, self.ctx = T, ctx
        self.commute_defect = commute_defect

    def __call__(self, X) -> np.ndarray:
        ctx = self.ctx
        X = np.atleast_2d(np.asarray(X, dtype=float))
        TX = self.T.apply(X, "B")
        if ctx.mode == "linear":
            Y = TX + ctx.h
        else:
            Y = dist_batch(TX, ctx.B0, ctx.tol)[1]
        far = dist_batch(Y, ctx.B0, ctx.tol)[0]
        bad = np.flatnonzero(far > ctx.tol)
        if len(bad):
            i = bad[0]
            raise MembershipError(f"lifted map sends {X[i].tolist()} to {Y[i].tolist()}, "
                                  "outside B0", point=X[i], image=Y[i])
        return Y


def lift_map(T: CyclicMap, ctx: SemimetricContext, samples: int = 32, seed=0) -> LiftedMap:
    """Build ``T'`` and measure ``max d(T(b - h), T b + h)`` on samples."""
    X = ctx.B0.sample(samples, make_rng(seed))
    lifted = LiftedMap(T, ctx, 0.0)
    Y = lifted(X)
    if ctx.mode == "linear":
        lhs = T.apply(X - ctx.h, "A")
        defect = float(np.max(ctx.space.distance(lhs, Y)))
    else:
        lhs = T.apply(ctx.partner(X), "A")
        defect = float(np.max(ctx.space.distance(lhs, Y)))
    lifted.commute_defect = defect
    return lifted


def verify_d1_contraction(Tp: LiftedMap, ctx: SemimetricContext, k: float,
                          samples: int = 48, seed=0, separation: float = 1e-3) -> CheckReport:
    """``d1(T'x, T'y) <= k d1(x, y)`` on sampled pairs; ``worst`` is the largest
    ratio over pairs with ``d(x, y) >= separation``."""
    X, P, Q = _core_pairs(ctx, samples, seed)
    if len(P) == 0:
        return CheckReport("PASS", len(X), vacuous=True)
    TP, TQ = Tp(P), Tp(Q)
    before = d1_batch(ctx, P, Q)
    after = d1_batch(ctx, TP, TQ)
    slack = k * before + ctx.tol - after
    sep = ctx.space.distance(P, Q) >= separation
    ratio = float(np.max(after[sep] / before[sep])) if sep.any() else 0.0
    if slack.min() < 0:
        m = int(np.argmin(slack))
        return CheckReport("FAIL", len(P), ratio,
                           {"x": P[m].tolist(), "y": Q[m].tolist(),
                            "before": float(before[m]), "after": float(after[m])})
    return CheckReport("PASS", len(P), ratio, notes=[f"pairs separated: {int(sep.sum())}"])


def semimetric_picard(Tp: LiftedMap, ctx: SemimetricContext, b_start,
                      cfg: SolverConfig = SolverConfig()):
    """Iterate ``b <- T'b`` until ``d1(b, T'b)`` and ``d(b, T'b)`` are both
    within ``cfg.tol``.  Residuals in the trace are ``d1(b, T'b)``."""
    sp = ctx.space
    b = sp.canonical(sp.point(b_start))
    if not ctx.in_core(b)[0]:
        raise InputError("start point must lie in B0")
    trace = IterationTrace("B0", ctx.d)
    best, since = math.inf, 0
    for n in range(cfg.max_steps + 1):
        nb = Tp(b)[0]
        r = float(d1_batch(ctx, b, nb)[0])
        move = float(sp.distance(b, nb))
        trace.points.append(b)
        trace.images.append(nb)
        trace.residuals.append(r)
        trace.steps.append(move)
        if r <= cfg.tol and move <= cfg.tol:
            trace.termination = "converged"
            trace.limit = nb
            return nb, trace
        if n == cfg.max_steps:
            break
        merit = r + move
        if merit < DECREASE * best:
            best, since = merit, 0
        else:
            since += 1
            if since >= PATIENCE:
                trace.termination = "diverged"
                trace.limit = b
                return b, trace
        b = nb
    trace.termination = "max_steps"
    trace.limit = b
    return b, trace


# -- CAT(0) checks ---------------------------------------------------------------

def _require_cat0(space):
    if not space.is_cat0:
        raise UnsupportedError(f"{space} is not a CAT(0) model")


def flat_quadrilateral_check(space, x, y, ctx: SemimetricContext,
                             tol: float | None = None) -> CheckReport:
    """Do ``x, y`` and their partners span a Euclidean rectangle with sides
    ``d`` and ``d(x, y)``?"""
    _require_cat0(space)
    tol = ctx.tol if tol is None else tol
    x, y = space.point(x), space.point(y)
    xp, yp = ctx.partner(np.stack([x, y]))
    d, s = ctx.d, float(space.distance(x, y))
    diag = math.hypot(d, s)
    rel = {"side_x": float(space.distance(x, xp)) - d,
           "side_y": float(space.distance(y, yp)) - d,
           "opposite": float(space.distance(xp, yp)) - s,
           "diagonal_xy'": float(space.distance(x, yp)) - diag,
           "diagonal_x'y": float(space.distance(xp, y)) - diag}
    worst = max(rel, key=lambda k: abs(rel[k]))
    notes = [] if ctx.in_core(np.stack([x, y])).all() else ["x or y lies outside B0"]
    out = {"x": x.tolist(), "y": y.tolist(), "x_partner": xp.tolist(),
           "y_partner": yp.tolist(), "defects": rel}
    if abs(rel[worst]) > tol:
        out["violated"] = worst
        return CheckReport("FAIL", 1, abs(rel[worst]), out, notes=notes)
    return CheckReport("PASS", 1, abs(rel[worst]), out, vacuous=s <= tol, notes=notes)


def cat0_ball_identity_check(ctx: SemimetricContext, x, r: float | None = None,
                             samples: int = 1000, seed=0) -> CheckReport:
    """``d1(x, y) = sqrt(d^2 + d(x,y)^2) - d`` on sampled ``y`` in ``B0``, and
    the ball biconditional at radius ``r`` (random radii when ``r`` is None)."""
    sp = ctx.space
    _require_cat0(sp)
    x = sp.point(x)
    if not ctx.in_core(x)[0]:
        raise InputError("base point must lie in B0")
    rng = make_rng(seed)
    Y = ctx.B0.sample(samples, rng)
    X = np.broadcast_to(x, Y.shape)
    dxy = sp.distance(X, Y)
    d1 = d1_batch(ctx, X, Y)
    ident = np.sqrt(ctx.d ** 2 + dxy ** 2) - ctx.d
    err = np.abs(d1 - ident)
    k = int(np.argmax(err))
    if err[k] > ctx.tol:
        return CheckReport("FAIL", len(Y), float(err[k]),
                           {"relation": "identity", "y": Y[k].tolist(), "d1": float(d1[k]),
                            "expected": float(ident[k])})
    scale = max(float(dxy.max()), ctx.tol)
    R = np.full(len(Y), float(r)) if r is not None else rng.uniform(0, scale, len(Y))
    level = np.sqrt(ctx.d ** 2 + R ** 2) - ctx.d
    clear = np.abs(dxy - R) > ctx.tol
    mismatch = clear & ((d1 <= level) != (dxy <= R))
    if mismatch.any():
        m = int(np.flatnonzero(mismatch)[0])
        return CheckReport("FAIL", len(Y), float(err[k]),
                           {"relation": "ball", "y": Y[m].tolist(), "r": float(R[m])})
    return CheckReport("PASS", len(Y), float(err[k]))
