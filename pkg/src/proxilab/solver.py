"""Cyclic maps on a set pair and the double-step best proximity iteration."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from .errors import InputError, MembershipError
from .regions import Region
from .setgeom import dist_batch, set_pair_distance
from .spaces import DEFAULT_TOL, make_rng

PATIENCE = 50
DECREASE = 1.0 - 1e-12
# residuals below this (relative to max(1, dist)) are rounding noise
NOISE_FLOOR = 1e-12


# -- maps ----------------------------------------------------------------------

@dataclass(frozen=True)
class AffinePiece:
    """``x -> matrix @ x + offset`` in raw coordinates."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        c = np.asarray(self.offset, dtype=float).reshape(-1)
        if M.shape != (len(c), len(c)):
            raise InputError(f"affine matrix must be {len(c)}x{len(c)}")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "offset", c)

    def __call__(self, X):
        return np.atleast_2d(X) @ self.matrix.T + self.offset

    def to_json(self):
        return {"matrix": self.matrix.tolist(), "offset": self.offset.tolist()}


class CyclicMap:
    """A map ``T`` with ``T(A) ⊆ B`` and ``T(B) ⊆ A``, given piecewise.

    ``on_a`` and ``on_b`` take a batch of points (rows) and return their
    images.  Every evaluation checks that the images land in the other set.
    """

    def __init__(self, A: Region, B: Region, on_a: Callable, on_b: Callable,
                 k: float, tol: float = DEFAULT_TOL, name: str = "map"):
        if A.space != B.space:
            raise InputError("A and B live in different spaces")
        if not 0 < k < 1:
            raise InputError("contraction constant k must lie in (0, 1)")
        if tol <= 0:
            raise InputError("tol must be positive")
        self.A, self.B = A, B
        self.on_a, self.on_b = on_a, on_b
        self.k = float(k)
        self.tol = float(tol)
        self.name = name
        self.space = A.space

    @cached_property
    def dist(self) -> float:
        return set_pair_distance(self.A, self.B, self.tol)

    def side(self, x) -> str:
        x = self.space.point(x)
        if dist_batch(x[None, :], self.A, self.tol)[0][0] <= self.tol:
            return "A"
        if dist_batch(x[None, :], self.B, self.tol)[0][0] <= self.tol:
            return "B"
        raise InputError(f"point {x.tolist()} lies in neither A nor B")

    def apply(self, X, side: str) -> np.ndarray:
        """Images of rows of ``X`` taken from set ``side`` ("A" or "B")."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        fn, target = (self.on_a, self.B) if side == "A" else (self.on_b, self.A)
        Y = np.array([self.space.canonical(y) for y in np.atleast_2d(fn(X))])
        d, _ = dist_batch(Y, target, self.tol)
        bad = np.flatnonzero(d > self.tol)
        if len(bad):
            i = bad[0]
            other = "B" if side == "A" else "A"
            raise MembershipError(
                f"T maps {X[i].tolist()} to {Y[i].tolist()}, outside {other}",
                point=X[i], image=Y[i])
        return Y

    def __call__(self, x, side: str | None = None) -> np.ndarray:
        x = self.space.point(x)
        return self.apply(x[None, :], side or self.side(x))[0]


def _other(side: str) -> str:
    return "B" if side == "A" else "A"


# -- contraction conditions ----------------------------------------------------

@dataclass
class ContractionReport:
    verdict: str
    worst_slack: float
    witness: tuple | None
    checked: int

    def to_json(self):
        out = {"verdict": self.verdict, "worst_slack": self.worst_slack,
               "checked": self.checked}
        if self.witness is not None:
            out["witness"] = [np.asarray(w).tolist() for w in self.witness]
        return out


def _pair_samples(T: CyclicMap, samples: int, seed):
    rng = make_rng(seed)
    X = T.A.sample(samples, rng)
    Y = T.B.sample(samples, rng)
    return X, Y, T.apply(X, "A"), T.apply(Y, "B")


def _slack_report(slack, X, Y) -> ContractionReport:
    i, j = np.unravel_index(np.argmin(slack), slack.shape)
    worst = float(slack[i, j])
    verdict = "PASS" if worst >= 0 else "FAIL"
    witness = None if verdict == "PASS" else (X[i], Y[j])
    return ContractionReport(verdict, worst, witness, slack.size)


def verify_cyclic_contraction(T: CyclicMap, samples: int = 64, seed=0) -> ContractionReport:
    """Check ``d(Tx,Ty) <= k d(x,y) + (1-k) dist(A,B)`` on sampled pairs of A×B.

    Slack is reported with the tolerance already added, so ``worst_slack < 0``
    is a violation.
    """
    X, Y, TX, TY = _pair_samples(T, samples, seed)
    sp = T.space
    dxy = sp.distance(X[:, None, :], Y[None, :, :])
    dT = sp.distance(TX[:, None, :], TY[None, :, :])
    slack = T.k * dxy + (1 - T.k) * T.dist + T.tol - dT
    return _slack_report(slack, X, Y)


def verify_suzuki_condition(T: CyclicMap, samples: int = 64, seed=0) -> ContractionReport:
    """The weaker condition with ``max{d(x,y), d(x,Tx), d(Ty,y)}`` on the right."""
    X, Y, TX, TY = _pair_samples(T, samples, seed)
    sp = T.space
    dxy = sp.distance(X[:, None, :], Y[None, :, :])
    big = np.maximum(dxy, np.maximum(sp.distance(X, TX)[:, None], sp.distance(Y, TY)[None, :]))
    dT = sp.distance(TX[:, None, :], TY[None, :, :])
    slack = T.k * big + (1 - T.k) * T.dist + T.tol - dT
    return _slack_report(slack, X, Y)


def orbit_bound(T: CyclicMap, x, N: int) -> float:
    """``max_{0<=j<=N} d(Tx, T^{2j} x)``."""
    if N < 0:
        raise InputError("N must be >= 0")
    side = T.side(x)
    x = T.space.point(x)
    tx = T.apply(x[None, :], side)[0]
    best = float(T.space.distance(tx, x))
    cur = x
    for _ in range(N):
        cur = T.apply(T.apply(cur[None, :], side), _other(side))[0]
        best = max(best, float(T.space.distance(tx, cur)))
    return best


# -- iteration -----------------------------------------------------------------

@dataclass(frozen=True)
class SolverConfig:
    tol: float = DEFAULT_TOL
    max_steps: int = 1000
    seed: int = 0
    samples: int = 64

    def __post_init__(self):
        if not (self.tol > 0 and self.max_steps > 0 and self.samples > 0 and self.seed >= 0):
            raise InputError("solver settings must be positive")


@dataclass
class IterationTrace:
    """Double-step orbit ``x_n = T^{2n} x_0`` with images ``T x_n``."""

    side: str
    dist: float
    points: list = field(default_factory=list)
    images: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    termination: str = "running"
    limit: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.termination == "converged"

    def to_csv(self) -> str:
        dim = len(self.points[0])
        head = ["step"] + [f"x{i}" for i in range(dim)] + ["residual"]
        rows = [",".join(head)]
        for n, (x, r) in enumerate(zip(self.points, self.residuals)):
            rows.append(",".join([str(n)] + [format(float(v), ".17g") for v in x]
                                 + [format(float(r), ".17g")]))
        return "\n".join(rows) + "\n"


def solve_best_proximity(T: CyclicMap, x0, cfg: SolverConfig = SolverConfig()):
    """Iterate ``x <- T(T(x))`` until ``x`` is a best proximity point.

    Returns the last computed iterate.  Stops once both the gap ``d(x, Tx) - dist(A,B)`` and the double-step move
    ``d(x, T^2 x)`` are within ``cfg.tol``.  The gap alone is quadratic in the
    distance to the limit on flat pairs and would stop far too early.
    """
    sp = T.space
    side = T.side(x0)
    x = sp.canonical(sp.point(x0))
    trace = IterationTrace(side, T.dist)
    best, since = math.inf, 0
    for n in range(cfg.max_steps + 1):
        tx = T.apply(x[None, :], side)[0]
        x2 = T.apply(tx[None, :], _other(side))[0]
        r = float(sp.distance(x, tx)) - T.dist
        move = float(sp.distance(x, x2))
        trace.points.append(x)
        trace.images.append(tx)
        trace.residuals.append(r)
        trace.steps.append(move)
        if r <= cfg.tol and move <= cfg.tol:
            trace.termination = "converged"
            trace.limit = x2
            return x2, trace
        if n == cfg.max_steps:
            break
        merit = r + move
        if merit < DECREASE * best:
            best, since = merit, 0
        else:
            since += 1
            if since >= PATIENCE:
                trace.termination = "diverged"
                trace.limit = x
                return x, trace
        x = x2
    trace.termination = "max_steps"
    trace.limit = x
    return x, trace


@dataclass
class RateFit:
    rate: float | None
    fit_residual: float | None
    used: int
    flagged: bool
    note: str = ""

    def to_json(self):
        return {"rate": self.rate, "fit_residual": self.fit_residual, "used": self.used,
                "flagged": self.flagged, "note": self.note}


def rate_estimate(trace_or_residuals) -> RateFit:
    """Per-double-step geometric factor from a log-linear least-squares fit.

    Only the leading run of residuals above rounding noise enters the fit.
    """
    if isinstance(trace_or_residuals, IterationTrace):
        res = np.asarray(trace_or_residuals.residuals, dtype=float)
        floor = NOISE_FLOOR * max(1.0, trace_or_residuals.dist)
    else:
        res = np.asarray(trace_or_residuals, dtype=float)
        floor = 0.0
    low = np.flatnonzero(~(res > floor))
    prefix = res[: low[0]] if len(low) else res
    n = len(prefix)
    if n < 4:
        return RateFit(None, None, n, True, "fewer than 4 positive residuals")
    steps = np.arange(n, dtype=float)
    logs = np.log(prefix)
    slope, icept = np.polyfit(steps, logs, 1)
    fit = float(np.sqrt(np.mean((logs - (slope * steps + icept)) ** 2)))
    rate = float(np.exp(slope))
    if rate >= 1.0 - 1e-12:
        return RateFit(1.0 if abs(slope) < 1e-12 else rate, fit, n, True, "no geometric decay")
    return RateFit(rate, fit, n, False, "partial fit" if len(low) else "")


@dataclass
class UniquenessReport:
    verdict: str
    spread: float
    limits: np.ndarray
    witness: tuple | None = None
    vacuous: bool = False
    runs: list = field(default_factory=list)

    def to_json(self):
        out = {"verdict": self.verdict, "spread": self.spread, "vacuous": self.vacuous,
               "limits": self.limits.tolist(), "runs": self.runs}
        if self.witness is not None:
            out["witness"] = [w.tolist() for w in self.witness]
        return out


def uniqueness_probe(T: CyclicMap, starts=10, cfg: SolverConfig = SolverConfig(),
                     seed=None) -> UniquenessReport:
    """Solve from several starts in A; PASS when all limits agree to 10·tol.

    ``starts`` is either a count (seeded draws from A) or explicit points.
    """
    if np.isscalar(starts):
        if int(starts) < 1:
            raise InputError("need at least one start")
        X = T.A.sample(int(starts), make_rng(cfg.seed if seed is None else seed))
    else:
        X = T.space.points(starts)
    limits, runs = [], []
    for x in X:
        z, tr = solve_best_proximity(T, x, cfg)
        limits.append(z)
        runs.append({"start": x.tolist(), "limit": z.tolist(),
                     "termination": tr.termination, "steps": len(tr.points) - 1})
    L = np.array(limits)
    if any(r["termination"] != "converged" for r in runs):
        return UniquenessReport("INCONCLUSIVE", math.nan, L, runs=runs)
    if len(L) < 2:
        return UniquenessReport("PASS", 0.0, L, vacuous=True, runs=runs)
    D = T.space.distance(L[:, None, :], L[None, :, :])
    i, j = np.unravel_index(np.argmax(D), D.shape)
    spread = float(D[i, j])
    if spread <= 10 * cfg.tol:
        return UniquenessReport("PASS", spread, L, runs=runs)
    return UniquenessReport("FAIL", spread, L, witness=(L[i], L[j]), runs=runs)
