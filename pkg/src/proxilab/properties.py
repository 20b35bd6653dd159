"""Grid-and-budget certificates for the near-set properties UC, WUC and W-WUC.

All three concern the near sets ``N(y, e) = A ∩ B(y, dist(A,B) + e)`` for
anchors ``y`` in ``B``.  Verdicts are resolution statements: every report
carries the grids and budgets it was computed with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .regions import PointCloud, Region, Segment
from .setgeom import (_aitken, _ball_interval, dist_batch, diameter, segment_foot,
                      set_pair_distance)
from .spaces import DEFAULT_TOL, make_rng

DELTA_FLOOR = 1e-9
CLUSTER_GAP = 1e-2
LENGTH_BUDGET = 1000
EPS_LADDER = tuple(10.0 ** -j for j in range(10))


@dataclass
class PropertyReport:
    property: str
    verdict: str
    table: list
    grids: dict
    samples: int
    witness: dict | None = None
    notes: list = field(default_factory=list)

    def to_json(self):
        out = {"property": self.property, "verdict": self.verdict, "table": self.table,
               "grids": self.grids, "samples": self.samples, "notes": list(self.notes)}
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class NearSets:
    """Per-anchor near-set data at one radius."""

    nonempty: np.ndarray
    diam: np.ndarray
    p: np.ndarray  # diameter-realizing pair
    q: np.ndarray
    approximate: bool = False


def near_sets(A: Region, Y, radius: float, tol: float = DEFAULT_TOL) -> NearSets:
    sp = A.space
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    k = len(Y)
    if isinstance(A, Segment):
        def f(t):
            return sp.distance(A.at(t), Y)
        tstar = segment_foot(A, Y)
        lo, hi, ok = _ball_interval(f, tstar, f(tstar), radius)
        P, Q = A.at(lo), A.at(hi)
        return NearSets(ok, np.where(ok, sp.distance(P, Q), 0.0), P, Q)
    if isinstance(A, PointCloud):
        pts, approx = A.points, A.approximate
    else:
        rng = make_rng(3)
        pts = np.concatenate([A.sample(256, rng), dist_batch(Y, A, tol)[1]])
        approx = True
    D = sp.distance(Y[:, None, :], pts[None, :, :])
    ok = np.zeros(k, bool)
    diam = np.zeros(k)
    P = np.repeat(pts[:1], k, axis=0)
    Q = P.copy()
    for i in range(k):
        S = pts[D[i] <= radius]
        if not len(S):
            continue
        ok[i] = True
        M = sp.distance(S[:, None, :], S[None, :, :])
        a, b = np.unravel_index(np.argmax(M), M.shape)
        a, b = sorted((a, b), key=lambda j: tuple(S[j]))
        diam[i], P[i], Q[i] = M[a, b], S[a], S[b]
    return NearSets(ok, diam, P, Q, approx)


def _anchors(B: Region, samples: int, seed) -> np.ndarray:
    return B.sample(samples, make_rng(seed))


def nonuniform_diam_limit(A: Region, B: Region, y, eps_seq, tol: float = DEFAULT_TOL):
    """``diam(N(y, e))`` for each ``e``; rows of (eps, diam, nonempty)."""
    y = B.space.point(y)
    dist = set_pair_distance(A, B, tol)
    rows = []
    for e in eps_seq:
        ns = near_sets(A, y[None, :], dist + float(e), tol)
        rows.append({"eps": float(e), "diam": float(ns.diam[0]),
                     "nonempty": bool(ns.nonempty[0])})
    return rows


def _sup(A, Y, radius, tol):
    ns = near_sets(A, Y, radius, tol)
    i = int(np.argmax(np.where(ns.nonempty, ns.diam, -1.0)))
    return ns, i, float(ns.diam[i]) if ns.nonempty.any() else 0.0


def uc_check(A: Region, B: Region, eps_grid=(0.5, 0.1, 0.01), samples: int = 100,
             seed=0, tol: float = DEFAULT_TOL, floor: float = DELTA_FLOOR) -> PropertyReport:
    """For each ``eps`` bisect the largest ``delta`` in ``[floor, delta_max]``
    with ``sup_y diam(N(y, delta)) <= eps``."""
    eps_grid = sorted((float(e) for e in eps_grid), reverse=True)
    if not eps_grid or min(eps_grid) <= 0:
        raise InputError("eps grid must be nonempty and positive")
    dist = set_pair_distance(A, B, tol)
    Y = _anchors(B, samples, seed)
    top = max(1.0, diameter(A, tol) + diameter(B, tol))
    grids = {"eps": eps_grid, "delta_floor": floor, "delta_max": top}
    ns, _, hi_val = _sup(A, Y, dist + top, tol)
    if not ns.nonempty.any():
        return PropertyReport("UC", "INCONCLUSIVE", [], grids, len(Y),
                              notes=["every sampled near set is empty"])
    table, notes = [], []
    verdict, witness = "PASS", None
    for eps in eps_grid:
        if hi_val <= eps:
            table.append({"eps": eps, "delta": top, "sup_diam": hi_val})
            continue
        ns, i, lo_val = _sup(A, Y, dist + floor, tol)
        if lo_val > eps:
            # still shrinking at the floor means resolution ran out, not a failure
            ladder = [_sup(A, Y[i:i + 1], dist + d, tol)[2] for d in (floor * 100, floor * 10, floor)]
            limit = float(_aitken(*map(np.asarray, ladder)))
            table.append({"eps": eps, "delta": None, "sup_diam": lo_val})
            if limit > eps:
                verdict = "FAIL"
                witness = {"eps": eps, "anchor": Y[i].tolist(), "delta": floor,
                           "pair": [ns.p[i].tolist(), ns.q[i].tolist()], "diam": lo_val}
                break
            if verdict == "PASS":
                verdict = "INCONCLUSIVE"
            notes.append(f"eps={eps:g}: diameter still shrinking at the delta floor")
            continue
        a, b = math.log(floor), math.log(top)
        for _ in range(40):
            m = 0.5 * (a + b)
            if _sup(A, Y, dist + math.exp(m), tol)[2] <= eps:
                a = m
            else:
                b = m
        delta = math.exp(a)
        table.append({"eps": eps, "delta": delta, "sup_diam": _sup(A, Y, dist + delta, tol)[2]})
    if ns.approximate:
        notes.append("near sets of A are sampled")
    return PropertyReport("UC", verdict, table, grids, len(Y), witness, notes)


def wuc_check(A: Region, B: Region, samples: int = 100, seed=0, tol: float = DEFAULT_TOL,
              gap: float = CLUSTER_GAP, eps_ladder=EPS_LADDER) -> PropertyReport:
    """Look for an anchor whose near sets keep two clusters ``gap`` apart as
    ``eps -> 0``; the alternating sequence over them then fails to converge.

    The limiting near-set diameter is extrapolated over the last three ladder
    levels so that power-law shrinking is not mistaken for a persistent gap.
    Convergence of candidate sequences is tested as Cauchy-at-resolution.
    """
    eps_ladder = sorted((float(e) for e in eps_ladder), reverse=True)
    if len(eps_ladder) < 3:
        raise InputError("eps ladder needs at least three levels")
    dist = set_pair_distance(A, B, tol)
    Y = _anchors(B, samples, seed)
    grids = {"eps": eps_ladder, "cluster_gap": gap}
    levels = [near_sets(A, Y, dist + e, tol) for e in eps_ladder]
    table = [{"eps": e, "sup_diam": float(ns.diam.max()) if ns.nonempty.any() else 0.0}
             for e, ns in zip(eps_ladder, levels)]
    last = levels[-1]
    notes = ["convergence tested as Cauchy at resolution"]
    if not last.nonempty.any():
        return PropertyReport("WUC", "INCONCLUSIVE", table, grids, len(Y),
                              notes=notes + ["every near set at the finest eps is empty"])
    limit = _aitken(*(ns.diam for ns in levels[-3:]))
    limit = np.where(last.nonempty, limit, 0.0)
    bad = np.flatnonzero(limit >= gap)
    if len(bad) == 0:
        return PropertyReport("WUC", "PASS", table, grids, len(Y), notes=notes)
    i = bad[0]
    p, q = last.p[i], last.q[i]
    witness = {"anchor": Y[i].tolist(),
               "anchors_by_eps": {format(e, "g"): Y[i].tolist() for e in eps_ladder},
               "sequence": [p.tolist(), q.tolist(), p.tolist(), q.tolist()],
               "rule": "x_2m = sequence[0], x_2m+1 = sequence[1]",
               "separation": float(A.space.distance(p, q)),
               "excess": float(max(A.space.distance(p, Y[i]), A.space.distance(q, Y[i])) - dist)}
    return PropertyReport("WUC", "FAIL", table, grids, len(Y), witness, notes)


def _greedy_net(A: Region, ns: NearSets, i: int, gap: float, budget: int) -> int:
    sp = A.space
    if isinstance(A, Segment):
        length = float(ns.diam[i])
        return min(budget, int(length // gap) + 1)
    pts = A.points if isinstance(A, PointCloud) else A.sample(4 * budget, make_rng(4))
    net = []
    for x in pts:
        if all(sp.distance(x, z) >= gap for z in net):
            net.append(x)
            if len(net) >= budget:
                break
    return len(net)


def wwuc_check(A: Region, B: Region, samples: int = 100, seed=0, tol: float = DEFAULT_TOL,
               gap: float = CLUSTER_GAP, budget: int = LENGTH_BUDGET,
               eps: float = EPS_LADDER[-1]) -> PropertyReport:
    """FAIL needs a ``gap``-separated sequence of ``budget`` points inside one
    near set: such a sequence has no convergent subsequence at resolution."""
    dist = set_pair_distance(A, B, tol)
    grids = {"eps": [float(eps)], "cluster_gap": gap, "length_budget": budget}
    if A.truncated:
        return PropertyReport("W-WUC", "INCONCLUSIVE", [], grids, 0,
                              notes=["A is a truncation of an unbounded set; the finite "
                                     "budget cannot rule out escaping sequences"])
    Y = _anchors(B, samples, seed)
    ns = near_sets(A, Y, dist + eps, tol)
    if not ns.nonempty.any():
        return PropertyReport("W-WUC", "INCONCLUSIVE", [], grids, len(Y),
                              notes=["every near set is empty"])
    sizes = [_greedy_net(A, ns, i, gap, budget) if ns.nonempty[i] else 0 for i in range(len(Y))]
    table = [{"eps": float(eps), "max_net": int(max(sizes))}]
    i = int(np.argmax(sizes))
    if sizes[i] >= budget:
        return PropertyReport("W-WUC", "FAIL", table, grids, len(Y),
                              {"anchor": Y[i].tolist(), "net_size": sizes[i]})
    return PropertyReport("W-WUC", "PASS", table, grids, len(Y))
