"""Set representations living in a model space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection

from .errors import InputError, UnsupportedError
from .spaces import DEFAULT_TOL, Euclidean, SpaceModel, quasi_uniform


class Region:
    space: SpaceModel
    kind: str
    approximate: bool = False
    truncated: bool = False

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        raise NotImplementedError

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """``n`` points of the region; canonical points (vertices, midpoint,
        center) come first, the rest are seeded quasi-random draws."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class PointCloud(Region):
    space: SpaceModel
    points: np.ndarray
    approximate: bool = False
    truncated: bool = False

    kind = "cloud"

    def __post_init__(self):
        pts = self.space.points(self.points)
        if len(pts) == 0:
            raise InputError("a point cloud must be nonempty")
        object.__setattr__(self, "points", pts)

    def contains(self, x, tol=DEFAULT_TOL):
        return bool(np.min(self.space.distance(self.points, x)) <= tol)

    def sample(self, n, rng):
        if n >= len(self.points):
            return self.points.copy()
        idx = np.unique(np.linspace(0, len(self.points) - 1, n).round().astype(int))
        return self.points[idx]

    def to_json(self):
        out = {"kind": "cloud", "points": self.points.tolist()}
        if self.approximate:
            out["approximate"] = True
        if self.truncated:
            out["truncated"] = True
        return out


@dataclass(frozen=True, eq=False)
class Segment(Region):
    space: SpaceModel
    a: np.ndarray
    b: np.ndarray
    truncated: bool = False

    kind = "segment"

    def __post_init__(self):
        object.__setattr__(self, "a", self.space.point(self.a))
        object.__setattr__(self, "b", self.space.point(self.b))

    @property
    def length(self) -> float:
        return float(self.space.distance(self.a, self.b))

    def at(self, t):
        t = np.asarray(t, dtype=float)
        return self.space.geodesic_point(self.a, self.b, t)

    def contains(self, x, tol=DEFAULT_TOL):
        from .setgeom import point_set_distance
        return point_set_distance(x, self)[0] <= tol

    def sample(self, n, rng):
        head = np.array([0.5, 0.0, 1.0])[:n]
        rest = quasi_uniform(max(n - 3, 0), 1, rng)[:, 0]
        return self.at(np.concatenate([head, rest]))

    def to_json(self):
        out = {"kind": "segment", "a": self.a.tolist(), "b": self.b.tolist()}
        if self.truncated:
            out["truncated"] = True
        return out


@dataclass(frozen=True, eq=False)
class Ball(Region):
    space: SpaceModel
    center: np.ndarray
    radius: float

    kind = "ball"

    def __post_init__(self):
        object.__setattr__(self, "center", self.space.point(self.center))
        if not self.radius >= 0:
            raise InputError("ball radius must be >= 0")

    @cached_property
    def polytope(self) -> "Polytope | None":
        """Equivalent polytope for the 1- and inf-norm balls, else None."""
        sp = self.space
        if not isinstance(sp, Euclidean) or sp.p not in (1.0, math.inf):
            return None
        n = sp.dim
        if sp.p == math.inf:
            normals = np.concatenate([np.eye(n), -np.eye(n)])
        else:
            signs = np.array(np.meshgrid(*[[1.0, -1.0]] * n)).reshape(n, -1).T
            normals = signs
        offsets = self.radius + normals @ self.center
        return Polytope(sp, normals, offsets)

    def contains(self, x, tol=DEFAULT_TOL):
        return bool(self.space.distance(self.center, x) <= self.radius + tol)

    def sample(self, n, rng):
        if n <= 0:
            return np.empty((0, self.space.coord_dim))
        rest = self.space.sample_ball(self.center, self.radius, n - 1, rng)
        return np.concatenate([self.center[None, :], rest])

    def to_json(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}


@dataclass(frozen=True, eq=False)
class Polytope(Region):
    """Bounded polytope ``{x : normals @ x <= offsets}`` in a p-norm space."""

    space: SpaceModel
    normals: np.ndarray
    offsets: np.ndarray

    kind = "polytope"

    def __post_init__(self):
        if not isinstance(self.space, Euclidean):
            raise UnsupportedError("polytopes live in euclidean-p spaces only")
        G = np.atleast_2d(np.asarray(self.normals, dtype=float))
        h = np.asarray(self.offsets, dtype=float).reshape(-1)
        if G.shape != (len(h), self.space.dim):
            raise InputError(f"halfspace normals must have shape (m, {self.space.dim})")
        object.__setattr__(self, "normals", G)
        object.__setattr__(self, "offsets", h)
        self.bounds  # noqa: B018 -- validates nonempty and bounded

    @cached_property
    def bounds(self) -> np.ndarray:
        n = self.space.dim
        out = np.empty((n, 2))
        for i in range(n):
            for j, sign in enumerate((1.0, -1.0)):
                c = np.zeros(n)
                c[i] = sign
                res = linprog(c, A_ub=self.normals, b_ub=self.offsets,
                              bounds=[(None, None)] * n, method="highs")
                if res.status == 2:
                    raise InputError("polytope halfspaces are infeasible")
                if res.status == 3:
                    raise InputError("polytope is unbounded")
                if res.status != 0:
                    raise InputError(f"polytope validation failed: {res.message}")
                out[i, j] = sign * res.fun
        return out

    @cached_property
    def vertices(self) -> np.ndarray:
        n = self.space.dim
        if n == 1:
            return self.bounds.reshape(2, 1)
        # Chebyshev center as strictly interior point
        norms = np.linalg.norm(self.normals, axis=1)
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A = np.hstack([self.normals, norms[:, None]])
        res = linprog(c, A_ub=A, b_ub=self.offsets, bounds=[(None, None)] * n + [(0, None)],
                      method="highs")
        center, depth = res.x[:n], res.x[-1]
        if depth <= 1e-12:
            # flat polytope: fall back to vertices of the bounding box clipped by LP
            return self._lp_extreme_points()
        hs = HalfspaceIntersection(np.hstack([self.normals, -self.offsets[:, None]]), center)
        v = hs.intersections
        return np.unique(np.round(v, 12), axis=0)

    def _lp_extreme_points(self) -> np.ndarray:
        n = self.space.dim
        pts = []
        for direction in np.concatenate([np.eye(n), -np.eye(n), np.ones((1, n)), -np.ones((1, n))]):
            res = linprog(-direction, A_ub=self.normals, b_ub=self.offsets,
                          bounds=[(None, None)] * n, method="highs")
            pts.append(res.x)
        return np.unique(np.round(pts, 12), axis=0)

    def contains(self, x, tol=DEFAULT_TOL):
        x = np.asarray(x, dtype=float)
        scale = np.linalg.norm(self.normals, axis=1)
        return bool(np.all(self.normals @ x <= self.offsets + tol * scale))

    def sample(self, n, rng):
        V = self.vertices
        if n <= len(V):
            return V[:n].copy()
        w = rng.dirichlet(np.ones(len(V)), n - len(V) - 1)
        return np.concatenate([V, V.mean(axis=0)[None, :], w @ V])

    def to_json(self):
        return {"kind": "polytope",
                "halfspaces": [{"normal": g.tolist(), "offset": float(c)}
                               for g, c in zip(self.normals, self.offsets)]}


def translate(region: Region, shift) -> Region:
    """Materialize ``region + shift`` (linear spaces only)."""
    space = region.space
    if not space.is_linear:
        raise UnsupportedError("translation needs a linear space")
    h = np.asarray(shift, dtype=float)
    if h.shape != (space.coord_dim,):
        raise InputError("shift has the wrong dimension")
    if isinstance(region, PointCloud):
        return PointCloud(space, region.points + h, approximate=region.approximate)
    if isinstance(region, Segment):
        return Segment(space, region.a + h, region.b + h)
    if isinstance(region, Ball):
        return Ball(space, region.center + h, region.radius)
    if isinstance(region, Polytope):
        return Polytope(space, region.normals, region.offsets + region.normals @ h)
    raise InputError(f"cannot translate {region.kind}")


def region_from_json(obj: dict, space: SpaceModel) -> Region:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise InputError("region needs a 'kind' key")
    kind = obj["kind"]
    try:
        if kind == "cloud":
            return PointCloud(space, np.asarray(obj["points"], dtype=float),
                              approximate=bool(obj.get("approximate", False)),
                              truncated=bool(obj.get("truncated", False)))
        if kind == "segment":
            return Segment(space, obj["a"], obj["b"], truncated=bool(obj.get("truncated", False)))
        if kind == "ball":
            return Ball(space, obj["center"], float(obj["radius"]))
        if kind == "polytope":
            hs = obj["halfspaces"]
            return Polytope(space, [h["normal"] for h in hs], [h["offset"] for h in hs])
        if kind == "translate":
            return translate(region_from_json(obj["base"], space), obj["shift"])
    except KeyError as exc:
        raise InputError(f"{kind} region is missing key {exc}") from None
    raise InputError(f"unknown region kind {kind!r}")
