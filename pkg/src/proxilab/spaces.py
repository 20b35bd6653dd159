"""Concrete geodesic model spaces.

Three families are implemented:

* ``Euclidean(dim, p)`` -- R^n with the p-norm, 1 <= p <= inf.  Geodesics are
  linear segments; for p in {1, inf} these are one choice among many and the
  space reports ``uniquely_geodesic = False``.
* ``Hyperboloid()`` -- the hyperbolic plane in the hyperboloid model.  Points
  are ``(x0, x1, x2)`` with ``x0**2 + x1**2 - x2**2 = -1`` and ``x2 > 0``.
* ``StarTree(rays)`` -- ``rays`` half-lines glued at a common center.  Points
  are ``(ray, s)`` with ray in ``1..rays`` and ``s >= 0`` the distance to the
  center; all points with ``s == 0`` are the center.

Every space works on numpy arrays whose last axis holds coordinates, so
distances and geodesic points broadcast over leading axes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from .errors import InputError, UnsupportedError

DEFAULT_TOL = 1e-9
RNG_NAME = "numpy-pcg64/v1"


def make_rng(seed) -> np.random.Generator:
    """The single named generator every seeded routine draws from."""
    return np.random.Generator(np.random.PCG64(seed))


def quasi_uniform(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Scrambled Halton points in [0, 1)^dim, seeded from ``rng``."""
    if n <= 0:
        return np.empty((0, dim))
    sampler = qmc.Halton(d=dim, scramble=True, seed=rng)
    return sampler.random(n)


class SpaceModel:
    """Common interface of the model spaces."""

    model: str
    uniquely_geodesic: bool = True
    is_cat0: bool = False
    is_linear: bool = False
    coord_dim: int

    # -- points -----------------------------------------------------------

    def point(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=float)
        if x.shape != (self.coord_dim,):
            raise InputError(
                f"{self.model} point needs {self.coord_dim} coordinates, got shape {x.shape}")
        self.validate(x)
        return self.canonical(x)

    def points(self, coords) -> np.ndarray:
        x = np.asarray(coords, dtype=float)
        if x.ndim != 2 or x.shape[1] != self.coord_dim:
            raise InputError(
                f"{self.model} point list needs shape (n, {self.coord_dim}), got {x.shape}")
        self.validate(x)
        return self.canonical(x)

    def validate(self, x: np.ndarray) -> None:
        if not np.all(np.isfinite(x)):
            raise InputError("point coordinates must be finite")

    def canonical(self, x: np.ndarray) -> np.ndarray:
        return x

    # -- metric -----------------------------------------------------------

    def distance(self, x, y):
        raise NotImplementedError

    def geodesic_point(self, x, y, t):
        raise NotImplementedError

    def midpoint(self, x, y):
        return self.geodesic_point(x, y, 0.5)

    def reflect(self, a, x):
        """Point on the extension of the geodesic from ``x`` through ``a``,
        at distance ``d(a, x)`` beyond ``a``."""
        raise NotImplementedError

    def sample_ball(self, a, r: float, n: int, rng: np.random.Generator,
                    sphere_fraction: float = 0.5) -> np.ndarray:
        """``n`` points of the closed ball ``B(a, r)``; roughly
        ``sphere_fraction`` of them on the sphere."""
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __str__(self):
        return self.model


@dataclass(frozen=True, eq=True)
class Euclidean(SpaceModel):
    dim: int = 2
    p: float = 2.0

    model = "euclidean"
    is_linear = True

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dim}")
        if not (self.p >= 1):
            raise InputError(f"p must lie in [1, inf], got {self.p}")

    @property
    def coord_dim(self):
        return self.dim

    @property
    def uniquely_geodesic(self):
        return 1 < self.p < math.inf

    @property
    def is_cat0(self):
        return self.p == 2

    def norm(self, v):
        v = np.asarray(v, dtype=float)
        if self.p == math.inf:
            return np.max(np.abs(v), axis=-1)
        if self.p == 1:
            return np.sum(np.abs(v), axis=-1)
        if self.p == 2:
            return np.sqrt(np.sum(v * v, axis=-1))
        a = np.abs(v)
        plain = np.sum(a ** self.p, axis=-1) ** (1.0 / self.p)
        m = np.max(a, axis=-1, keepdims=True)
        risky = (m[..., 0] > 1e30) | ((m[..., 0] < 1e-30) & (m[..., 0] > 0))
        if not np.any(risky):
            return plain
        # rescale only where the plain sum would under/overflow
        safe = np.where(m > 0, m, 1.0)
        scaled = m[..., 0] * np.sum((a / safe) ** self.p, axis=-1) ** (1.0 / self.p)
        return np.where(risky, scaled, plain)

    def distance(self, x, y):
        return self.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))

    def geodesic_point(self, x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = np.asarray(t, dtype=float)[..., None]
        return x + t * (y - x)

    def midpoint(self, x, y):
        return 0.5 * (np.asarray(x, dtype=float) + np.asarray(y, dtype=float))

    def reflect(self, a, x):
        return 2.0 * np.asarray(a, dtype=float) - np.asarray(x, dtype=float)

    def sample_ball(self, a, r, n, rng, sphere_fraction=0.5):
        a = np.asarray(a, dtype=float)
        g = rng.standard_normal((n, self.dim))
        g /= np.where(self.norm(g) > 0, self.norm(g), 1.0)[:, None]
        u = rng.random(n)
        radius = np.where(u < sphere_fraction, 1.0, rng.random(n) ** (1.0 / self.dim))
        return a + r * radius[:, None] * g

    def to_json(self):
        return {"model": "euclidean", "dim": int(self.dim),
                "p": "inf" if self.p == math.inf else self.p}


def minkowski(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1] - x[..., 2] * y[..., 2]


def h2_point(u, v) -> np.ndarray:
    """Hyperboloid point with spatial coordinates ``(u, v)``."""
    return np.array([u, v, math.sqrt(1.0 + u * u + v * v)])


def h2_polar(rho: float, theta: float) -> np.ndarray:
    """Point at distance ``rho`` from ``(0, 0, 1)`` in direction ``theta``."""
    s = math.sinh(rho)
    return np.array([s * math.cos(theta), s * math.sin(theta), math.cosh(rho)])


@dataclass(frozen=True, eq=True)
class Hyperboloid(SpaceModel):
    model = "h2"
    coord_dim = 3
    is_cat0 = True

    def validate(self, x):
        super().validate(x)
        x = np.asarray(x, dtype=float)
        if np.any(x[..., 2] <= 0):
            raise InputError("hyperboloid points need x2 > 0")
        q = minkowski(x, x)
        scale = np.maximum(1.0, x[..., 2] ** 2)
        if np.any(np.abs(q + 1.0) > 1e-9 * scale):
            raise InputError("hyperboloid points must satisfy <x,x> = -1")

    def canonical(self, x):
        return _h2_normalize(x)

    def distance(self, x, y):
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        q = np.maximum(minkowski(diff, diff), 0.0)
        # 2 asinh(|x - y|_M / 2) avoids the cancellation of arccosh near 1
        return 2.0 * np.arcsinh(np.sqrt(q) / 2.0)

    def geodesic_point(self, x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = np.asarray(t, dtype=float)
        L = np.asarray(self.distance(x, y))
        small = L < 1e-7
        Ls = np.where(small, 1.0, L)
        w0 = np.where(small, 1.0 - t, np.sinh((1.0 - t) * Ls) / np.sinh(Ls))
        w1 = np.where(small, t, np.sinh(t * Ls) / np.sinh(Ls))
        return _h2_normalize(w0[..., None] * x + w1[..., None] * y)

    def reflect(self, a, x):
        a = np.asarray(a, dtype=float)
        x = np.asarray(x, dtype=float)
        c = -minkowski(a, x)
        return _h2_normalize(2.0 * c[..., None] * a - x)

    def tangent_basis(self, a):
        """Minkowski-orthonormal basis of the tangent plane at ``a``."""
        a = np.asarray(a, dtype=float)
        basis = []
        for e in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])):
            v = e + minkowski(a, e) * a
            for b in basis:
                v = v - minkowski(v, b) * b
            basis.append(v / math.sqrt(minkowski(v, v)))
        return np.array(basis)

    def exp(self, a, v):
        """Exponential map at ``a`` of tangent coordinates ``v`` (shape (..., 2))."""
        a = np.asarray(a, dtype=float)
        v = np.asarray(v, dtype=float)
        E = self.tangent_basis(a)
        w = v @ E
        n = np.sqrt(np.sum(v * v, axis=-1))
        ns = np.where(n > 0, n, 1.0)
        out = np.cosh(n)[..., None] * a + (np.sinh(n) / ns)[..., None] * w
        return _h2_normalize(out)

    def sample_ball(self, a, r, n, rng, sphere_fraction=0.5):
        theta = rng.random(n) * 2 * math.pi
        u = rng.random(n)
        rho = np.where(u < sphere_fraction, r, r * np.sqrt(rng.random(n)))
        v = rho[:, None] * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        return self.exp(a, v)

    def to_json(self):
        return {"model": "h2"}


def _h2_normalize(x):
    x = np.asarray(x, dtype=float)
    q = -minkowski(x, x)
    return x / np.sqrt(np.maximum(q, 1e-300))[..., None]


@dataclass(frozen=True, eq=True)
class StarTree(SpaceModel):
    rays: int = 3

    model = "star_tree"
    coord_dim = 2
    is_cat0 = True

    def __post_init__(self):
        if int(self.rays) != self.rays or self.rays < 2:
            raise InputError(f"a star tree needs at least 2 rays, got {self.rays}")

    def validate(self, x):
        super().validate(x)
        x = np.asarray(x, dtype=float)
        ray, s = x[..., 0], x[..., 1]
        if np.any(ray != np.round(ray)) or np.any(ray < 1) or np.any(ray > self.rays):
            raise InputError(f"ray index must be an integer in 1..{self.rays}")
        if np.any(s < 0):
            raise InputError("distance from the center must be >= 0")

    def canonical(self, x):
        x = np.array(x, dtype=float, copy=True)
        x[..., 0] = np.where(x[..., 1] <= 0, 1.0, x[..., 0])
        x[..., 1] = np.maximum(x[..., 1], 0.0)
        return x

    def distance(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        s, u = x[..., 1], y[..., 1]
        shared = (x[..., 0] == y[..., 0]) | (s <= 0) | (u <= 0)
        return np.where(shared, np.abs(s - u), s + u)

    def geodesic_point(self, x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        t = np.asarray(t, dtype=float)
        rx, s = x[..., 0], x[..., 1]
        ry, u = y[..., 0], y[..., 1]
        shared = (rx == ry) | (s <= 0) | (u <= 0)
        common = np.where(s <= 0, ry, rx)
        tau = t * (s + u)
        ray = np.where(shared, common, np.where(tau <= s, rx, ry))
        pos = np.where(shared, s + t * (u - s), np.where(tau <= s, s - tau, tau - s))
        ray, pos = np.broadcast_arrays(ray, pos)
        return self.canonical(np.stack([ray, pos], axis=-1))

    def reflect(self, a, x):
        a = np.asarray(a, dtype=float)
        x = np.asarray(x, dtype=float)
        L = self.distance(a, x)
        ra, s = a[..., 0], a[..., 1]
        rx, u = x[..., 0], x[..., 1]
        outward = (rx == ra) & (u > s) & (s > 0)
        other = (rx % self.rays) + 1
        # from the center, push onto a different ray than x
        at_center = s <= 0
        inward_pos = s - L
        ray = np.where(at_center, other,
                       np.where(outward, np.where(inward_pos >= 0, ra, (ra % self.rays) + 1), ra))
        pos = np.where(at_center, L,
                       np.where(outward, np.abs(inward_pos), s + L))
        ray, pos = np.broadcast_arrays(ray, pos)
        return self.canonical(np.stack([ray, pos], axis=-1))

    def sample_ball(self, a, r, n, rng, sphere_fraction=0.5):
        a = np.asarray(a, dtype=float)
        ra, s = a[0], a[1]
        rho = np.where(rng.random(n) < sphere_fraction, r, r * rng.random(n))
        ray = rng.integers(1, self.rays + 1, n).astype(float)
        out_dir = rng.random(n) < 0.5
        same = (ray == ra) | (s <= 0)
        pos_same = np.where(out_dir | (rho > s), s + rho, s - rho)
        ray_same = np.where(s <= 0, ray, ra)
        # other ray: go through the center if far enough, else stay inward
        pos_other = np.where(rho >= s, rho - s, s - rho)
        ray_other = np.where(rho >= s, ray, ra)
        pts = np.stack([np.where(same, ray_same, ray_other),
                        np.where(same, pos_same, pos_other)], axis=1)
        return self.canonical(pts)

    def to_json(self):
        return {"model": "star_tree", "rays": int(self.rays)}


def space_from_json(obj: dict) -> SpaceModel:
    if not isinstance(obj, dict) or "model" not in obj:
        raise InputError("space descriptor needs a 'model' key")
    model = obj["model"]
    if model == "euclidean":
        p = obj.get("p", 2)
        if isinstance(p, str):
            if p.lower() not in ("inf", "infinity"):
                raise InputError(f"unknown p value {p!r}")
            p = math.inf
        return Euclidean(dim=int(obj.get("dim", 2)), p=float(p))
    if model == "h2":
        return Hyperboloid()
    if model == "star_tree":
        return StarTree(rays=int(obj.get("rays", 3)))
    raise InputError(f"unknown space model {model!r}")


# -- operations --------------------------------------------------------------

def distance(space: SpaceModel, x, y) -> float:
    x = space.point(x)
    y = space.point(y)
    return float(space.distance(x, y))


def geodesic_point(space: SpaceModel, x, y, t: float) -> np.ndarray:
    if not 0.0 <= t <= 1.0:
        raise InputError(f"geodesic parameter must lie in [0, 1], got {t}")
    x = space.point(x)
    y = space.point(y)
    if t == 0.0:
        return x
    if t == 1.0:
        return y
    return space.geodesic_point(x, y, t)


def midpoint(space: SpaceModel, x, y) -> np.ndarray:
    return geodesic_point(space, x, y, 0.5)


@dataclass(frozen=True)
class ConvexityModulus:
    """``evaluate(r, eps)`` gives a modulus value delta in (0, 1]."""

    evaluate: Callable[[float, float], float]
    monotone: bool
    kind: str
    samples: int = 0

    def __call__(self, r, eps):
        if not (r > 0 and 0 < eps <= 2):
            raise InputError(f"modulus needs r > 0 and eps in (0, 2], got r={r}, eps={eps}")
        return self.evaluate(r, eps)


def cat0_modulus(eps: float) -> float:
    """Modulus forced by the CN inequality in any CAT(0) space."""
    return 1.0 - math.sqrt(max(0.0, 1.0 - eps * eps / 4.0))


def convexity_modulus(space: SpaceModel, samples: int = 256, seed: int = 0) -> ConvexityModulus:
    if isinstance(space, Euclidean) and space.p in (1.0, math.inf):
        raise UnsupportedError(f"the {space.p}-norm is not uniformly convex")
    if space.is_cat0:
        return ConvexityModulus(lambda r, eps: cat0_modulus(eps), monotone=True, kind="analytic")

    def evaluate(r, eps):
        # p-norm moduli do not depend on r or on the base point
        return brute_force_modulus(space, np.zeros(space.dim), 1.0, eps,
                                   samples=samples, seed=seed)

    return ConvexityModulus(evaluate, monotone=True, kind="brute-force", samples=samples)


def _chart(space: SpaceModel, a: np.ndarray, r: float):
    """Map from R^k coordinates (scaled by r) to points near ``a``."""
    if isinstance(space, Euclidean):
        return space.dim, lambda v: a + r * v
    if isinstance(space, Hyperboloid):
        return 2, lambda v: space.exp(a, r * v)
    raise UnsupportedError(f"no smooth chart for {space.model}")


def brute_force_modulus(space: SpaceModel, a, r: float, eps: float,
                        samples: int = 256, seed: int = 0, refine: int = 8) -> float:
    """Minimize ``1 - d(m, a)/r`` over pairs in ``B(a, r)`` that are at least
    ``eps * r`` apart.

    A quasi-random sample of pairs is scored; the best ``refine`` candidates
    (admissible or not) seed SLSQP runs on the constrained problem.
    """
    a = space.point(a)
    k, chart = _chart(space, a, r)
    rng = make_rng(seed)

    def parts(z):
        x = chart(z[:k])
        y = chart(z[k:])
        return x, y

    def objective(z):
        x, y = parts(z)
        return 1.0 - float(space.distance(space.midpoint(x, y), a)) / r

    def constraints(z):
        x, y = parts(z)
        return np.array([
            1.0 - float(space.distance(x, a)) / r,
            1.0 - float(space.distance(y, a)) / r,
            float(space.distance(x, y)) / r - eps,
        ])

    u = quasi_uniform(samples, 2 * k, rng) * 2.0 - 1.0
    scores = []
    for z in u:
        c = constraints(z)
        penalty = float(np.sum(np.minimum(c, 0.0) ** 2)) * 1e3
        scores.append(objective(z) + penalty)
    order = np.argsort(scores)[:refine]
    starts = [u[i] for i in order]
    # the antipodal pair is the only admissible configuration at eps = 2
    starts.append(np.concatenate([np.eye(k)[0], -np.eye(k)[0]]))

    best = math.inf
    with np.errstate(all="ignore"):
        for z0 in starts:
            res = optimize.minimize(objective, z0, method="SLSQP",
                                    constraints=[{"type": "ineq", "fun": constraints}],
                                    options={"ftol": 1e-14, "maxiter": 500})
            if np.all(np.isfinite(res.x)) and np.all(constraints(res.x) >= -1e-10):
                best = min(best, objective(res.x))
    for z in u:
        if np.all(constraints(z) >= 0):
            best = min(best, objective(z))
    return best


@dataclass
class ModulusEstimate:
    estimate: float | None
    admissible: int
    samples: int
    witness: tuple | None = None

    @property
    def empty(self) -> bool:
        return self.admissible == 0


def pointwise_modulus_estimate(space: SpaceModel, a, r: float, eps: float,
                               samples: int, seed: int = 0) -> ModulusEstimate:
    """Sample-based estimate of the pointwise modulus at ``a``.

    The returned value is a minimum over sampled admissible pairs, so it can
    only overestimate the true modulus.  Half of the pairs are a sphere point
    and its reflection through ``a`` (these realize eps = 2).
    """
    if not (r > 0 and 0 < eps <= 2 and samples >= 1):
        raise InputError("need r > 0, eps in (0, 2] and samples >= 1")
    a = space.point(a)
    tol = DEFAULT_TOL
    rng = make_rng(seed)
    n_ref = samples // 2
    n_free = samples - n_ref
    xs = space.sample_ball(a, r, n_free + n_ref, rng)
    ys = space.sample_ball(a, r, n_free, rng)
    refl = space.reflect(a, xs[n_free:])
    ys = np.concatenate([ys, refl], axis=0)
    dxa = space.distance(xs, a)
    dya = space.distance(ys, a)
    dxy = space.distance(xs, ys)
    ok = (dxa <= r * (1 + tol)) & (dya <= r * (1 + tol)) & (dxy >= eps * r - tol * max(1.0, r))
    if not np.any(ok):
        return ModulusEstimate(None, 0, samples)
    m = space.midpoint(xs[ok], ys[ok])
    vals = 1.0 - space.distance(m, a) / r
    i = int(np.argmin(vals))
    return ModulusEstimate(float(max(vals[i], 0.0)), int(ok.sum()), samples,
                           (xs[ok][i], ys[ok][i]))
