"""Slow, direct reference computations used as test oracles.

Written against the definitions only: grids, exhaustive search and 1-D root
finding.  Nothing here imports proxilab.
"""

import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar


def pnorm(v, p):
    v = np.asarray(v, dtype=float)
    if p == math.inf:
        return np.max(np.abs(v), axis=-1)
    return np.sum(np.abs(v) ** p, axis=-1) ** (1.0 / p)


def h2_dist(a, b):
    a, b = np.asarray(a, float), np.asarray(b, float)
    inner = a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] - a[..., 2] * b[..., 2]
    return np.arccosh(np.maximum(-inner, 1.0))


def tree_dist(x, y):
    (i, s), (j, t) = x, y
    if s == 0 or t == 0 or i == j:
        return abs(s - t)
    return s + t


def grid_segment_distance(a0, a1, b0, b1, p, res=1e-3):
    t = np.arange(0.0, 1.0 + res / 2, res)
    A = np.asarray(a0) + t[:, None] * (np.asarray(a1) - np.asarray(a0))
    B = np.asarray(b0) + t[:, None] * (np.asarray(b1) - np.asarray(b0))
    return float(pnorm(A[:, None, :] - B[None, :, :], p).min())


def d1_grid_infimum(x, y, h, d, p=2.0, coarse=1e-3, fine=1e-6, top=4.0):
    """Smallest grid r with y in B(x-h, d+r) and B(x+h, d+r).

    A coarse grid brackets the first admissible cell; a fine grid inside that
    cell gives the value at resolution ``fine``.
    """
    x, y, h = (np.asarray(v, float) for v in (x, y, h))

    def member(r):
        return (pnorm(y - (x - h), p) <= d + r) & (pnorm(y - (x + h), p) <= d + r)

    rc = np.arange(0.0, top, coarse)
    ok = member(rc)
    j = int(np.argmax(ok))
    if not ok[j]:
        raise ValueError("grid too short")
    if j == 0:
        return 0.0
    rf = np.arange(rc[j - 1], rc[j] + fine / 2, fine)
    return float(rf[np.argmax(member(rf))])


def lp_modulus(p, eps):
    """inf 1 - ||(x+y)/2|| over unit-sphere pairs with ||x-y|| = eps in the
    p-norm plane, by sweeping the angle of x and root-finding y."""
    def sph(th):
        v = np.array([math.cos(th), math.sin(th)])
        return v / pnorm(v, p)

    def gap(th):
        x = sph(th)
        ph = brentq(lambda a: pnorm(sph(th + a) - x, p) - eps, 1e-12, math.pi)
        return 1.0 - pnorm((x + sph(th + ph)) / 2, p)

    th = np.linspace(0.0, math.pi / 2, 2001)
    vals = np.array([gap(t) for t in th])
    i = int(vals.argmin())
    r = minimize_scalar(gap, bounds=(th[max(i - 1, 0)], th[min(i + 1, len(th) - 1)]),
                        method="bounded", options={"xatol": 1e-14})
    return float(min(r.fun, vals.min()))


def cloud_dist(A, B, p=2.0):
    A, B = np.asarray(A, float), np.asarray(B, float)
    return float(pnorm(A[:, None, :] - B[None, :, :], p).min())


def cloud_diam(A, p=2.0):
    A = np.asarray(A, float)
    return float(pnorm(A[:, None, :] - A[None, :, :], p).max())


def cloud_projection(x, A, p=2.0, tol=1e-9):
    A = np.asarray(A, float)
    D = pnorm(A - np.asarray(x, float), p)
    return A[D <= D.min() + tol]


def cloud_cores(A, B, p=2.0, tol=1e-9):
    A, B = np.asarray(A, float), np.asarray(B, float)
    D = pnorm(A[:, None, :] - B[None, :, :], p)
    m = D.min()
    return A[(D <= m + tol).any(axis=1)], B[(D <= m + tol).any(axis=0)]


def strips_orbit(s0, n):
    """``T^{2n}(0, s0) = (0, s0 / 4^n)`` for the halving strips map."""
    return np.array([0.0, s0 / 4.0 ** n])


def strips_near_diam(s, delta):
    """diam({0}x[0,1] within Euclidean distance 1+delta of (1, s))."""
    w = math.sqrt((1 + delta) ** 2 - 1)
    return min(s + w, 1.0) - max(s - w, 0.0)
