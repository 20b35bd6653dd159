"""Scenario files: loading, map construction and the full verification run."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import InputError, ProxilabError, UnsupportedError
from .properties import uc_check, wuc_check, wwuc_check
from .regions import Region, region_from_json
from .semimetric import (SemimetricContext, cat0_ball_identity_check, compatibility_profile,
                         flat_quadrilateral_check, lift_map, semimetric_picard,
                         verify_d1_contraction, verify_domination, verify_semimetric_axioms)
from .setgeom import chebyshev_for_proximinal, extract_proximinal_core
from .solver import (AffinePiece, CyclicMap, SolverConfig, rate_estimate, solve_best_proximity,
                     uniqueness_probe, verify_cyclic_contraction, verify_suzuki_condition)
from .spaces import DEFAULT_TOL, RNG_NAME, SpaceModel, space_from_json

GALLERY = ("euclid-strips", "maxnorm-flat", "lp4-strips", "offset-cores",
           "tree-segments", "h2-geodesic-pair")
PROPERTIES = ("uc", "wuc", "wwuc", "chebyshev", "d1")


# -- builtin maps and pairings -------------------------------------------------

def fermi(u, w) -> np.ndarray:
    """Hyperboloid point at signed distance ``w`` from the geodesic ``x1 = 0``,
    above its point with arclength ``u``."""
    u, w = np.broadcast_arrays(np.asarray(u, float), np.asarray(w, float))
    return np.stack([np.cosh(w) * np.sinh(u), np.sinh(w), np.cosh(w) * np.cosh(u)], axis=-1)


def _fermi_halving(c: float):
    """Perpendiculars at ``u = -c`` (A) and ``u = c`` (B); ``T`` halves the
    height and jumps to the other perpendicular."""
    def on_a(X):
        return fermi(c, np.arcsinh(X[:, 1]) / 2)

    def on_b(X):
        return fermi(-c, np.arcsinh(X[:, 1]) / 2)
    return on_a, on_b


def _mirror(X):
    X = np.atleast_2d(X).copy()
    X[:, 0] = -X[:, 0]
    return X


BUILTIN_MAPS = {"h2-fermi-halving": lambda entry: _fermi_halving(float(entry.get("c", 0.5)))}
BUILTIN_PARTNERS = {"h2-geodesic-pair": _mirror}


# -- loading ---------------------------------------------------------------------

def _line_of(text: str, key: str) -> int:
    m = re.search(rf'"{re.escape(key)}"\s*:', text)
    return text.count("\n", 0, m.start()) + 1 if m else 1


@dataclass
class Scenario:
    name: str
    space: SpaceModel
    A: Region
    B: Region
    map: CyclicMap
    k: float
    seed: int
    tol: float
    start: np.ndarray
    raw: dict
    source: str = ""
    description: str = ""
    exercises: list = field(default_factory=list)
    expected: dict = field(default_factory=dict)


def gallery_path(name: str):
    if name not in GALLERY:
        raise InputError(f"unknown gallery scenario {name!r}")
    return resources.files("proxilab") / "gallery" / f"{name}.json"


def read_scenario_text(ref: str) -> tuple[str, str]:
    """Text and display name for a file path or a gallery name."""
    p = Path(ref)
    if p.is_file():
        return p.read_text(encoding="utf-8"), ref
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    if stem in GALLERY and (p.parent == Path(".") or p.parent.name == "gallery"):
        return gallery_path(stem).read_text(encoding="utf-8"), f"gallery/{stem}.json"
    raise InputError(f"{ref}: no such scenario file")


def load_scenario(ref: str, seed: int | None = None, tol: float | None = None) -> Scenario:
    text, source = read_scenario_text(ref)
    return parse_scenario(text, source, seed, tol)


def parse_scenario(text: str, source: str = "<string>", seed: int | None = None,
                   tol: float | None = None) -> Scenario:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InputError(f"{source}:1: scenario must be a JSON object")
    key = "name"
    try:
        name = str(raw["name"])
        key = "space"
        space = space_from_json(raw["space"])
        key = "A"
        A = region_from_json(raw["A"], space)
        key = "B"
        B = region_from_json(raw["B"], space)
        key = "k"
        k = float(raw["k"])
        if not 0 < k < 1:
            raise InputError("k must lie in (0, 1)")
        key = "seed"
        seed = int(raw["seed"] if seed is None else seed)
        if seed < 0:
            raise InputError("seed must be >= 0")
        key = "tol"
        tol = float(raw.get("tol", DEFAULT_TOL) if tol is None else tol)
        if not tol > 0:
            raise InputError("tol must be positive")
        key = "map"
        on_a, on_b = _build_map(raw["map"], space)
        T = CyclicMap(A, B, on_a, on_b, k, tol, name)
        key = "start"
        start = space.point(raw["start"])
    except KeyError as exc:
        line = _line_of(text, key) if key != exc.args[0] else 1
        raise InputError(f"{source}:{line}: missing key {exc.args[0]!r}") from None
    except (InputError, UnsupportedError, TypeError, ValueError) as exc:
        raise InputError(f"{source}:{_line_of(text, key)}: {key}: {exc}") from None
    return Scenario(name, space, A, B, T, k, seed, tol, start, raw, source,
                    raw.get("description", ""), list(raw.get("exercises", [])),
                    dict(raw.get("expected", {})))


def _build_map(entry, space):
    if not isinstance(entry, dict):
        raise InputError("map must be an object")
    if "builtin" in entry:
        name = entry["builtin"]
        if name not in BUILTIN_MAPS:
            raise InputError(f"unknown builtin map {name!r}")
        return BUILTIN_MAPS[name](entry)
    pieces = []
    for side in ("A", "B"):
        if side not in entry:
            raise InputError(f"map needs an affine piece for {side}")
        piece = entry[side]
        M = piece.get("matrix")
        if M is None:
            M = np.diag(piece.get("scale", [1.0] * space.coord_dim))
        pieces.append(AffinePiece(M, piece.get("offset", [0.0] * space.coord_dim)))
    return pieces[0], pieces[1]


# -- running ---------------------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars and arrays unwrapped, non-finite -> None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def dump_json(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def semimetric_context(sc: Scenario, core=None) -> SemimetricContext | None:
    """Context from the scenario's ``context`` block or from the extracted core."""
    core = core or extract_proximinal_core(sc.A, sc.B, sc.tol)
    entry = sc.raw.get("context", {})
    if core.empty and "B0" not in entry:
        return None
    B0 = region_from_json(entry["B0"], sc.space) if "B0" in entry else core.B0
    d = float(entry.get("d", core.dist))
    if "h" in entry:
        return SemimetricContext(B0, d, h=entry["h"], tol=sc.tol)
    if "partner" in entry:
        ref = str(entry["partner"]).removeprefix("builtin:")
        if ref not in BUILTIN_PARTNERS:
            raise InputError(f"unknown partner {entry['partner']!r}")
        return SemimetricContext(B0, d, partner=BUILTIN_PARTNERS[ref], tol=sc.tol)
    if not core.sharp:
        return None
    if sc.space.is_linear:
        if core.h is None:
            return None
        return SemimetricContext(B0, d, h=core.h, tol=sc.tol)
    return SemimetricContext(B0, d, A0=core.A0, tol=sc.tol)


def _prop_cfg(sc: Scenario):
    return dict(sc.raw.get("properties", {}))


def run_property(sc: Scenario, prop: str, cfg: SolverConfig | None = None) -> dict:
    cfg = cfg or SolverConfig(tol=sc.tol, seed=sc.seed)
    pc = _prop_cfg(sc)
    samples = int(pc.get("samples", 100))
    if prop == "uc":
        return uc_check(sc.A, sc.B, pc.get("uc_eps", (0.5, 0.1, 0.01)), samples,
                        sc.seed, sc.tol).to_json()
    if prop == "wuc":
        return wuc_check(sc.A, sc.B, samples, sc.seed, sc.tol).to_json()
    if prop == "wwuc":
        return wwuc_check(sc.A, sc.B, samples, sc.seed, sc.tol).to_json()
    if prop == "chebyshev":
        return chebyshev_for_proximinal(sc.A, sc.B, sc.tol, seed=sc.seed).to_json()
    if prop == "d1":
        return _d1_bundle(sc, cfg)
    raise InputError(f"unknown property {prop!r}")


def _worst(verdicts) -> str:
    verdicts = list(verdicts)
    if "FAIL" in verdicts:
        return "FAIL"
    if "INCONCLUSIVE" in verdicts:
        return "INCONCLUSIVE"
    return "PASS"


def _d1_bundle(sc: Scenario, cfg: SolverConfig, core=None) -> dict:
    ctx = semimetric_context(sc, core)
    if ctx is None:
        return {"verdict": "INCONCLUSIVE",
                "notes": ["pair is not sharp proximinal; d1 is not defined"]}
    seed = sc.seed
    out = {"mode": ctx.mode, "d": ctx.d, "pairing_defect": ctx.pairing_defect(seed=seed),
           "axioms": verify_semimetric_axioms(ctx, seed=seed).to_json(),
           "domination": verify_domination(ctx, seed=seed).to_json()}
    lifted = lift_map(sc.map, ctx, seed=seed)
    out["commute_defect"] = lifted.commute_defect
    out["contraction"] = verify_d1_contraction(lifted, ctx, sc.k, seed=seed).to_json()
    base = ctx.B0.sample(1, np.random.default_rng(0))[0]
    out["compatibility"] = compatibility_profile(ctx, base).to_json()
    b_start = np.asarray(sc.raw.get("b_start", ctx.B0.sample(3, np.random.default_rng(0))[-1]))
    b0, tr = semimetric_picard(lifted, ctx, b_start, cfg)
    out["picard"] = {"start": b_start, "limit": b0, "steps": len(tr.points) - 1,
                     "termination": tr.termination, "residual": tr.residuals[-1]}
    parts = [out["axioms"]["verdict"], out["domination"]["verdict"],
             out["contraction"]["verdict"]]
    if lifted.commute_defect > 10 * sc.tol:
        parts.append("FAIL")
    if not tr.converged:
        parts.append("INCONCLUSIVE")
    out["verdict"] = _worst(parts)
    return out


def _cat0_bundle(sc: Scenario, ctx: SemimetricContext) -> dict:
    pts = ctx.B0.sample(2, np.random.default_rng(0))
    x, y = pts[0], pts[-1]
    ident = cat0_ball_identity_check(ctx, x, seed=sc.seed).to_json()
    flat = flat_quadrilateral_check(sc.space, x, y, ctx).to_json()
    return {"identity": ident, "flat_quadrilateral": flat,
            "verdict": _worst([ident["verdict"], flat["verdict"]])}


def run_solve(sc: Scenario, cfg: SolverConfig | None = None) -> tuple[dict, str]:
    """Full verification run: returns the report dict and the trace CSV."""
    cfg = cfg or SolverConfig(tol=sc.tol, seed=sc.seed)
    T = sc.map
    verdicts, checks = {}, {}

    def record(name, report):
        checks[name] = report
        verdicts[name] = report["verdict"]

    record("contraction", verify_cyclic_contraction(T, cfg.samples, sc.seed).to_json())
    record("suzuki", verify_suzuki_condition(T, cfg.samples, sc.seed).to_json())

    z, trace = solve_best_proximity(T, sc.start, cfg)
    fit = rate_estimate(trace)
    solver = {"start": sc.start, "limit": z, "residual": trace.residuals[-1],
              "steps": len(trace.points) - 1, "termination": trace.termination,
              "rate": fit.to_json(), "dist": T.dist}
    if not trace.converged:
        verdicts["solver"] = "INCONCLUSIVE"

    starts = sc.raw.get("uniqueness_starts", 10)
    record("uniqueness", uniqueness_probe(T, starts, cfg, sc.seed).to_json())

    core = extract_proximinal_core(sc.A, sc.B, sc.tol)
    core_json = {"dist": core.dist, "sharp": core.sharp, "parallel": core.parallel,
                 "approximate": core.approximate, "notes": core.notes,
                 "A0": core.A0.to_json() if core.A0 is not None else None,
                 "B0": core.B0.to_json() if core.B0 is not None else None,
                 "h": core.h}
    wanted = sc.raw.get("checks", list(PROPERTIES) + ["cat0"])
    for prop in ("uc", "wuc", "wwuc", "chebyshev"):
        if prop in wanted:
            record(prop, run_property(sc, prop, cfg))
    ctx = None
    if "d1" in wanted:
        ctx = semimetric_context(sc, core)
        if ctx is not None:
            record("d1", _d1_bundle(sc, cfg, core))
    if "cat0" in wanted and ctx is not None and sc.space.is_cat0:
        record("cat0", _cat0_bundle(sc, ctx))

    report = {"scenario": sc.name, "source": sc.source, "seed": sc.seed, "tol": sc.tol,
              "rng": RNG_NAME, "space": sc.space.to_json(), "k": sc.k,
              "verdicts": verdicts, "checks": checks, "solver": solver, "core": core_json,
              "overall": _worst(verdicts.values()),
              "artifacts": {"trace": "trace.csv", "report": "report.json"}}
    return report, trace.to_csv()


def exit_code(verdicts) -> int:
    return {"PASS": 0, "FAIL": 2, "INCONCLUSIVE": 3}[_worst(verdicts)]


__all__ = ["Scenario", "GALLERY", "PROPERTIES", "load_scenario", "parse_scenario",
           "run_solve", "run_property", "semimetric_context", "dump_json", "exit_code",
           "fermi", "ProxilabError"]
