"""``proxilab solve|check|gallery``.

Exit codes: 0 all PASS, 1 bad input, 2 some FAIL, 3 some INCONCLUSIVE.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .errors import ProxilabError
from .scenarios import (GALLERY, PROPERTIES, dump_json, exit_code, gallery_path,
                        load_scenario, run_property, run_solve)
from .solver import SolverConfig


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _config(args, sc) -> SolverConfig:
    return SolverConfig(tol=sc.tol, max_steps=args.max_steps, seed=sc.seed)


def cmd_solve(args) -> int:
    sc = load_scenario(args.scenario, args.seed, args.tol)
    report, csv = run_solve(sc, _config(args, sc))
    out = Path(args.out)
    # both files only appear once every check has finished
    _atomic_write(out / "trace.csv", csv)
    _atomic_write(out / "report.json", dump_json(report))
    for name in sorted(report["verdicts"]):
        print(f"{name:12s} {report['verdicts'][name]}")
    s = report["solver"]
    print(f"limit        {json.dumps([float(v) for v in s['limit']])}")
    print(f"residual     {s['residual']:.3e} after {s['steps']} double-steps ({s['termination']})")
    return exit_code(report["verdicts"].values())


def cmd_check(args) -> int:
    sc = load_scenario(args.scenario, args.seed, args.tol)
    report = run_property(sc, args.property, _config(args, sc))
    report = {"scenario": sc.name, "seed": sc.seed, "property": args.property, **report}
    text = dump_json(report)
    if args.out:
        _atomic_write(Path(args.out) / "report.json", text)
    sys.stdout.write(text)
    return exit_code([report["verdict"]])


def cmd_gallery(args) -> int:
    if args.action == "list":
        for name in GALLERY:
            print(name)
        return 0
    if not args.name:
        raise ProxilabError("gallery describe needs a scenario name")
    if args.name not in GALLERY:
        print(f"error: unknown gallery scenario {args.name!r}", file=sys.stderr)
        return 1
    raw = json.loads(gallery_path(args.name).read_text(encoding="utf-8"))
    print(f"{raw['name']}: {raw['description']}")
    print("exercises:")
    for line in raw.get("exercises", []):
        print(f"  - {line}")
    exp = raw.get("expected", {})
    if exp.get("fail"):
        print(f"expected FAIL: {', '.join(exp['fail'])}")
    print(f"expected exit code: {exp.get('exit', 0)}")
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are bad input (1), not a FAIL verdict (argparse uses 2)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    common.add_argument("--tol", type=float, default=None, help="override the tolerance")
    common.add_argument("--max-steps", type=int, default=1000, help="double-step cap")
    p = _Parser(prog="proxilab", description="best proximity points of cyclic contractions")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("solve", parents=[common], help="verify, solve, write trace and report")
    s.add_argument("scenario", help="scenario file or gallery name")
    s.add_argument("--out", default="proxilab-out", help="output directory")
    c = sub.add_parser("check", parents=[common], help="run one property checker")
    c.add_argument("scenario")
    c.add_argument("--property", required=True, choices=PROPERTIES)
    c.add_argument("--out", default=None, help="also write report.json here")
    g = sub.add_parser("gallery", help="list or describe builtin scenarios")
    g.add_argument("action", choices=("list", "describe"))
    g.add_argument("name", nargs="?")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"solve": cmd_solve, "check": cmd_check, "gallery": cmd_gallery}[args.command]
    try:
        return handler(args)
    except ProxilabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
