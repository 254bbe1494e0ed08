"""
Command-line front door.

    eulerstirling verify --id thm1 --tcap 8 --ucap 7 --points 3 --seed 42
    eulerstirling dist --n 3 --stats des --domain perm
    eulerstirling conjecture --n-max 8

Exit status: 0 when every check passes, 1 when a check fails (the report
carries a witness), 2 on usage errors, pole exhaustion or bound violations.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field

from . import __version__
from .combinatorics import DEFAULT_BOUND, INVSEQ_STATS, PERM_STATS, check_bound
from .equidist import check_conjecture_op2, joint_distribution, normalize_domain
from .errors import DomainError, EnumerationBoundError, PoleError
from .formulas import FORMULAS, verify_formula

log = logging.getLogger("eulerstirling")

# enumerations larger than this need --force even below the bound
MAX_ENUMERATION = math.factorial(DEFAULT_BOUND)


@dataclass
class RunConfig:
    command: str
    formula: str | None = None
    stats: tuple[str, ...] = ()
    domain: str = "perm"
    caps: dict = field(default_factory=dict)
    n: int | None = None
    n_max: int | None = None
    points: int = 3
    seed: int = 0
    j: int | None = None
    fmt: str = "text"
    output: str | None = None
    timings: bool = False
    bound: int = DEFAULT_BOUND
    workers: int = 1

    def __post_init__(self):
        for name, cap in self.caps.items():
            if cap is not None and cap < 1:
                raise DomainError(f"--{name}cap must be >= 1")
        if self.points < 1:
            raise DomainError("--points must be >= 1")


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eulerstirling",
                                description="Exact checks of Euler-Stirling statistics identities.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "json")):
        sp.add_argument("--format", dest="fmt", choices=formats, default="text")
        sp.add_argument("--output", "-o", help="write the report to this file")

    v = sub.add_parser("verify", help="check a generating-function identity")
    v.add_argument("--id", dest="formula", required=True, choices=sorted(FORMULAS))
    for name in ("t", "u", "x", "r"):
        v.add_argument(f"--{name}cap", type=int, default=None,
                       help=f"cap for {name} (u/x caps also apply to ubar/xbar)")
    v.add_argument("--points", type=int, default=3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--j", type=int, default=None, help="tf43 only; default runs j=0,1,2")
    v.add_argument("--timings", action="store_true",
                   help="include elapsed_ms in JSON (breaks byte-identical reruns)")
    common(v)

    d = sub.add_parser("dist", help="print an exact joint distribution")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--stats", required=True, help="comma-separated statistic names")
    d.add_argument("--domain", default="perm", choices=["perm", "invseq"])
    d.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    d.add_argument("--force", action="store_true", help="allow enumerations above the default bound")
    common(d, ("text", "json", "csv"))

    c = sub.add_parser("conjecture", help="exhaustive scan for the quintuple conjecture")
    c.add_argument("--n-max", type=int, required=True)
    c.add_argument("--bound", type=int, default=DEFAULT_BOUND)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--force", action="store_true", help="allow enumerations above the default bound")
    c.add_argument("--timings", action="store_true")
    common(c)
    return p


def _config(args) -> RunConfig:
    if args.command == "verify":
        caps = {"t": args.tcap, "u": args.ucap, "x": args.xcap, "r": args.rcap}
        return RunConfig("verify", formula=args.formula, caps=caps, points=args.points,
                         seed=args.seed, j=args.j, fmt=args.fmt, output=args.output,
                         timings=args.timings)
    if args.command == "dist":
        stats = tuple(s.strip() for s in args.stats.split(",") if s.strip())
        return RunConfig("dist", stats=stats, domain=args.domain, n=args.n, fmt=args.fmt,
                         output=args.output, bound=args.bound)
    return RunConfig("conjecture", n_max=args.n_max, fmt=args.fmt, output=args.output,
                     bound=args.bound, workers=args.workers, timings=args.timings)


def _guard_size(n: int, bound: int, force: bool) -> None:
    """Bound check first, then a size estimate for raised bounds."""
    check_bound(n, bound)
    size = math.factorial(n)
    if size > MAX_ENUMERATION and not force:
        raise EnumerationBoundError(
            f"n={n} enumerates {size:.2e} objects (about {size / 2e5:.0f} s per "
            f"statistic tuple at desk speed); pass --force to proceed")


def _plan_caps(formula: str, caps: dict) -> dict:
    spec = FORMULAS[formula]
    out = {}
    for var in spec.caps:
        base = var[0]  # ubar -> u, xbar -> x
        if caps.get(base) is not None:
            out[var] = caps[base]
    return out


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_verify(cfg: RunConfig) -> tuple[int, str]:
    reports = verify_formula(cfg.formula, _plan_caps(cfg.formula, cfg.caps), cfg.points,
                             cfg.seed, cfg.j)
    reports.sort(key=lambda r: (r.claim, json.dumps(r.params, sort_keys=True)))
    ok = all(r.passed for r in reports)
    if cfg.fmt == "json":
        body = {"tool_version": __version__, "command": "verify", "id": cfg.formula,
                "seed": cfg.seed, "status": "pass" if ok else "fail",
                "checks": [r.to_json(cfg.timings) for r in reports]}
        return (0 if ok else 1), _dump(body)
    lines = []
    for r in reports:
        pt = ", ".join(f"{k}={v}" for k, v in r.params["points"][0].items()) or "-"
        extra = f" j={r.params['j']}" if "j" in r.params else ""
        lines.append(f"{r.status.upper():4}  {r.claim:28} at {pt}{extra}  "
                     f"({r.elapsed * 1000:.0f} ms)")
        if r.witness:
            lines.append(f"      witness: {json.dumps(r.witness, sort_keys=True)}")
    lines.append(f"{cfg.formula}: {'all checks passed' if ok else 'FAILED'}")
    return (0 if ok else 1), "\n".join(lines) + "\n"


def _cell(v):
    return ";".join(map(str, v)) if isinstance(v, tuple) else str(v)


def cmd_dist(cfg: RunConfig, force: bool = False) -> tuple[int, str]:
    if not cfg.stats:
        raise DomainError("--stats needs at least one statistic")
    domain = normalize_domain(cfg.domain)
    table = PERM_STATS if domain == "permutations" else INVSEQ_STATS
    for s in cfg.stats:
        if s not in table:
            raise DomainError(f"unknown statistic {s!r} for {domain}; "
                              f"choose from {', '.join(sorted(table))}")
    _guard_size(cfg.n, cfg.bound, force)
    dist = joint_distribution(cfg.stats, cfg.n, cfg.domain, cfg.bound)
    rows = dist.rows()
    if cfg.fmt == "json":
        body = {"tool_version": __version__, "command": "dist", "stats": list(cfg.stats),
                "n": cfg.n, "domain": domain,
                "rows": [{"tuple": [list(v) if isinstance(v, tuple) else v for v in k],
                          "count": c} for k, c in rows]}
        return 0, _dump(body)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(list(cfg.stats) + ["count"])
        for k, c in rows:
            w.writerow([_cell(v) for v in k] + [c])
        return 0, buf.getvalue()
    lines = [f"# {','.join(cfg.stats)} on {domain}, n={cfg.n}"]
    for k, c in rows:
        lines.append(f"{','.join(_cell(v) for v in k)} : {c}")
    return 0, "\n".join(lines) + "\n"


def cmd_conjecture(cfg: RunConfig, force: bool = False) -> tuple[int, str]:
    _guard_size(cfg.n_max, cfg.bound, force)
    report = check_conjecture_op2(cfg.n_max, cfg.bound, cfg.workers)
    code = 0 if report.passed else 1
    if cfg.fmt == "json":
        body = {"tool_version": __version__, "command": "conjecture",
                "checks": [report.to_json(cfg.timings)], "status": report.status}
        return code, _dump(body)
    if report.passed:
        text = (f"PASS  no counterexample to the quintuple equidistribution for "
                f"n <= {cfg.n_max} ({report.elapsed:.1f} s)\n")
    else:
        text = ("FAIL  counterexample found; full witness follows\n"
                + _dump(report.witness))
    return code, text


def main(argv=None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = _config(args)
        start = time.perf_counter()
        if cfg.command == "verify":
            code, text = cmd_verify(cfg)
        elif cfg.command == "dist":
            code, text = cmd_dist(cfg, args.force)
        else:
            code, text = cmd_conjecture(cfg, args.force)
        log.debug("%s finished in %.2f s", cfg.command, time.perf_counter() - start)
    except (DomainError, EnumerationBoundError, PoleError) as exc:
        print(f"eulerstirling: error: {exc}", file=sys.stderr)
        return 2
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
