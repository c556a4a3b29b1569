"""Command-line front end.

Exit codes: 0 when everything passes, 1 on a mismatch or evaluation failure,
2 on usage, parse or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Optional

from . import catalogue, partitions, qdsl
from .report import VerificationReport
from .series import QSeries, SeriesError

OUTPUT_DIR_ENV = "QBAILEY_OUTPUT_DIR"
STATISTICS = ("p", "spt", "spt-star", "rank-moment")


class UsageError(Exception):
    pass


# -- argument helpers --------------------------------------------------------


def parse_range(text: str) -> tuple:
    """'5' -> (5,), '1..4' -> (1, 2, 3, 4), '1|3|7' -> (1, 3, 7)."""
    try:
        if ".." in text:
            lo, hi = (int(s) for s in text.split("..", 1))
            return tuple(range(lo, hi + 1))
        return tuple(int(s) for s in text.split("|"))
    except ValueError:
        raise UsageError(f"bad integer or range {text!r}") from None


def parse_assignments(items: list[str]) -> dict:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        out[name.strip()] = parse_range(value.strip())
    return out


def expand(grids: dict) -> list[dict]:
    names = sorted(grids)
    return [dict(zip(names, combo)) for combo in itertools.product(*(grids[n] for n in names))]


def resolve_output(path: Optional[str]) -> Optional[Path]:
    if path is None or path == "-":
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def emit(text: str, path: Optional[str]) -> None:
    target = resolve_output(path)
    if target is None:
        sys.stdout.write(text)
        return
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {target}: {exc}") from None


# -- verification jobs -------------------------------------------------------


def _catalogue_job(job: tuple) -> VerificationReport:
    _, identity_id, params, order = job
    return catalogue.run(catalogue.build(identity_id, params, order))


def _manifest_job(job: tuple) -> VerificationReport:
    _, text, name, params, order = job
    check = qdsl.parse_manifest(text).check(name)
    try:
        return qdsl.run_check(check, params, order)
    except (qdsl.EvalError, SeriesError) as exc:
        return VerificationReport(name, params, order if order is not None else check.order,
                                  "fail", None, 0.0, {"error": f"{type(exc).__name__}: {exc}"})


def _run_job(job: tuple) -> VerificationReport:
    return _catalogue_job(job) if job[0] == "catalogue" else _manifest_job(job)


def _sort_key(job: tuple):
    if job[0] == "catalogue":
        return (job[1], sorted(job[2].items()))
    return (job[2], sorted(job[3].items()))


def run_jobs(jobs: list[tuple], workers: int) -> list[VerificationReport]:
    jobs = sorted(jobs, key=_sort_key)
    if workers <= 1 or len(jobs) <= 1:
        return [_run_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_job, jobs))


def catalogue_jobs(identity_id: str, grids: dict, order: int, K: Optional[int]) -> list[tuple]:
    try:
        entry = catalogue.entry(identity_id)
    except catalogue.UnknownIdentity:
        raise UsageError(f"unknown identity {identity_id!r}; known: "
                         f"{', '.join(e.id for e in catalogue.registry())}") from None
    grids = dict(grids)
    if K is not None:
        if "K" not in entry.params:
            raise UsageError("--K only applies to E8_PENTA_CUBE")
        grids["K"] = (K,)
    for name, spec in entry.params.items():
        if name not in grids and spec.default is None:
            grids[name] = spec.values()
    jobs = []
    for params in expand(grids):
        try:
            entry.resolve(params)
        except catalogue.BadParams as exc:
            raise UsageError(str(exc)) from None
        jobs.append(("catalogue", identity_id, params, order))
    return jobs


def manifest_jobs(path: str, grids: dict, order: Optional[int]) -> list[tuple]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read manifest {path}: {exc}") from None
    try:
        manifest = qdsl.parse_manifest(text)
    except qdsl.ManifestError as exc:
        raise UsageError(f"manifest error: {exc}") from None
    jobs = []
    for check in manifest.checks:
        base = dict(check.params)
        base.update({k: v for k, v in grids.items() if k in base})
        for params in expand(base):
            jobs.append(("manifest", text, check.name, params, order))
    return jobs


# -- formatting --------------------------------------------------------------


def _coefficient_rows(report: VerificationReport) -> list[tuple]:
    if report.lhs is None or report.rhs is None:
        return []
    lows = [s.min_exp for s in (report.lhs, report.rhs) if s.coeffs]
    lo = min([0] + lows)
    rows = []
    for n in range(lo, report.order + 1):
        a, b = report.lhs.coeff(n), report.rhs.coeff(n)
        rows.append((n, a, b, "true" if a == b else "false"))
    return rows


def format_reports(reports: list[VerificationReport], fmt: str, timings: bool = False) -> str:
    if fmt == "json":
        payload = {
            "reports": [r.to_dict(timings) for r in reports],
            "passed": sum(r.passed for r in reports),
            "failed": sum(not r.passed for r in reports),
        }
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "lhs", "rhs", "equal"])
        for r in reports:
            w.writerows(_coefficient_rows(r))
        return buf.getvalue()
    lines = [r.summary() + (f" ({r.elapsed:.3f}s)" if timings else "") for r in reports]
    passed = sum(r.passed for r in reports)
    lines.append(f"{passed} passed, {len(reports) - passed} failed")
    return "\n".join(lines) + "\n"


def compute_values(stat: str, ns: tuple, M: Optional[int]) -> list[tuple]:
    if stat == "spt-star" and M is None:
        raise UsageError("spt-star needs --M")
    out = []
    for n in ns:
        if n < 0 or n > partitions.MAX_ENUMERATION:
            raise UsageError(f"n={n} outside the enumeration range 0..{partitions.MAX_ENUMERATION}")
        if stat != "p" and n < 1:
            raise UsageError(f"{stat} is defined for n >= 1")
        if stat == "p":
            value = partitions.p(n)
        elif stat == "spt":
            value = partitions.spt(n)
        elif stat == "spt-star":
            if M < 0:
                raise UsageError("M must be >= 0")
            value = partitions.spt_star(M, n)
        else:
            value = partitions.second_moment(n)
        out.append((n, value))
    return out


def format_values(stat: str, M: Optional[int], rows: list[tuple], fmt: str) -> str:
    if fmt == "json":
        payload = {"statistic": stat, "values": [{"n": n, "value": v} for n, v in rows]}
        if M is not None:
            payload["M"] = M
        return json.dumps(payload, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value"])
        w.writerows(rows)
        return buf.getvalue()
    return "".join(f"{n} {v}\n" for n, v in rows)


def format_series_output(s: QSeries, T: int, fmt: str) -> str:
    lo = min(0, s.min_exp) if s.coeffs else 0
    rows = [(n, s.coeff(n)) for n in range(lo, T + 1)]
    if fmt == "json":
        return json.dumps({"order": T, "coefficients": [{"n": n, "value": str(c)} for n, c in rows]},
                          indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value"])
        w.writerows(rows)
        return buf.getvalue()
    return "".join(f"{n} {c}\n" for n, c in rows)


# -- commands ----------------------------------------------------------------


def _verification_reports(args) -> list[VerificationReport]:
    grids = parse_assignments(args.param)
    if args.manifest:
        jobs = manifest_jobs(args.manifest, grids, args.order_given)
    elif args.all:
        jobs = [j for e in catalogue.registry()
                for j in catalogue_jobs(e.id, {}, args.order, args.K if e.id == "E8_PENTA_CUBE" else None)]
    elif args.id:
        jobs = catalogue_jobs(args.id, grids, args.order, args.K)
    else:
        raise UsageError("give --id, --manifest or --all")
    return run_jobs(jobs, args.jobs)


def cmd_verify(args) -> int:
    reports = _verification_reports(args)
    emit(format_reports(reports, args.format, args.timings), args.output)
    return 0 if all(r.passed for r in reports) else 1


def cmd_compute(args) -> int:
    ns = parse_range(args.n)
    rows = compute_values(args.statistic, ns, args.M)
    emit(format_values(args.statistic, args.M, rows, args.format), args.output)
    return 0


def cmd_series(args) -> int:
    try:
        expr = qdsl.parse(args.expression)
    except qdsl.DSLError as exc:
        raise UsageError(str(exc)) from None
    env = {k: v[0] for k, v in parse_assignments(args.param).items()}
    try:
        s = qdsl.evaluate(expr, env, args.order)
    except (qdsl.EvalError, SeriesError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    emit(format_series_output(s, args.order, args.format), args.output)
    return 0


def cmd_export(args) -> int:
    if args.output is None:
        raise UsageError("export needs --output")
    fmt = args.format or ("json" if str(args.output).endswith(".json") else "csv")
    if args.statistic:
        rows = compute_values(args.statistic, parse_range(args.n) if args.n else (), args.M)
        emit(format_values(args.statistic, args.M, rows, fmt), args.output)
        return 0
    reports = _verification_reports(args)
    emit(format_reports(reports, fmt, args.timings), args.output)
    return 0 if all(r.passed for r in reports) else 1


def _add_run_options(p: argparse.ArgumentParser, default_format: Optional[str] = "text") -> None:
    p.add_argument("--id", help="identity id from the registry")
    p.add_argument("--manifest", help="path to a manifest file")
    p.add_argument("--all", action="store_true", help="run every registry entry on its grid")
    p.add_argument("--param", action="append", default=[], metavar="NAME=VALUE",
                   help="parameter value, range lo..hi or list a|b (repeatable)")
    p.add_argument("--order", type=int, default=None, help="truncation order T (default 40)")
    p.add_argument("--K", type=int, default=None, help="N-cutoff cap for E8_PENTA_CUBE")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--timings", action="store_true", help="include elapsed times")
    p.add_argument("--format", choices=("text", "json", "csv"), default=default_format)
    p.add_argument("--output", "-o", help="write to this path instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qbailey", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run catalogue or manifest verifications")
    _add_run_options(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compute", help="partition statistics by enumeration")
    c.add_argument("statistic", choices=STATISTICS)
    c.add_argument("--n", required=True, help="n or range lo..hi")
    c.add_argument("--M", type=int, default=None)
    c.add_argument("--format", choices=("text", "json", "csv"), default="text")
    c.add_argument("--output", "-o")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("series", help="evaluate an expression to a truncated series")
    s.add_argument("expression")
    s.add_argument("--order", type=int, default=40)
    s.add_argument("--param", action="append", default=[], metavar="NAME=VALUE")
    s.add_argument("--format", choices=("text", "json", "csv"), default="text")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_series)

    e = sub.add_parser("export", help="write a verification or statistics table to a file")
    _add_run_options(e, default_format=None)
    e.add_argument("--stat", dest="statistic", choices=STATISTICS)
    e.add_argument("--n")
    e.add_argument("--M", type=int, default=None)
    e.set_defaults(func=cmd_export)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if hasattr(args, "K"):
        # manifests keep their per-check order unless --order is given
        args.order_given = args.order
        if args.order is None:
            args.order = 40
    try:
        if getattr(args, "order", None) is not None and args.order < 0:
            raise UsageError("order must be >= 0")
        if getattr(args, "jobs", 1) < 1:
            raise UsageError("--jobs must be >= 1")
        if getattr(args, "K", None) is not None and args.K < 0:
            raise UsageError("--K must be >= 0")
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
