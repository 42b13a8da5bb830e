"""Command line front end: ``shiftlab run | sweep | explain``.

Exit codes: 0 when every audit passes, 1 when some audit fails (the report
is still written), 2 for unreadable or schema-invalid input.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from copy import deepcopy

from . import serialize
from .scenario import ScenarioError, run_scenario


class InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _emit(obj, out: str | None) -> None:
    if out:
        serialize.dump(obj, out)
    else:
        sys.stdout.write(serialize.dumps(obj))


# --- run -----------------------------------------------------------------------


def cmd_run(args) -> int:
    scenario = _read_json(args.scenario)
    t0 = time.perf_counter()
    report = run_scenario(scenario, seed=args.seed, cap_override=args.cap_override)
    if args.timings:
        report["timings"] = {"total_seconds": round(time.perf_counter() - t0, 6)}
    _emit(report, args.out or scenario.get("output"))
    return 0 if report["status"] == "pass" else 1


# --- sweep -----------------------------------------------------------------------


def _set_path(obj: dict, path: str, value) -> None:
    keys = path.split(".")
    for k in keys[:-1]:
        obj = obj.setdefault(k, {})
    obj[keys[-1]] = value


def grid_points(grid: dict) -> list[dict]:
    """Cartesian product of the grid axes; an empty grid has no points."""
    if not grid:
        return []
    axes = sorted(grid)
    return [dict(zip(axes, combo)) for combo in itertools.product(*(grid[a] for a in axes))]


def _row(template: dict, point: dict, cap_override) -> dict:
    scenario = deepcopy(template)
    for path, value in point.items():
        _set_path(scenario, path, value)
    row = {"key": point}
    try:
        report = run_scenario(scenario, cap_override=cap_override)
    except Exception as exc:  # rows are independent: record and continue
        row.update({"status": "error", "error": f"{type(exc).__name__}: {exc}"})
        return row
    failed = [a["name"] for a in report["audits"] if a["status"] != "pass"]
    metrics = {k: v for k, v in report["payload"].items()
               if isinstance(v, (int, float, str, bool)) or v is None}
    row.update({"status": report["status"], "audits": len(report["audits"]), "failed": failed,
                "metrics": metrics})
    return row


def sweep(template: dict, grid: dict, jobs: int = 1, cap_override=None) -> list[dict]:
    points = grid_points(grid)
    if jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_row, [template] * len(points), points, [cap_override] * len(points)))
    else:
        rows = [_row(template, p, cap_override) for p in points]
    return sorted(rows, key=lambda r: serialize.dumps(r["key"]))


def cmd_sweep(args) -> int:
    template = _read_json(args.template)
    grid = _read_json(args.grid)
    if not isinstance(grid, dict) or not all(isinstance(v, list) for v in grid.values()):
        raise InputError(f"{args.grid}: grid must map parameter paths to lists of values")
    rows = sweep(template, grid, args.jobs, args.cap_override)
    _emit({"template": template, "grid": grid, "rows": rows}, args.out)
    return 0 if all(r["status"] == "pass" for r in rows) else 1


# --- explain ---------------------------------------------------------------------


def explain(report: dict, name: str) -> str:
    audits = {a["name"]: a for a in report.get("audits", [])}
    if name not in audits:
        raise KeyError(name)
    a = audits[name]
    lines = [f"audit: {a['name']}", f"status: {a['status']}", f"topic: {a.get('topic', '')}"]
    for field in ("witness", "counterexample"):
        if field in a:
            lines.append(f"{field}:")
            body = a[field]
            if isinstance(body, dict):
                for k in sorted(body):
                    lines.append(f"  {k}: {json.dumps(body[k], sort_keys=True, ensure_ascii=False)}")
            else:
                lines.append(f"  {json.dumps(body, sort_keys=True, ensure_ascii=False)}")
    return "\n".join(lines)


def cmd_explain(args) -> int:
    report = _read_json(args.report)
    try:
        print(explain(report, args.audit))
    except KeyError:
        names = ", ".join(a["name"] for a in report.get("audits", [])[:20])
        print(f"unknown audit {args.audit!r}; available: {names}", file=sys.stderr)
        return 2
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shiftlab")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("--scenario", required=True)
    r.add_argument("--out")
    r.add_argument("--seed", type=int)
    r.add_argument("--cap-override", type=int)
    r.add_argument("--timings", action="store_true", help="add wall-clock timings (breaks byte stability)")
    r.set_defaults(func=cmd_run)
    s = sub.add_parser("sweep", help="run a template over a parameter grid")
    s.add_argument("--template", required=True)
    s.add_argument("--grid", required=True)
    s.add_argument("--out")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--cap-override", type=int)
    s.set_defaults(func=cmd_sweep)
    e = sub.add_parser("explain", help="print one audit of a report")
    e.add_argument("--report", required=True)
    e.add_argument("--audit", required=True)
    e.set_defaults(func=cmd_explain)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
