"""Command-line front end: ``logdesk run FILE`` and ``logdesk acceptance``."""

from __future__ import annotations

import argparse
import fnmatch
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable

from . import bar, glued, monoid, prelog, repletion, toric
from .abelian import Coefficients, FgAbGroup
from .monoid import PreconditionError, TriState
from .polyhedra import UnsupportedError
from .repletion import InconclusiveError
from .taskfile import TaskFile, TaskFileError, load, resolve

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICTS = ("pass", "fail", "unsupported", "unknown")


@dataclass
class Outcome:
    verdict: str
    result: Any
    provenance: dict = field(default_factory=dict)


@dataclass
class Settings:
    k: Coefficients
    qmax: int
    radius: int
    bounds: int
    seed: int
    degrees: list | None
    acknowledge_window: bool


def _jsonable(x):
    if hasattr(x, "to_json"):
        return x.to_json()
    if isinstance(x, dict):
        return {str(k) if not isinstance(k, str) else k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _group_table(d: dict) -> dict:
    return {str(list(m)): g.to_json() for m, g in sorted(d.items())}


def _degrees(s: Settings, m: monoid.AffineMonoid) -> list[tuple[int, ...]]:
    if s.degrees is not None:
        return [tuple(v) for v in s.degrees]
    return [v for v in toric.degree_box(m.ambient_rank, s.radius) if m.contains(v)]


def _tri(t: TriState, extra: dict | None = None) -> Outcome:
    res = dict(t.to_json(), **(extra or {}))
    return Outcome("unknown" if t.value == "unknown" else "pass", res)


def _check(report, passed: bool | None = None) -> Outcome:
    ok = report.passed if passed is None else passed
    return Outcome("pass" if ok else "fail", _jsonable(report))


# -- handlers ---------------------------------------------------------------
# Each takes (args, settings) where args have been resolved to objects.


def op_classify_map(a, s):
    f = a["map"].with_coeff(s.k)
    c = prelog.classify_map(f, box=s.bounds)
    return Outcome("unknown" if c.integral.value == "unknown" else "pass", c.to_json())


def op_is_integral(a, s):
    return _tri(monoid.is_integral(a["map"], box=s.bounds))


def op_is_exact(a, s):
    return _tri(monoid.is_exact(a["map"], bound=s.bounds))


def op_normalize(a, s):
    return Outcome("pass", monoid.normalize(a["map"]).to_json())


def op_exactify(a, s):
    return Outcome("pass", repletion.exactify(a["map"]).to_json())


def op_replete_split(a, s):
    sp = repletion.replete_split(a["map"], a["section"])
    errors = sp.verify(samples=30, seed=s.seed)
    return Outcome("pass" if not errors else "fail", {"group": sp.group.to_json(), "errors": errors[:10]}, {"seed": s.seed})


def op_verify_bar_iso(a, s):
    return _check(repletion.verify_bar_iso(a["map"], qmax=min(s.qmax, 3), seed=s.seed))


def op_kahler_differentials(a, s):
    f = a["map"].with_coeff(s.k)
    om = prelog.kahler_differentials(f)
    degs = _degrees(s, f.target.ring_monoid)
    return Outcome("pass", {"omega1": _group_table({m: om.at(m, s.k) for m in degs})}, {"degrees": len(degs)})


def op_cotangent_pi(a, s):
    f = a["map"].with_coeff(s.k)
    degs = _degrees(s, f.target.ring_monoid)
    out = {str(n): _group_table(prelog.cotangent_pi(f, n, degs)) for n in range(min(s.qmax, 1) + 1)}
    return Outcome("pass", out, {"degrees": len(degs)})


def op_transitivity_check(a, s):
    return _check(prelog.transitivity_check(a["first"].with_coeff(s.k), a["second"].with_coeff(s.k), s.qmax))


def _hh(fn):
    def run(a, s):
        f = a["map"].with_coeff(s.k)
        degs = _degrees(s, f.target.ring_monoid)
        t = fn(f, s.qmax, degs)
        return Outcome("pass", t.to_json(), {"qmax": s.qmax, "degrees": len(degs)})

    return run


def op_replete_bar_homology(a, s):
    th = a["map"]
    degs = _degrees(s, th.target)
    return Outcome("pass", bar.replete_bar_homology(th, s.qmax, degs, s.k).to_json(), {"qmax": s.qmax, "degrees": len(degs)})


def op_graded_tor(a, s):
    th = a["map"]
    degs = _degrees(s, th.target)
    return Outcome("pass", bar.graded_tor(th, s.qmax, degs, s.k).to_json(), {"qmax": s.qmax, "degrees": len(degs)})


def op_tor1_witness(a, s):
    w = bar.tor1_witness(a["map"], box=s.bounds, k=s.k)
    return Outcome("pass", {"witness": list(w) if w is not None else None}, {"bounds": s.bounds})


def op_hkr_check(a, s):
    f = a["map"].with_coeff(s.k)
    degs = _degrees(s, f.target.ring_monoid)
    return Outcome(*_split(bar.hkr_check(f, s.qmax, degs, seed=s.seed)), {"seed": s.seed, "degrees": len(degs)})


def _split(report):
    return ("pass" if report.passed else "fail", _jsonable(report))


def op_omega_pi1_check(a, s):
    f = a["map"].with_coeff(s.k)
    return _check(bar.omega_pi1_check(f, _degrees(s, f.target.ring_monoid)))


def op_base_change_check(a, s):
    return _check(bar.base_change_check(a["map"], a["base_change"], s.qmax, s.k))


def op_kunneth_check(a, s):
    x, y = a["first"].with_coeff(s.k), a["second"].with_coeff(s.k)
    dx, dy = _degrees(s, x.ring_monoid), _degrees(s, y.ring_monoid)
    return _check(bar.kunneth_check(x, y, s.qmax, [(u, v) for u in dx for v in dy]))


def op_is_subdivision(a, s):
    cert = toric.is_subdivision(a["refined"], a["coarse"])
    return Outcome("pass", cert.to_json())


def op_invariance_check(a, s):
    return _check(toric.invariance_check(a["subdivision"], s.k, radius=s.radius))


def op_toric_cohomology(a, s):
    f = a["fan"]
    d = toric.ToricDivisor({tuple(r): c for r, c in a.get("divisor", [])})
    degs = s.degrees or toric.degree_box(f.dim, s.radius)
    h = toric.cohomology(f, s.k, d, int(a.get("q_log", 0)), degs)
    out = {f"H{i}": {str(list(m)): g.to_json() for m, g in sorted(row.items()) if not g.is_zero} for i, row in h.items()}
    return Outcome("pass", out, {"degree_box": s.radius})


def op_pone_bar_check(a, s):
    return _check(toric.pone_bar_check(s.k, radius=max(s.radius, 1)))


def _window(t: glued.TotalizedTable, s: Settings, verdict: str = "pass") -> Outcome:
    fired = bool(t.provenance["flagged_degrees"])
    prov = dict(t.provenance, window_guard={"fired": fired, "acknowledged": s.acknowledge_window})
    if fired and not s.acknowledge_window and verdict == "pass":
        verdict = "unknown"
    return Outcome(verdict, t.to_json(), prov)


def op_cech_totalize(a, s):
    x = a["scheme"]
    degs = s.degrees or glued.degree_box(x.rank, s.radius)
    q = a.get("q")
    return _window(glued.cech_totalize(x, a.get("theory", "logHH"), s.qmax, degs, q=q), s)


def op_residue_check(a, s):
    r = glued.residue_check(a.get("config", "affine"), nmax=int(a.get("nmax", 1)), k=s.k, radius=s.radius, exponent=int(a.get("exponent", 1)))
    return _check(r)


def op_projective_bundle_check(a, s):
    r = glued.projective_bundle_check(int(a.get("n", 1)), a.get("base", "point"), s.qmax, s.radius, s.k)
    out = _check(r)
    flagged = r.details.get("provenance", {}).get("flagged_degrees", [])
    out.provenance = {"flagged_degrees": flagged, "window_guard": {"fired": bool(flagged), "acknowledged": s.acknowledge_window}}
    if flagged and not s.acknowledge_window and out.verdict == "pass":
        out.verdict = "unknown"
    return out


def op_box_invariance_check(a, s):
    r = glued.box_invariance_check(a["scheme"], s.qmax, s.radius)
    out = _check(r)
    fired = bool(r.details["flagged"])
    out.provenance = {"flagged_degrees": r.details["flagged"], "window_guard": {"fired": fired, "acknowledged": s.acknowledge_window}}
    if fired and not s.acknowledge_window and out.verdict == "pass":
        out.verdict = "unknown"
    return out


def op_descent_check(a, s):
    cover = a.get("map") or a.get("scheme")
    return _check(glued.descent_check(cover, min(s.qmax, 2), s.degrees, s.k, radius=s.radius))


# arg name -> declaration kind, per op
OPS: dict[str, tuple[Callable, dict[str, str]]] = {
    "classify_map": (op_classify_map, {"map": "prelog_maps"}),
    "is_integral": (op_is_integral, {"map": "maps"}),
    "is_exact": (op_is_exact, {"map": "maps"}),
    "normalize": (op_normalize, {"map": "maps"}),
    "exactify": (op_exactify, {"map": "maps"}),
    "replete_split": (op_replete_split, {"map": "maps", "section": "maps"}),
    "verify_bar_iso": (op_verify_bar_iso, {"map": "maps"}),
    "kahler_differentials": (op_kahler_differentials, {"map": "prelog_maps"}),
    "cotangent_pi": (op_cotangent_pi, {"map": "prelog_maps"}),
    "transitivity_check": (op_transitivity_check, {"first": "prelog_maps", "second": "prelog_maps"}),
    "loghh": (_hh(bar.loghh_homology), {"map": "prelog_maps"}),
    "hochschild": (_hh(bar.hochschild_homology), {"map": "prelog_maps"}),
    "replete_bar_homology": (op_replete_bar_homology, {"map": "maps"}),
    "graded_tor": (op_graded_tor, {"map": "maps"}),
    "tor1_witness": (op_tor1_witness, {"map": "maps"}),
    "hkr_check": (op_hkr_check, {"map": "prelog_maps"}),
    "omega_pi1_check": (op_omega_pi1_check, {"map": "prelog_maps"}),
    "base_change_check": (op_base_change_check, {"map": "maps", "base_change": "maps"}),
    "kunneth_check": (op_kunneth_check, {"first": "rings", "second": "rings"}),
    "is_subdivision": (op_is_subdivision, {"refined": "fans", "coarse": "fans"}),
    "invariance_check": (op_invariance_check, {"subdivision": "subdivisions"}),
    "toric_cohomology": (op_toric_cohomology, {"fan": "fans"}),
    "pone_bar_check": (op_pone_bar_check, {}),
    "cech_totalize": (op_cech_totalize, {"scheme": "schemes"}),
    "residue_check": (op_residue_check, {}),
    "projective_bundle_check": (op_projective_bundle_check, {}),
    "box_invariance_check": (op_box_invariance_check, {"scheme": "schemes"}),
    "descent_check": (op_descent_check, {"map": "maps", "scheme": "schemes"}),
}


def _resolve_args(tf: TaskFile, op: str, args: dict) -> dict:
    if op not in OPS:
        raise TaskFileError(f"unknown op {op!r}")
    kinds = OPS[op][1]
    out = {}
    for key, val in args.items():
        if key in kinds:
            try:
                out[key] = resolve(kinds[key], val, tf)
            except TaskFileError:
                raise
            except (KeyError, TypeError, ValueError) as e:
                raise TaskFileError(f"op {op}: bad argument {key}: {e}") from None
        else:
            out[key] = val
    return out


def _lookup(data, path: str):
    cur = data
    for part in path.split("."):
        if isinstance(cur, dict) and part in cur:
            cur = cur[part]
        elif isinstance(cur, list) and part.isdigit() and int(part) < len(cur):
            cur = cur[int(part)]
        else:
            return _MISSING
    return cur


_MISSING = object()


def _settings(tf: TaskFile, task, flags) -> Settings:
    o = task.options
    k = Coefficients.parse(o.get("coefficients", tf.coefficients))

    def pick(name, flag, default):
        v = getattr(flags, flag, None)
        return v if v is not None else o.get(name, default)

    return Settings(
        k=k,
        qmax=pick("qmax", "qmax", 2),
        radius=pick("degree_box", "degree_box", 2),
        bounds=pick("bounds", "bounds", 3),
        seed=pick("seed", "seed", tf.seed),
        degrees=o.get("degrees"),
        acknowledge_window=bool(o.get("acknowledge_window")) or bool(getattr(flags, "allow_inconclusive", False)),
    )


def execute(tf: TaskFile, flags) -> tuple[dict, int, float]:
    """Run the tasks of a file; returns (report, exit code, seconds)."""
    start = time.perf_counter()
    only = getattr(flags, "only", None)
    tasks = [t for t in tf.tasks if not only or fnmatch.fnmatch(t.name, only) or fnmatch.fnmatch(t.op, only)]
    prepared = [(t, _resolve_args(tf, t.op, t.args)) for t in tasks]
    rows = []
    for task, args in prepared:
        s = _settings(tf, task, flags)
        try:
            out = OPS[task.op][0](args, s)
        except (InconclusiveError,) as e:
            out = Outcome("unknown", {"error": str(e)})
        except UnsupportedError as e:
            out = Outcome("unsupported", {"error": str(e)})
        except PreconditionError as e:
            out = Outcome("fail", {"error": str(e)})
        except ValueError as e:
            raise TaskFileError(f"task {task.name!r}: {e}") from None
        mismatches = []
        for path, want in task.expect.items():
            got = _lookup(out.result, path)
            if got is _MISSING or got != want:
                mismatches.append({"path": path, "expected": want, "got": None if got is _MISSING else got})
        if mismatches and out.verdict in ("pass", "fail"):
            out.verdict = "fail"
        prov = {"seed": s.seed, "coefficients": str(s.k), **out.provenance}
        row = {"name": task.name, "op": task.op, "verdict": out.verdict, "result": _jsonable(out.result), "provenance": prov}
        if task.expect:
            row["expect"] = {"mismatches": mismatches}
        rows.append(row)
    code = exit_code([r["verdict"] for r in rows], getattr(flags, "allow_inconclusive", False))
    report = {
        "seed": getattr(flags, "seed", None) if getattr(flags, "seed", None) is not None else tf.seed,
        "coefficients": str(tf.coefficients),
        "declarations": tf.declarations(),
        "tasks": rows,
        "summary": {v: sum(r["verdict"] == v for r in rows) for v in VERDICTS},
        "exit_code": code,
    }
    return report, code, time.perf_counter() - start


def exit_code(verdicts, allow_inconclusive: bool = False) -> int:
    if any(v == "fail" for v in verdicts):
        return EXIT_FAIL
    if not allow_inconclusive and any(v in ("unknown", "unsupported") for v in verdicts):
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)


def render_text(report: dict, seconds: float | None = None) -> str:
    lines = [f"seed: {report.get('seed')}"]
    rows = report.get("tasks", report.get("criteria", []))
    if rows:
        labels = [f"{r['id']} {r['name']}" if "id" in r else r["name"] for r in rows]
        w = max(map(len, labels))
        for label, r in zip(labels, rows):
            extra = r.get("op", r.get("title", ""))
            lines.append(f"{label:<{w}}  {r['verdict']:<11}  {extra}")
    summary = report.get("summary", {})
    lines.append("summary: " + ", ".join(f"{k}={v}" for k, v in summary.items()))
    if seconds is not None:
        lines.append(f"time: {seconds:.2f}s")
    lines.append(f"exit: {report.get('exit_code')}")
    return "\n".join(lines)


def _emit(report: dict, fmt: str, seconds: float) -> None:
    # timing sits in its own key; everything else is reproducible byte for byte
    if fmt == "json":
        print(dumps(dict(report, timing={"seconds": round(seconds, 3)})))
    else:
        print(render_text(report, seconds))


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--seed", type=int)
    p.add_argument("--only", metavar="PATTERN")
    p.add_argument("--allow-inconclusive", action="store_true")


def parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="logdesk", description="Desk-scale checks for log Hochschild homology of monoid algebras.")
    sub = ap.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute a task file")
    run.add_argument("file")
    _common(run)
    run.add_argument("--qmax", type=int)
    run.add_argument("--degree-box", dest="degree_box", type=int)
    run.add_argument("--bounds", type=int)
    acc = sub.add_parser("acceptance", help="run the acceptance suite")
    _common(acc)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = parser()
    try:
        flags = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INVALID if e.code else EXIT_PASS
    if flags.command == "acceptance":
        from .acceptance import run_suite

        report, seconds = run_suite(only=flags.only, seed=flags.seed or 0)
        _emit(report, flags.format, seconds)
        return report["exit_code"]
    for name in ("qmax", "degree_box", "bounds", "seed"):
        v = getattr(flags, name, None)
        if v is not None and v < 0:
            print(f"error: --{name.replace('_', '-')} must be non-negative", file=sys.stderr)
            return EXIT_INVALID
    try:
        tf = load(flags.file)
        report, code, seconds = execute(tf, flags)
    except TaskFileError as e:
        report = {"error": str(e), "exit_code": EXIT_INVALID}
        if flags.format == "json":
            print(dumps(report))
        else:
            print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    _emit(report, flags.format, seconds)
    return code


if __name__ == "__main__":
    sys.exit(main())
