"""Declarative task files (YAML or JSON): declarations plus an ordered task list.

Schema::

    coefficients: QQ            # default ring for every task
    seed: 0
    declarations:
      monoids:      {NAME: {free: 2} | {lattice: 1} | {ambient_rank: 2, generators: [[2,0],[1,1]]}}
      maps:         {NAME: {source: MONOID, target: MONOID, matrix: [[...]]}}
      rings:        {NAME: {monoid: MONOID, log: canonical | trivial | {monoid: MONOID, structure: [[...]]},
                            ideal: [[...]]} | "point"}
      prelog_maps:  {NAME: {canonical: MAP} | {over_point: RING} | {source, target, monoid_map, prelog_map}}
      fans:         {NAME: CATALOG_NAME | {dim: 2, cones: [[[1,0],[0,1]], ...]}}
      subdivisions: {NAME: {star: FAN, ray: [1,1]} | {refined: FAN, coarse: FAN}}
      schemes:      {NAME: CATALOG_NAME | {catalog: Pn, n: 2, base: A1} | {charts, overlaps, base, ...}}
    tasks:
      - op: classify_map
        name: optional label
        args: {map: NAME}
        options: {qmax: 2, degree_box: 3, coefficients: GF2, bounds: 3, seed: 1, degrees: [[1,0]]}
        expect: {derived_log_etale: true}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .abelian import Coefficients
from .glued import GluedLogScheme, standard_scheme
from .monoid import AffineMonoid, MonoidHom
from .prelog import PreLogMap, PreLogRing
from .toric import Fan, Subdivision, star_subdivision

KINDS = ("monoids", "maps", "rings", "prelog_maps", "fans", "subdivisions", "schemes")

OPTION_RANGES = {
    "qmax": (0, 8),
    "degree_box": (0, 12),
    "bounds": (1, 20),
    "seed": (0, 2**32 - 1),
}


class TaskFileError(ValueError):
    """Invalid input: parse error, bad schema or unresolved reference."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


@dataclass
class Task:
    op: str
    name: str
    args: dict
    options: dict
    expect: dict


@dataclass
class TaskFile:
    coefficients: Coefficients
    seed: int
    objects: dict[str, dict[str, Any]]
    raw: dict[str, dict[str, Any]]
    tasks: list[Task] = field(default_factory=list)

    def lookup(self, kind: str, name: str):
        table = self.objects.get(kind, {})
        if name not in table:
            raise TaskFileError(f"unresolved reference {name!r} (expected one of {kind})")
        return table[name]

    def declarations(self) -> dict:
        """Canonical inline re-serialization of every declared object."""
        out: dict[str, dict] = {}
        for kind in KINDS:
            table = self.objects.get(kind, {})
            if table:
                out[kind] = {n: serialize(kind, obj) for n, obj in table.items()}
        return out


def serialize(kind: str, obj) -> Any:
    if kind == "monoids":
        return obj.to_json()
    if kind == "maps":
        return obj.to_json()
    if kind == "rings":
        return obj.to_json()
    if kind == "prelog_maps":
        return obj.to_json()
    if kind == "fans":
        return obj.to_json()
    if kind == "subdivisions":
        return {"refined": obj.refined.to_json(), "coarse": obj.coarse.to_json()}
    if kind == "schemes":
        return obj.to_json()
    raise KeyError(kind)


def parse_text(text: str, suffix: str = ".yaml") -> dict:
    if suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise TaskFileError(f"JSON parse error: {e.msg}", e.lineno, e.colno) from None
    else:
        try:
            data = yaml.safe_load(text)
        except yaml.MarkedYAMLError as e:
            mark = e.problem_mark
            raise TaskFileError(f"YAML parse error: {e.problem}", mark.line + 1 if mark else None, mark.column + 1 if mark else None) from None
        except yaml.YAMLError as e:
            raise TaskFileError(f"YAML parse error: {e}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise TaskFileError("top level must be a mapping")
    return data


def load(path: str | Path) -> TaskFile:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise TaskFileError(f"cannot read {p}: {e.strerror}") from None
    return build(parse_text(text, p.suffix.lower()))


def _int_matrix(x, what):
    if not isinstance(x, list) or not all(isinstance(r, list) and all(isinstance(v, int) for v in r) for r in x):
        raise TaskFileError(f"{what} must be a list of integer lists")
    return x


def _vectors(x, what):
    return [tuple(v) for v in _int_matrix(x, what)]


def _monoid(spec, tf) -> AffineMonoid:
    if isinstance(spec, str):
        return tf.lookup("monoids", spec)
    if not isinstance(spec, dict):
        raise TaskFileError(f"bad monoid declaration {spec!r}")
    if "free" in spec:
        return AffineMonoid.free(int(spec["free"]))
    if "lattice" in spec:
        return AffineMonoid.lattice(int(spec["lattice"]))
    if "ambient_rank" in spec:
        gens = _vectors(spec.get("generators", []), "generators")
        if any(len(g) != spec["ambient_rank"] for g in gens):
            raise TaskFileError("generator length does not match ambient_rank")
        return AffineMonoid(int(spec["ambient_rank"]), gens)
    raise TaskFileError(f"monoid needs free, lattice or ambient_rank: {spec!r}")


def _map(spec, tf) -> MonoidHom:
    if isinstance(spec, str):
        return tf.lookup("maps", spec)
    src, tgt = _monoid(spec["source"], tf), _monoid(spec["target"], tf)
    mat = _int_matrix(spec["matrix"], "matrix")
    return MonoidHom(src, tgt, mat)


def _ring(spec, tf) -> PreLogRing:
    k = tf.coefficients
    if isinstance(spec, str):
        if spec == "point":
            return PreLogRing.point(k)
        return tf.lookup("rings", spec)
    if "ring_monoid" in spec:
        return PreLogRing.from_json(spec, k)
    m = _monoid(spec["monoid"], tf)
    ideal = _vectors(spec.get("ideal", []), "ideal")
    log = spec.get("log", "trivial")
    if log == "canonical":
        if ideal:
            return PreLogRing(k, m, m, MonoidHom.identity(m), ideal)
        return PreLogRing.canonical(m, k)
    if log == "trivial":
        return PreLogRing.trivial(m, k, ideal)
    n = _monoid(log["monoid"], tf)
    return PreLogRing(k, m, n, MonoidHom(n, m, _int_matrix(log["structure"], "structure")), ideal)


def _prelog_map(spec, tf) -> PreLogMap:
    if isinstance(spec, str):
        return tf.lookup("prelog_maps", spec)
    if "canonical" in spec:
        return PreLogMap.canonical(_map(spec["canonical"], tf), tf.coefficients)
    if "over_point" in spec:
        return PreLogMap.over_point(_ring(spec["over_point"], tf))
    if "monoid_map" in spec:
        return PreLogMap.from_json(spec, tf.coefficients)
    raise TaskFileError(f"pre-log map needs canonical, over_point or monoid_map: {spec!r}")


def _fan(spec, tf) -> Fan:
    if isinstance(spec, str) and spec in tf.objects.get("fans", {}):
        return tf.objects["fans"][spec]
    try:
        return Fan.from_json(spec)
    except KeyError as e:
        raise TaskFileError(f"unknown fan {e}") from None


def _subdivision(spec, tf) -> Subdivision:
    if isinstance(spec, str):
        return tf.lookup("subdivisions", spec)
    if "star" in spec:
        return star_subdivision(_fan(spec["star"], tf), tuple(spec["ray"]))
    refined, coarse = _fan(spec["refined"], tf), _fan(spec["coarse"], tf)
    assign = []
    for s in refined.cones:
        host = [i for i, c in enumerate(coarse.cones) if c.contains_cone(s)]
        if not host:
            raise TaskFileError("refined cone not inside the coarse fan")
        assign.append(host[0])
    return Subdivision(refined, coarse, assign)


def _scheme(spec, tf) -> GluedLogScheme:
    if isinstance(spec, str):
        if spec in tf.objects.get("schemes", {}):
            return tf.objects["schemes"][spec]
        spec = {"catalog": spec}
    if "charts" in spec:
        return GluedLogScheme.from_json(spec, tf.coefficients)
    params = {k: v for k, v in spec.items() if k != "catalog"}
    try:
        return standard_scheme(spec["catalog"], params, tf.coefficients)
    except KeyError as e:
        raise TaskFileError(f"unknown scheme {e}") from None


BUILDERS = {
    "monoids": _monoid,
    "maps": _map,
    "rings": _ring,
    "prelog_maps": _prelog_map,
    "fans": _fan,
    "subdivisions": _subdivision,
    "schemes": _scheme,
}


def resolve(kind: str, spec, tf: TaskFile):
    return BUILDERS[kind](spec, tf)


def _check_options(opts: dict, where: str) -> dict:
    if not isinstance(opts, dict):
        raise TaskFileError(f"{where}: options must be a mapping")
    for key, (lo, hi) in OPTION_RANGES.items():
        if key in opts:
            v = opts[key]
            if not isinstance(v, int) or isinstance(v, bool) or not lo <= v <= hi:
                raise TaskFileError(f"{where}: option {key} must be an integer in [{lo}, {hi}]")
    if "coefficients" in opts:
        try:
            Coefficients.parse(opts["coefficients"])
        except ValueError as e:
            raise TaskFileError(f"{where}: {e}") from None
    return opts


def build(data: dict) -> TaskFile:
    unknown = set(data) - {"coefficients", "seed", "declarations", "tasks"}
    if unknown:
        raise TaskFileError(f"unknown top-level keys: {sorted(unknown)}")
    try:
        k = Coefficients.parse(data.get("coefficients", "QQ"))
    except ValueError as e:
        raise TaskFileError(str(e)) from None
    seed = data.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise TaskFileError("seed must be a non-negative integer")
    decls = data.get("declarations") or {}
    if not isinstance(decls, dict):
        raise TaskFileError("declarations must be a mapping")
    bad = set(decls) - set(KINDS)
    if bad:
        raise TaskFileError(f"unknown declaration sections: {sorted(bad)}")
    tf = TaskFile(k, seed, {}, {})
    for kind in KINDS:
        section = decls.get(kind) or {}
        if not isinstance(section, dict):
            raise TaskFileError(f"{kind} must be a mapping of names to declarations")
        tf.objects[kind] = {}
        tf.raw[kind] = dict(section)
        for name, spec in section.items():
            try:
                tf.objects[kind][name] = resolve(kind, spec, tf)
            except TaskFileError:
                raise
            except (KeyError, TypeError) as e:
                raise TaskFileError(f"{kind}.{name}: missing or malformed field {e}") from None
            except ValueError as e:
                raise TaskFileError(f"{kind}.{name}: {e}") from None
    tasks = data.get("tasks") or []
    if not isinstance(tasks, list):
        raise TaskFileError("tasks must be a list")
    for i, t in enumerate(tasks):
        if not isinstance(t, dict) or "op" not in t:
            raise TaskFileError(f"task {i}: needs an op")
        args = t.get("args") or {}
        if not isinstance(args, dict):
            raise TaskFileError(f"task {i}: args must be a mapping")
        opts = _check_options(t.get("options") or {}, f"task {i}")
        expect = t.get("expect") or {}
        if not isinstance(expect, dict):
            raise TaskFileError(f"task {i}: expect must be a mapping")
        tf.tasks.append(Task(str(t["op"]), str(t.get("name", f"{i}:{t['op']}")), args, opts, expect))
    return tf
