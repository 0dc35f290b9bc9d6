"""Glued log schemes from affine charts, and global checks by Čech totalization.

Charts are monomial: their ring monoid is N^a ⊕ Z^b in its own coordinates,
embedded in a common character lattice L = Z^fibre ⊕ Z^base.  At a degree
m ∈ L the graded piece of Ω^q (log or not) on a chart is Λ^q of a sublattice
of Z^fibre (the chart's frame at m), so all restriction maps are inclusions
inside Λ^q(Z^fibre).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .abelian import (
    QQ,
    ChainComplex,
    Coefficients,
    FgAbGroup,
    IntegerSolver,
    LatticeQuotient,
    TRIVIAL,
    columns_to_matrix,
    complex_homology,
    determinant,
    rank_over,
    rational_solve,
    saturation_basis,
    zeros,
)
from ._parallel import pmap
from .bar import cyclic_bar_homology, direct_sum, hochschild_homology, loghh_homology
from .monoid import AffineMonoid, MonoidHom, PreconditionError
from .prelog import PreLogMap, PreLogRing, UnsupportedShapeError, classify_map, kahler_differentials

Vector = tuple[int, ...]


def _unit(d, i):
    return tuple(int(j == i) for j in range(d))


@dataclass
class Chart:
    ring: PreLogRing
    embed: list[list[int]]  # rank(L) x ambient(ring); column i is the character of coordinate i

    @property
    def dim(self) -> int:
        return self.ring.ring_monoid.ambient_rank

    def column(self, i) -> Vector:
        return tuple(row[i] for row in self.embed)

    def to_json(self) -> dict:
        return {"ring": self.ring.to_json(), "embed": self.embed}

    @classmethod
    def from_json(cls, data: dict, coeff=None) -> "Chart":
        return cls(PreLogRing.from_json(data["ring"], coeff), [list(r) for r in data["embed"]])


def monomial_chart(k, units: Sequence[bool], log: Sequence[bool], columns: Sequence[Sequence[int]]) -> Chart:
    """k[N^a ⊕ Z^b] with coordinates listed in order; ``log`` marks
    coordinates carrying the pre-log structure."""
    d = len(units)
    gens = []
    for i, u in enumerate(units):
        gens.append(_unit(d, i))
        if u:
            gens.append(tuple(-x for x in _unit(d, i)))
    m = AffineMonoid(d, gens)
    logs = [i for i in range(d) if log[i]]
    if logs:
        n_gens = []
        for i in logs:
            n_gens.append(_unit(len(logs), logs.index(i)))
            if units[i]:
                n_gens.append(tuple(-x for x in _unit(len(logs), logs.index(i))))
        n = AffineMonoid(len(logs), n_gens)
        rows = [[int(i == logs[j]) for j in range(len(logs))] for i in range(d)]
        ring = PreLogRing(k, m, n, MonoidHom(n, m, rows))
    else:
        ring = PreLogRing.trivial(m, k)
    rank = len(columns[0]) if columns else 0
    embed = [[columns[i][r] for i in range(d)] for r in range(rank)]
    return Chart(ring, embed)


class GluedLogScheme:
    """Charts with overlaps for every subset of the cover (size ≥ 2)."""

    def __init__(
        self,
        name: str,
        charts: list[Chart],
        overlaps: dict[tuple[int, ...], Chart],
        base: Chart,
        fibre_rank: int,
        base_rank: int = 0,
    ):
        self.name = name
        self.charts = charts
        self.overlaps = dict(overlaps)
        self.base = base
        self.fibre_rank = fibre_rank
        self.base_rank = base_rank
        self.validate()

    @property
    def rank(self) -> int:
        return self.fibre_rank + self.base_rank

    @property
    def depth(self) -> int:
        return len(self.charts) - 1

    @property
    def coeff(self) -> Coefficients:
        return self.charts[0].ring.coeff

    def cover(self, s: Sequence[int]) -> Chart:
        s = tuple(sorted(s))
        if len(s) == 1:
            return self.charts[s[0]]
        if s not in self.overlaps:
            raise PreconditionError(f"missing overlap for charts {s}")
        return self.overlaps[s]

    def restriction(self, s: Sequence[int], t: Sequence[int]) -> PreLogMap:
        """The map of pre-log rings from cover(s) to cover(t), s ⊂ t."""
        a, b = self.cover(s), self.cover(t)
        solver = IntegerSolver(b.embed, b.dim) if b.dim else None
        cols = []
        for i in range(a.dim):
            c = solver.solve(list(a.column(i))) if solver else []
            if c is None:
                raise PreconditionError(f"coordinate {i} of {s} has no character on {t}")
            cols.append(c)
        mat = columns_to_matrix(cols, b.dim) if cols else [[] for _ in range(b.dim)]
        ring_map = MonoidHom(a.ring.ring_monoid, b.ring.ring_monoid, mat)
        na, nb = a.ring.prelog_monoid, b.ring.prelog_monoid
        # pre-log map: transport through the structure maps
        sb = b.ring.structure
        log_cols = []
        for g in range(na.ambient_rank):
            e = _unit(na.ambient_rank, g)
            img = ring_map(a.ring.structure(e))
            sol = IntegerSolver(sb.matrix, nb.ambient_rank).solve(list(img)) if nb.ambient_rank else None
            if sol is None:
                # the image lands in units of the target: allowed only if the target is trivial log
                raise UnsupportedShapeError(f"pre-log structure of {s} does not extend to {t}")
            log_cols.append(sol)
        log_mat = columns_to_matrix(log_cols, nb.ambient_rank) if log_cols else [[] for _ in range(nb.ambient_rank)]
        return PreLogMap(a.ring, b.ring, ring_map, MonoidHom(na, nb, log_mat))

    def validate(self) -> None:
        r = len(self.charts)
        for size in range(2, r + 1):
            for t in itertools.combinations(range(r), size):
                for i in t:
                    self.restriction((i,), t)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "fibre_rank": self.fibre_rank,
            "base_rank": self.base_rank,
            "charts": [c.to_json() for c in self.charts],
            "overlaps": [[list(s), c.to_json()] for s, c in sorted(self.overlaps.items())],
            "base": self.base.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict, coeff=None) -> "GluedLogScheme":
        return cls(
            data["name"],
            [Chart.from_json(c, coeff) for c in data["charts"]],
            {tuple(s): Chart.from_json(c, coeff) for s, c in data.get("overlaps", [])},
            Chart.from_json(data["base"], coeff),
            int(data["fibre_rank"]),
            int(data.get("base_rank", 0)),
        )


# --------------------------------------------------------------------------
# catalog


def standard_scheme(name: str, params: dict | None = None, k: Coefficients | str = QQ) -> GluedLogScheme:
    """Catalog: point, A1, A2, An, A1_log, A1_zariski, P1, P2, Pn, boxbar, blowup_A2.

    ``params``: ``n`` for Pn/An, ``base`` in {"point", "A1"} for Pn.
    """
    k = Coefficients.parse(k)
    params = dict(params or {})
    point = monomial_chart(k, [], [], [])
    if name == "point":
        return GluedLogScheme("point", [point], {}, point, 0)
    if name in ("A1", "A2", "An"):
        n = {"A1": 1, "A2": 2}.get(name, params.get("n", 1))
        ch = monomial_chart(k, [False] * n, [False] * n, [_unit(n, i) for i in range(n)])
        return GluedLogScheme(f"A{n}", [ch], {}, point, n)
    if name == "A1_log":
        ch = monomial_chart(k, [False], [True], [(1,)])
        return GluedLogScheme("A1_log", [ch], {}, point, 1)
    if name == "A1_zariski":
        a = monomial_chart(k, [False], [False], [(1,)])
        b = monomial_chart(k, [True], [False], [(1,)])
        return GluedLogScheme("A1_zariski", [a, b], {(0, 1): b}, point, 1)
    if name == "boxbar":
        a = monomial_chart(k, [False], [False], [(1,)])
        b = monomial_chart(k, [False], [True], [(-1,)])
        ab = monomial_chart(k, [True], [True], [(-1,)])
        return GluedLogScheme("boxbar", [a, b], {(0, 1): ab}, point, 1)
    if name == "blowup_A2":
        c1 = [(1, 0), (-1, 1)]  # x, y/x
        c2 = [(1, -1), (0, 1)]  # x/y, y
        a = monomial_chart(k, [False, False], [True, False], c1)
        b = monomial_chart(k, [False, False], [False, True], c2)
        ab = monomial_chart(k, [False, True], [True, True], c1)
        return GluedLogScheme("blowup_A2", [a, b], {(0, 1): ab}, point, 2)
    if name in ("P1", "P2", "Pn"):
        n = {"P1": 1, "P2": 2}.get(name, params.get("n", 1))
        base = params.get("base", "point")
        return projective_space(n, base, k)
    raise KeyError(f"unknown scheme {name!r}")


def projective_space(n: int, base: str = "point", k: Coefficients | str = QQ) -> GluedLogScheme:
    """P^n over a point or over A^1 = Spec k[u] (trivial log)."""
    k = Coefficients.parse(k)
    if n > 2:
        raise UnsupportedShapeError("catalog supports P^n for n ≤ 2")
    b = 1 if base == "A1" else 0
    if base not in ("point", "A1"):
        raise KeyError(f"unknown base {base!r}")
    rank = n + b

    def char(i, j):
        # character of x_j / x_i in Z^n (x_0 ↦ 0, x_j ↦ e_j)
        v = [0] * rank
        if j:
            v[j - 1] += 1
        if i:
            v[i - 1] -= 1
        return tuple(v)

    base_col = [tuple(int(r == n) for r in range(rank))] if b else []
    base_chart = monomial_chart(k, [False] * b, [False] * b, [tuple(int(r == 0) for r in range(b))] if b else [])

    def chart(s):
        i0 = s[0]
        others = [j for j in range(n + 1) if j != i0]
        cols = [char(i0, j) for j in others] + base_col
        units = [j in s for j in others] + [False] * b
        return monomial_chart(k, units, [False] * (n + b), cols)

    charts = [chart((i,)) for i in range(n + 1)]
    overlaps = {s: chart(s) for size in range(2, n + 2) for s in itertools.combinations(range(n + 1), size)}
    x = GluedLogScheme(f"P{n}" + ("_A1" if b else ""), charts, overlaps, base_chart, n, b)
    return x


def product(x: GluedLogScheme, y: GluedLogScheme) -> GluedLogScheme:
    """X ×_k Y over a point."""
    if x.base_rank or y.base_rank:
        raise UnsupportedShapeError("products are formed over a point")
    pairs = [(i, j) for i in range(len(x.charts)) for j in range(len(y.charts))]

    def combine(a: Chart, b: Chart) -> Chart:
        ring = direct_sum(a.ring, b.ring)
        rows = [list(r) + [0] * b.dim for r in a.embed] + [[0] * a.dim + list(r) for r in b.embed]
        return Chart(ring, rows)

    def cover(s):
        xs = sorted({pairs[i][0] for i in s})
        ys = sorted({pairs[i][1] for i in s})
        return combine(x.cover(xs), y.cover(ys))

    charts = [cover((i,)) for i in range(len(pairs))]
    overlaps = {s: cover(s) for size in range(2, len(pairs) + 1) for s in itertools.combinations(range(len(pairs)), size)}
    return GluedLogScheme(f"{x.name}x{y.name}", charts, overlaps, x.base, x.fibre_rank + y.fibre_rank)


# --------------------------------------------------------------------------
# frames and Čech complexes


def _coordinate_kinds(chart: Chart) -> tuple[list[str], set[int]]:
    """Per coordinate: 'unit' or 'plain'; and the set of log coordinates."""
    m = chart.ring.ring_monoid
    d = m.ambient_rank
    gens = set(m.generators)
    kinds = []
    for i in range(d):
        e = _unit(d, i)
        neg = tuple(-x for x in e)
        if e not in gens:
            raise UnsupportedShapeError("chart is not monomial in its coordinates")
        kinds.append("unit" if neg in gens else "plain")
    if len(gens) != d + kinds.count("unit"):
        raise UnsupportedShapeError("chart is not monomial in its coordinates")
    logs = set()
    s = chart.ring.structure
    for g in chart.ring.prelog_monoid.generators:
        img = s(g)
        supp = [i for i, x in enumerate(img) if x]
        if len(supp) == 1 and img[supp[0]] == 1 and kinds[supp[0]] == "plain":
            logs.add(supp[0])
        elif all(kinds[i] == "unit" for i in supp):
            continue
        else:
            raise UnsupportedShapeError("pre-log structure is not generated by coordinates")
    return kinds, logs


def frame(chart: Chart, m: Sequence[int], fibre_rank: int, log: bool = True) -> list[list[int]] | None:
    """Basis of the frame lattice at degree m, or None if χ^m is not on the chart."""
    if chart.ring.ideal:
        raise UnsupportedShapeError("frames need charts without ideal")
    kinds, logs = _coordinate_kinds(chart)
    d = chart.dim
    if d:
        sol = rational_solve(chart.embed, list(m)) if chart.embed else None
        if sol is None or any(Fraction(x).denominator != 1 for x in sol):
            return None
        v = [int(x) for x in sol]
        # the embedding must be injective for the degree to be well defined
        if rank_over(chart.embed, QQ) != d:
            raise UnsupportedShapeError("chart embedding is not injective")
    else:
        if any(m):
            return None
        v = []
    for i in range(d):
        if kinds[i] == "plain" and v[i] < 0:
            return None
    vecs = []
    for i in range(d):
        w = list(chart.column(i))[:fibre_rank]
        if not any(w):
            continue
        if kinds[i] == "unit" or (log and i in logs) or v[i] >= 1:
            vecs.append(w)
    return saturation_basis(vecs, fibre_rank) if vecs else []


def _wedge_basis(basis: list[list[int]], q: int, d: int) -> list[list[int]]:
    """Λ^q of a lattice basis, in the coordinates e_I of Λ^q Z^d."""
    subsets = list(itertools.combinations(range(d), q))
    out = []
    for cols in itertools.combinations(range(len(basis)), q):
        vec = []
        for rows in subsets:
            mat = [[basis[c][r] for c in cols] for r in rows]
            vec.append(determinant(mat) if q else 1)
        out.append(vec)
    return out


def omega_cech_complex(x: GluedLogScheme, q: int, m: Sequence[int], log: bool = True, order: Sequence[int] | None = None) -> ChainComplex:
    """Čech complex of Ω^q at degree m, homologically indexed (C_j = C^{r-1-j})."""
    r = len(x.charts)
    perm = list(order) if order is not None else list(range(r))
    d = x.fibre_rank
    spaces: list[list[tuple[tuple[int, ...], list[list[int]]]]] = []
    for p in range(r):
        level = []
        for s in itertools.combinations(range(r), p + 1):
            real = tuple(sorted(perm[i] for i in s))
            fr = frame(x.cover(real), m, d, log)
            basis = _wedge_basis(fr, q, d) if fr is not None and len(fr) >= q else []
            level.append((s, basis))
        spaces.append(level)
    offsets = []
    for level in spaces:
        off, acc = {}, 0
        for s, basis in level:
            off[s] = acc
            acc += len(basis)
        offsets.append((off, acc))
    cob = []
    for p in range(r - 1):
        rows_n, cols_n = offsets[p + 1][1], offsets[p][1]
        mat = zeros(rows_n, cols_n)
        for t, tb in spaces[p + 1]:
            if not tb:
                continue
            tmat = columns_to_matrix(tb, len(tb[0]))
            for j in range(len(t)):
                s = t[:j] + t[j + 1:]
                sb = dict(spaces[p])[s]
                for c, vec in enumerate(sb):
                    coords = rational_solve(tmat, vec)
                    if coords is None or any(Fraction(z).denominator != 1 for z in coords):
                        raise UnsupportedShapeError("restriction is not integral in the frame bases")
                    for rr, z in enumerate(coords):
                        mat[offsets[p + 1][0][t] + rr][offsets[p][0][s] + c] += (-1 if j % 2 else 1) * int(z)
        cob.append(mat)
    dims = tuple(offsets[r - 1 - j][1] for j in range(r))
    boundaries = tuple(cob[r - 2 - i] for i in range(r - 1))
    return ChainComplex(dims, boundaries)


def omega_cohomology(x: GluedLogScheme, q: int, m: Sequence[int], k: Coefficients | None = None, log: bool = True, order=None) -> list[FgAbGroup]:
    """[H^0, ..., H^{r-1}] of Ω^q at degree m."""
    k = k or x.coeff
    r = len(x.charts)
    cx = omega_cech_complex(x, q, m, log, order)
    return [complex_homology(cx, r - 1 - p, k, check=False) for p in range(r)]


# --------------------------------------------------------------------------
# totalization


@dataclass
class TotalizedTable:
    pi: dict[int, dict[Vector, FgAbGroup]]
    provenance: dict

    def get(self, n: int, m: Sequence[int]) -> FgAbGroup:
        return self.pi.get(n, {}).get(tuple(m), TRIVIAL)

    def totals(self) -> dict[int, FgAbGroup]:
        out = {}
        for n, row in self.pi.items():
            g = TRIVIAL
            for v in row.values():
                g = g + v
            out[n] = g
        return out

    def to_json(self) -> dict:
        return {
            "pi": {str(n): {str(list(m)): g.to_json() for m, g in sorted(row.items()) if not g.is_zero} for n, row in sorted(self.pi.items())},
            "totals": {str(n): g.to_json() for n, g in sorted(self.totals().items())},
            "provenance": self.provenance,
        }


THEORIES = ("HH", "logHH", "Omega")


def cech_totalize(
    x: GluedLogScheme,
    theory: str,
    qmax: int,
    degrees: Iterable[Sequence[int]],
    q: int | None = None,
    order: Sequence[int] | None = None,
) -> TotalizedTable:
    """π_* of the Čech totalization.

    For HH and logHH the charts are smooth monomial charts, so each chart
    theory is formal (HKR) and π_n = ⊕_{q-p=n} H^p(Ω^q) degree by degree.
    ``theory = "Omega"`` returns H^p(Ω^q) in slot p.
    """
    if theory not in THEORIES:
        raise KeyError(f"unknown theory {theory!r}")
    degrees = [tuple(m) for m in degrees]
    log = theory != "HH"
    r = len(x.charts)
    d = x.fibre_rank
    trusted = qmax + 1 - x.depth
    if theory == "Omega" and q is None:
        raise ValueError("theory Omega needs q")

    def at(m):
        if theory == "Omega":
            hs = omega_cohomology(x, q, m, log=True, order=order)
            return [hs[p] if p < r else TRIVIAL for p in range(qmax + 1)]
        hs = {qq: omega_cohomology(x, qq, m, log=log, order=order) for qq in range(d + 1)}
        row = []
        for n in range(qmax + 1):
            g = TRIVIAL
            for qq in range(d + 1):
                p = qq - n
                if 0 <= p < r:
                    g = g + hs[qq][p]
            row.append(g)
        return row

    pi: dict[int, dict] = {n: {} for n in range(qmax + 1)}
    for m, row in zip(degrees, pmap(at, degrees)):
        for n, g in enumerate(row):
            pi[n][m] = g
    flagged = [n for n in range(qmax + 1) if n > trusted]
    prov = {
        "scheme": x.name,
        "theory": theory if q is None else f"{theory}^{q}",
        "qmax": qmax,
        "cover_depth": x.depth,
        "degrees": len(degrees),
        "flagged_degrees": flagged,
        "model": "HKR-formal charts, Čech double complex of Ω^q",
    }
    return TotalizedTable(pi, prov)


def degree_box(rank: int, radius: int) -> list[Vector]:
    return [tuple(v) for v in itertools.product(range(-radius, radius + 1), repeat=rank)]


@dataclass
class GlobalReport:
    passed: bool
    details: dict
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"verdict": "pass" if self.passed else "fail", "details": self.details, "notes": self.notes}


# --------------------------------------------------------------------------
# projective bundle, box invariance


def projective_bundle_check(n: int, base: str = "point", qmax: int = 2, radius: int = 2, k: Coefficients | str = QQ) -> GlobalReport:
    """π_* logHH(P^n_S/S) against (n+1) copies of π_* logHH(S/S)."""
    k = Coefficients.parse(k)
    if n == 0:
        return GlobalReport(True, {"n": 0, "note": "P^0_S = S"})
    x = projective_space(n, base, k)
    degrees = degree_box(x.rank, radius)
    degrees = [m for m in degrees if all(c >= 0 for c in m[x.fibre_rank:])]
    t = cech_totalize(x, "logHH", qmax, degrees)
    flagged = set(t.provenance["flagged_degrees"])
    bad = []
    for m in degrees:
        fib, bas = m[: x.fibre_rank], m[x.fibre_rank:]
        for j in range(qmax + 1):
            if j in flagged:
                continue
            expect = FgAbGroup(n + 1) if (j == 0 and not any(fib)) else TRIVIAL
            if t.get(j, m) != expect:
                bad.append({"degree": list(m), "n": j, "got": str(t.get(j, m)), "expected": str(expect)})
    return GlobalReport(
        not bad,
        {"n": n, "base": base, "radius": radius, "mismatches": bad, "totals": {str(a): str(g) for a, g in t.totals().items()}, "provenance": t.provenance},
    )


def box_invariance_check(x: GluedLogScheme, qmax: int = 2, radius: int = 2) -> GlobalReport:
    """π_* logHH(X × □) = π_* logHH(X) within the window."""
    box = standard_scheme("boxbar", k=x.coeff)
    xb = product(x, box)
    degrees = degree_box(xb.rank, radius)
    t_xb = cech_totalize(xb, "logHH", qmax, degrees)
    xdeg = sorted({m[: x.rank] for m in degrees})
    t_x = cech_totalize(x, "logHH", qmax, xdeg)
    flagged = set(t_xb.provenance["flagged_degrees"]) | set(t_x.provenance["flagged_degrees"])
    bad = []
    for m in degrees:
        mx, w = m[: x.rank], m[x.rank:]
        for j in range(qmax + 1):
            if j in flagged:
                continue
            expect = t_x.get(j, mx) if not any(w) else TRIVIAL
            if t_xb.get(j, m) != expect:
                bad.append({"degree": list(m), "n": j, "got": str(t_xb.get(j, m)), "expected": str(expect)})
    return GlobalReport(not bad, {"scheme": x.name, "radius": radius, "mismatches": bad, "flagged": sorted(flagged)})


# --------------------------------------------------------------------------
# residue sequences


def _omega_map_rank(src_gens, tgt_gens, tgt_cols, images, k) -> int:
    """Rank of the induced map coker(src) → coker(tgt), given generator images."""
    nt = len(tgt_gens)
    rel = [list(c) for c in tgt_cols]
    base = rank_over(columns_to_matrix(rel, nt), k) if rel and nt else 0
    imgs = [images[g] for g in src_gens]
    both = rel + imgs
    full = rank_over(columns_to_matrix(both, nt), k) if both and nt else 0
    # images of source relations vanish in the target (checked by the caller)
    return full - base


def _affine_residue(n_exp: int, nmax: int, k: Coefficients, radius: int) -> GlobalReport:
    """A = k[t] with pre-log structure generated by t^n."""
    n1 = AffineMonoid.free(1)
    a_plain = PreLogRing.trivial(n1, k)
    a_log = PreLogRing(k, n1, n1, MonoidHom(n1, n1, [[n_exp]]))
    f_plain, f_log = PreLogMap.over_point(a_plain), PreLogMap.over_point(a_log)
    om_p, om_l = kahler_differentials(f_plain), kahler_differentials(f_log)
    if nmax > 1 and n_exp != 1:
        raise UnsupportedShapeError("Kummer residue variants are supported through n = 1")
    weights = [(w,) for w in range(0, radius + 1)]
    hh_a = hochschild_homology(f_plain, nmax, weights)
    hh_z = cyclic_bar_homology(MonoidHom.from_trivial(n1), nmax, weights, k, ideal=[(n_exp,)])
    log_tab = loghh_homology(f_log, nmax, weights) if n_exp == 1 else None
    rows = []
    ok = True
    explicit_ok = True
    for (w,) in weights:
        m = (w,)
        dims = {
            "HH(A)": [hh_a.get(j, m).free_rank for j in range(nmax + 1)],
            "HH(A/a)": [hh_z.get(j, m).free_rank for j in range(nmax + 1)],
        }
        if log_tab is not None:
            dims["logHH"] = [log_tab.get(j, m).free_rank for j in range(nmax + 1)]
        else:
            dims["logHH"] = [1, om_l.at(m, k).free_rank]
        # explicit maps in degree 1: d-generators go to themselves; the
        # residue sends c·dlog to the class of t^c in A/(t^n)
        gp, cp = om_p.presentation(m)
        gl, cl = om_l.presentation(m)
        index = {g: i for i, g in enumerate(gl)}
        images = {}
        for g in gp:
            v = [0] * len(gl)
            if g in index:
                v[index[g]] = 1
            images[g] = v
        r_incl = _omega_map_rank(gp, gl, cl, images, k) if gp else 0
        res_row = [1 if (g[0] == "dlog" and w < n_exp) else 0 for g in gl]
        # residue must kill the relations of the log module
        res_ok = all(sum(a * b for a, b in zip(res_row, col)) == 0 for col in cl)
        comp_ok = all(sum(a * b for a, b in zip(res_row, images[g])) == 0 for g in gp)
        r_res = _residue_rank(res_row, gl, cl, k)
        d1l, d1a, d0z, d0a, d0l = dims["logHH"][1], dims["HH(A)"][1], dims["HH(A/a)"][0], dims["HH(A)"][0], dims["logHH"][0]
        r0 = min(d0a, d0l)  # π_0: A → A is the identity on monomials
        exact = (
            r_incl == d1a  # injective on π_1
            and r_res == d1l - r_incl  # exact at logHH_1
            and d0z - r_res == d0a - r0  # exact at HH_0(A/a) and HH_0(A)
            and r0 == d0l  # surjective onto logHH_0
        )
        if w == 1 and n_exp == 1:
            # dt ↦ t·dlog t: the difference lies in the relation span
            if ("d", (1,)) in index and ("dlog", 0) in index:
                v = [0] * len(gl)
                v[index[("d", (1,))]] = 1
                v[index[("dlog", 0)]] = -1
                base = rank_over(columns_to_matrix(cl, len(gl)), k)
                explicit_ok = rank_over(columns_to_matrix(cl + [v], len(gl)), k) == base
        rows.append({"weight": w, "dims": dims, "rank_incl": r_incl, "rank_res": r_res, "residue_well_defined": res_ok, "composite_zero": comp_ok, "exact": exact})
        ok &= exact and res_ok and comp_ok
    return GlobalReport(ok and explicit_ok, {"config": f"affine t^{n_exp}", "rows": rows, "dt_to_t_dlog_t": explicit_ok})


def _residue_rank(res_row, gens, rel_cols, k) -> int:
    if not gens or not any(res_row):
        return 0
    # the residue is a functional on the presented module; its rank is 1 iff
    # some generator pairs to a nonzero value
    return 1 if rank_over([res_row], k) else 0


def _pullback_rank(x: GluedLogScheme, y: GluedLogScheme, q: int, m, k) -> int:
    """Rank of the restriction of global q-forms of the single-chart X to C^0 of Y."""
    d = x.fibre_rank
    fx = frame(x.charts[0], m, d, log=False)
    if fx is None or len(fx) < q:
        return 0
    src = _wedge_basis(fx, q, d)
    blocks = []
    for ch in y.charts:
        fy = frame(ch, m, d, log=True)
        if fy is None or len(fy) < q:
            continue
        tb = _wedge_basis(fy, q, d)
        tmat = columns_to_matrix(tb, len(tb[0]))
        for v in src:
            if rational_solve(tmat, v) is None:
                raise UnsupportedShapeError("a form does not restrict to a chart")
        blocks.append(tb)
    if not blocks:
        return 0
    # restriction to each chart is an inclusion, so the rank is that of the source
    return len(src)


def _bookkeeping(dim_x, dim_l, dim_z, ranks, nmax) -> tuple[bool, list]:
    """Exactness of … → HH_n(X) → logHH_n → HH_{n-1}(Z) → HH_{n-1}(X) → …
    given the ranks of the first map."""
    forced = []
    ok = True
    for n in range(nmax + 1):
        res = dim_l[n] - ranks[n]
        zero_in = dim_z[n - 1] if n >= 1 else 0
        ker_prev = (dim_x[n - 1] - ranks[n - 1]) if n >= 1 else 0
        gysin = zero_in - res
        good = res >= 0 and 0 <= gysin <= zero_in and (n == 0 or gysin == ker_prev) and (n > 0 or res == 0)
        forced.append({"n": n, "rank_residue": res, "rank_gysin": gysin, "consistent": good})
        ok &= good
    return ok, forced


def _frame_residue(config: str, nmax: int, k: Coefficients, radius: int) -> GlobalReport:
    if config == "blowup":
        x, y = standard_scheme("A2", k=k), standard_scheme("blowup_A2", k=k)
    else:
        x, y = standard_scheme("A1", k=k), standard_scheme("A1_log", k=k)
    degrees = degree_box(x.rank, radius)
    top = nmax + 1
    hh_x = cech_totalize(x, "HH", top, degrees)
    log_y = cech_totalize(y, "logHH", top, degrees)
    rows = []
    ok = True
    for m in degrees:
        dim_x = [hh_x.get(n, m).free_rank for n in range(top + 1)]
        dim_l = [log_y.get(n, m).free_rank for n in range(top + 1)]
        dim_z = [1 if (n == 0 and not any(m)) else 0 for n in range(top + 1)]
        ranks = [_pullback_rank(x, y, n, m, k) for n in range(top + 1)]
        good, forced = _bookkeeping(dim_x, dim_l, dim_z, ranks, nmax)
        if any(dim_x) or any(dim_l):
            rows.append({"degree": list(m), "HH(X)": dim_x, "logHH": dim_l, "HH(Z)": dim_z, "pullback": ranks, "forced": forced, "consistent": good})
        ok &= good
    pi0_equal = all(hh_x.get(0, m) == log_y.get(0, m) for m in degrees)
    return GlobalReport(ok and pi0_equal, {"config": config, "radius": radius, "pi0_equal": pi0_equal, "rows": rows})


def residue_check(config: str, nmax: int = 1, k: Coefficients | str = QQ, radius: int = 3, exponent: int = 1) -> GlobalReport:
    """Catalog: "affine" (k[t], ⟨t^n⟩), "blowup" (A^2, origin), "line" (A^1, origin)."""
    k = Coefficients.parse(k)
    if config == "affine":
        if not k.is_unit(exponent) and exponent != 1:
            raise UnsupportedShapeError("Kummer exponent must be invertible")
        return _affine_residue(exponent, nmax, k, radius)
    if config in ("blowup", "line"):
        return _frame_residue(config, nmax, k, radius)
    raise KeyError(f"unknown residue configuration {config!r}")


# --------------------------------------------------------------------------
# descent


def _kummer_level(theta: MonoidHom, j: int):
    q = theta.target
    d = q.ambient_rank
    dim = d * (j + 1)
    lgens = []
    for slot in range(j + 1):
        for b in q.group_basis:
            v = [0] * dim
            v[slot * d:(slot + 1) * d] = b
            lgens.append(v)
    kgens = []
    for g in theta.source.generators:
        img = theta(g)
        for slot in range(1, j + 1):
            v = [0] * dim
            v[:d] = img
            v[slot * d:(slot + 1) * d] = [-x for x in img]
            kgens.append(v)
    return LatticeQuotient(lgens, kgens, dim)


def _kummer_cech(theta: MonoidHom, w: Vector, levels: int, k: Coefficients) -> list[FgAbGroup]:
    """Cohomology of the fs Čech nerve of k[P] → k[Q] at weight w (π_0 part)."""
    q = theta.target
    d = q.ambient_rank
    quots = [_kummer_level(theta, j) for j in range(levels + 1)]
    cells = []
    for j, lq in enumerate(quots):
        if not q.contains(w):
            cells.append([])
            continue
        base = list(w) + [0] * (d * j)
        b = lq.project(base)
        tors = lq.group.torsion
        out = []
        for t in itertools.product(*(range(o) for o in tors)):
            c = list(b)
            for i, pos in enumerate(lq.torsion_pos):
                c[pos] = (c[pos] + t[i]) % tors[i]
            out.append(tuple(c))
        cells.append(sorted(set(out)))
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]
    cob = []
    for j in range(levels):
        mat = zeros(len(cells[j + 1]), len(cells[j]))
        for col, c in enumerate(cells[j]):
            amb = quots[j].lift(c)
            slots = [amb[s * d:(s + 1) * d] for s in range(j + 1)]
            for i in range(j + 2):
                ns = slots[:i] + [[0] * d] + slots[i:]
                img = quots[j + 1].project([x for s in ns for x in s])
                mat[index[j + 1][img]][col] += -1 if i % 2 else 1
        cob.append(mat)
    top = levels
    dims = tuple(len(cells[top - i]) for i in range(top + 1))
    cx = ChainComplex(dims, tuple(cob[top - 1 - i] for i in range(top)))
    return [complex_homology(cx, top - p, k) for p in range(top)]


def descent_check(cover, qmax: int = 1, degrees: Iterable[Sequence[int]] | None = None, k: Coefficients | str = QQ, radius: int = 4) -> GlobalReport:
    """Čech descent for an integral log étale cover (a canonical Kummer map
    P → Q) or a strict Zariski cover given as a glued scheme."""
    k = Coefficients.parse(k)
    if isinstance(cover, GluedLogScheme):
        whole = standard_scheme("A" + str(cover.fibre_rank) if cover.fibre_rank <= 2 else "An", {"n": cover.fibre_rank}, k)
        degrees = list(degrees) if degrees is not None else degree_box(cover.rank, radius)
        t = cech_totalize(cover, "HH", qmax, degrees)
        s = cech_totalize(whole, "HH", qmax, degrees)
        bad = [list(m) for m in degrees for n in range(qmax + 1) if n not in t.provenance["flagged_degrees"] and t.get(n, m) != s.get(n, m)]
        return GlobalReport(not bad, {"cover": cover.name, "mismatches": bad})
    theta: MonoidHom = cover
    cls = classify_map(PreLogMap.canonical(theta, k))
    if not (cls.integral.is_yes and cls.log_etale):
        raise PreconditionError(f"cover is not integral and log étale over {k} (integral {cls.integral}, log étale {cls.log_etale})")
    q = theta.target
    if not q.is_saturated():
        raise UnsupportedShapeError("descent check needs a saturated cover monoid")
    r = q.group_rank
    degrees = list(degrees) if degrees is not None else [m for m in degree_box(q.ambient_rank, radius) if q.contains(m)]
    rows = []
    ok = True
    src_img = AffineMonoid(q.ambient_rank, [theta(g) for g in theta.source.generators])
    for w in degrees:
        w = tuple(w)
        hs = _kummer_cech(theta, w, 2, k)
        in_base = src_img.contains(w, bound=10**6) and theta.cokernel_quotient.project(w) == theta.cokernel_quotient.zero()
        for n in range(qmax + 1):
            mult = comb(r, n)
            h0 = hs[0].free_rank * mult
            h1 = hs[1].free_rank * mult
            expect = mult if in_base else 0
            good = h0 == expect and h1 == 0
            rows.append({"weight": list(w), "n": n, "H0": h0, "H1": h1, "base": expect, "ok": good})
            ok &= good
    return GlobalReport(ok, {"cover": theta.to_json(), "classification": cls.to_json(), "rows": rows})
