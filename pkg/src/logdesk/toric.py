"""Fans, star subdivisions and graded Čech cohomology on toric varieties."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .abelian import QQ, ChainComplex, Coefficients, FgAbGroup, TRIVIAL, complex_homology, primitive, zeros
from ._parallel import pmap
from .monoid import AffineMonoid
from .polyhedra import Cone, ScaleError, UnsupportedError, dot, dual_monoid_generators

MAX_FAN_RANK = 3


class FanError(ValueError):
    pass


def dual_monoid(c: Cone, max_rank: int = 4) -> AffineMonoid:
    """σ^∨ ∩ Z^d as an affine monoid."""
    if c.dim > max_rank:
        raise ScaleError(f"ambient rank {c.dim} exceeds {max_rank}")
    return AffineMonoid(c.dim, dual_monoid_generators(c.gens, c.dim))


class Fan:
    """A fan given by its maximal cones."""

    def __init__(self, dim: int, cones: Iterable[Sequence[Sequence[int]] | Cone], max_rank: int = MAX_FAN_RANK, check: bool = True):
        if dim > max_rank:
            raise ScaleError(f"fan rank {dim} exceeds {max_rank}")
        self.dim = dim
        cs = [c if isinstance(c, Cone) else Cone(c, dim) for c in cones]
        # drop cones that are faces of others
        out: list[Cone] = []
        for c in cs:
            if any(c is not d and d.contains_cone(c) and not c.contains_cone(d) for d in cs):
                continue
            if any(c == d for d in out):
                continue
            out.append(c)
        self.cones = out
        if check:
            self.validate()

    def validate(self) -> None:
        for a, b in itertools.combinations(self.cones, 2):
            i = a.intersect(b)
            if not (_is_face(i, a) and _is_face(i, b)):
                raise FanError(f"{a.gens} ∩ {b.gens} is not a common face")

    @property
    def rays(self) -> list[tuple[int, ...]]:
        return sorted({tuple(g) for c in self.cones for g in c.gens})

    def to_json(self) -> dict:
        return {"dim": self.dim, "cones": [sorted(c.gens) for c in self.cones]}

    @classmethod
    def from_json(cls, data) -> "Fan":
        if isinstance(data, str):
            return standard_fan(data)
        return cls(data["dim"], data["cones"])

    def __repr__(self):
        return f"Fan(dim={self.dim}, cones={[c.gens for c in self.cones]})"


def _is_face(f: Cone, c: Cone) -> bool:
    return any(f == g for g in c.faces())


def standard_fan(name: str) -> Fan:
    e1, e2 = (1, 0), (0, 1)
    table = {
        "affine_line": Fan(1, [[(1,)]]),
        "affine_plane": Fan(2, [[e1, e2]]),
        "blowup_affine_plane": Fan(2, [[e1, (1, 1)], [(1, 1), e2]]),
        "P1": Fan(1, [[(1,)], [(-1,)]]),
        "P2": Fan(2, [[e1, e2], [e2, (-1, -1)], [(-1, -1), e1]]),
        "blowup_P2": Fan(2, [[e1, (1, 1)], [(1, 1), e2], [e2, (-1, -1)], [(-1, -1), e1]]),
    }
    if name not in table:
        raise KeyError(f"unknown fan {name!r}; known: {sorted(table)}")
    return table[name]


# --------------------------------------------------------------------------
# subdivisions


@dataclass
class Subdivision:
    refined: Fan
    coarse: Fan
    assignment: list[int]

    def to_json(self) -> dict:
        return {"refined": self.refined.to_json(), "coarse": self.coarse.to_json(), "assignment": self.assignment}


def _in_support(f: Fan, v) -> bool:
    return any(c.contains(v) for c in f.cones)


def star_subdivision(f: Fan, ray: Sequence[int]) -> Subdivision:
    ray = primitive(list(ray))
    if not _in_support(f, ray):
        raise FanError(f"ray {ray} is outside the support")
    if tuple(ray) in f.rays:
        return Subdivision(f, f, list(range(len(f.cones))))
    new: list[Cone] = []
    assign: list[int] = []
    for idx, c in enumerate(f.cones):
        if not c.contains(ray):
            new.append(c)
            assign.append(idx)
            continue
        for normal in c.facet_normals:
            facet = [g for g in c.gens if dot(normal, g) == 0]
            if dot(normal, ray) == 0:
                continue
            new.append(Cone(facet + [ray], f.dim))
            assign.append(idx)
    refined = Fan(f.dim, new)
    # Fan() may reorder or drop; recompute the assignment
    assign = [next(i for i, c in enumerate(f.cones) if c.contains_cone(s)) for s in refined.cones]
    return Subdivision(refined, f, assign)


@dataclass
class SubdivisionCertificate:
    value: bool
    witness: str

    def __bool__(self):
        return self.value

    def to_json(self) -> dict:
        return {"value": self.value, "witness": self.witness}


def is_subdivision(refined: Fan, coarse: Fan) -> SubdivisionCertificate:
    """Every refined cone lies in a coarse cone, and every coarse cone is
    tiled: each wall of a refined piece inside it is either on its boundary
    or shared by two pieces."""
    if refined.dim != coarse.dim:
        return SubdivisionCertificate(False, "ambient ranks differ")
    for s in refined.cones:
        if not any(c.contains_cone(s) for c in coarse.cones):
            return SubdivisionCertificate(False, f"cone {s.gens} is not inside any coarse cone")
    for c in coarse.cones:
        pieces = [s for s in refined.cones if c.contains_cone(s) and s.span_dim == c.span_dim]
        if not pieces:
            return SubdivisionCertificate(False, f"cone {c.gens} contains no refined cone of full dimension")
        boundary_normals = c.facet_normals
        for s in pieces:
            for normal in s.facet_normals:
                wall = [g for g in s.gens if dot(normal, g) == 0]
                if any(all(dot(b, g) == 0 for g in wall) for b in boundary_normals):
                    continue
                wall_cone = Cone(wall, c.dim)
                if not any(t is not s and _is_face(wall_cone, t) for t in pieces):
                    return SubdivisionCertificate(False, f"wall {wall} of {s.gens} inside {c.gens} is not shared")
    # lower-dimensional refined cones must lie in the coarse support too (checked above)
    return SubdivisionCertificate(True, "containment and wall-sharing verified")


# --------------------------------------------------------------------------
# Čech cohomology


@dataclass
class ToricDivisor:
    """Σ a_ρ D_ρ, indexed by the primitive ray vectors of a fan."""

    coefficients: dict[tuple[int, ...], int] = field(default_factory=dict)

    def __call__(self, ray) -> int:
        return self.coefficients.get(tuple(ray), 0)

    def to_json(self) -> dict:
        return {"coefficients": [[list(r), a] for r, a in sorted(self.coefficients.items())]}

    @classmethod
    def from_json(cls, data) -> "ToricDivisor":
        return cls({tuple(r): a for r, a in data.get("coefficients", [])})


def _section_exists(cone: Cone, m, d: ToricDivisor) -> bool:
    """χ^m is a section of O(D) over U_σ."""
    return all(dot(m, g) + d(g) >= 0 for g in cone.gens)


def cech_complex(f: Fan, m: Sequence[int], d: ToricDivisor | None = None, order: Sequence[int] | None = None) -> ChainComplex:
    """Čech complex of O(D) at degree m for the maximal-cone cover, written
    homologically: C_j = C^{r-1-j} with r the number of cones."""
    d = d or ToricDivisor()
    cones = [f.cones[i] for i in (order if order is not None else range(len(f.cones)))]
    r = len(cones)
    simplices = []
    for p in range(r):
        level = []
        for s in itertools.combinations(range(r), p + 1):
            inter = cones[s[0]]
            for i in s[1:]:
                inter = inter.intersect(cones[i])
            if _section_exists(inter, m, d):
                level.append(s)
        simplices.append(level)
    index = [{s: i for i, s in enumerate(lv)} for lv in simplices]
    # coboundary δ^p: C^p → C^{p+1}
    cob = []
    for p in range(r - 1):
        mat = zeros(len(simplices[p + 1]), len(simplices[p]))
        for row, t in enumerate(simplices[p + 1]):
            for j in range(len(t)):
                face = t[:j] + t[j + 1:]
                col = index[p].get(face)
                if col is not None:
                    mat[row][col] += -1 if j % 2 else 1
        cob.append(mat)
    dims = tuple(len(simplices[r - 1 - j]) for j in range(r))
    boundaries = tuple(cob[r - 2 - i] if r - 2 - i >= 0 else [] for i in range(r - 1))
    return ChainComplex(dims, boundaries)


def cohomology(
    f: Fan,
    k: Coefficients = QQ,
    d: ToricDivisor | None = None,
    q_log: int = 0,
    degrees: Iterable[Sequence[int]] = (),
    imax: int = 2,
    order: Sequence[int] | None = None,
) -> dict[int, dict[tuple[int, ...], FgAbGroup]]:
    """H^i(X_Σ, O(D) ⊗ Ω^{q}_log) graded pieces; the log variant tensors with
    Λ^q of the character lattice."""
    k = Coefficients.parse(k)
    r = len(f.cones)
    mult = comb(f.dim, q_log)
    degrees = [tuple(m) for m in degrees]

    def at(m):
        cx = cech_complex(f, m, d, order)
        row = []
        for i in range(imax + 1):
            j = r - 1 - i
            h = complex_homology(cx, j, k, check=False) if 0 <= j < r else TRIVIAL
            row.append(FgAbGroup.from_orders(h.free_rank * mult, [t for t in h.torsion for _ in range(mult)]))
        return row

    out: dict[int, dict] = {i: {} for i in range(imax + 1)}
    for m, row in zip(degrees, pmap(at, degrees)):
        for i, g in enumerate(row):
            out[i][m] = g
    return out


def degree_box(dim: int, radius: int) -> list[tuple[int, ...]]:
    return [tuple(v) for v in itertools.product(range(-radius, radius + 1), repeat=dim)]


@dataclass
class CheckReport:
    passed: bool
    details: dict
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "details": self.details, "notes": self.notes}


def invariance_check(s: Subdivision, k: Coefficients = QQ, degrees: Iterable[Sequence[int]] | None = None, imax: int = 2, radius: int = 3) -> CheckReport:
    """H^i(O) agrees between the coarse and refined fans on the degree box."""
    degrees = list(degrees) if degrees is not None else degree_box(s.coarse.dim, radius)
    cert = is_subdivision(s.refined, s.coarse)
    a = cohomology(s.coarse, k, degrees=degrees, imax=imax)
    b = cohomology(s.refined, k, degrees=degrees, imax=imax)
    mismatches = []
    euler_ok = True
    for m in degrees:
        m = tuple(m)
        for i in range(imax + 1):
            if a[i][m] != b[i][m]:
                mismatches.append({"degree": list(m), "i": i, "coarse": str(a[i][m]), "refined": str(b[i][m])})
        ea = sum((-1) ** i * a[i][m].free_rank for i in range(imax + 1))
        eb = sum((-1) ** i * b[i][m].free_rank for i in range(imax + 1))
        euler_ok &= ea == eb
    nonzero = sorted((i, list(m), str(g)) for i in a for m, g in a[i].items() if not g.is_zero)
    return CheckReport(
        bool(cert) and not mismatches and euler_ok,
        {
            "subdivision": cert.to_json(),
            "degrees_checked": len(degrees),
            "mismatches": mismatches,
            "euler_agrees": euler_ok,
            "nonzero": nonzero,
        },
    )


# --------------------------------------------------------------------------
# the □ computation


def pone_bar_check(k: Coefficients = QQ, radius: int = 6) -> CheckReport:
    """Two-chart Čech complex for Ω^d of (P^1, ∞) over a point, d = 0, 1, 2.

    Sections are recorded as Laurent coefficients in the overlap basis t^w
    (d = 0) or t^{w-1} dt (d = 1):  k[t], k[1/t] and k[t, 1/t] for d = 0;
    k[t] dt, k[1/t] dt/t and k[t, 1/t] dt for d = 1.
    """
    k = Coefficients.parse(k)

    # chart ∋ weight w?  and the coefficient of its basis element in the overlap basis
    def chart0(d, w):
        if d == 0:
            return 1 if w >= 0 else None
        return 1 if w - 1 >= 0 else None  # t^{w-1} dt

    def chart_inf(d, w):
        if d == 0:
            return 1 if w <= 0 else None  # s^{-w}
        # s^j dlog s = -t^{-j} dt/t = -t^{-j-1} dt, weight -j
        return -1 if w <= 0 else None

    results = {}
    for d in (0, 1, 2):
        h0 = h1 = 0
        for w in range(-radius, radius + 1):
            if d == 2:
                continue
            cols = [c for c in (chart0(d, w), chart_inf(d, w)) if c is not None]
            # δ(a, b) = b|_{01} - a|_{01}
            signs = []
            if chart0(d, w) is not None:
                signs.append(-chart0(d, w))
            if chart_inf(d, w) is not None:
                signs.append(chart_inf(d, w))
            cx = ChainComplex((1, len(cols)), ([signs],) if cols else ())
            h1 += complex_homology(cx, 0, k).free_rank
            h0 += complex_homology(cx, 1, k).free_rank
        results[d] = {"H0": h0, "H1": h1}
    ok = results[0] == {"H0": 1, "H1": 0} and results[1] == {"H0": 0, "H1": 0} and results[2] == {"H0": 0, "H1": 0}
    return CheckReport(ok, {"radius": radius, "cohomology": results})
