"""Discrete pre-log rings k[M]/I with α: N → M, their log differentials,
cotangent shadows, and the classification of maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .abelian import (
    QQ,
    ZZ,
    ChainComplex,
    Coefficients,
    FgAbGroup,
    TRIVIAL,
    cokernel_structure,
    columns_to_matrix,
    identity,
    zeros,
    complex_homology,
    integer_kernel,
    matmul,
    rank_over,
    scalar_tensor_tor,
    solve_integer,
)
from .monoid import (
    AffineMonoid,
    MonoidHom,
    PreconditionError,
    TriState,
    Vector,
    is_exact,
    is_integral,
    normalize,
)
from .polyhedra import UnsupportedError


class UnsupportedShapeError(UnsupportedError):
    """The requested computation is outside the supported grammar."""


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


# --------------------------------------------------------------------------
# rings and maps


class PreLogRing:
    """k[M]/I with pre-log structure α: N → M (monomial)."""

    def __init__(
        self,
        coeff: Coefficients,
        ring_monoid: AffineMonoid,
        prelog_monoid: AffineMonoid | None = None,
        structure: MonoidHom | None = None,
        ideal: Iterable[Sequence[int]] = (),
    ):
        self.coeff = Coefficients.parse(coeff)
        self.ring_monoid = ring_monoid
        if prelog_monoid is None:
            prelog_monoid = AffineMonoid.trivial(0)
        self.prelog_monoid = prelog_monoid
        if structure is None:
            structure = MonoidHom(prelog_monoid, ring_monoid, [[0] * prelog_monoid.ambient_rank for _ in range(ring_monoid.ambient_rank)], check=True)
        if structure.source != prelog_monoid or structure.target != ring_monoid:
            raise PreconditionError("structure map must go N → M")
        self.structure = structure
        self.ideal = tuple(tuple(int(x) for x in i) for i in ideal)
        for i in self.ideal:
            if not ring_monoid.contains(i, bound=10**6):
                raise PreconditionError(f"ideal generator {list(i)} not in M")

    @classmethod
    def canonical(cls, m: AffineMonoid, coeff: Coefficients | str = QQ) -> "PreLogRing":
        """(k[M], M) with α the identity."""
        return cls(coeff, m, m, MonoidHom.identity(m))

    @classmethod
    def trivial(cls, m: AffineMonoid, coeff: Coefficients | str = QQ, ideal=()) -> "PreLogRing":
        """k[M]/I with the trivial pre-log structure."""
        return cls(coeff, m, None, None, ideal)

    @classmethod
    def point(cls, coeff: Coefficients | str = QQ) -> "PreLogRing":
        return cls.trivial(AffineMonoid.trivial(0), coeff)

    @property
    def is_canonical(self) -> bool:
        s = self.structure
        d = self.ring_monoid.ambient_rank
        return (
            not self.ideal
            and self.prelog_monoid == self.ring_monoid
            and s.matrix == [[int(i == j) for j in range(d)] for i in range(d)]
        )

    def with_coeff(self, coeff) -> "PreLogRing":
        return PreLogRing(coeff, self.ring_monoid, self.prelog_monoid, self.structure, self.ideal)

    def in_ideal(self, v: Sequence[int]) -> bool:
        m = self.ring_monoid
        return any(m.contains(_sub(v, i), bound=10**6) for i in self.ideal)

    def has_monomial(self, v: Sequence[int]) -> bool:
        """t^v is a nonzero monomial of k[M]/I."""
        return self.ring_monoid.contains(v, bound=10**6) and not self.in_ideal(v)

    def to_json(self) -> dict:
        return {
            "coeff": str(self.coeff),
            "ring_monoid": self.ring_monoid.to_json(),
            "prelog_monoid": self.prelog_monoid.to_json(),
            "structure": self.structure.matrix,
            "ideal": [list(i) for i in self.ideal],
        }

    @classmethod
    def from_json(cls, data: dict, coeff=None) -> "PreLogRing":
        m = AffineMonoid.from_json(data["ring_monoid"])
        k = coeff if coeff is not None else data.get("coeff", "QQ")
        if data.get("canonical"):
            return cls.canonical(m, k)
        n = AffineMonoid.from_json(data["prelog_monoid"]) if "prelog_monoid" in data else AffineMonoid.trivial(0)
        if "structure" in data:
            s = MonoidHom(n, m, data["structure"])
        else:
            s = None
        return cls(k, m, n, s, data.get("ideal", ()))

    def __repr__(self):
        return f"PreLogRing({self.coeff}, M={self.ring_monoid!r}, N={self.prelog_monoid!r}, I={list(self.ideal)})"


class PreLogMap:
    """(f, f♭): (R, P) → (A, N) on ring monoids and pre-log monoids."""

    def __init__(self, source: PreLogRing, target: PreLogRing, monoid_map: MonoidHom, prelog_map: MonoidHom):
        self.source = source
        self.target = target
        self.monoid_map = monoid_map
        self.prelog_map = prelog_map
        if monoid_map.source != source.ring_monoid or monoid_map.target != target.ring_monoid:
            raise PreconditionError("monoid map has wrong endpoints")
        if prelog_map.source != source.prelog_monoid or prelog_map.target != target.prelog_monoid:
            raise PreconditionError("pre-log map has wrong endpoints")
        for n in source.prelog_monoid.generators:
            a = target.structure(prelog_map(n))
            b = monoid_map(source.structure(n))
            if a != b:
                raise PreconditionError(f"structure square does not commute at {list(n)}")
        for i in source.ideal:
            if not target.in_ideal(monoid_map(i)) and target.ring_monoid.contains(monoid_map(i), bound=10**6):
                raise PreconditionError(f"ideal generator {list(i)} does not map into the ideal")

    @property
    def coeff(self) -> Coefficients:
        return self.target.coeff

    @classmethod
    def over_point(cls, target: PreLogRing) -> "PreLogMap":
        base = PreLogRing.point(target.coeff)
        return cls(
            base,
            target,
            MonoidHom.from_trivial(target.ring_monoid),
            MonoidHom.from_trivial(target.prelog_monoid),
        )

    @classmethod
    def canonical(cls, theta: MonoidHom, coeff: Coefficients | str = QQ) -> "PreLogMap":
        """(k[P], P) → (k[M], M) induced by θ."""
        return cls(PreLogRing.canonical(theta.source, coeff), PreLogRing.canonical(theta.target, coeff), theta, theta)

    @classmethod
    def identity(cls, ring: PreLogRing) -> "PreLogMap":
        return cls(ring, ring, MonoidHom.identity(ring.ring_monoid), MonoidHom.identity(ring.prelog_monoid))

    @property
    def is_canonical(self) -> bool:
        return (
            self.source.is_canonical
            and self.target.is_canonical
            and self.monoid_map.matrix == self.prelog_map.matrix
        )

    def with_coeff(self, coeff) -> "PreLogMap":
        return PreLogMap(self.source.with_coeff(coeff), self.target.with_coeff(coeff), self.monoid_map, self.prelog_map)

    def compose(self, other: "PreLogMap") -> "PreLogMap":
        """self ∘ other."""
        return PreLogMap(other.source, self.target, self.monoid_map.compose(other.monoid_map), self.prelog_map.compose(other.prelog_map))

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "monoid_map": self.monoid_map.matrix,
            "prelog_map": self.prelog_map.matrix,
        }

    @classmethod
    def from_json(cls, data: dict, coeff=None) -> "PreLogMap":
        a = PreLogRing.from_json(data["source"], coeff)
        b = PreLogRing.from_json(data["target"], coeff)
        return cls(
            a,
            b,
            MonoidHom(a.ring_monoid, b.ring_monoid, data["monoid_map"]),
            MonoidHom(a.prelog_monoid, b.prelog_monoid, data["prelog_map"]),
        )


def free_prelog(base: PreLogRing, xs: Sequence[str], ys: Sequence[str]) -> PreLogMap:
    """k[P ⊕ ℕ^X ⊕ ℕ^Y] with pre-log P ⊕ ℕ^X, as a map from the base."""
    if base.ideal:
        raise UnsupportedShapeError("free pre-log algebras need a base without ideal")
    if not base.is_canonical and base.prelog_monoid.generators:
        raise UnsupportedShapeError("free pre-log algebras need a canonical or trivial base")
    p = base.ring_monoid
    dp, nx, ny = p.ambient_rank, len(xs), len(ys)
    d = dp + nx + ny

    def e(i):
        return tuple(int(i == j) for j in range(d))

    ring_gens = [tuple(g) + (0,) * (nx + ny) for g in p.generators] + [e(dp + i) for i in range(nx + ny)]
    m = AffineMonoid(d, ring_gens)
    canonical_base = base.is_canonical and bool(p.generators)
    dn = (dp if canonical_base else 0) + nx
    n_gens = ([tuple(g) + (0,) * nx for g in p.generators] if canonical_base else []) + [
        tuple(int(i == j) for j in range(dn)) for i in range(dn - nx, dn)
    ]
    n = AffineMonoid(dn, n_gens)
    # structure: coordinates of N go to the first dp (if canonical) and the X block
    rows = []
    for r in range(d):
        row = [0] * dn
        if canonical_base and r < dp:
            row[r] = 1
        elif dp <= r < dp + nx:
            row[(dp if canonical_base else 0) + r - dp] = 1
        rows.append(row)
    target = PreLogRing(base.coeff, m, n, MonoidHom(n, m, rows))
    f_ring = [[int(r == c) for c in range(dp)] for r in range(d)]
    f_log = [[int(r == c) for c in range(base.prelog_monoid.ambient_rank)] for r in range(dn)]
    if not canonical_base:
        f_log = [[0] * base.prelog_monoid.ambient_rank for _ in range(dn)]
    return PreLogMap(base, target, MonoidHom(p, m, f_ring), MonoidHom(base.prelog_monoid, n, f_log))


# --------------------------------------------------------------------------
# coordinate-block decomposition


@dataclass
class Block:
    kind: str  # "log", "plain" or "base"
    coords: list[int]
    monoid: AffineMonoid

    def restrict(self, v: Sequence[int]) -> Vector:
        return tuple(v[i] for i in self.coords)


@dataclass
class Decomposition:
    """M = ⊕ blocks, with α landing in log blocks and the base in log or base
    blocks.  ``theta`` is the base map into the combined log block."""

    f: PreLogMap
    blocks: list[Block]
    log_monoid: AffineMonoid
    log_coords: list[int]
    theta: MonoidHom
    plain_monoid: AffineMonoid
    plain_coords: list[int]
    plain_ideal: list[Vector]
    base_coords: list[int]
    notes: list[str] = field(default_factory=list)

    def split(self, m: Sequence[int]) -> tuple[Vector, Vector, Vector]:
        return (
            tuple(m[i] for i in self.log_coords),
            tuple(m[i] for i in self.plain_coords),
            tuple(m[i] for i in self.base_coords),
        )

    @cached_property
    def base_monoid(self) -> AffineMonoid:
        gens = [tuple(g[i] for i in self.base_coords) for g in self.f.target.ring_monoid.generators if any(g[i] for i in self.base_coords)]
        return AffineMonoid(len(self.base_coords), gens)

    @cached_property
    def log_group(self):
        from .abelian import LatticeQuotient

        m = self.log_monoid
        return LatticeQuotient(m.group_basis, [list(v) for v in self.theta.image_generators], m.ambient_rank)

    @cached_property
    def plain_split(self):
        """(unit rank, sharp monoid S, unit quotient) for the plain part."""
        m = self.plain_monoid
        q = m.unit_quotient
        if q.group.torsion:
            raise UnsupportedShapeError("plain part has torsion modulo units")
        return len(m.unit_basis), m.sharp_part, q

    def contains(self, m: Sequence[int], ideal: bool = True) -> bool:
        """m ∈ M, and t^m ∉ I unless ``ideal`` is False."""
        lg, pl, bs = self.split(m)
        if not self.log_monoid.contains(lg, bound=10**6):
            return False
        if not self.plain_monoid.contains(pl, bound=10**6):
            return False
        if self.base_coords and not self.base_monoid.contains(bs, bound=10**6):
            return False
        return not ideal or not any(self.plain_monoid.contains(_sub(pl, i), bound=10**6) for i in self.plain_ideal)


def _components(d: int, supports: Iterable[Iterable[int]]) -> list[list[int]]:
    parent = list(range(d))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touched = set()
    for s in supports:
        s = list(s)
        touched.update(s)
        for a in s[1:]:
            ra, rb = find(s[0]), find(a)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    comps: dict[int, list[int]] = {}
    for i in sorted(touched):
        comps.setdefault(find(i), []).append(i)
    return sorted(comps.values())


def _support(v) -> list[int]:
    return [i for i, x in enumerate(v) if x]


def _sub_monoid(gens: Iterable[Sequence[int]], coords: list[int]) -> AffineMonoid:
    return AffineMonoid(len(coords), [tuple(g[i] for i in coords) for g in gens])


def decompose(f: PreLogMap) -> Decomposition:
    """Split the target into log, plain and base coordinate blocks."""
    a = f.target
    m = a.ring_monoid
    d = m.ambient_rank
    n_imgs = [a.structure(n) for n in a.prelog_monoid.generators]
    base_imgs = [f.monoid_map(p) for p in f.source.ring_monoid.generators]
    supports = [_support(g) for g in m.generators] + [_support(v) for v in n_imgs] + [_support(i) for i in a.ideal] + [
        _support(v) for v in base_imgs
    ]
    notes: list[str] = []
    blocks: list[Block] = []
    base_canonical = f.source.is_canonical and bool(f.source.ring_monoid.generators)
    base_trivial_log = not f.source.prelog_monoid.generators
    for comp in _components(d, supports):
        cs = set(comp)
        gens = [g for g in m.generators if set(_support(g)) <= cs]
        mb = _sub_monoid(gens, comp)
        imgs = [v for v in n_imgs if any(v) and set(_support(v)) <= cs]
        bimgs = [v for v in base_imgs if any(v) and set(_support(v)) <= cs]
        ideal = [i for i in a.ideal if set(_support(i)) <= cs]
        kind = "plain"
        if imgs:
            img_m = _sub_monoid(imgs, comp)
            same = all(img_m.contains(g, bound=10**6) for g in mb.generators)
            if same and not ideal:
                kind = "log"
            elif all(mb.cone.in_lineality(tuple(v[i] for i in comp)) for v in imgs):
                notes.append(f"pre-log structure on coordinates {comp} lands in units; treated as trivial")
            else:
                raise UnsupportedShapeError(f"pre-log image on coordinates {comp} is neither the block monoid nor units")
        if bimgs:
            if kind == "log":
                if not base_canonical:
                    raise UnsupportedShapeError("base maps into a log block but is not canonical")
            else:
                bm = _sub_monoid(bimgs, comp)
                if not base_trivial_log or ideal or not all(bm.contains(g, bound=10**6) for g in mb.generators):
                    raise UnsupportedShapeError(f"base image on coordinates {comp} is not a whole plain block")
                kind = "base"
        blocks.append(Block(kind, comp, mb))
    log_coords = sorted(i for b in blocks if b.kind == "log" for i in b.coords)
    plain_coords = sorted(i for b in blocks if b.kind == "plain" for i in b.coords)
    base_coords = sorted(i for b in blocks if b.kind == "base" for i in b.coords)
    s = a.structure
    if log_coords and a.prelog_monoid.group_basis:
        imgs = [[s(v)[i] for i in log_coords] for v in a.prelog_monoid.group_basis]
        if rank_over(imgs, QQ) != a.prelog_monoid.group_rank:
            notes.append("α^gp is not injective; the image monoid is used")
    log_monoid = _sub_monoid([g for g in m.generators if set(_support(g)) <= set(log_coords) and any(g)], log_coords)
    src = f.source.ring_monoid
    theta_rows = [[f.monoid_map.matrix[i][j] for j in range(src.ambient_rank)] for i in log_coords]
    # the base acts on log blocks only through its canonical images
    theta = MonoidHom(src, log_monoid, theta_rows, check=False)
    if base_canonical:
        for b in src.generators:
            img = f.monoid_map(b)
            if any(img[i] for i in plain_coords):
                raise UnsupportedShapeError("canonical base maps into a plain block")
    plain_monoid = _sub_monoid([g for g in m.generators if set(_support(g)) <= set(plain_coords) and any(g)], plain_coords)
    plain_ideal = [tuple(i[c] for c in plain_coords) for i in a.ideal]
    return Decomposition(f, blocks, log_monoid, log_coords, theta, plain_monoid, plain_coords, plain_ideal, base_coords, notes)


# --------------------------------------------------------------------------
# log Kähler differentials


@dataclass
class PresentedModule:
    """Graded module given by generators and monomial-coefficient relations.

    A generator label is ``("d", v)`` (degree v) or ``("dlog", i)`` (degree
    0).  A relation template is ``(v, [(c, w, label), ...])`` meaning
    Σ c·t^w·label, homogeneous of degree v.
    """

    ring: PreLogRing
    generators: list
    relations: list
    fiber_data: tuple = ()

    def label_degree(self, label) -> Vector:
        if label[0] == "d":
            return tuple(label[1])
        return tuple(0 for _ in range(self.ring.ring_monoid.ambient_rank))

    def presentation(self, m: Sequence[int]) -> tuple[list, list[list[int]]]:
        """Generators present at degree m and the relation matrix (columns)."""
        m = tuple(m)
        ring = self.ring
        if not ring.has_monomial(m) and not ring.ring_monoid.contains(m, bound=10**6):
            return [], []
        gens = []
        for lab in self.generators:
            c = _sub(m, self.label_degree(lab))
            if ring.has_monomial(c):
                gens.append(lab)
        index = {lab: i for i, lab in enumerate(gens)}
        cols = []
        for v, terms in list(self.relations) + self._fiber_relations(m):
            c = _sub(m, v)
            if not ring.has_monomial(c):
                continue
            col = [0] * len(gens)
            for coef, w, lab in terms:
                if lab in index and ring.has_monomial(_add(w, c)):
                    col[index[lab]] += coef
            if any(col):
                cols.append(col)
        return gens, cols

    def _fiber_relations(self, m):
        if not self.fiber_data:
            return []
        sharp_gens, lift, project, sharp = self.fiber_data
        mbar = project(m)
        out = []
        for vbar in _divisors(sharp, mbar):
            facts = _factorizations(sharp, vbar, len(sharp_gens))
            if len(facts) < 2:
                continue
            v = lift(vbar)
            exps = [_d_terms_sharp(v, f, sharp_gens, lift) for f in facts]
            for e in exps[1:]:
                out.append((v, exps[0] + [(-c, w, lab) for c, w, lab in e]))
        return out

    def at(self, m: Sequence[int], k: Coefficients | None = None) -> FgAbGroup:
        """The graded piece at degree m, over k."""
        k = k or self.ring.coeff
        gens, cols = self.presentation(m)
        if not gens:
            return TRIVIAL
        mat = columns_to_matrix(cols, len(gens)) if cols else [[] for _ in gens]
        if k.kind == "ZZ":
            if not cols:
                return FgAbGroup(len(gens))
            return cokernel_structure(mat)
        r = rank_over(mat, k) if cols else 0
        return FgAbGroup(len(gens) - r)


def _divisors(sharp: AffineMonoid, m: Vector) -> list[Vector]:
    """All v ∈ S with m − v ∈ S."""
    if not sharp.contains(m, bound=10**6):
        return []
    zero = tuple(0 for _ in m)
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for v in frontier:
            for g in sharp.generators:
                w = _add(v, g)
                if w not in seen and sharp.contains(_sub(m, w), bound=10**6):
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
    return sorted(seen)


def _factorizations(sharp: AffineMonoid, v: Vector, ngens: int) -> list[tuple[int, ...]]:
    """All multiplicity vectors a with Σ a_i g_i = v (S sharp)."""
    gens = sharp.generators
    out = []

    def rec(i, rem, acc):
        if i == len(gens):
            if not any(rem):
                out.append(tuple(acc))
            return
        a = 0
        cur = rem
        while True:
            if sharp.contains(cur, bound=10**6):
                rec(i + 1, cur, acc + [a])
            cur = _sub(cur, gens[i])
            a += 1
            if sharp.degree(cur) < 0:
                break

    rec(0, v, [])
    return out


def _d_terms_sharp(v, fact, sharp_gens, lift):
    terms = []
    for a, g in zip(fact, sharp_gens):
        if a:
            lg = lift(g)
            terms.append((a, _sub(v, lg), ("d", lg)))
    return terms


class _RingCoordinates:
    """k[M] re-presented by a unit basis u_j and lifts σ(s) of the sharp
    generators, so that d(t^v) has an explicit Leibniz expansion."""

    def __init__(self, m: AffineMonoid):
        self.m = m
        q = m.unit_quotient
        if q.group.torsion:
            raise UnsupportedShapeError("M^gp/M* has torsion; no unit splitting")
        self.q = q
        self.units = [tuple(u) for u in m.unit_basis]
        self.sharp = m.sharp_part
        self.sharp_gens = list(self.sharp.generators)
        from .abelian import IntegerSolver

        self._usolve = IntegerSolver(columns_to_matrix(self.units, m.ambient_rank), len(self.units)) if self.units else None

    def lift(self, s: Sequence[int]) -> Vector:
        return tuple(self.q.lift(tuple(s)))

    def project(self, v: Sequence[int]) -> Vector:
        return tuple(self.q.project(v))

    def labels(self) -> list:
        return [("d", u) for u in self.units] + [("d", self.lift(g)) for g in self.sharp_gens]

    def d_terms(self, v: Sequence[int]) -> list:
        """Σ c·t^w·label expressing d(t^v), v ∈ M."""
        v = tuple(v)
        vbar = self.project(v)
        sv = self.lift(vbar)
        u = _sub(v, sv)
        terms = []
        if self.units:
            c = self._usolve.solve(list(u))
            for cj, uj in zip(c, self.units):
                if cj:
                    terms.append((cj, _sub(v, uj), ("d", uj)))
        facts = _factorizations(self.sharp, vbar, len(self.sharp_gens))
        if not facts:
            raise ValueError(f"{list(v)} not in M")
        for a, g in zip(facts[0], self.sharp_gens):
            if a:
                lg = self.lift(g)
                terms.append((a, _sub(v, lg), ("d", lg)))
        return terms


def kahler_differentials(f: PreLogMap) -> PresentedModule:
    """Ω¹ of the target relative to the source, as a graded presentation."""
    a = f.target
    m = a.ring_monoid
    coords = _RingCoordinates(m)
    zero = tuple(0 for _ in range(m.ambient_rank))
    n = a.prelog_monoid
    gens = coords.labels() + [("dlog", i) for i in range(len(n.generators))]
    rels = []
    # lattice relations among dlog of pre-log generators
    if n.generators:
        nmat = columns_to_matrix(n.generators, n.ambient_rank)
        for lam in integer_kernel(nmat, len(n.generators)):
            rels.append((zero, [(c, zero, ("dlog", i)) for i, c in enumerate(lam) if c]))
    # dα(n) = α(n) dlog n
    for i, g in enumerate(n.generators):
        alpha = a.structure(g)
        rels.append((alpha, coords.d_terms(alpha) + [(-1, alpha, ("dlog", i))]))
    # base
    src = f.source
    if n.generators:
        solver_mat = columns_to_matrix(n.generators, n.ambient_rank)
        for p in src.prelog_monoid.generators:
            img = f.prelog_map(p)
            if not any(img):
                continue
            c = solve_integer(solver_mat, list(img), len(n.generators))
            rels.append((zero, [(ci, zero, ("dlog", i)) for i, ci in enumerate(c) if ci]))
    for p in src.ring_monoid.generators:
        img = f.monoid_map(p)
        if any(img):
            rels.append((img, coords.d_terms(img)))
    for i in a.ideal:
        rels.append((tuple(i), coords.d_terms(i)))
    fiber = (coords.sharp_gens, coords.lift, coords.project, coords.sharp)
    return PresentedModule(a, gens, rels, fiber)


def kahler_closed_form(f: PreLogMap, m: Sequence[int]) -> FgAbGroup:
    """k[M] ⊗ (M^gp/P^gp) at degree m for a canonical map."""
    if not f.is_canonical:
        raise UnsupportedShapeError("closed form needs a canonical map")
    if not f.target.ring_monoid.contains(m, bound=10**6):
        return TRIVIAL
    g = f.monoid_map.cokernel
    return scalar_tensor_tor(g, f.coeff)[0]


# --------------------------------------------------------------------------
# classification


@dataclass
class MapClassification:
    strict: bool
    kummer: bool
    integral: TriState
    exact: TriState
    log_smooth: bool
    log_etale: bool
    derived_log_smooth: bool
    derived_log_etale: bool
    evidence: dict

    def to_json(self) -> dict:
        return {
            "strict": self.strict,
            "kummer": self.kummer,
            "integral": self.integral.to_json(),
            "exact": self.exact.to_json(),
            "log_smooth": self.log_smooth,
            "log_etale": self.log_etale,
            "derived_log_smooth": self.derived_log_smooth,
            "derived_log_etale": self.derived_log_etale,
            "evidence": self.evidence,
        }


def _is_strict(theta: MonoidHom) -> bool:
    """θ induces an isomorphism of sharp quotients P/P* → N/N*."""
    p, n = theta.source, theta.target
    try:
        ps, ns = p.sharp_part, n.sharp_part
    except UnsupportedError:
        return False
    if ps.ambient_rank != ns.ambient_rank:
        return False
    qp, qn = p.unit_quotient, n.unit_quotient
    r = ps.ambient_rank
    if r == 0:
        return True
    cols = [qn.project(theta(qp.lift(tuple(int(i == j) for j in range(r))))) for i in range(r)]
    mat = columns_to_matrix(cols, r)
    from .abelian import determinant

    if abs(determinant(mat)) != 1:
        return False
    imgs = {tuple(c) for c in (qn.project(theta(g)) for g in p.sharp_generators)}
    img_m = AffineMonoid(r, imgs)
    return all(img_m.contains(g, bound=10**6) for g in ns.generators)


def _ring_condition(f: PreLogMap) -> tuple[bool, bool, str]:
    """(smooth, etale, note) for the part of the ring not seen by charts."""
    try:
        dec = decompose(f)
    except UnsupportedError as exc:
        return False, False, f"unsupported ring shape: {exc}"
    if dec.f.target.ideal:
        return False, False, "monomial ideal present"
    pm = dec.plain_monoid
    if not pm.generators:
        return True, True, "no plain directions"
    try:
        _, sharp, _ = dec.plain_split
    except UnsupportedError as exc:
        return False, False, str(exc)
    free = len(sharp.generators) == sharp.ambient_rank and (
        sharp.ambient_rank == 0 or abs(_det(sharp.generators)) == 1
    )
    return free, False, "plain directions free" if free else "plain directions singular"


def _det(vectors) -> int:
    from .abelian import determinant

    return determinant([list(v) for v in vectors])


def classify_map(f: PreLogMap, box: int = 3) -> MapClassification:
    k = f.coeff
    theta = f.prelog_map
    ker = theta.kernel_rank
    coker = theta.cokernel
    tors = 1
    for dd in coker.torsion:
        tors *= dd
    tors_ok = k.is_unit(tors) if k.kind != "ZZ" else tors == 1
    strict = _is_strict(theta)
    kummer = ker == 0 and coker.free_rank == 0
    smooth_ring, etale_ring, note = _ring_condition(f)
    if f.target.ideal or f.source.ideal:
        smooth_ring = etale_ring = False
    log_smooth = ker == 0 and tors_ok and smooth_ring
    log_etale = log_smooth and coker.free_rank == 0 and etale_ring
    integral = is_integral(theta, box=box)
    exact = is_exact(theta)
    # derived criterion: ker θ^gp finite (trivial for lattices) and the
    # torsion of coker θ^gp of invertible order
    d_smooth = (ker == 0 and tors_ok and smooth_ring) or (integral.is_yes and log_smooth)
    d_etale = (ker == 0 and tors_ok and coker.free_rank == 0 and etale_ring) or (integral.is_yes and log_etale)
    evidence = {
        "ker_rank": ker,
        "coker": coker.to_json(),
        "torsion_order": tors,
        "torsion_invertible": tors_ok,
        "ring_condition": note,
        "coefficients": str(k),
    }
    return MapClassification(strict, kummer, integral, exact, log_smooth, log_etale, d_smooth or d_etale, d_etale, evidence)


# --------------------------------------------------------------------------
# cotangent complex shadows


def cotangent_pi(f: PreLogMap, n: int, degrees: Sequence[Sequence[int]]) -> dict[Vector, FgAbGroup]:
    """π_n of the log cotangent complex at each requested degree."""
    k = f.coeff
    a = f.target
    out: dict[Vector, FgAbGroup] = {}
    if f.is_canonical:
        theta = f.monoid_map
        g = theta.cokernel
        ker = FgAbGroup(theta.kernel_rank)
        if n == 0:
            val = scalar_tensor_tor(g, k)[0]
        elif n == 1:
            val = scalar_tensor_tor(ker, k)[0] + scalar_tensor_tor(g, k)[1]
        else:
            val = TRIVIAL
        for m in degrees:
            out[tuple(m)] = val if a.has_monomial(m) else TRIVIAL
        return out
    cls = classify_map(f)
    if cls.derived_log_smooth or (cls.strict and _ring_condition(f)[0]):
        if n > 0:
            return {tuple(m): TRIVIAL for m in degrees}
        omega = kahler_differentials(f)
        return {tuple(m): omega.at(m, k) for m in degrees}
    raise UnsupportedShapeError(
        "cotangent_pi supports canonical maps, derived log smooth maps and strict smooth maps"
    )


@dataclass
class TransitivityReport:
    passed: bool
    ranks: dict
    notes: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "ranks": self.ranks, "notes": self.notes}


def _neg(a):
    return [[-x for x in r] for r in a]


def _hcat(*blocks):
    return [sum((list(b[i]) for b in blocks), []) for i in range(len(blocks[0]))]


def _vcat(*blocks):
    return [list(r) for b in blocks for r in b]


def transitivity_check(f: PreLogMap, g: PreLogMap, n_max: int = 2) -> TransitivityReport:
    """Exactness of B ⊗ L_{A/R} → L_{B/R} → L_{B/A} for canonical maps.

    With θ: P → M and ψ: M → N in group coordinates, cone(φ) for
    φ: cone(θ) → cone(ψθ) is compared to cone(ψ) by κ(x, y) = x + θy; the
    long exact sequence holds iff κ is a quasi-isomorphism.
    """
    if not (f.is_canonical and g.is_canonical):
        raise UnsupportedShapeError("transitivity_check supports canonical maps")
    if f.target.ring_monoid != g.source.ring_monoid:
        raise PreconditionError("maps are not composable")
    k = g.coeff
    th = normalize(f.monoid_map)
    ps = normalize(g.monoid_map)
    p, m, n = th.source.ambient_rank, th.target.ambient_rank, ps.target.ambient_rank
    a = th.matrix if p else zeros(m, 0)
    b = ps.matrix if m else zeros(n, 0)
    ba = matmul(b, a, inner=m) if (n and p) else zeros(n, p)
    notes: list[str] = []
    d2 = _vcat(_neg(a), identity(p))  # P → M ⊕ P
    d1 = _hcat(b, ba) if n else zeros(0, m + p)  # M ⊕ P → N
    kappa1 = _hcat(identity(m), a) if m else zeros(0, m + p)
    cone_phi = ChainComplex((n, m + p, p), (d1, d2))
    ok = True
    try:
        cone_phi.validate()
    except ValueError as exc:
        return TransitivityReport(False, {}, [f"cone(φ) malformed: {exc}"])
    if matmul(b, kappa1, inner=m) != d1 and n:
        ok = False
        notes.append("κ is not a chain map in degree 1")
    if any(any(r) for r in matmul(kappa1, d2, inner=m + p)) if (m and p) else False:
        ok = False
        notes.append("κ is not a chain map in degree 2")
    # cone(κ): degrees 3..0 are D_2, D_1, D_0 ⊕ E_1, E_0
    c3 = _neg(d2)
    c2 = _vcat(_neg(d1), kappa1)
    c1 = _hcat(identity(n), b) if n else zeros(0, n + m)
    cone_kappa = ChainComplex((n, n + m, m + p, p), (c1, c2, c3))
    try:
        cone_kappa.validate()
    except ValueError as exc:
        return TransitivityReport(False, {}, notes + [f"cone(κ) malformed: {exc}"])
    for deg in range(4):
        if not complex_homology(cone_kappa, deg, k, check=False).is_zero:
            ok = False
            notes.append(f"cone(κ) has homology in degree {deg}")
    ranks = {}
    for name, cx in (
        ("A/R", ChainComplex((m, p), (a,))),
        ("B/R", ChainComplex((n, p), (ba,))),
        ("B/A", ChainComplex((n, m), (b,))),
    ):
        ranks[name] = {str(d): complex_homology(cx, d, k).to_json() for d in range(n_max + 1)}
    return TransitivityReport(ok, ranks, notes)
