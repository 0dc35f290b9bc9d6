"""Fine commutative monoids given by generators in Z^d, and maps between them."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

from .abelian import (
    FgAbGroup,
    LatticeQuotient,
    columns_to_matrix,
    integer_kernel,
    lattice_basis,
    matvec,
    rank_over,
    QQ,
    solve_integer,
)
from .polyhedra import (
    Cone,
    ScaleError,
    UnsupportedError,
    dot,
    lattice_cone_generators,
)

DEFAULT_GRADING_BOUND = 64
DEFAULT_BOX = 8

Vector = tuple[int, ...]


class UnsupportedMonoidError(UnsupportedError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class TriState:
    """Yes / No / Unknown(bound), with optional evidence."""

    value: str
    bound: int | None = None
    evidence: str = ""

    def __post_init__(self):
        if self.value not in ("yes", "no", "unknown"):
            raise ValueError(self.value)

    @classmethod
    def yes(cls, evidence: str = "") -> "TriState":
        return cls("yes", None, evidence)

    @classmethod
    def no(cls, evidence: str = "") -> "TriState":
        return cls("no", None, evidence)

    @classmethod
    def unknown(cls, bound: int, evidence: str = "") -> "TriState":
        return cls("unknown", bound, evidence)

    @property
    def is_yes(self) -> bool:
        return self.value == "yes"

    @property
    def is_no(self) -> bool:
        return self.value == "no"

    def to_json(self):
        out = {"value": self.value}
        if self.bound is not None:
            out["bound"] = self.bound
        if self.evidence:
            out["evidence"] = self.evidence
        return out

    def __str__(self):
        return f"Unknown({self.bound})" if self.value == "unknown" else self.value.capitalize()


def _vec(v) -> Vector:
    return tuple(int(x) for x in v)


class AffineMonoid:
    """The submonoid of Z^ambient_rank generated by ``generators``."""

    def __init__(self, ambient_rank: int, generators: Sequence[Sequence[int]] = ()):
        self.ambient_rank = int(ambient_rank)
        seen: dict[Vector, None] = {}
        for g in generators:
            g = _vec(g)
            if len(g) != self.ambient_rank:
                raise ValueError(f"generator {list(g)} does not lie in Z^{self.ambient_rank}")
            if any(g):
                seen.setdefault(g, None)
        self.generators: tuple[Vector, ...] = tuple(seen)
        self._memo: dict[tuple, bool] = {}

    # construction helpers -------------------------------------------------

    @classmethod
    def free(cls, r: int) -> "AffineMonoid":
        """ℕ^r."""
        return cls(r, [tuple(int(i == j) for j in range(r)) for i in range(r)])

    @classmethod
    def lattice(cls, r: int) -> "AffineMonoid":
        """ℤ^r as a monoid."""
        gens = []
        for i in range(r):
            e = tuple(int(i == j) for j in range(r))
            gens += [e, tuple(-x for x in e)]
        return cls(r, gens)

    @classmethod
    def trivial(cls, r: int = 0) -> "AffineMonoid":
        return cls(r, [])

    def to_json(self) -> dict:
        return {"ambient_rank": self.ambient_rank, "generators": [list(g) for g in self.generators]}

    @classmethod
    def from_json(cls, data) -> "AffineMonoid":
        return cls(int(data["ambient_rank"]), data.get("generators", []))

    def __eq__(self, other):
        return (
            isinstance(other, AffineMonoid)
            and other.ambient_rank == self.ambient_rank
            and set(other.generators) == set(self.generators)
        )

    def __hash__(self):
        return hash((self.ambient_rank, frozenset(self.generators)))

    def __repr__(self):
        return f"AffineMonoid({self.ambient_rank}, {[list(g) for g in self.generators]})"

    # structure ---------------------------------------------------------------

    @cached_property
    def cone(self) -> Cone:
        return Cone(self.generators, self.ambient_rank)

    @cached_property
    def unit_generators(self) -> tuple[Vector, ...]:
        return tuple(g for g in self.generators if self.cone.in_lineality(g))

    @cached_property
    def sharp_generators(self) -> tuple[Vector, ...]:
        units = set(self.unit_generators)
        return tuple(g for g in self.generators if g not in units)

    @cached_property
    def group_basis(self) -> list[list[int]]:
        """Z-basis of M^gp ⊂ Z^d."""
        return lattice_basis(self.generators, self.ambient_rank)

    @property
    def group_rank(self) -> int:
        return len(self.group_basis)

    @cached_property
    def unit_basis(self) -> list[list[int]]:
        """Z-basis of the unit group M* = M ∩ (-M)."""
        return lattice_basis(self.unit_generators, self.ambient_rank)

    @property
    def is_sharp(self) -> bool:
        return not self.unit_generators

    @property
    def is_group(self) -> bool:
        return not self.sharp_generators

    @cached_property
    def grading(self) -> list[int]:
        """Integer functional, zero on units and positive on sharp generators."""
        return self.cone.grading

    def degree(self, v: Sequence[int]) -> int:
        return dot(self.grading, v)

    @cached_property
    def unit_quotient(self) -> LatticeQuotient:
        """M^gp / M* with coordinates; sharp elements project here."""
        return LatticeQuotient(self.group_basis, self.unit_basis, self.ambient_rank)

    @cached_property
    def sharp_part(self) -> "AffineMonoid":
        """M / M* embedded in Z^r (requires M^gp/M* torsion-free)."""
        q = self.unit_quotient
        if q.group.torsion:
            raise UnsupportedMonoidError("M^gp/M* has torsion; no lattice splitting")
        return AffineMonoid(q.group.free_rank, [q.project(g) for g in self.sharp_generators])

    def in_group(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient_rank:
            raise ValueError(f"element {list(v)} has wrong rank (expected {self.ambient_rank})")
        return self.unit_quotient.contains(v)

    # membership --------------------------------------------------------------

    def contains(self, v: Sequence[int], bound: int = DEFAULT_GRADING_BOUND) -> bool:
        """Whether v is a nonnegative integer combination of the generators.

        Raises ScaleError when the grading degree of v exceeds ``bound``.
        """
        v = _vec(v)
        if not self.in_group(v):
            return False
        deg = self.degree(v)
        if deg < 0:
            return False
        if deg > bound:
            raise ScaleError(f"grading degree {deg} exceeds bound {bound}")
        q = self.unit_quotient
        sharp = [(q.project(s), self.degree(s)) for s in self.sharp_generators]
        return self._reach(q.project(v), deg, tuple(sharp))

    def _reach(self, key, deg, sharp) -> bool:
        if deg == 0:
            return not any(key)
        memo_key = (key, deg)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        q = self.unit_quotient
        result = False
        for s, ds in sharp:
            if ds <= deg:
                nk = q.add(key, q.neg(s))
                if self._reach(nk, deg - ds, sharp):
                    result = True
                    break
        self._memo[memo_key] = result
        return result

    def elements_of_degree_at_most(self, bound: int) -> list[Vector]:
        """Sharp-part representatives: all Σ n_i s_i of grading degree ≤ bound,
        deduplicated, as vectors in Z^d (units omitted)."""
        seen = {tuple([0] * self.ambient_rank)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for v in frontier:
                for s in self.sharp_generators:
                    w = tuple(a + b for a, b in zip(v, s))
                    if self.degree(w) <= bound and w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        return sorted(seen)

    # completion / saturation -----------------------------------------------

    def group_completion(self) -> "GroupCompletion":
        return GroupCompletion(
            group=FgAbGroup(self.group_rank),
            basis=self.group_basis,
            units=self.unit_basis,
            sharp=self.sharp_part,
        )

    @cached_property
    def saturation_generators(self) -> list[list[int]]:
        """Generators of cone(M) ∩ M^gp."""
        if not self.generators:
            return []
        return lattice_cone_generators(self.generators, self.ambient_rank, self.group_basis)

    def saturation(self) -> "AffineMonoid":
        return AffineMonoid(self.ambient_rank, self.saturation_generators)

    def is_saturated(self) -> bool:
        return all(self.contains(h, bound=10**6) for h in self.saturation_generators)


@dataclass(frozen=True)
class GroupCompletion:
    group: FgAbGroup
    basis: list
    units: list
    sharp: AffineMonoid

    def gamma(self, v: Sequence[int]) -> list[int]:
        """Coordinates of v ∈ M in the basis of M^gp."""
        x = solve_integer(columns_to_matrix(self.basis, len(v)), list(v), len(self.basis))
        if x is None:
            raise ValueError("element not in M^gp")
        return x


class MonoidHom:
    """θ: source → target given by an integer matrix on ambient lattices."""

    def __init__(self, source: AffineMonoid, target: AffineMonoid, matrix: Sequence[Sequence[int]], check: bool = True):
        self.source = source
        self.target = target
        self.matrix = [list(map(int, r)) for r in matrix]
        if len(self.matrix) != target.ambient_rank or any(len(r) != source.ambient_rank for r in self.matrix):
            if not (target.ambient_rank == 0 or source.ambient_rank == 0):
                raise ValueError(
                    f"matrix shape must be {target.ambient_rank}x{source.ambient_rank}"
                )
            self.matrix = [[0] * source.ambient_rank for _ in range(target.ambient_rank)]
        if check:
            for g in source.generators:
                if not target.contains(self(g), bound=10**6):
                    raise PreconditionError(f"generator {list(g)} maps outside the target monoid")

    def __call__(self, v: Sequence[int]) -> Vector:
        return tuple(matvec(self.matrix, list(v))) if self.matrix else tuple()

    @classmethod
    def identity(cls, m: AffineMonoid) -> "MonoidHom":
        n = m.ambient_rank
        return cls(m, m, [[int(i == j) for j in range(n)] for i in range(n)], check=False)

    @classmethod
    def from_trivial(cls, m: AffineMonoid) -> "MonoidHom":
        return cls(AffineMonoid.trivial(0), m, [[] for _ in range(m.ambient_rank)], check=False)

    def compose(self, other: "MonoidHom") -> "MonoidHom":
        """self ∘ other."""
        mat = [
            [sum(self.matrix[i][k] * other.matrix[k][j] for k in range(self.source.ambient_rank)) for j in range(other.source.ambient_rank)]
            for i in range(self.target.ambient_rank)
        ]
        return MonoidHom(other.source, self.target, mat, check=False)

    def to_json(self) -> dict:
        return {"source": self.source.to_json(), "target": self.target.to_json(), "matrix": self.matrix}

    @classmethod
    def from_json(cls, data) -> "MonoidHom":
        return cls(AffineMonoid.from_json(data["source"]), AffineMonoid.from_json(data["target"]), data["matrix"])

    def __repr__(self):
        return f"MonoidHom({self.source!r} -> {self.target!r}, {self.matrix})"

    # group-level data -------------------------------------------------------

    @cached_property
    def image_generators(self) -> list[Vector]:
        return [self(b) for b in self.source.group_basis]

    @cached_property
    def kernel_rank(self) -> int:
        """rank ker θ^gp."""
        return self.source.group_rank - rank_over([list(v) for v in self.image_generators], QQ) if self.image_generators else 0

    @property
    def is_injective_gp(self) -> bool:
        return self.kernel_rank == 0

    @cached_property
    def cokernel_quotient(self) -> LatticeQuotient:
        """M^gp / θ(P^gp)."""
        return LatticeQuotient(self.target.group_basis, self.image_generators, self.target.ambient_rank)

    @property
    def cokernel(self) -> FgAbGroup:
        return self.cokernel_quotient.group

    def preimage_lattice(self) -> list[list[int]]:
        """Basis of {x ∈ P^gp : θx ∈ M^gp}."""
        src = self.source
        if not src.group_basis:
            return []
        tgt_gens = self.target.group_basis + [list(v) for v in self.image_generators]
        q = LatticeQuotient(tgt_gens, self.target.group_basis, self.target.ambient_rank)
        r = src.group_rank
        t = [q.project(v) for v in self.image_generators]
        mods = q.group.torsion
        ncoord = len(mods) + q.group.free_rank
        if ncoord == 0:
            return [list(b) for b in src.group_basis]
        cols = [list(tj) for tj in t]
        for i, d in enumerate(mods):
            cols.append([d if j == i else 0 for j in range(ncoord)])
        mat = columns_to_matrix(cols, ncoord)
        ker = integer_kernel(mat, len(cols))
        coeffs = [k[:r] for k in ker]
        vecs = [[sum(c[j] * src.group_basis[j][i] for j in range(r)) for i in range(src.ambient_rank)] for c in coeffs]
        return lattice_basis(vecs, src.ambient_rank)

    def preimage_generators(self) -> list[list[int]]:
        """Generators of (θ^gp)^{-1}(M) for saturated M: dual of θ^T(cone(M)^∨)
        intersected with the preimage lattice."""
        tgt = self.target
        fs = tgt.cone.dual_generators()
        pulled = [[sum(self.matrix[i][j] * f[i] for i in range(tgt.ambient_rank)) for j in range(self.source.ambient_rank)] for f in fs]
        dual = Cone(pulled, self.source.ambient_rank)
        lattice = self.preimage_lattice()
        if not lattice:
            return []
        return lattice_cone_generators(dual.dual_generators(), self.source.ambient_rank, lattice)


def is_exact(theta: MonoidHom, bound: int = DEFAULT_BOX) -> TriState:
    """Exactness P = (θ^gp)^{-1}(M) ∩ P^gp."""
    src, tgt = theta.source, theta.target
    if tgt.is_saturated():
        for h in theta.preimage_generators():
            if not src.contains(h, bound=10**6):
                return TriState.no(f"{h} in preimage but not in source")
        return TriState.yes("preimage generators lie in the source")
    basis = src.group_basis
    r = len(basis)
    for c in itertools.product(range(-bound, bound + 1), repeat=r):
        x = [sum(c[j] * basis[j][i] for j in range(r)) for i in range(src.ambient_rank)]
        try:
            if tgt.contains(theta(x)) and not src.contains(x):
                return TriState.no(f"{x} in preimage but not in source")
        except ScaleError:
            continue
    return TriState.unknown(bound, "no witness in search box")


def _is_valuative_source(p: AffineMonoid) -> bool:
    if p.is_group:
        return True
    try:
        sharp = p.sharp_part
    except UnsupportedMonoidError:
        return False
    if sharp.ambient_rank != 1:
        return False
    return any(abs(g[0]) == 1 for g in sharp.generators)


def _free_summand(theta: MonoidHom) -> bool:
    if not theta.is_injective_gp:
        return False
    imgs = {theta(g) for g in theta.source.generators}
    rest = [g for g in theta.target.generators if g not in imgs]
    # target generators must be θ(source) generators plus a complementary set
    if not all(i in theta.target.generators or not any(i) for i in imgs):
        return False
    span_img = [list(v) for v in theta.image_generators]
    r_img = rank_over(span_img, QQ) if span_img else 0
    r_rest = rank_over([list(g) for g in rest], QQ) if rest else 0
    both = span_img + [list(g) for g in rest]
    r_all = rank_over(both, QQ) if both else 0
    if r_all != r_img + r_rest:
        return False
    lb = lattice_basis(both, theta.target.ambient_rank)
    parts = lattice_basis(span_img, theta.target.ambient_rank) + lattice_basis(rest, theta.target.ambient_rank)
    return len(lb) == len(parts) and LatticeQuotient(lb, parts, theta.target.ambient_rank).group.is_zero


def _blocks(theta: MonoidHom) -> list[tuple[list[int], list[int]]]:
    """Split θ as a product of maps on disjoint coordinate blocks, if possible."""
    ds, dt = theta.source.ambient_rank, theta.target.ambient_rank
    parent = list(range(ds + dt))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        parent[find(a)] = find(b)

    for i in range(dt):
        for j in range(ds):
            if theta.matrix[i][j]:
                union(ds + i, j)
    for g in theta.source.generators:
        supp = [j for j in range(ds) if g[j]]
        for a in supp[1:]:
            union(supp[0], a)
    for g in theta.target.generators:
        supp = [ds + i for i in range(dt) if g[i]]
        for a in supp[1:]:
            union(supp[0], a)
    comps: dict[int, tuple[list[int], list[int]]] = {}
    for x in range(ds + dt):
        src, tgt = comps.setdefault(find(x), ([], []))
        (src if x < ds else tgt).append(x if x < ds else x - ds)
    return list(comps.values())


def _restrict(m: AffineMonoid, coords: list[int]) -> AffineMonoid:
    gens = {tuple(g[c] for c in coords) for g in m.generators}
    return AffineMonoid(len(coords), [g for g in gens if any(g)])


def is_integral(theta: MonoidHom, box: int = 3, qmax: int = 1) -> TriState:
    """Bounded integrality test.

    Yes from certificates (valuative source, free summand, products of
    integral maps), No from a graded Tor_1 witness, Unknown(box) otherwise.
    """
    blocks = _blocks(theta)
    if len(blocks) > 1:
        parts = []
        for src, tgt in blocks:
            s, t = _restrict(theta.source, src), _restrict(theta.target, tgt)
            parts.append(is_integral(MonoidHom(s, t, [[theta.matrix[i][j] for j in src] for i in tgt]), box, qmax))
        if all(p.is_yes for p in parts):
            return TriState.yes("product of integral maps")
        bad = next((p for p in parts if p.is_no), None)
        if bad is not None:
            return TriState.no(f"a factor is not integral: {bad.evidence}")
        return TriState.unknown(box, "a factor is undecided")
    if _is_valuative_source(theta.source):
        return TriState.yes("source is valuative")
    if _free_summand(theta):
        return TriState.yes("source maps onto a free summand")
    if theta.source.is_sharp:
        from .bar import tor1_witness

        w = tor1_witness(theta, box)
        if w is not None:
            return TriState.no(f"Tor_1 != 0 at degree {list(w)}")
    return TriState.unknown(box, "no certificate and no Tor_1 witness")


@dataclass
class AmalgamatedSum:
    monoid: AffineMonoid
    quotient: LatticeQuotient
    dim_m: int
    dim_n: int
    caveat: bool

    def from_m(self, v: Sequence[int]) -> Vector:
        return self.quotient.project(list(v) + [0] * self.dim_n)

    def from_n(self, v: Sequence[int]) -> Vector:
        return self.quotient.project([0] * self.dim_m + list(v))


def amalgamated_sum(theta: MonoidHom, phi: MonoidHom, check_integral: bool = True) -> AmalgamatedSum:
    """Integralized pushout M ⊕_P N embedded in a lattice."""
    if theta.source != phi.source:
        raise ValueError("maps must share a source")
    m, n = theta.target, phi.target
    dm, dn = m.ambient_rank, n.ambient_rank
    l_gens = [list(b) + [0] * dn for b in m.group_basis] + [[0] * dm + list(b) for b in n.group_basis]
    k_gens = [list(theta(p)) + [-x for x in phi(p)] for p in theta.source.group_basis]
    if not l_gens:
        l_gens = []
    q = LatticeQuotient(l_gens, k_gens, dm + dn)
    if q.group.torsion:
        raise UnsupportedMonoidError(f"pushout group has torsion {list(q.group.torsion)}")
    gens = [q.project(list(g) + [0] * dn) for g in m.generators] + [q.project([0] * dm + list(g)) for g in n.generators]
    mon = AffineMonoid(q.group.free_rank, gens)
    caveat = True
    if check_integral:
        caveat = not (is_integral(theta).is_yes and is_integral(phi).is_yes)
    return AmalgamatedSum(mon, q, dm, dn, caveat)


def group_coordinates(m: AffineMonoid) -> tuple[AffineMonoid, Callable[[Sequence[int]], Vector]]:
    """Re-embed M in Z^{rank M^gp} via the chosen basis of M^gp."""
    basis = m.group_basis
    mat = columns_to_matrix(basis, m.ambient_rank) if basis else []
    r = len(basis)

    def coords(v: Sequence[int]) -> Vector:
        if r == 0:
            if any(v):
                raise ValueError(f"{list(v)} not in M^gp")
            return ()
        x = solve_integer(mat, list(v), r)
        if x is None:
            raise ValueError(f"{list(v)} not in M^gp")
        return tuple(x)

    return AffineMonoid(r, [coords(g) for g in m.generators]), coords


def normalize(theta: MonoidHom) -> MonoidHom:
    """The same map with source and target re-embedded in their own group
    completions, so every ambient lattice equals the group completion."""
    src, to_src = group_coordinates(theta.source)
    tgt, to_tgt = group_coordinates(theta.target)
    basis = theta.source.group_basis
    cols = [to_tgt(theta(b)) for b in basis]
    mat = [[c[i] for c in cols] for i in range(tgt.ambient_rank)]
    return MonoidHom(src, tgt, mat, check=False)
