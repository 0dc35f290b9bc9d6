"""Rational polyhedral cones: duals, faces, and Hilbert bases.

Everything is exact.  A cone is stored by generators in Z^d; its dual is
described by the integer basis of span(σ)^⊥ (lineality of σ^∨) together with
the facet normals of σ inside its own span.
"""

from __future__ import annotations

import itertools
from functools import cached_property
from typing import Sequence

from .abelian import (
    LatticeQuotient,
    columns_to_matrix,
    integer_kernel,
    matvec,
    primitive,
    rational_inverse,
    rank_over,
    rational_kernel,
    rational_solve,
    saturation_basis,
    smith_normal_form,
    unimodular_inverse,
    QQ,
)

MAX_HILBERT_DIM = 4


class UnsupportedError(ValueError):
    """Input is outside the supported fragment."""


class ScaleError(ValueError):
    """Input exceeds desk-scale guards."""


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _dedupe(vectors) -> list[list[int]]:
    seen, out = set(), []
    for v in vectors:
        t = tuple(v)
        if t not in seen:
            seen.add(t)
            out.append(list(t))
    return out


class Cone:
    """The rational cone spanned by ``gens`` in Q^dim."""

    def __init__(self, gens: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        self.gens = _dedupe(primitive(g) for g in gens if any(g))
        for g in self.gens:
            if len(g) != dim:
                raise ValueError(f"generator {g} has wrong length (expected {dim})")

    @cached_property
    def span_basis(self) -> list[list[int]]:
        """Z-basis of span(σ) ∩ Z^dim."""
        return saturation_basis(self.gens, self.dim) if self.gens else []

    @property
    def span_dim(self) -> int:
        return len(self.span_basis)

    @cached_property
    def perp_basis(self) -> list[list[int]]:
        """Z-basis of span(σ)^⊥ ∩ Z^dim."""
        if not self.gens:
            return [[int(i == j) for j in range(self.dim)] for i in range(self.dim)]
        return integer_kernel(self.gens, self.dim)

    @cached_property
    def facet_normals(self) -> list[list[int]]:
        """Primitive integer extreme rays of σ^∨ ∩ span(σ)."""
        k = self.span_dim
        if k == 0:
            return []
        basis = self.span_basis
        # f = Σ c_j basis_j; constraint rows are (g · basis_j)_j
        rows = [[dot(g, b) for b in basis] for g in self.gens]
        out = []
        seen = set()
        for subset in itertools.combinations(range(len(rows)), k - 1):
            sub = [rows[i] for i in subset]
            if sub and rank_over(sub, QQ) != k - 1:
                continue
            ker = rational_kernel(sub, k)
            if len(ker) != 1:
                continue
            c = ker[0]
            vals = [sum(x * y for x, y in zip(r, c)) for r in rows]
            if all(v >= 0 for v in vals):
                sign = 1
            elif all(v <= 0 for v in vals):
                sign = -1
            else:
                continue
            f = primitive([sign * sum(c[j] * basis[j][i] for j in range(k)) for i in range(self.dim)])
            if tuple(f) not in seen and any(f):
                seen.add(tuple(f))
                out.append(f)
        out.sort()
        return out

    def dual_generators(self) -> list[list[int]]:
        """Cone generators of σ^∨ in Q^dim."""
        out = []
        for p in self.perp_basis:
            out.append(list(p))
            out.append([-x for x in p])
        return out + [list(f) for f in self.facet_normals]

    def contains(self, x: Sequence) -> bool:
        """Rational membership x ∈ σ."""
        if any(dot(p, x) for p in self.perp_basis):
            return False
        return all(dot(f, x) >= 0 for f in self.facet_normals)

    def in_lineality(self, x: Sequence) -> bool:
        return self.contains(x) and all(dot(f, x) == 0 for f in self.facet_normals)

    @cached_property
    def lineality_gens(self) -> list[list[int]]:
        return [g for g in self.gens if self.in_lineality(g)]

    @property
    def is_pointed(self) -> bool:
        return not self.lineality_gens

    @cached_property
    def grading(self) -> list[int]:
        """Integer functional vanishing on the lineality space and positive on
        every other generator."""
        w = [0] * self.dim
        for f in self.facet_normals:
            w = [a + b for a, b in zip(w, f)]
        return w

    def rays(self) -> list[list[int]]:
        """Extreme rays of a pointed cone."""
        if not self.is_pointed:
            raise UnsupportedError("cone is not pointed")
        out = []
        for g in self.gens:
            tight = [f for f in self.facet_normals if dot(f, g) == 0]
            if self.span_dim == 1 or (tight and rank_over(tight, QQ) == self.span_dim - 1):
                out.append(g)
        return sorted(out)

    def face_containing(self, x: Sequence[int]) -> "Cone":
        """Smallest face of σ containing the point x ∈ σ."""
        tight = [f for f in self.facet_normals if dot(f, x) == 0]
        return Cone([g for g in self.gens if all(dot(f, g) == 0 for f in tight)], self.dim)

    def faces(self) -> list["Cone"]:
        """All faces (including σ and the minimal face), deduplicated."""
        normals = self.facet_normals
        seen, out = set(), []
        for r in range(len(normals) + 1):
            for sub in itertools.combinations(normals, r):
                gens = [g for g in self.gens if all(dot(f, g) == 0 for f in sub)]
                key = tuple(sorted(map(tuple, gens)))
                if key not in seen:
                    seen.add(key)
                    out.append(Cone(gens, self.dim))
        return out

    def __eq__(self, other):
        return isinstance(other, Cone) and self.dim == other.dim and self.contains_cone(other) and other.contains_cone(self)

    def __hash__(self):
        return hash((self.dim, tuple(sorted(map(tuple, self.facet_normals)))))

    def contains_cone(self, other: "Cone") -> bool:
        return all(self.contains(g) for g in other.gens)

    def intersect(self, other: "Cone") -> "Cone":
        """Intersection of two cones; exact for faces of a common fan."""
        gens = [g for g in self.gens if other.contains(g)] + [g for g in other.gens if self.contains(g)]
        return Cone(gens, self.dim)

    def __repr__(self):
        return f"Cone({self.gens}, dim={self.dim})"


# --------------------------------------------------------------------------
# lattice points


def _to_coords(vectors, lattice_basis, dim):
    """Rational coordinates of vectors in the given lattice basis, scaled to
    primitive integers."""
    b = columns_to_matrix(lattice_basis, dim)
    out = []
    for v in vectors:
        c = rational_solve(b, v)
        if c is None:
            raise ValueError(f"{v} is not in the span of the lattice")
        out.append(primitive(c))
    return out


def _from_coords(c, lattice_basis, dim):
    return [sum(c[j] * lattice_basis[j][i] for j in range(len(c))) for i in range(dim)]


def _parallelepiped_points(basis: list[list[int]], k: int) -> list[list[int]]:
    """Integer points of the half-open parallelepiped of k independent
    vectors in Z^k."""
    b = columns_to_matrix(basis, k)
    snf = smith_normal_form(b)
    uinv = unimodular_inverse(snf.U)
    diag = snf.diagonal
    pts = []
    binv = rational_inverse(b)
    for y in itertools.product(*(range(d) for d in diag)):
        x = matvec(uinv, list(y))
        lam = [sum(binv[i][j] * x[j] for j in range(k)) for i in range(k)]
        frac = [l - (l.numerator // l.denominator) for l in lam]
        p = [sum(frac[j] * basis[j][i] for j in range(k)) for i in range(k)]
        pts.append([int(v) for v in p])
    return pts


def _hilbert_full(gens: list[list[int]], k: int) -> list[list[int]]:
    """Hilbert basis of the pointed full-dimensional cone of ``gens`` in Z^k."""
    cone = Cone(gens, k)
    rays = cone.rays()
    cands = {tuple(r) for r in rays}
    for sub in itertools.combinations(rays, k):
        if rank_over([list(s) for s in sub], QQ) < k:
            continue
        for p in _parallelepiped_points([list(s) for s in sub], k):
            if any(p):
                cands.add(tuple(p))
    normals = cone.facet_normals
    w = cone.grading
    cand = sorted(cands, key=lambda c: (dot(w, c), c))
    basis = []
    for x in cand:
        reducible = False
        for y in basis:
            diff = [a - b for a, b in zip(x, y)]
            if any(diff) and all(dot(f, diff) >= 0 for f in normals):
                reducible = True
                break
        if not reducible:
            basis.append(list(x))
    return sorted(basis)


def hilbert_basis(
    rays: Sequence[Sequence[int]],
    dim: int,
    lattice: Sequence[Sequence[int]] | None = None,
) -> list[list[int]]:
    """Minimal generating set of cone(rays) ∩ L for a pointed cone.

    ``lattice`` is a basis of L (default Z^dim).  Raises UnsupportedError on a
    non-pointed cone and ScaleError when the lattice rank exceeds 4.
    """
    lb = [list(v) for v in lattice] if lattice is not None else [
        [int(i == j) for j in range(dim)] for i in range(dim)
    ]
    r = len(lb)
    if r > MAX_HILBERT_DIM:
        raise ScaleError(f"lattice rank {r} exceeds the desk-scale limit {MAX_HILBERT_DIM}")
    cone = Cone(rays, dim)
    if not cone.is_pointed:
        raise UnsupportedError("hilbert_basis needs a pointed cone")
    if not cone.gens:
        return []
    coords = _to_coords(cone.gens, lb, dim)
    # restrict to the saturated span inside Z^r
    span = saturation_basis(coords, r)
    k = len(span)
    sub = _to_coords(coords, span, r)
    hb = _hilbert_full(sub, k)
    return sorted(_from_coords(_from_coords(h, span, r), lb, dim) for h in hb)


def lattice_cone_generators(
    rays: Sequence[Sequence[int]],
    dim: int,
    lattice: Sequence[Sequence[int]] | None = None,
) -> list[list[int]]:
    """Monoid generators of cone(rays) ∩ L, allowing a lineality space.

    The output is ± a basis of the lineality lattice followed by lifts of the
    Hilbert basis of the pointed quotient.
    """
    lb = [list(v) for v in lattice] if lattice is not None else [
        [int(i == j) for j in range(dim)] for i in range(dim)
    ]
    r = len(lb)
    cone = Cone(rays, dim)
    if not cone.gens:
        return []
    coords = _to_coords(cone.gens, lb, dim)
    c2 = Cone(coords, r)
    lin = saturation_basis(c2.lineality_gens, r) if c2.lineality_gens else []
    if not lin:
        hb = hilbert_basis(coords, r)
        return sorted(_from_coords(h, lb, dim) for h in hb)
    q = LatticeQuotient([[int(i == j) for j in range(r)] for i in range(r)], lin, r)
    proj = [list(q.project(g)) for g in coords]
    hb = hilbert_basis(proj, len(proj[0]))
    out = []
    for v in lin:
        out.append(list(v))
        out.append([-x for x in v])
    out += [q.lift(h) for h in hb]
    return _dedupe(_from_coords(v, lb, dim) for v in out)


def dual_monoid_generators(gens: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Generators of σ^∨ ∩ Z^dim as a monoid."""
    cone = Cone(gens, dim)
    return lattice_cone_generators(cone.dual_generators(), dim)
