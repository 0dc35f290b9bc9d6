"""Bar constructions and (log) Hochschild homology of pre-log rings.

Homotopy groups are returned per multidegree as :class:`FgAbGroup` values
in a :class:`HomotopyTable`.  Over a field the groups are free of the
dimension over k.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Sequence

from .abelian import (
    QQ,
    ZZ,
    ChainComplex,
    Coefficients,
    FgAbGroup,
    IntegerSolver,
    TRIVIAL,
    _graded_tensor,
    cokernel_structure,
    columns_to_matrix,
    complex_homology,
    group_homology,
    integer_kernel,
    rank_over,
    smith_normal_form,
    zeros,
)
from .monoid import AffineMonoid, MonoidHom, Vector, normalize
from .polyhedra import ScaleError, UnsupportedError
from .prelog import (
    PreLogMap,
    PreLogRing,
    UnsupportedShapeError,
    _divisors,
    classify_map,
    decompose,
    kahler_differentials,
)
from .repletion import replete_bar_level

MAX_CELLS = 20000


def _add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


# --------------------------------------------------------------------------
# tables


@dataclass
class HomotopyTable:
    """π_n at each multidegree; ``pi[n][degree]`` is an FgAbGroup."""

    pi: dict[int, dict[Vector, FgAbGroup]] = field(default_factory=dict)

    def set(self, n: int, degree: Sequence[int], g: FgAbGroup) -> None:
        self.pi.setdefault(n, {})[tuple(degree)] = g

    def get(self, n: int, degree: Sequence[int]) -> FgAbGroup:
        return self.pi.get(n, {}).get(tuple(degree), TRIVIAL)

    def degrees(self) -> list[Vector]:
        return sorted({d for row in self.pi.values() for d in row})

    def to_json(self) -> dict:
        return {
            "pi": {
                str(n): {str(list(d)): g.to_json() for d, g in sorted(row.items())}
                for n, row in sorted(self.pi.items())
            }
        }

    @classmethod
    def from_json(cls, data: dict) -> "HomotopyTable":
        t = cls()
        for n, row in data["pi"].items():
            for d, g in row.items():
                t.set(int(n), tuple(int(x) for x in d.strip("[]").split(",") if x.strip()), FgAbGroup.from_json(g))
        return t

    def __eq__(self, other):
        if not isinstance(other, HomotopyTable):
            return NotImplemented
        keys = {(n, d) for n, row in self.pi.items() for d in row} | {(n, d) for n, row in other.pi.items() for d in row}
        return all(self.get(n, d) == other.get(n, d) for n, d in keys)


def _table(qmax: int, degrees, fn) -> HomotopyTable:
    t = HomotopyTable()
    for m in degrees:
        vals = fn(tuple(m))
        for n in range(qmax + 1):
            t.set(n, m, vals[n])
    return t


def _bg(g: FgAbGroup, top: int, k: Coefficients) -> list[FgAbGroup]:
    return [group_homology(g, q, k) for q in range(top + 1)]


# --------------------------------------------------------------------------
# cyclic bar complex of a sharp monoid, relative to P, modulo a monomial ideal


class CyclicComplex:
    """Normalized complex of k[B^cy_P(S)]/I at a fixed degree m.

    Cells are classes of tuples (h_0, ..., h_q) in S∖I with Σ h = m, modulo
    moving θ(p) between positions; classes with a representative having some
    h_i = 0 (i ≥ 1) are degenerate and dropped.
    """

    def __init__(self, s: AffineMonoid, m: Vector, top: int, moves: Sequence[Vector] = (), ideal: Sequence[Vector] = ()):
        if not s.is_sharp:
            raise UnsupportedShapeError("cyclic complex needs a sharp monoid")
        self.s = s
        self.m = tuple(m)
        self.moves = [tuple(v) for v in moves if any(v)]
        self.ideal = [tuple(i) for i in ideal]
        self.zero = tuple(0 for _ in m)
        self.top = top
        below = _divisors(s, self.m)
        self.below = set(below)
        self.divs = [d for d in below if not self._in_ideal(d)]
        self.dset = set(self.divs)
        self.levels: list[list[tuple]] = []
        self.index: list[dict[tuple, int]] = []
        self._cls: list[dict[tuple, tuple]] = []
        for q in range(top + 2):
            self._build_level(q)
        self.complex = self._boundaries()

    def _in_ideal(self, v) -> bool:
        return any(self.s.contains(_sub(v, i), bound=10**6) for i in self.ideal)

    def _tuples(self, q: int) -> list[tuple]:
        out = []
        dset = self.dset

        def rec(prefix, rem):
            if len(prefix) == q:
                if rem in dset:
                    out.append(tuple(prefix) + (rem,))
                return
            for d in self.divs:
                r = _sub(rem, d)
                if r in self.below:
                    prefix.append(d)
                    rec(prefix, r)
                    prefix.pop()

        rec([], self.m)
        if len(out) > MAX_CELLS:
            raise ScaleError(f"{len(out)} cells at level {q} exceed the limit {MAX_CELLS}")
        return out

    def _build_level(self, q: int) -> None:
        cells = self._tuples(q)
        parent = {c: c for c in cells}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        if self.moves:
            for c in cells:
                for i in range(q + 1):
                    for j in range(q + 1):
                        if i == j:
                            continue
                        for v in self.moves:
                            hi = _sub(c[i], v)
                            if hi in self.dset:
                                d = list(c)
                                d[i] = hi
                                d[j] = _add(c[j], v)
                                d = tuple(d)
                                if d in parent:
                                    a, b = find(c), find(d)
                                    if a != b:
                                        parent[max(a, b)] = min(a, b)
        classes: dict[tuple, list[tuple]] = {}
        for c in cells:
            classes.setdefault(find(c), []).append(c)
        rep = {}
        live = []
        for root, members in classes.items():
            degenerate = any(self.zero in c[1:] for c in members)
            key = min(members)
            for c in members:
                rep[c] = None if degenerate else key
            if not degenerate:
                live.append(key)
        live.sort()
        self.levels.append(live)
        self.index.append({c: i for i, c in enumerate(live)})
        self._cls.append(rep)

    def cell_of(self, h: tuple) -> int | None:
        """Index of the class of a tuple at its level, or None if zero."""
        q = len(h) - 1
        if any(x not in self.dset for x in h):
            return None
        r = self._cls[q].get(h)
        if r is None:
            return None
        return self.index[q][r]

    @staticmethod
    def face(i: int, h: tuple) -> tuple:
        q = len(h) - 1
        if i < q:
            return h[:i] + (_add(h[i], h[i + 1]),) + h[i + 2:]
        return (_add(h[q], h[0]),) + h[1:q]

    def boundary_of(self, chain: dict[tuple, int]) -> dict[int, int]:
        out: dict[int, int] = {}
        for h, c in chain.items():
            q = len(h) - 1
            for i in range(q + 1):
                j = self.cell_of(self.face(i, h))
                if j is not None:
                    out[j] = out.get(j, 0) + (-c if i % 2 else c)
        return {j: c for j, c in out.items() if c}

    def _boundaries(self) -> ChainComplex:
        mats = []
        for q in range(1, self.top + 2):
            mat = zeros(len(self.levels[q - 1]), len(self.levels[q]))
            for col, h in enumerate(self.levels[q]):
                for j, c in self.boundary_of({h: 1}).items():
                    mat[j][col] += c
            mats.append(mat)
        return ChainComplex(tuple(len(lv) for lv in self.levels), tuple(mats))

    def homology(self, k: Coefficients) -> list[FgAbGroup]:
        return [complex_homology(self.complex, q, k, check=False) for q in range(self.top + 1)]

    def vector(self, chain: dict[tuple, int]) -> list[int]:
        """Coordinates of a chain of q-tuples in the normalized basis."""
        q = len(next(iter(chain))) - 1
        v = [0] * len(self.levels[q])
        for h, c in chain.items():
            j = self.cell_of(h)
            if j is not None:
                v[j] += c
        return v


def _sharp_hh(s: AffineMonoid, m: Vector, top: int, k: Coefficients, ideal=(), moves=()) -> list[FgAbGroup]:
    if not s.contains(m, bound=10**6):
        return [TRIVIAL] * (top + 1)
    return CyclicComplex(s, m, top, moves, ideal).homology(k)


def cyclic_bar_homology(
    theta: MonoidHom,
    qmax: int,
    degrees: Iterable[Sequence[int]],
    k: Coefficients = QQ,
    ideal: Sequence[Sequence[int]] = (),
) -> HomotopyTable:
    """π_* k[B^cy_P(M)]/I = HH(k[M]/I over k[P]) at the given degrees."""
    k = Coefficients.parse(k)
    m_ = theta.target
    moves = [theta(g) for g in theta.source.generators]
    if m_.is_sharp:
        if ideal and any(any(v) for v in moves):
            raise UnsupportedShapeError("relative Hochschild homology with a monomial ideal")
        return _table(qmax, degrees, lambda m: _sharp_hh(m_, m, qmax, k, ideal, moves))
    if m_.is_group:
        g = theta.cokernel
        return _table(qmax, degrees, lambda m: _bg(g, qmax, k) if m_.contains(m) else [TRIVIAL] * (qmax + 1))
    if any(any(v) for v in moves):
        raise UnsupportedShapeError("relative cyclic bar construction for a monoid with units")
    q = m_.unit_quotient
    if q.group.torsion:
        raise UnsupportedShapeError("M^gp/M* has torsion")
    units = FgAbGroup(len(m_.unit_basis))
    sharp = m_.sharp_part
    sharp_ideal = [tuple(q.project(i)) for i in ideal]

    def at(m):
        if not m_.contains(m):
            return [TRIVIAL] * (qmax + 1)
        s = tuple(q.project(m))
        return _graded_tensor(_bg(units, qmax, k), _sharp_hh(sharp, s, qmax, k, sharp_ideal), qmax)

    return _table(qmax, degrees, at)


# --------------------------------------------------------------------------
# replete bar construction


def replete_bar_homology(theta: MonoidHom, qmax: int, degrees: Iterable[Sequence[int]], k: Coefficients = QQ) -> HomotopyTable:
    """π_q k[B^rep_P(M)] at m ∈ M is H_q(B(M^gp/θP^gp); k)."""
    k = Coefficients.parse(k)
    g = theta.cokernel
    vals = _bg(g, qmax, k)
    zero = [TRIVIAL] * (qmax + 1)
    return _table(qmax, degrees, lambda m: vals if theta.target.contains(m) else zero)


def moore_complex(theta: MonoidHom, top: int, window: int = 6) -> ChainComplex:
    """Normalized Moore complex of one degree of k[B^rep_P(M)].

    The level set {m} × G^q is built from the simplicial structure of
    :class:`RepleteBarLevel`.  For infinite G = Z^r ⊕ T the cells are
    restricted to the submonoid N^r ⊕ T with total free weight ≤ window,
    whose low homology agrees with that of BG.
    """
    lv = [replete_bar_level(theta, q) for q in range(top + 2)]
    quot = lv[0].quotient
    g = quot.group
    if g.free_rank > 2:
        raise ScaleError("Moore oracle supports free rank at most 2")
    tors = g.torsion
    nt = len(tors)
    zero = quot.zero()
    elems = []
    for t in itertools.product(*(range(d) for d in tors)):
        for n in itertools.product(range(window + 1), repeat=g.free_rank):
            if sum(n) <= window:
                e = tuple(t) + tuple(n)
                if e != zero:
                    elems.append(e)

    def weight(cell):
        return sum(sum(e[nt:]) for e in cell)

    m0 = tuple(0 for _ in range(theta.target.ambient_rank))
    levels = []
    for q in range(top + 2):
        cells = [c for c in itertools.product(elems, repeat=q) if weight(c) <= window]
        if len(cells) > MAX_CELLS:
            raise ScaleError("Moore oracle window too large")
        levels.append(cells)
    index = [{c: i for i, c in enumerate(cells)} for cells in levels]
    mats = []
    for q in range(1, top + 2):
        mat = zeros(len(levels[q - 1]), len(levels[q]))
        for col, cell in enumerate(levels[q]):
            for i in range(q + 1):
                _, face = lv[q].face(i, (m0, cell))
                if zero in face:
                    continue
                mat[index[q - 1][face]][col] += -1 if i % 2 else 1
        mats.append(mat)
    return ChainComplex(tuple(len(c) for c in levels), tuple(mats))


def moore_homology(theta: MonoidHom, qmax: int, k: Coefficients = QQ, window: int = 6) -> list[FgAbGroup]:
    cx = moore_complex(theta, qmax, window)
    return [complex_homology(cx, q, Coefficients.parse(k)) for q in range(qmax + 1)]


# --------------------------------------------------------------------------
# log Hochschild homology of pre-log rings


def loghh_homology(f: PreLogMap, qmax: int, degrees: Iterable[Sequence[int]]) -> HomotopyTable:
    """π_* logHH(A/R) per degree.

    The target splits into log blocks (α onto the block), plain blocks and
    base blocks; then logHH = k[B^rep_P(M_log)] ⊗ HH(k[U ⊕ S]/I) and the
    base blocks contribute only in degree 0.
    """
    k = f.coeff
    dec = decompose(f)
    u_rank, sharp, q = dec.plain_split
    g = dec.log_group.group + FgAbGroup(u_rank)
    bg = _bg(g, qmax, k)
    sharp_ideal = [tuple(q.project(i)) for i in dec.plain_ideal]
    zero = [TRIVIAL] * (qmax + 1)

    def at(m):
        if not dec.contains(m, ideal=False):
            return zero
        _, pl, _ = dec.split(m)
        s = tuple(q.project(pl))
        return _graded_tensor(bg, _sharp_hh(sharp, s, qmax, k, sharp_ideal), qmax)

    return _table(qmax, degrees, at)


def hochschild_homology(f: PreLogMap, qmax: int, degrees: Iterable[Sequence[int]]) -> HomotopyTable:
    """HH of the underlying rings, ignoring pre-log structures."""
    return cyclic_bar_homology(f.monoid_map, qmax, degrees, f.coeff, f.target.ideal)


@dataclass
class ComparisonReport:
    passed: bool
    rows: list[dict]
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "rows": self.rows, "notes": self.notes}


def omega_pi1_check(f: PreLogMap, degrees: Iterable[Sequence[int]]) -> ComparisonReport:
    """Ω¹ (from its presentation) against π_1 logHH, degree by degree."""
    degrees = [tuple(m) for m in degrees]
    omega = kahler_differentials(f)
    table = loghh_homology(f, 1, degrees)
    rows = []
    ok = True
    for m in degrees:
        a, b = omega.at(m, f.coeff), table.get(1, m)
        rows.append({"degree": list(m), "omega1": a.to_json(), "pi1": b.to_json(), "equal": a == b})
        ok &= a == b
    return ComparisonReport(ok, rows)


# --------------------------------------------------------------------------
# graded Tor over k[P]


def _positive_elements(theta: MonoidHom, m: Vector, ok) -> list[Vector]:
    """p ∈ P∖0 with ok(m − θ(p)), by breadth-first search from generators."""
    p = theta.source
    zero = tuple(0 for _ in range(p.ambient_rank))
    seen = {zero}
    frontier = [zero]
    out = []
    while frontier:
        nxt = []
        for v in frontier:
            for g in p.generators:
                w = _add(v, g)
                if w in seen:
                    continue
                seen.add(w)
                if ok(_sub(m, theta(w))):
                    out.append(w)
                    nxt.append(w)
        frontier = nxt
        if len(seen) > MAX_CELLS:
            raise ScaleError("too many source elements below the degree")
    return sorted(out)


def tor_complex(theta: MonoidHom, m: Sequence[int], top: int, ideal: Sequence[Sequence[int]] = ()) -> ChainComplex:
    """Bar complex computing Tor^{k[P]}_*(k, k[M]/I) at degree m."""
    p, tgt = theta.source, theta.target
    if not p.is_sharp:
        raise UnsupportedShapeError("graded Tor needs a sharp source")
    for g in p.generators:
        if tgt.degree(theta(g)) <= 0:
            raise UnsupportedShapeError("θ must send source generators to positive degree")
    m = tuple(m)

    def nonzero(v):
        return tgt.contains(v, bound=10**6) and not any(tgt.contains(_sub(v, i), bound=10**6) for i in ideal)

    elems = _positive_elements(theta, m, lambda v: tgt.contains(v, bound=10**6))
    levels = []
    for q in range(top + 2):
        cells = []

        def rec(prefix, acc):
            if len(prefix) == q:
                n = _sub(m, acc)
                if nonzero(n):
                    cells.append(tuple(prefix))
                return
            for e in elems:
                a2 = _add(acc, theta(e))
                if tgt.contains(_sub(m, a2), bound=10**6):
                    prefix.append(e)
                    rec(prefix, a2)
                    prefix.pop()

        rec([], tuple(0 for _ in m))
        if len(cells) > MAX_CELLS:
            raise ScaleError("Tor complex too large")
        levels.append(cells)
    index = [{c: i for i, c in enumerate(cells)} for cells in levels]
    mats = []
    for q in range(1, top + 2):
        mat = zeros(len(levels[q - 1]), len(levels[q]))
        for col, cell in enumerate(levels[q]):
            for i in range(1, q):
                face = cell[: i - 1] + (_add(cell[i - 1], cell[i]),) + cell[i + 1:]
                mat[index[q - 1][face]][col] += -1 if i % 2 else 1
            face = cell[:-1]
            j = index[q - 1].get(face)
            if j is not None:
                mat[j][col] += -1 if q % 2 else 1
        mats.append(mat)
    return ChainComplex(tuple(len(c) for c in levels), tuple(mats))


def graded_tor(
    theta: MonoidHom,
    qmax: int,
    degrees: Iterable[Sequence[int]],
    k: Coefficients = QQ,
    ideal: Sequence[Sequence[int]] = (),
) -> HomotopyTable:
    k = Coefficients.parse(k)

    def at(m):
        cx = tor_complex(theta, m, qmax, ideal)
        return [complex_homology(cx, q, k, check=False) for q in range(qmax + 1)]

    return _table(qmax, degrees, at)


def tor1_witness(theta: MonoidHom, box: int = 3, k: Coefficients = QQ) -> Vector | None:
    """A degree with Tor_1^{k[P]}(k, k[M]) ≠ 0, searching grading ≤ box.

    For θ injective on group completions such a degree shows k[M] is not
    flat over k[P], hence θ is not integral.
    """
    if not theta.is_injective_gp or not theta.source.is_sharp:
        return None
    tgt = theta.target
    try:
        candidates = tgt.elements_of_degree_at_most(box)
    except (ScaleError, UnsupportedError):
        return None
    for m in sorted(candidates, key=lambda v: (tgt.degree(v), v)):
        try:
            cx = tor_complex(theta, m, 1)
        except (ScaleError, UnsupportedError):
            return None
        if not complex_homology(cx, 1, k, check=False).is_zero:
            return tuple(m)
    return None


# --------------------------------------------------------------------------
# HKR certification


def _shuffle_sign(positions: Sequence[int], n: int) -> int:
    """Sign of the shuffle placing the first block at ``positions``."""
    inv = 0
    pos = set(positions)
    seen_b = 0
    for i in range(n):
        if i in pos:
            inv += seen_b
        else:
            seen_b += 1
    return -1 if inv % 2 else 1


def shuffle(a: dict[tuple, int], b: dict[tuple, int], cyclic: bool = True) -> dict[tuple, int]:
    """Shuffle product of bar chains; with ``cyclic`` the 0th entries add."""
    out: dict[tuple, int] = {}
    for x, cx in a.items():
        for y, cy in b.items():
            xs, ys = (x[1:], y[1:]) if cyclic else (x, y)
            p, q = len(xs), len(ys)
            for pos in itertools.combinations(range(p + q), p):
                seq, ia, ib = [], 0, 0
                ps = set(pos)
                for i in range(p + q):
                    if i in ps:
                        seq.append(xs[ia])
                        ia += 1
                    else:
                        seq.append(ys[ib])
                        ib += 1
                head = (_add(x[0], y[0]),) if cyclic else ()
                key = head + tuple(seq)
                out[key] = out.get(key, 0) + _shuffle_sign(pos, p + q) * cx * cy
    return {k_: v for k_, v in out.items() if v}


def _bar_boundary(chain: dict[tuple, int], add, zero) -> dict[tuple, int]:
    """Boundary in the normalized bar complex of a group."""
    out: dict[tuple, int] = {}
    for c, coef in chain.items():
        q = len(c)
        faces = [c[1:]] + [c[: i] + (add(c[i], c[i + 1]),) + c[i + 2:] for i in range(q - 1)] + [c[:-1]]
        for s, face in enumerate(faces):
            if zero in face:
                continue
            out[face] = out.get(face, 0) + (-coef if s % 2 else coef)
    return {k_: v for k_, v in out.items() if v}


def certify_basis(cx: ChainComplex, q: int, chains: list[list[int]], k: Coefficients) -> tuple[bool, str]:
    """Do the given cycles form a basis of H_q(cx ⊗ k)?"""
    h = complex_homology(cx, q, k, check=False)
    n = cx.dim(q)
    out_mat = cx.boundary(q)
    for c in chains:
        if cx.dim(q - 1) and any(sum(out_mat[i][j] * c[j] for j in range(n)) for i in range(cx.dim(q - 1))):
            return False, "a chain is not a cycle"
    bcols = [[row[j] for row in cx.boundary(q + 1)] for j in range(cx.dim(q + 1))]
    if k.kind != "ZZ":
        rb = rank_over(columns_to_matrix(bcols, n), k) if bcols else 0
        both = bcols + chains
        rall = rank_over(columns_to_matrix(both, n), k) if both else 0
        ok = rall - rb == len(chains) == h.free_rank
        return ok, f"dim H = {h.free_rank}, independent images = {rall - rb}"
    if h.torsion or h.free_rank != len(chains):
        return False, f"H = {h}, {len(chains)} chains"
    if not chains:
        return True, "H = 0"
    z = integer_kernel(out_mat, n) if cx.dim(q - 1) else [[int(i == j) for j in range(n)] for i in range(n)]
    solver = IntegerSolver(columns_to_matrix(z, n), len(z))
    coords = []
    for v in bcols + chains:
        c = solver.solve(v)
        if c is None:
            return False, "a vector is not a cycle"
        coords.append(c)
    quotient = cokernel_structure(columns_to_matrix(coords, len(z)))
    return quotient.is_zero, f"Z/(B + chains) = {quotient}"


@dataclass
class HKRReport:
    passed: bool
    rows: list[dict]
    multiplicative: bool
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"passed": self.passed, "multiplicative": self.multiplicative, "rows": self.rows, "notes": self.notes}


def _free_coords(quot, v) -> tuple[int, ...]:
    t = quot.project(v)
    return tuple(t[i] for i in quot.free_pos)


def hkr_check(f: PreLogMap, qmax: int, degrees: Iterable[Sequence[int]], seed: int = 0) -> HKRReport:
    """Certify Φ: Ω^q → π_q logHH degree by degree.

    Φ(m·dlog g_1 ∧ ... ∧ dy_1 ∧ ...) is the shuffle product of the 1-chains
    [g_i] in B(G) and (s, e_j) in the cyclic bar complex of the plain part.
    The group factor is certified by pairing against cup products of
    coordinate cocycles, the plain factor by a basis check modulo boundaries,
    and the two are combined by Künneth.
    """
    k = f.coeff
    dec = decompose(f)
    u_rank, sharp, q = dec.plain_split
    if f.target.ideal:
        raise UnsupportedShapeError("hkr_check needs a smooth plain part (no ideal)")
    if len(sharp.generators) != sharp.ambient_rank:
        raise UnsupportedShapeError("hkr_check needs free plain directions")
    lq = dec.log_group
    g = lq.group
    r = g.free_rank + u_rank
    notes = list(dec.notes)
    # basis of G' = G ⊕ Z^u in canonical tuples
    nt = len(g.torsion)

    dimg = nt + r
    zero_g = tuple(0 for _ in range(dimg))
    basis_g = [tuple(int(j == nt + i) for j in range(dimg)) for i in range(r)]

    def gadd_full(x, y):
        return tuple(((a + b) % g.torsion[i]) if i < nt else a + b for i, (a, b) in enumerate(zip(x, y)))

    def g_chain(idx):
        ch = {(): 1}
        for i in idx:
            ch = shuffle(ch, {(basis_g[i],): 1}, cyclic=False)
        return ch

    def cup(js, cell):
        out = 1
        for j, e in zip(js, cell):
            out *= e[nt + j]
        return out

    g_ok: dict[int, bool] = {}
    rng = random.Random(seed)
    for a in range(qmax + 1):
        subsets = list(itertools.combinations(range(r), a))
        h = group_homology(g + FgAbGroup(u_rank), a, k)
        ok = h.free_rank == len(subsets) and not h.torsion
        pairing = []
        for idx in subsets:
            ch = g_chain(idx)
            if _bar_boundary(ch, gadd_full, zero_g):
                ok = False
                notes.append(f"shuffle chain {idx} is not a cycle")
            pairing.append([sum(c * cup(js, cell) for cell, c in ch.items()) for js in subsets])
        if subsets:
            snf = smith_normal_form(pairing)
            diag = snf.diagonal
            if k.kind == "ZZ":
                ok &= len(diag) == len(subsets) and all(abs(d) == 1 for d in diag)
            else:
                ok &= rank_over(pairing, k) == len(subsets)
        # cocycle condition of the cup products on sampled cells
        for js in subsets[:4]:
            for _ in range(5):
                cell = tuple(tuple(rng.randint(-3, 3) if i >= nt else 0 for i in range(dimg)) for _ in range(a + 1))
                terms = [cup(js, cell[1:])]
                for i in range(1, a + 1):
                    merged = cell[: i - 1] + (gadd_full(cell[i - 1], cell[i]),) + cell[i + 1:]
                    terms.append((-1) ** i * cup(js, merged))
                terms.append((-1) ** (a + 1) * cup(js, cell[:-1]))
                if sum(terms):
                    ok = False
                    notes.append(f"cup product {js} fails the cocycle identity")
        g_ok[a] = ok
    # Kähler ranks in the plain factor: dy_j needs the j-th exponent ≥ 1
    if sharp.ambient_rank:
        sgens = list(sharp.generators)
        solver = IntegerSolver(columns_to_matrix(sgens, sharp.ambient_rank), len(sgens))
    rows = []
    all_ok = True
    mult_ok = True
    for m in degrees:
        m = tuple(m)
        if not dec.contains(m):
            continue
        _, pl, _ = dec.split(m)
        s = tuple(q.project(pl))
        expo = solver.solve(list(s)) if sharp.ambient_rank else []
        supp = [j for j, e in enumerate(expo) if e > 0]
        cx = CyclicComplex(sharp, s, qmax) if sharp.ambient_rank else None
        s_ok: dict[int, bool] = {}
        for b in range(qmax + 1):
            if cx is None:
                s_ok[b] = True
                continue
            chains = []
            for ts in itertools.combinations(supp, b):
                base = s
                for t in ts:
                    base = _sub(base, sgens[t])
                ch = {(base,): 1}
                for t in ts:
                    ch = shuffle(ch, {(tuple(0 for _ in s), sgens[t]): 1})
                chains.append(cx.vector(ch))
            good, why = certify_basis(cx.complex, b, chains, k)
            s_ok[b] = good
            if not good:
                notes.append(f"plain factor at {list(s)}, degree {b}: {why}")
        for n in range(qmax + 1):
            rank_omega = sum(comb(r, a) * comb(len(supp), n - a) for a in range(n + 1))
            iso = all(g_ok[a] and s_ok[n - a] for a in range(n + 1))
            rows.append({"degree": list(m), "q": n, "omega_rank": rank_omega, "iso": iso})
            all_ok &= iso
        # multiplicativity on sampled basis pairs of the plain factor
        if cx is not None and len(supp) >= 1:
            zero_s = tuple(0 for _ in s)
            for _ in range(3):
                t1, t2 = rng.choice(supp), rng.choice(supp)
                lhs = shuffle(shuffle({(zero_s,): 1}, {(zero_s, sgens[t1]): 1}), {(zero_s, sgens[t2]): 1})
                rhs = shuffle({(zero_s,): 1}, shuffle({(zero_s, sgens[t1]): 1}, {(zero_s, sgens[t2]): 1}))
                swapped = shuffle({(zero_s, sgens[t2]): 1}, {(zero_s, sgens[t1]): 1})
                mult_ok &= lhs == rhs
                mult_ok &= {k_: -v for k_, v in swapped.items()} == shuffle({(zero_s, sgens[t1]): 1}, {(zero_s, sgens[t2]): 1})
    return HKRReport(all_ok, rows, mult_ok, notes)


# --------------------------------------------------------------------------
# base change and Künneth


def base_change_check(theta: MonoidHom, psi: MonoidHom, qmax: int, k: Coefficients = QQ) -> ComparisonReport:
    """B ⊗_A logHH(A/R) → logHH(B/R) for canonical R → A → B.

    With G_A = M^gp/P^gp and G_B = N^gp/P^gp the map in degree q is
    H_q(BG_A; k) → H_q(BG_B; k); for free G it is Λ^q of G_A ⊗ k → G_B ⊗ k.
    """
    from .monoid import is_integral

    k = Coefficients.parse(k)
    if psi.source != theta.target:
        raise ValueError("maps are not composable")
    notes = []
    flat = is_integral(psi)
    if not (flat.is_yes and psi.is_injective_gp):
        raise UnsupportedShapeError(f"flatness of B over A not certified ({flat})")
    notes.append(f"flatness: integral {flat}, injective on groups")
    qa = replete_bar_level(theta, 0).quotient
    qb = replete_bar_level(psi.compose(theta), 0).quotient
    ga, gb = qa.group, qb.group
    for gg in (ga, gb):
        if gg.torsion and (k.kind == "ZZ" or not all(k.is_unit(d) for d in gg.torsion)):
            raise UnsupportedShapeError("torsion in G not invertible in k")
    ra, rb = ga.free_rank, gb.free_rank
    cols = []
    for i in range(ra):
        t = [0] * (len(ga.torsion) + ra)
        t[len(ga.torsion) + i] = 1
        cols.append(list(_free_coords(qb, psi(qa.lift(t)))))
    mat = columns_to_matrix(cols, rb) if cols and rb else []
    rank = rank_over(mat, k) if mat else 0
    unimodular = True
    if k.kind == "ZZ" and ra == rb and ra:
        unimodular = all(abs(d) == 1 for d in smith_normal_form(mat).diagonal) and rank == ra
    rows = []
    ok = True
    for n in range(qmax + 1):
        da, db, dr = comb(ra, n), comb(rb, n), comb(rank, n)
        iso = da == db == dr and (unimodular or n == 0 or da == 0)
        rows.append({"q": n, "source_rank": da, "target_rank": db, "image_rank": dr, "iso": iso})
        ok &= iso
    cls = classify_map(PreLogMap.canonical(psi, k))
    notes.append(f"derived log étale: {cls.derived_log_etale}")
    return ComparisonReport(ok, rows, notes)


def direct_sum(x: PreLogRing, y: PreLogRing) -> PreLogRing:
    """The pre-log ring (k[M ⊕ M'], N ⊕ N') of X ×_k Y."""
    dm, dn = x.ring_monoid.ambient_rank, y.ring_monoid.ambient_rank
    pm, pn = x.prelog_monoid.ambient_rank, y.prelog_monoid.ambient_rank
    m = AffineMonoid(dm + dn, [tuple(g) + (0,) * dn for g in x.ring_monoid.generators] + [(0,) * dm + tuple(g) for g in y.ring_monoid.generators])
    n = AffineMonoid(pm + pn, [tuple(g) + (0,) * pn for g in x.prelog_monoid.generators] + [(0,) * pm + tuple(g) for g in y.prelog_monoid.generators])
    rows = [list(r) + [0] * pn for r in x.structure.matrix] + [[0] * pm + list(r) for r in y.structure.matrix]
    ideal = [tuple(i) + (0,) * dn for i in x.ideal] + [(0,) * dm + tuple(i) for i in y.ideal]
    return PreLogRing(x.coeff, m, n, MonoidHom(n, m, rows), ideal)


def kunneth_check(x: PreLogRing, y: PreLogRing, qmax: int, degrees: Iterable[tuple[Sequence[int], Sequence[int]]]) -> ComparisonReport:
    """logHH(X ×_k Y) against the Künneth formula from logHH(X), logHH(Y)."""
    xy = direct_sum(x, y)
    fx, fy, fxy = PreLogMap.over_point(x), PreLogMap.over_point(y), PreLogMap.over_point(xy)
    rows = []
    ok = True
    for mx, my in degrees:
        mx, my = tuple(mx), tuple(my)
        tx = loghh_homology(fx, qmax, [mx])
        ty = loghh_homology(fy, qmax, [my])
        txy = loghh_homology(fxy, qmax, [mx + my])
        expected = _graded_tensor([tx.get(n, mx) for n in range(qmax + 1)], [ty.get(n, my) for n in range(qmax + 1)], qmax)
        for n in range(qmax + 1):
            got = txy.get(n, mx + my)
            rows.append({"degree": [list(mx), list(my)], "q": n, "product": got.to_json(), "kunneth": expected[n].to_json()})
            ok &= got == expected[n]
    return ComparisonReport(ok, rows)
