"""Exact integer and finite-field linear algebra.

Smith normal form with transforms, finitely generated abelian groups in
invariant-factor form, homology of bounded complexes of free modules, and
homology of classifying spaces of f.g. abelian groups.

Matrices are plain lists of lists of Python ints (row-major).  Every routine
here is pure; inputs are never mutated.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Matrix = list[list[int]]


class MalformedComplexError(ValueError):
    pass


# --------------------------------------------------------------------------
# matrix helpers


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def shape(a: Sequence[Sequence[int]], rows: int | None = None) -> tuple[int, int]:
    r = len(a)
    return r, (len(a[0]) if r else 0)


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], inner: int | None = None) -> Matrix:
    """Product of two integer matrices; ``inner`` is needed when ``b`` has no rows."""
    n = len(b) if inner is None else inner
    cols = len(b[0]) if b else 0
    out = zeros(len(a), cols)
    for i, row in enumerate(a):
        orow = out[i]
        for k in range(n):
            aik = row[k]
            if aik:
                for j, bkj in enumerate(b[k]):
                    if bkj:
                        orow[j] += aik * bkj
    return out


def matvec(a: Sequence[Sequence[int]], v: Sequence[int]) -> list[int]:
    return [sum(x * y for x, y in zip(row, v)) for row in a]


def transpose(a: Sequence[Sequence[int]], cols: int | None = None) -> Matrix:
    if not a:
        return [[] for _ in range(cols or 0)]
    return [list(col) for col in zip(*a)]


def columns_to_matrix(cols: Sequence[Sequence[int]], dim: int) -> Matrix:
    """Stack column vectors into a ``dim`` x len(cols) matrix."""
    return [[c[i] for c in cols] for i in range(dim)]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant via Bareiss fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# --------------------------------------------------------------------------
# coefficients


@dataclass(frozen=True)
class Coefficients:
    """One of ZZ, QQ or GF(p)."""

    kind: str = "ZZ"
    p: int = 0

    def __post_init__(self):
        if self.kind not in ("ZZ", "QQ", "GF"):
            raise ValueError(f"unknown coefficient ring {self.kind!r}")
        if self.kind == "GF":
            if self.p < 2 or any(self.p % q == 0 for q in range(2, int(self.p**0.5) + 1)):
                raise ValueError(f"GF({self.p}): p must be prime")
        elif self.p:
            raise ValueError("p only allowed for GF")

    @classmethod
    def parse(cls, text: str | "Coefficients") -> "Coefficients":
        if isinstance(text, Coefficients):
            return text
        t = str(text).strip().upper()
        if t in ("ZZ", "Z", "INTEGERS"):
            return cls("ZZ")
        if t in ("QQ", "Q", "RATIONALS"):
            return cls("QQ")
        for prefix in ("GF", "F_", "F"):
            if t.startswith(prefix):
                return cls("GF", int(t[len(prefix):].strip("()")))
        raise ValueError(f"cannot parse coefficients {text!r}")

    @property
    def is_field(self) -> bool:
        return self.kind != "ZZ"

    @property
    def characteristic(self) -> int:
        return self.p if self.kind == "GF" else 0

    def is_unit(self, n: int) -> bool:
        """Whether the integer ``n`` is invertible in this ring."""
        if self.kind == "ZZ":
            return abs(n) == 1
        if self.kind == "QQ":
            return n != 0
        return n % self.p != 0

    def __str__(self) -> str:
        return f"GF({self.p})" if self.kind == "GF" else self.kind


ZZ = Coefficients("ZZ")
QQ = Coefficients("QQ")


def GF(p: int) -> Coefficients:
    return Coefficients("GF", p)


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SmithForm:
    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0))]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d)


def smith_normal_form(a: Sequence[Sequence[int]], cols: int | None = None) -> SmithForm:
    """Return unimodular U, V and diagonal D with U*A*V = D and d1 | d2 | ...

    Pivot rule: smallest nonzero absolute value in the active block, ties by
    (row, col).  ``cols`` is required when ``a`` has no rows.
    """
    m = len(a)
    n = len(a[0]) if m else (cols or 0)
    D = [list(r) for r in a]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):  # row_dst += c*row_src
        D[dst] = [x + c * y for x, y in zip(D[dst], D[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for row in D:
            row[dst] += c * row[src]
        for row in V:
            row[dst] += c * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    v = D[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            piv = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(t, i, -(D[i][t] // piv))
                    dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(t, j, -(D[t][j] // piv))
                    dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
    return SmithForm(U, D, V)


def invariant_factors(a: Sequence[Sequence[int]], cols: int | None = None) -> list[int]:
    return [d for d in smith_normal_form(a, cols).diagonal if d]


def integer_rank(a: Sequence[Sequence[int]], cols: int | None = None) -> int:
    return smith_normal_form(a, cols).rank


def integer_kernel(a: Sequence[Sequence[int]], cols: int) -> list[list[int]]:
    """Basis (as column vectors) of the integer kernel of ``a`` (shape r x cols)."""
    snf = smith_normal_form(a, cols)
    r = snf.rank
    return [[snf.V[i][j] for i in range(cols)] for j in range(r, cols)]


class IntegerSolver:
    """Solves a x = b over Z for a fixed matrix, reusing one Smith form."""

    def __init__(self, a: Sequence[Sequence[int]], cols: int):
        self.rows = len(a)
        self.cols = cols
        self.snf = smith_normal_form(a, cols)
        self._diag = [self.snf.D[i][i] if i < cols else 0 for i in range(self.rows)]

    def solve(self, b: Sequence[int]) -> list[int] | None:
        ub = matvec(self.snf.U, b) if self.rows else []
        y = [0] * self.cols
        for i, c in enumerate(ub):
            d = self._diag[i]
            if d == 0:
                if c:
                    return None
            else:
                if c % d:
                    return None
                y[i] = c // d
        return matvec(self.snf.V, y) if self.cols else []


def solve_integer(a: Sequence[Sequence[int]], b: Sequence[int], cols: int) -> list[int] | None:
    """Some integer solution x of a x = b, or None."""
    return IntegerSolver(a, cols).solve(b)


def saturation_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """Basis of (span_Q vectors) ∩ Z^dim."""
    if not vectors:
        return []
    perp = integer_kernel([list(v) for v in vectors], dim)
    if not perp:
        return [list(e) for e in identity(dim)]
    return integer_kernel(perp, dim)


def lattice_basis(vectors: Sequence[Sequence[int]], dim: int) -> list[list[int]]:
    """A Z-basis of the subgroup of Z^dim generated by ``vectors``."""
    vecs = [list(v) for v in vectors if any(v)]
    if not vecs:
        return []
    a = columns_to_matrix(vecs, dim)
    snf = smith_normal_form(a)
    # A = U^-1 D V^-1, so the image is spanned by the first r columns of U^-1 D.
    uinv = unimodular_inverse(snf.U)
    out = []
    for j, d in enumerate(snf.diagonal):
        if d:
            out.append([uinv[i][j] * d for i in range(dim)])
    return out


def unimodular_inverse(u: Sequence[Sequence[int]]) -> Matrix:
    inv = rational_inverse(u)
    out = []
    for row in inv:
        out.append([int(x) for x in row])
        if any(x.denominator != 1 for x in row):
            raise ValueError("matrix is not unimodular")
    return out


# --------------------------------------------------------------------------
# field linear algebra


def _field_elim(a: Sequence[Sequence[int]], p: int) -> tuple[int, list[list]]:
    """Row echelon form over QQ (p = 0) or GF(p); returns (rank, rows)."""
    if p:
        rows = [[x % p for x in r] for r in a]
    else:
        rows = [[Fraction(x) for x in r] for r in a]
    n = len(rows[0]) if rows else 0
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        inv = pow(pv, -1, p) if p else 1 / pv
        rows[r] = [(x * inv) % p if p else x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                if p:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[r])]
                else:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r, rows


def rank_over(a: Sequence[Sequence[int]], k: Coefficients, cols: int | None = None) -> int:
    if not a or not a[0]:
        return 0
    if k.kind == "ZZ":
        return integer_rank(a)
    return _field_elim(a, k.characteristic)[0]


def rational_inverse(a: Sequence[Sequence[int]]) -> list[list[Fraction]]:
    n = len(a)
    rows = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c]), None)
        if piv is None:
            raise ValueError("singular matrix")
        rows[c], rows[piv] = rows[piv], rows[c]
        pv = rows[c][c]
        rows[c] = [x / pv for x in rows[c]]
        for i in range(n):
            if i != c and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[c])]
    return [row[n:] for row in rows]


def rational_solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Some rational solution of a x = b (a given by rows), or None."""
    m = len(a)
    n = len(a[0]) if m else 0
    rows = [[Fraction(x) for x in a[i]] + [Fraction(b[i])] for i in range(m)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][n] for i in range(r, m)):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x


def rational_kernel(a: Sequence[Sequence], cols: int) -> list[list[Fraction]]:
    """Basis of the rational kernel of ``a`` (rows), as vectors."""
    m = len(a)
    rows = [[Fraction(x) for x in a[i]] for i in range(m)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * cols
        v[fcol] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -rows[i][fcol]
        basis.append(v)
    return basis


def primitive(v: Sequence) -> list[int]:
    """Scale a rational vector to a primitive integer vector (same direction)."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, x)
    return [x // g for x in ints] if g else ints


# --------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True, order=True)
class FgAbGroup:
    """Z^free_rank ⊕ Z/d1 ⊕ ... with d_i >= 2 and d_i | d_{i+1}."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative rank")
        t = tuple(self.torsion)
        if any(d < 2 for d in t) or any(t[i + 1] % t[i] for i in range(len(t) - 1)):
            raise ValueError(f"torsion {t} not in invariant-factor form")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_orders(cls, free_rank: int, orders: Iterable[int]) -> "FgAbGroup":
        """Canonical form of Z^r ⊕ (⊕ Z/n_i) for arbitrary n_i (0 means Z)."""
        orders = [abs(n) for n in orders if abs(n) != 1]
        free_rank += sum(1 for n in orders if n == 0)
        orders = [n for n in orders if n]
        if not orders:
            return cls(free_rank, ())
        diag = [[orders[i] if i == j else 0 for j in range(len(orders))] for i in range(len(orders))]
        inv = [d for d in invariant_factors(diag) if d > 1]
        return cls(free_rank, tuple(inv))

    @classmethod
    def cyclic(cls, n: int) -> "FgAbGroup":
        return cls.from_orders(0, [n])

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int:
        if self.free_rank:
            raise ValueError("infinite group")
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def exponent(self) -> int:
        return self.torsion[-1] if self.torsion else 1

    def cyclic_factors(self) -> list[int]:
        """Orders of a cyclic decomposition (0 stands for Z)."""
        return [0] * self.free_rank + list(self.torsion)

    def __add__(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_orders(self.free_rank + other.free_rank, self.torsion + other.torsion)

    def tensor(self, other: "FgAbGroup") -> "FgAbGroup":
        orders = [_cyc_tensor(a, b) for a in self.cyclic_factors() for b in other.cyclic_factors()]
        return FgAbGroup.from_orders(0, orders)

    def tor(self, other: "FgAbGroup") -> "FgAbGroup":
        orders = [
            gcd(a, b)
            for a in self.cyclic_factors()
            for b in other.cyclic_factors()
            if a and b
        ]
        return FgAbGroup.from_orders(0, orders)

    def scale(self, n: int) -> "FgAbGroup":
        """Direct sum of n copies."""
        return FgAbGroup.from_orders(self.free_rank * n, self.torsion * n)

    def elements(self) -> list[tuple[int, ...]]:
        """All elements of a finite group as tuples modulo the torsion factors."""
        if self.free_rank:
            raise ValueError("infinite group")
        return list(itertools.product(*(range(d) for d in self.torsion)))

    def to_json(self) -> dict:
        return {"rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: dict) -> "FgAbGroup":
        return cls(int(data["rank"]), tuple(data.get("torsion", ())))

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"


def _cyc_tensor(a: int, b: int) -> int:
    if a == 0:
        return b
    if b == 0:
        return a
    return gcd(a, b)


TRIVIAL = FgAbGroup()
Z1 = FgAbGroup(1)


def cokernel_structure(a: Sequence[Sequence[int]], rows: int | None = None, cols: int | None = None) -> FgAbGroup:
    """Z^rows / column span of ``a`` in invariant-factor form."""
    m = len(a) if rows is None else rows
    if m == 0:
        return TRIVIAL
    if not a or not a[0]:
        return FgAbGroup(m)
    diag = invariant_factors(a)
    return FgAbGroup.from_orders(m - len(diag), diag)


def scalar_tensor_tor(g: FgAbGroup, k: Coefficients) -> tuple[FgAbGroup, FgAbGroup]:
    """(k ⊗ G, Tor_1(k, G)) described over k."""
    if k.kind == "ZZ":
        return g, TRIVIAL
    if k.kind == "QQ":
        return FgAbGroup(g.free_rank), TRIVIAL
    p = k.p
    t = sum(1 for d in g.torsion if d % p == 0)
    return FgAbGroup(g.free_rank + t), FgAbGroup(t)


def over(g: FgAbGroup, k: Coefficients) -> FgAbGroup:
    """Reduce a description to k (k ⊗ G) without the derived correction."""
    return scalar_tensor_tor(g, k)[0]


# --------------------------------------------------------------------------
# complexes


@dataclass(frozen=True)
class ChainComplex:
    """Bounded complex C_0 <- C_1 <- ... of finite free modules.

    ``boundaries[i]`` is the matrix of d_{i+1}: C_{i+1} -> C_i, of shape
    dims[i] x dims[i+1].  Missing trailing boundaries are zero.
    """

    dims: tuple[int, ...]
    boundaries: tuple[Matrix, ...] = field(default=())

    def boundary(self, n: int) -> Matrix:
        """Matrix of d_n: C_n -> C_{n-1}."""
        rows = self.dim(n - 1)
        cols = self.dim(n)
        if 1 <= n <= len(self.boundaries):
            return self.boundaries[n - 1]
        return zeros(rows, cols)

    def dim(self, n: int) -> int:
        return self.dims[n] if 0 <= n < len(self.dims) else 0

    def validate(self) -> None:
        for i, b in enumerate(self.boundaries):
            r, c = self.dim(i), self.dim(i + 1)
            if len(b) != r or any(len(row) != c for row in b):
                raise MalformedComplexError(f"d_{i + 1} has wrong shape (expected {r}x{c})")
        for n in range(1, len(self.boundaries)):
            prod = matmul(self.boundary(n), self.boundary(n + 1), inner=self.dim(n))
            if any(any(row) for row in prod):
                raise MalformedComplexError(f"d_{n} d_{n + 1} != 0")


def complex_homology(cx: ChainComplex, n: int, k: Coefficients = ZZ, check: bool = True) -> FgAbGroup:
    """H_n of ``cx`` ⊗ k."""
    if check:
        cx.validate()
    dn = cx.dim(n)
    if dn == 0:
        return TRIVIAL
    out_mat = cx.boundary(n)
    in_mat = cx.boundary(n + 1)
    r_out = rank_over(out_mat, k) if cx.dim(n - 1) else 0
    if k.kind == "ZZ":
        diag = invariant_factors(in_mat, cols=cx.dim(n + 1)) if cx.dim(n + 1) else []
        free = dn - r_out - len(diag)
        return FgAbGroup.from_orders(free, [d for d in diag if d > 1])
    r_in = rank_over(in_mat, k) if cx.dim(n + 1) else 0
    return FgAbGroup(dn - r_out - r_in)


# --------------------------------------------------------------------------
# homology of classifying spaces


def _graded_tensor(a: list[FgAbGroup], b: list[FgAbGroup], top: int) -> list[FgAbGroup]:
    """Künneth over Z for graded groups, truncated to degrees <= top."""
    out = []
    for n in range(top + 1):
        g = TRIVIAL
        for i in range(n + 1):
            g = g + a[i].tensor(b[n - i])
        for i in range(n):
            g = g + a[i].tor(b[n - 1 - i])
        out.append(g)
    return out


def _cyclic_bg(d: int, top: int) -> list[FgAbGroup]:
    if d == 0:
        return [Z1, Z1] + [TRIVIAL] * max(0, top - 1)
    return [Z1] + [FgAbGroup.cyclic(d) if q % 2 else TRIVIAL for q in range(1, top + 1)]


def integral_bg_homology(g: FgAbGroup, top: int) -> list[FgAbGroup]:
    """[H_0(BG; Z), ..., H_top(BG; Z)] via Künneth over a cyclic decomposition."""
    acc = [Z1] + [TRIVIAL] * top
    for d in g.cyclic_factors():
        acc = _graded_tensor(acc, _cyclic_bg(d, top)[: top + 1], top)
    return acc[: top + 1]


def group_homology(g: FgAbGroup, n: int, k: Coefficients = ZZ) -> FgAbGroup:
    """H_n(BG; k) by Künneth plus universal coefficients."""
    if n < 0:
        raise ValueError("n must be >= 0")
    h = integral_bg_homology(g, n)
    if k.kind == "ZZ":
        return h[n]
    t0, _ = scalar_tensor_tor(h[n], k)
    _, t1 = scalar_tensor_tor(h[n - 1], k) if n >= 1 else (TRIVIAL, TRIVIAL)
    return t0 + t1


def finite_group_bar_complex(g: FgAbGroup, top: int) -> ChainComplex:
    """Normalized bar complex of a finite abelian group, levels 0..top+1.

    Used as an independent oracle for :func:`group_homology`.
    """
    elems = g.elements()
    mods = g.torsion
    zero = tuple(0 for _ in mods)
    nonzero = [e for e in elems if e != zero]

    def add(x, y):
        return tuple((a + b) % m for a, b, m in zip(x, y, mods))

    levels = [list(itertools.product(nonzero, repeat=q)) for q in range(top + 2)]
    index = [{t: i for i, t in enumerate(lv)} for lv in levels]
    boundaries = []
    for q in range(1, top + 2):
        mat = zeros(len(levels[q - 1]), len(levels[q]))
        for j, cell in enumerate(levels[q]):
            faces = [cell[1:]]
            for i in range(q - 1):
                faces.append(cell[:i] + (add(cell[i], cell[i + 1]),) + cell[i + 2:])
            faces.append(cell[:-1])
            for s, face in enumerate(faces):
                if zero in face:
                    continue
                mat[index[q - 1][face]][j] += -1 if s % 2 else 1
        boundaries.append(mat)
    return ChainComplex(tuple(len(lv) for lv in levels), tuple(boundaries))


# --------------------------------------------------------------------------
# quotients of lattices


class LatticeQuotient:
    """The group L / K for lattices K ⊂ L ⊂ Z^dim, with explicit coordinates.

    ``L`` and ``K`` are given by generating vectors.  Elements of L map to
    canonical tuples ``(t_1 mod d_1, ..., t_s mod d_s, f_1, ..., f_r)`` and
    back via :meth:`lift`.
    """

    def __init__(self, l_gens: Sequence[Sequence[int]], k_gens: Sequence[Sequence[int]], dim: int):
        self.dim = dim
        self.basis = lattice_basis(l_gens, dim)  # columns of B
        self.rank = len(self.basis)
        self._b = columns_to_matrix(self.basis, dim) if self.basis else [[] for _ in range(dim)]
        self._solver = IntegerSolver(self._b, self.rank) if self.rank else None
        kc = []
        for v in k_gens:
            y = self.coordinates(v)
            if y is None:
                raise ValueError(f"{list(v)} is not in the ambient lattice L")
            kc.append(y)
        r = self.rank
        kmat = columns_to_matrix(kc, r) if kc else [[] for _ in range(r)]
        snf = smith_normal_form(kmat, cols=len(kc)) if r else SmithForm([], [], [])
        self._u = snf.U if r else []
        self._uinv = unimodular_inverse(self._u) if r else []
        diag = snf.diagonal if (r and kc) else []
        diag = diag + [0] * (r - len(diag))
        self._diag = diag
        # positions kept: d == 0 (free) or d > 1 (torsion)
        self.torsion_pos = [i for i, d in enumerate(diag) if d > 1]
        self.free_pos = [i for i, d in enumerate(diag) if d == 0]
        self.group = FgAbGroup(len(self.free_pos), tuple(diag[i] for i in self.torsion_pos))

    def coordinates(self, v: Sequence[int]) -> list[int] | None:
        """Coordinates of v in the chosen basis of L, or None if v ∉ L."""
        if self.rank == 0:
            return [] if not any(v) else None
        return self._solver.solve(list(v))

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def project(self, v: Sequence[int]) -> tuple[int, ...]:
        y = self.coordinates(v)
        if y is None:
            raise ValueError(f"{list(v)} not in lattice")
        z = matvec(self._u, y) if self.rank else []
        tors = tuple(z[i] % self._diag[i] for i in self.torsion_pos)
        return tors + tuple(z[i] for i in self.free_pos)

    def lift(self, t: Sequence[int]) -> list[int]:
        z = [0] * self.rank
        s = len(self.torsion_pos)
        for i, pos in enumerate(self.torsion_pos):
            z[pos] = t[i]
        for i, pos in enumerate(self.free_pos):
            z[pos] = t[s + i]
        y = matvec(self._uinv, z) if self.rank else []
        return matvec(self._b, y) if self.rank else [0] * self.dim

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        s = len(self.torsion_pos)
        mods = self.group.torsion
        return tuple(
            (x + y) % mods[i] if i < s else x + y for i, (x, y) in enumerate(zip(a, b))
        )

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        s = len(self.torsion_pos)
        mods = self.group.torsion
        return tuple((-x) % mods[i] if i < s else -x for i, x in enumerate(a))

    def zero(self) -> tuple[int, ...]:
        return tuple(0 for _ in range(len(self.torsion_pos) + len(self.free_pos)))
