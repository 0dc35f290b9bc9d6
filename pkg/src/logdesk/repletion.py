"""Exactification, repletion and the replete bar construction."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .abelian import FgAbGroup, LatticeQuotient
from .monoid import (
    AffineMonoid,
    MonoidHom,
    PreconditionError,
    TriState,
    Vector,
    amalgamated_sum,
    is_exact,
    normalize,
)


class InconclusiveError(RuntimeError):
    """A bounded procedure ran out of budget."""

    def __init__(self, message: str, bound: int):
        super().__init__(f"{message} (bound {bound})")
        self.bound = bound


@dataclass
class Repletion:
    """N^ex = M ×_{M^gp} N^gp realized inside N^gp."""

    original: MonoidHom
    replete_monoid: AffineMonoid
    unit_map: MonoidHom
    projection: MonoidHom
    kernel_group: FgAbGroup
    virtually_surjective: bool

    def to_json(self) -> dict:
        return {
            "replete_monoid": self.replete_monoid.to_json(),
            "projection": self.projection.matrix,
            "kernel_group": self.kernel_group.to_json(),
            "virtually_surjective": self.virtually_surjective,
        }


def is_virtually_surjective(theta: MonoidHom) -> bool:
    """θ^gp surjective (on group completions)."""
    return theta.cokernel.is_zero


def exactify(theta: MonoidHom) -> Repletion:
    """Exactification of θ: N → M relative to θ; the repletion when θ is
    virtually surjective.  Requires M saturated."""
    n, m = theta.source, theta.target
    if not m.is_saturated():
        raise InconclusiveError("target not saturated; preimage monoid not computable", 0)
    gens = theta.preimage_generators()
    rep = AffineMonoid(n.ambient_rank, gens)
    d = n.ambient_rank
    ident = [[int(i == j) for j in range(d)] for i in range(d)]
    unit = MonoidHom(n, rep, ident)
    proj = MonoidHom(rep, m, theta.matrix)
    ker_rank = theta.kernel_rank
    return Repletion(theta, rep, unit, proj, FgAbGroup(ker_rank), is_virtually_surjective(theta))


@dataclass
class RepleteSplit:
    """N^rep ≅ M ⊕ N^gp/η(M^gp) for θ: N → M with section η."""

    repletion: Repletion
    theta: MonoidHom
    eta: MonoidHom
    quotient: LatticeQuotient

    @property
    def group(self) -> FgAbGroup:
        return self.quotient.group

    def forward(self, x: Sequence[int]) -> tuple[Vector, tuple[int, ...]]:
        return self.theta(x), self.quotient.project(x)

    def inverse(self, m: Sequence[int], g: Sequence[int]) -> Vector:
        y = self.quotient.lift(g)
        ty = self.eta(self.theta(y))
        em = self.eta(m)
        return tuple(a + b - c for a, b, c in zip(em, y, ty))

    def verify(self, samples: int = 50, seed: int = 0) -> list[str]:
        """Check both composites and the structure maps on random elements."""
        rng = random.Random(seed)
        errors = []
        rep = self.repletion.replete_monoid
        m = self.theta.target
        for _ in range(samples):
            x = _random_element(rep, rng)
            mm, g = self.forward(x)
            if tuple(self.inverse(mm, g)) != tuple(x):
                errors.append(f"inverse(forward({list(x)})) != x")
            if not m.contains(mm, bound=10**6):
                errors.append(f"forward({list(x)}) leaves M")
            mm2 = _random_element(m, rng)
            g2 = _random_group_element(self.quotient, rng)
            y = self.inverse(mm2, g2)
            if not rep.contains(y, bound=10**6):
                errors.append(f"inverse({list(mm2)}, {list(g2)}) leaves N^rep")
            if self.forward(y) != (tuple(mm2), tuple(g2)):
                errors.append(f"forward(inverse({list(mm2)}, {list(g2)})) mismatch")
            # under M: η lands in N^rep with trivial class
            e = self.eta(mm2)
            if self.forward(e) != (tuple(mm2), self.quotient.zero()):
                errors.append(f"η({list(mm2)}) not sent to (m, 0)")
        return errors


def replete_split(theta: MonoidHom, eta: MonoidHom) -> RepleteSplit:
    if eta.source != theta.target or eta.target != theta.source:
        raise PreconditionError("η must be a map M → N")
    for g in theta.target.generators:
        if theta(eta(g)) != tuple(g):
            raise PreconditionError(f"η is not a section of θ at generator {list(g)}")
    rep = exactify(theta)
    n = theta.source
    q = LatticeQuotient(n.group_basis, [eta(b) for b in theta.target.group_basis], n.ambient_rank)
    return RepleteSplit(rep, theta, eta, q)


@dataclass
class RepleteDiagonal:
    """(M ⊕_P M)^rep ≅ M ⊕ M^gp/P^gp."""

    theta: MonoidHom
    sum_monoid: AffineMonoid
    fold: MonoidHom
    first: MonoidHom
    second: MonoidHom
    split: RepleteSplit

    @property
    def group(self) -> FgAbGroup:
        return self.split.group


def _matrix_from(fn, src_dim: int, tgt_dim: int) -> list[list[int]]:
    cols = [fn([int(i == j) for i in range(src_dim)]) for j in range(src_dim)]
    return [[c[i] for c in cols] for i in range(tgt_dim)]


def replete_diagonal(theta: MonoidHom) -> RepleteDiagonal:
    theta = normalize(theta)
    m = theta.target
    s = amalgamated_sum(theta, theta, check_integral=False)
    r = s.monoid.ambient_rank
    d = m.ambient_rank

    def fold_fn(t):
        v = s.quotient.lift(t)
        return [v[i] + v[d + i] for i in range(d)]

    fold = MonoidHom(s.monoid, m, _matrix_from(fold_fn, r, d))
    first = MonoidHom(m, s.monoid, _matrix_from(s.from_m, d, r))
    second = MonoidHom(m, s.monoid, _matrix_from(s.from_n, d, r))
    return RepleteDiagonal(theta, s.monoid, fold, first, second, replete_split(fold, first))


# --------------------------------------------------------------------------
# the replete bar construction


def _random_element(m: AffineMonoid, rng: random.Random, size: int = 3) -> Vector:
    v = [0] * m.ambient_rank
    for g in m.generators:
        c = rng.randint(0, size)
        v = [a + c * b for a, b in zip(v, g)]
    return tuple(v)


def _random_group_element(q: LatticeQuotient, rng: random.Random, size: int = 3) -> tuple[int, ...]:
    tors = [rng.randrange(d) for d in q.group.torsion]
    free = [rng.randint(-size, size) for _ in range(q.group.free_rank)]
    return tuple(tors + free)


@dataclass
class RepleteBarLevel:
    """Level q of B^rep_P(M), modelled as M ⊕ G^q with G = M^gp/θ(P^gp).

    Elements are pairs (m, (g_1, ..., g_q)) with g_i canonical tuples of G.
    """

    theta: MonoidHom
    q: int
    quotient: LatticeQuotient = field(repr=False)

    @property
    def group(self) -> FgAbGroup:
        return self.quotient.group

    def describe(self) -> dict:
        return {"q": self.q, "monoid": self.theta.target.to_json(), "G": self.group.to_json(), "power": self.q}

    def face(self, i: int, x):
        m, g = x
        q = self.q
        if not 0 <= i <= q or q == 0:
            raise ValueError(f"no face d_{i} at level {q}")
        if i == 0:
            return m, g[1:]
        if i == q:
            return m, g[:-1]
        return m, g[: i - 1] + (self.quotient.add(g[i - 1], g[i]),) + g[i + 1:]

    def degeneracy(self, i: int, x):
        m, g = x
        if not 0 <= i <= self.q:
            raise ValueError(f"no degeneracy s_{i} at level {self.q}")
        return m, g[:i] + (self.quotient.zero(),) + g[i:]

    # transport to M ×_{M^gp} B^cy_{P^gp}(M^gp)

    def to_cyclic(self, x) -> tuple[Vector, ...]:
        m, g = x
        lifts = [self.quotient.lift(gi) for gi in g]
        h0 = list(m)
        for l in lifts:
            h0 = [a - b for a, b in zip(h0, l)]
        return (tuple(h0),) + tuple(tuple(l) for l in lifts)

    def from_cyclic(self, h: Sequence[Sequence[int]]):
        total = [sum(c) for c in zip(*h)]
        return tuple(total), tuple(self.quotient.project(hi) for hi in h[1:])


def cyclic_face(i: int, h: tuple) -> tuple:
    q = len(h) - 1
    if i < q:
        return h[:i] + (tuple(a + b for a, b in zip(h[i], h[i + 1])),) + h[i + 2:]
    return (tuple(a + b for a, b in zip(h[q], h[0])),) + h[1:q]


def cyclic_degeneracy(i: int, h: tuple) -> tuple:
    zero = tuple(0 for _ in h[0])
    return h[: i + 1] + (zero,) + h[i + 1:]


def cyclic_equivalent(h: tuple, k: tuple, quotient: LatticeQuotient) -> bool:
    """Equality in (M^gp)^{⊗(q+1)} over P^gp."""
    if len(h) != len(k):
        return False
    if [sum(c) for c in zip(*h)] != [sum(c) for c in zip(*k)]:
        return False
    return all(quotient.project(a) == quotient.project(b) for a, b in zip(h[1:], k[1:]))


def replete_bar_level(theta: MonoidHom, q: int) -> RepleteBarLevel:
    if q < 0:
        raise ValueError("q must be >= 0")
    m = theta.target
    quotient = LatticeQuotient(m.group_basis, [list(v) for v in theta.image_generators], m.ambient_rank)
    return RepleteBarLevel(theta, q, quotient)


@dataclass
class BarIsoReport:
    passed: bool
    checks: int
    qmax: int
    counterexamples: list[str]

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "qmax": self.qmax, "counterexamples": self.counterexamples}


def verify_bar_iso(theta: MonoidHom, qmax: int = 3, samples: int = 20, seed: int = 0) -> BarIsoReport:
    """Sampled check that M ⊕ G^q ≅ M ×_{M^gp} B^cy_{P^gp}(M^gp) levelwise,
    compatibly with all faces and degeneracies."""
    rng = random.Random(seed)
    bad: list[str] = []
    checks = 0
    m = theta.target

    def fail(msg):
        if len(bad) < 10:
            bad.append(msg)

    for q in range(qmax + 1):
        lvl = replete_bar_level(theta, q)
        quo = lvl.quotient
        lower = replete_bar_level(theta, q - 1) if q else None
        for _ in range(samples):
            x = (_random_element(m, rng), tuple(_random_group_element(quo, rng) for _ in range(q)))
            h = lvl.to_cyclic(x)
            checks += 1
            if not m.contains([sum(c) for c in zip(*h)], bound=10**6):
                fail(f"q={q}: image of {x} not in the pullback")
            if lvl.from_cyclic(h) != x:
                fail(f"q={q}: from_cyclic(to_cyclic(x)) != x for {x}")
            # random pullback element, back and forth
            hs = [tuple(_random_group_lift(m, rng)) for _ in range(q)]
            mm = _random_element(m, rng)
            h0 = list(mm)
            for v in hs:
                h0 = [a - b for a, b in zip(h0, v)]
            hh = (tuple(h0),) + tuple(hs)
            checks += 1
            if not cyclic_equivalent(lvl.to_cyclic(lvl.from_cyclic(hh)), hh, quo):
                fail(f"q={q}: to_cyclic(from_cyclic(h)) not equivalent to h for {hh}")
            if q:
                for i in range(q + 1):
                    checks += 1
                    lhs = lower.to_cyclic(lvl.face(i, x))
                    rhs = cyclic_face(i, h)
                    if not cyclic_equivalent(lhs, rhs, quo):
                        fail(f"q={q}: face d_{i} does not commute at {x}")
            upper = replete_bar_level(theta, q + 1)
            for i in range(q + 1):
                checks += 1
                lhs = upper.to_cyclic(lvl.degeneracy(i, x))
                rhs = cyclic_degeneracy(i, h)
                if not cyclic_equivalent(lhs, rhs, quo):
                    fail(f"q={q}: degeneracy s_{i} does not commute at {x}")
            # simplicial identities on the model
            if q >= 2:
                for j in range(q + 1):
                    for i in range(j):
                        checks += 1
                        if lower.face(i, lvl.face(j, x)) != lower.face(j - 1, lvl.face(i, x)):
                            fail(f"q={q}: d_{i} d_{j} != d_{j - 1} d_{i}")
            for i in range(q + 1):
                for j in range(q + 1):
                    y = lvl.degeneracy(j, x)
                    checks += 1
                    got = upper.face(i, y) if q + 1 else None
                    if i in (j, j + 1):
                        ok = got == x
                    elif i < j:
                        ok = got == lower.degeneracy(j - 1, lvl.face(i, x)) if q else True
                    else:
                        ok = got == lower.degeneracy(j, lvl.face(i - 1, x)) if q else True
                    if not ok:
                        fail(f"q={q}: d_{i} s_{j} identity fails")
    return BarIsoReport(not bad, checks, qmax, bad)


def _random_group_lift(m: AffineMonoid, rng: random.Random) -> list[int]:
    v = [0] * m.ambient_rank
    for b in m.group_basis:
        c = rng.randint(-3, 3)
        v = [a + c * x for a, x in zip(v, b)]
    return v
