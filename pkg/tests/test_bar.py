import itertools
from math import comb

import pytest

from logdesk.abelian import GF, QQ, ZZ, FgAbGroup, group_homology
from logdesk.bar import (
    HomotopyTable,
    base_change_check,
    cyclic_bar_homology,
    graded_tor,
    hkr_check,
    hochschild_homology,
    kunneth_check,
    loghh_homology,
    moore_homology,
    omega_pi1_check,
    replete_bar_homology,
    shuffle,
    tor1_witness,
)
from logdesk.monoid import AffineMonoid, MonoidHom
from logdesk.polyhedra import ScaleError
from logdesk.prelog import PreLogMap, PreLogRing, free_prelog

from oracles import hh_polynomial, hh_truncated

N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)
P = AffineMonoid(2, [(2, 0), (1, 1), (0, 2)])
INDEX2 = MonoidHom(P, N2, [[1, 0], [0, 1]])


@pytest.mark.parametrize("n", [1, 2])
def test_hh_of_polynomial_ring(n):
    f = PreLogMap.over_point(PreLogRing.trivial(AffineMonoid.free(n), QQ))
    degs = list(itertools.product(range(3), repeat=n))
    t = hochschild_homology(f, n + 1, degs)
    for m in degs:
        assert [t.get(q, m).free_rank for q in range(n + 2)] == hh_polynomial(m)[: n + 2]


@pytest.mark.parametrize("a", [2, 3])
def test_hh_of_truncated_polynomial(a):
    t = cyclic_bar_homology(MonoidHom.from_trivial(N1), 4, [(w,) for w in range(10)], QQ, ideal=[(a,)])
    for w in range(10):
        assert [t.get(q, (w,)).free_rank for q in range(5)] == hh_truncated(a, 4, w)


def test_hh_of_dual_numbers_over_z_has_torsion():
    # HH_2(Z[x]/x^2) at weight 2 is Z/2 (cokernel of multiplication by 2x)
    t = cyclic_bar_homology(MonoidHom.from_trivial(N1), 2, [(2,)], ZZ, ideal=[(2,)])
    assert t.get(1, (2,)) == FgAbGroup.cyclic(2)


@pytest.mark.parametrize("n", [1, 2])
def test_loghh_of_canonical_free_monoid(n):
    f = PreLogMap.over_point(PreLogRing.canonical(AffineMonoid.free(n), ZZ))
    degs = list(itertools.product(range(2), repeat=n))
    t = loghh_homology(f, n + 1, degs)
    for m in degs:
        assert [t.get(q, m) for q in range(n + 2)] == [FgAbGroup(comb(n, q)) for q in range(n + 2)]


def test_log_line_concentrated_in_degrees_0_and_1():
    f = PreLogMap.over_point(PreLogRing.canonical(N1, ZZ))
    t = loghh_homology(f, 3, [(w,) for w in range(5)])
    for w in range(5):
        assert [t.get(q, (w,)) for q in range(4)] == [FgAbGroup(1), FgAbGroup(1), FgAbGroup(), FgAbGroup()]


@pytest.mark.parametrize(
    "theta, k",
    [
        (MonoidHom(N1, N1, [[3]]), ZZ),
        (MonoidHom(N1, N1, [[3]]), GF(3)),
        (MonoidHom(N1, N1, [[2]]), QQ),
        (INDEX2, ZZ),
        (MonoidHom.from_trivial(N1), ZZ),
    ],
)
def test_moore_complex_matches_group_homology(theta, k):
    got = moore_homology(theta, 2, k, window=5)
    assert got == [group_homology(theta.cokernel, q, k) for q in range(3)]


def test_replete_bar_closed_form():
    theta = MonoidHom(N1, N1, [[3]])
    t = replete_bar_homology(theta, 2, [(0,), (4,)], ZZ)
    assert t.get(0, (4,)) == FgAbGroup(1)
    assert t.get(1, (4,)) == FgAbGroup.cyclic(3)
    assert t.get(2, (4,)).is_zero


def test_index2_tor():
    t = graded_tor(INDEX2, 1, [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)], QQ)
    assert {m for m in t.degrees() if not t.get(0, m).is_zero} == {(0, 0), (1, 0), (0, 1)}
    assert {m for m in t.degrees() if not t.get(1, m).is_zero} == {(2, 1), (1, 2)}
    assert t.get(1, (2, 1)) == FgAbGroup(1)
    assert tor1_witness(INDEX2) in ((2, 1), (1, 2))
    assert tor1_witness(MonoidHom(N1, N1, [[2]])) is None


def test_shuffle_of_one_chains_is_antisymmetric():
    a = {((1, 0),): 1}
    b = {((0, 1),): 1}
    ab, ba = shuffle(a, b, cyclic=False), shuffle(b, a, cyclic=False)
    assert ab == {((1, 0), (0, 1)): 1, ((0, 1), (1, 0)): -1}
    assert ba == {k: -v for k, v in ab.items()}


@pytest.mark.parametrize("nx, ny", [(1, 1), (2, 0), (0, 2), (1, 2)])
def test_hkr_free_cases(nx, ny):
    f = free_prelog(PreLogRing.point(ZZ), [f"x{i}" for i in range(nx)], [f"y{i}" for i in range(ny)])
    d = nx + ny
    r = hkr_check(f, 2, [tuple([0] * d), tuple([1] * d)], seed=5)
    assert r.passed and r.multiplicative, r.notes


def test_pi1_matches_kahler_for_cusp_and_node():
    cusp = PreLogMap.over_point(PreLogRing.canonical(AffineMonoid(1, [(2,), (3,)]), ZZ))
    assert omega_pi1_check(cusp, [(d,) for d in range(7)]).passed
    node = PreLogMap.over_point(PreLogRing.trivial(N2, ZZ, ideal=[(1, 1)]))
    assert omega_pi1_check(node, [(0, 0), (1, 0), (1, 1), (2, 1)]).passed


def test_base_change_verdicts():
    triv = MonoidHom.from_trivial(N1)
    assert base_change_check(triv, MonoidHom(N1, N1, [[3]]), 2, QQ).passed
    assert base_change_check(triv, MonoidHom(N1, AffineMonoid.lattice(1), [[1]]), 2, QQ).passed
    assert not base_change_check(triv, MonoidHom(N1, N2, [[1], [0]]), 2, QQ).passed
    assert not base_change_check(triv, MonoidHom(N1, N1, [[2]]), 2, GF(2)).passed


def test_kunneth():
    x = PreLogRing.canonical(N1, ZZ)
    y = PreLogRing.trivial(N2, ZZ, ideal=[(1, 1)])
    assert kunneth_check(x, y, 2, [((1,), (1, 1)), ((2,), (2, 0))]).passed


def test_table_json_round_trip():
    t = HomotopyTable({})
    t.set(1, (2, 1), FgAbGroup(1, (2,)))
    assert HomotopyTable.from_json(t.to_json()) == t


def test_cell_guard():
    with pytest.raises(ScaleError):
        cyclic_bar_homology(MonoidHom.from_trivial(AffineMonoid.free(3)), 6, [(6, 6, 6)], QQ)
