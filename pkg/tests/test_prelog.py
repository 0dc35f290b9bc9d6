import pytest

from logdesk.abelian import GF, QQ, ZZ, FgAbGroup
from logdesk.monoid import AffineMonoid, MonoidHom, PreconditionError
from logdesk.prelog import (
    PreLogMap,
    PreLogRing,
    classify_map,
    cotangent_pi,
    decompose,
    free_prelog,
    kahler_closed_form,
    kahler_differentials,
    transitivity_check,
)

from oracles import cusp_omega_dims

N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)
P = AffineMonoid(2, [(2, 0), (1, 1), (0, 2)])
T23 = AffineMonoid(1, [(2,), (3,)])
INDEX2 = MonoidHom(P, N2, [[1, 0], [0, 1]])


def test_ring_constructors():
    r = PreLogRing.canonical(N2)
    assert r.is_canonical and r.prelog_monoid == N2
    t = PreLogRing.trivial(N2, ZZ, ideal=[(1, 1)])
    assert not t.is_canonical and t.in_ideal((2, 1)) and not t.in_ideal((2, 0))
    assert PreLogRing.from_json(t.to_json()).ideal == t.ideal


def test_ideal_must_lie_in_monoid():
    with pytest.raises(PreconditionError):
        PreLogRing.trivial(T23, QQ, ideal=[(1,)])


def test_structure_square_must_commute():
    a = PreLogRing.canonical(N1)
    with pytest.raises(PreconditionError):
        PreLogMap(a, a, MonoidHom(N1, N1, [[2]]), MonoidHom(N1, N1, [[1]]))


def test_decomposition_of_free_prelog():
    f = free_prelog(PreLogRing.point(QQ), ["x"], ["y"])
    dec = decompose(f)
    kinds = sorted(b.kind for b in dec.blocks)
    assert kinds == ["log", "plain"]


@pytest.mark.parametrize("k", [QQ, ZZ])
def test_cusp_kahler_differentials(k):
    om = kahler_differentials(PreLogMap.over_point(PreLogRing.trivial(T23, k)))
    for d in range(14):
        g = om.at((d,), k)
        assert g.free_rank == cusp_omega_dims(d) and not g.torsion, d


def test_log_differentials_of_canonical_monoid():
    # Ω¹_log of (k[M], M) over k is k[M] ⊗ M^gp
    f = PreLogMap.over_point(PreLogRing.canonical(T23, QQ))
    om = kahler_differentials(f)
    for d in [0, 2, 3, 4, 7]:
        assert om.at((d,), QQ) == FgAbGroup(1)
        assert kahler_closed_form(f, (d,)) == FgAbGroup(1)
    assert om.at((1,), QQ).is_zero


def test_kummer_differentials_depend_on_characteristic():
    # k[t] → k[t] with t ↦ t^2, canonical log: Ω¹ at degree d is k ⊗ Z/2
    f2 = PreLogMap.canonical(MonoidHom(N1, N1, [[2]]), GF(2))
    fq = PreLogMap.canonical(MonoidHom(N1, N1, [[2]]), QQ)
    assert kahler_differentials(f2).at((3,), GF(2)).free_rank == 1
    assert kahler_differentials(fq).at((3,), QQ).is_zero


def test_index2_classification_over_q_and_f2():
    cq = classify_map(PreLogMap.canonical(INDEX2, QQ))
    assert cq.derived_log_etale and cq.integral.is_no and cq.exact.is_yes and cq.kummer
    c2 = classify_map(PreLogMap.canonical(INDEX2, GF(2)))
    assert not c2.derived_log_etale and not c2.log_etale


def test_free_prelog_is_log_smooth():
    c = classify_map(free_prelog(PreLogRing.point(QQ), ["x"], ["y"]))
    assert c.log_smooth and c.derived_log_smooth and not c.log_etale


def test_cotangent_vanishes_for_index2_over_q():
    f = PreLogMap.canonical(INDEX2, QQ)
    degs = [(0, 0), (1, 0), (1, 1), (2, 1)]
    for n in (0, 1):
        assert all(g.is_zero for g in cotangent_pi(f, n, degs).values())


def test_cotangent_of_log_line():
    f = PreLogMap.over_point(PreLogRing.canonical(N1, QQ))
    assert cotangent_pi(f, 0, [(2,)])[(2,)] == FgAbGroup(1)


def test_transitivity():
    f = PreLogMap.canonical(MonoidHom.from_trivial(N1), QQ)
    g = PreLogMap.canonical(MonoidHom(N1, N2, [[1], [0]]), QQ)
    assert transitivity_check(f, g).passed
    h = PreLogMap.canonical(MonoidHom(N1, N1, [[2]]), GF(2))
    assert transitivity_check(h, PreLogMap.canonical(MonoidHom(N1, N1, [[3]]), GF(2))).passed
