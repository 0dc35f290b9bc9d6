import pytest

from logdesk.monoid import AffineMonoid, MonoidHom, PreconditionError
from logdesk.repletion import (
    InconclusiveError,
    exactify,
    replete_bar_level,
    replete_diagonal,
    replete_split,
    verify_bar_iso,
)

N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)
ADD = MonoidHom(N2, N1, [[1, 1]])
FIRST = MonoidHom(N1, N2, [[1], [0]])


def test_repletion_of_addition_is_half_plane():
    rep = exactify(ADD)
    r = rep.replete_monoid
    # N^2 ×_{Z^2} ... = {(a, b) : a + b ≥ 0} ≅ N ⊕ Z
    assert r.contains((3, -3)) and r.contains((-2, 5)) and not r.contains((-1, 0))
    assert not r.is_sharp
    assert rep.kernel_group.free_rank == 1 and rep.virtually_surjective


def test_addition_split_matches_unit_map_formula():
    sp = replete_split(ADD, FIRST)
    sign = sp.forward((0, 1))[1][0]
    assert sign in (1, -1)
    for m, n in [(1, 0), (0, 1), (3, 5), (2, 7)]:
        total, g = sp.forward((m, n))
        assert total == (m + n,) and sign * g[0] == n
    assert sp.verify(samples=40, seed=3) == []


def test_split_requires_section():
    with pytest.raises(PreconditionError):
        replete_split(ADD, MonoidHom(N1, N2, [[1], [1]]))


def test_exactify_needs_saturated_target():
    t23 = AffineMonoid(1, [(2,), (3,)])
    with pytest.raises(InconclusiveError):
        exactify(MonoidHom(N2, t23, [[2, 3]]))


def test_replete_diagonal_group():
    # (M ⊕_P M)^rep ≅ M ⊕ M^gp/P^gp; for the trivial source the group is M^gp
    d = replete_diagonal(MonoidHom.from_trivial(N2))
    assert d.group.free_rank == 2 and not d.group.torsion


def test_bar_level_faces():
    theta = MonoidHom(N1, N1, [[3]])
    lvl = replete_bar_level(theta, 2)
    assert lvl.group.torsion == (3,)
    x = ((4,), ((1,), (2,)))
    assert lvl.face(0, x) == ((4,), ((2,),))
    assert lvl.face(1, x) == ((4,), ((0,),))
    assert lvl.face(2, x) == ((4,), ((1,),))
    assert lvl.degeneracy(1, x) == ((4,), ((1,), (0,), (2,)))
    with pytest.raises(ValueError):
        lvl.face(3, x)


@pytest.mark.parametrize(
    "theta",
    [
        MonoidHom.from_trivial(N1),
        MonoidHom(AffineMonoid(2, [(2, 0), (1, 1), (0, 2)]), N2, [[1, 0], [0, 1]]),
        MonoidHom(N1, N1, [[3]]),
        MonoidHom.identity(N2),
        MonoidHom(N1, N2, [[1], [1]]),
    ],
)
def test_bar_iso_through_q3(theta):
    r = verify_bar_iso(theta, qmax=3, samples=5, seed=1)
    assert r.passed, r.counterexamples
