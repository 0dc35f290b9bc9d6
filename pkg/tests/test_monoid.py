import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logdesk.monoid import (
    AffineMonoid,
    MonoidHom,
    TriState,
    amalgamated_sum,
    is_exact,
    is_integral,
    normalize,
)

N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)
P = AffineMonoid(2, [(2, 0), (1, 1), (0, 2)])
T23 = AffineMonoid(1, [(2,), (3,)])


def brute_members(gens, box):
    """Nonnegative combinations with coefficients ≤ box."""
    out = set()
    for c in itertools.product(range(box + 1), repeat=len(gens)):
        out.add(tuple(sum(ci * g[i] for ci, g in zip(c, gens)) for i in range(len(gens[0]))))
    return out


@pytest.mark.parametrize("m, box", [(T23, 4), (P, 3), (AffineMonoid(2, [(1, 0), (1, 1), (1, 3)]), 3)])
def test_contains_matches_enumeration(m, box):
    members = brute_members(m.generators, 2 * box)
    for v in itertools.product(range(0, box + 1), repeat=m.ambient_rank):
        assert m.contains(v) == (v in members), v


def test_numerical_semigroup():
    assert T23.elements_of_degree_at_most(5) == [(0,), (2,), (3,), (4,), (5,)]
    assert not T23.contains((1,))
    assert not T23.is_saturated() and P.is_saturated()


def test_units_and_sharp_part():
    m = AffineMonoid(2, [(1, 0), (0, 1), (0, -1)])
    assert not m.is_sharp and not m.is_group
    assert m.unit_basis == [[0, 1]]
    assert m.sharp_part == N1
    assert m.unit_quotient.group.free_rank == 1
    assert AffineMonoid.lattice(2).is_group


def test_group_data():
    assert MonoidHom(N1, N1, [[2]]).cokernel.torsion == (2,)
    assert MonoidHom(N2, N1, [[1, 1]]).kernel_rank == 1
    assert MonoidHom(P, N2, [[1, 0], [0, 1]]).cokernel.torsion == (2,)
    assert MonoidHom(P, N2, [[1, 0], [0, 1]]).is_injective_gp


def test_map_must_land_in_target():
    with pytest.raises(ValueError):
        MonoidHom(N1, N1, [[-1]])


def test_compose_and_identity():
    f = MonoidHom(N1, N2, [[1], [2]])
    g = MonoidHom(N2, N1, [[1, 1]])
    assert g.compose(f).matrix == [[3]]
    assert MonoidHom.identity(N2).compose(f).matrix == f.matrix


def test_exactness():
    # addition N^2 → N is the standard non-exact map; the diagonal is exact
    assert is_exact(MonoidHom(N2, N1, [[1, 1]])).is_no
    assert is_exact(MonoidHom(N1, N2, [[1], [1]])).is_yes
    assert is_exact(MonoidHom(P, N2, [[1, 0], [0, 1]])).is_yes


def test_integrality_verdicts():
    assert is_integral(MonoidHom(N1, N1, [[2]])).is_yes
    assert is_integral(MonoidHom(N2, N2, [[2, 0], [0, 3]])).is_yes
    verdict = is_integral(MonoidHom(P, N2, [[1, 0], [0, 1]]))
    assert verdict.is_no and "Tor_1" in verdict.evidence


def test_tristate_rendering():
    assert str(TriState.unknown(3)) == "Unknown(3)"
    assert TriState.no("w").to_json() == {"value": "no", "evidence": "w"}
    with pytest.raises(ValueError):
        TriState("maybe")


def test_normalize_reembeds():
    f = normalize(MonoidHom(P, N2, [[1, 0], [0, 1]]))
    assert f.source.ambient_rank == 2 and f.source.group_rank == 2
    assert f.cokernel.torsion == (2,)


def test_pushout_of_kummer_maps():
    s = amalgamated_sum(MonoidHom(N1, N1, [[2]]), MonoidHom(N1, N1, [[3]]))
    # N ⊕_N N with 2a = 3b is the numerical semigroup <2, 3> up to sign
    gens = sorted(abs(g[0]) for g in s.monoid.generators)
    assert gens == [2, 3]
    assert not s.caveat


def test_json_round_trip():
    f = MonoidHom(P, N2, [[1, 0], [0, 1]])
    g = MonoidHom.from_json(f.to_json())
    assert g.source == f.source and g.target == f.target and g.matrix == f.matrix


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=2, max_size=2), st.lists(st.integers(0, 3), min_size=2, max_size=2))
def test_contains_is_closed_under_addition(a, b):
    m = AffineMonoid(2, [(1, 0), (1, 2)])
    x = tuple(a[0] * 1 + a[1] * 1 for _ in range(1)) + (a[1] * 2,)
    y = tuple(b[0] * 1 + b[1] * 1 for _ in range(1)) + (b[1] * 2,)
    assert m.contains(x) and m.contains(y)
    assert m.contains(tuple(u + v for u, v in zip(x, y)))
