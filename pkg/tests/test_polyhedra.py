import pytest

from logdesk.polyhedra import Cone, ScaleError, UnsupportedError, dual_monoid_generators, hilbert_basis

from oracles import cone_points, irreducibles


@pytest.mark.parametrize(
    "rays",
    [
        [[1, 0], [0, 1]],
        [[1, 0], [1, 2]],
        [[1, 0], [1, 3]],
        [[2, -1], [-1, 2]],
        [[1, 2], [3, 1]],
        [[0, 1], [4, -3]],
    ],
)
def test_hilbert_basis_against_enumeration(rays):
    box = sum(abs(x) for r in rays for x in r)
    expected = irreducibles(cone_points(rays, box))
    assert hilbert_basis(rays, 2) == expected


def test_hilbert_basis_of_ray_is_primitive():
    assert hilbert_basis([[2, 4]], 2) == [[1, 2]]


def test_hilbert_basis_needs_pointed_cone():
    with pytest.raises(UnsupportedError):
        hilbert_basis([[1, 0], [-1, 0], [0, 1]], 2)


def test_hilbert_basis_scale_guard():
    with pytest.raises(ScaleError):
        hilbert_basis([[1, 0, 0, 0, 0]], 5)


def test_cone_membership_and_faces():
    c = Cone([[1, 0], [1, 2]], 2)
    assert c.contains([2, 1]) and not c.contains([0, 1])
    assert c.is_pointed and c.span_dim == 2
    assert len(c.faces()) == 4  # zero, two rays, the cone


def test_dual_of_zero_cone_is_lattice():
    gens = dual_monoid_generators([], 2)
    assert sorted(map(tuple, gens)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]


def test_dual_monoid_of_singular_cone():
    # dual of cone((1,0),(1,2)) is cone((0,1),(2,-1)); Hilbert basis has 3 elements
    gens = dual_monoid_generators([[1, 0], [1, 2]], 2)
    assert sorted(map(tuple, gens)) == [(0, 1), (1, 0), (2, -1)]
