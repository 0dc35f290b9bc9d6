import pytest

from logdesk.abelian import QQ, ZZ
from logdesk.polyhedra import ScaleError
from logdesk.toric import (
    Fan,
    FanError,
    ToricDivisor,
    cohomology,
    degree_box,
    dual_monoid,
    invariance_check,
    is_subdivision,
    pone_bar_check,
    standard_fan,
    star_subdivision,
)
from logdesk.polyhedra import Cone

from oracles import line_bundle_p1, line_bundle_p2


def totals(h):
    return tuple(sum(g.free_rank for g in h[i].values()) for i in sorted(h))


@pytest.mark.parametrize("a", range(-4, 4))
def test_line_bundles_on_p1(a):
    f = standard_fan("P1")
    h = cohomology(f, ZZ, ToricDivisor({(-1,): a}), 0, degree_box(1, abs(a) + 2), imax=1)
    assert totals(h) == line_bundle_p1(a)


@pytest.mark.parametrize("a", [-4, -3, -1, 0, 1, 2])
def test_line_bundles_on_p2(a):
    f = standard_fan("P2")
    h = cohomology(f, QQ, ToricDivisor({(-1, -1): a}), 0, degree_box(2, abs(a) + 2), imax=2)
    assert totals(h) == line_bundle_p2(a)


def test_hodge_numbers_of_p1_from_o_minus_two():
    f = standard_fan("P1")
    box = degree_box(1, 3)
    assert totals(cohomology(f, QQ, ToricDivisor(), 0, box, imax=1)) == (1, 0)
    h = cohomology(f, QQ, ToricDivisor({(-1,): -2}), 0, box, imax=1)
    assert totals(h) == (0, 1)
    assert not h[1][(-1,)].is_zero


def test_log_variant_multiplies_by_exterior_power():
    f = standard_fan("P2")
    h = cohomology(f, QQ, ToricDivisor(), 1, [(0, 0)], imax=0)
    assert h[0][(0, 0)].free_rank == 2


def test_cech_is_independent_of_cone_order():
    f = standard_fan("blowup_P2")
    d = ToricDivisor({(-1, -1): -3})
    box = degree_box(2, 2)
    a = cohomology(f, QQ, d, 0, box)
    b = cohomology(f, QQ, d, 0, box, order=list(reversed(range(len(f.cones)))))
    assert a == b


def test_dual_monoid():
    assert len(dual_monoid(Cone([[1, 0], [1, 2]], 2)).generators) == 3


def test_fan_validation():
    with pytest.raises(FanError):
        Fan(2, [[[1, 0], [1, 2]], [[1, 1], [0, 1]]])
    with pytest.raises(ScaleError):
        Fan(4, [])


def test_star_subdivisions_are_certified():
    for name in ("affine_plane", "P2"):
        s = star_subdivision(standard_fan(name), (1, 1))
        assert is_subdivision(s.refined, s.coarse)
    assert len(star_subdivision(standard_fan("affine_plane"), (1, 1)).refined.cones) == 2
    assert len(star_subdivision(standard_fan("P2"), (1, 1)).refined.cones) == 4


def test_false_subdivisions_have_witnesses():
    a2 = standard_fan("affine_plane")
    half = Fan(2, [[[1, 0], [1, 1]]])
    cert = is_subdivision(half, a2)
    assert not cert
    assert cert.witness == "wall [[1, 1]] of [[1, 0], [1, 1]] inside [[1, 0], [0, 1]] is not shared"
    cert = is_subdivision(standard_fan("P1"), a2)
    assert not cert and cert.witness == "ambient ranks differ"


def test_invariance_on_radius_six():
    for name in ("affine_plane", "P2"):
        assert invariance_check(star_subdivision(standard_fan(name), (1, 1)), QQ, radius=6).passed


def test_three_module_complex():
    assert pone_bar_check(QQ, radius=6).passed


def test_fan_json_round_trip():
    f = standard_fan("blowup_P2")
    g = Fan.from_json(f.to_json())
    assert sorted(map(sorted, (c.gens for c in f.cones))) == sorted(map(sorted, (c.gens for c in g.cones)))
    assert Fan.from_json("P1").dim == 1
