import itertools

import pytest

from logdesk.abelian import QQ, FgAbGroup
from logdesk.bar import hochschild_homology, loghh_homology
from logdesk.glued import (
    GluedLogScheme,
    box_invariance_check,
    cech_totalize,
    degree_box,
    descent_check,
    monomial_chart,
    omega_cohomology,
    product,
    projective_bundle_check,
    residue_check,
    standard_scheme,
)
from logdesk.monoid import AffineMonoid, MonoidHom, PreconditionError
from logdesk.prelog import PreLogMap, PreLogRing

N1 = AffineMonoid.free(1)
N2 = AffineMonoid.free(2)


def test_catalog_builds():
    for name in ["point", "A1", "A2", "A1_log", "A1_zariski", "P1", "P2", "boxbar", "blowup_A2"]:
        x = standard_scheme(name)
        assert x.depth == len(x.charts) - 1
    with pytest.raises(KeyError):
        standard_scheme("P7")


def test_missing_overlap_is_rejected():
    a = monomial_chart(QQ, [False], [False], [(1,)])
    b = monomial_chart(QQ, [False], [False], [(-1,)])
    pt = monomial_chart(QQ, [], [], [])
    with pytest.raises(PreconditionError):
        GluedLogScheme("bad", [a, b], {}, pt, 1)


def test_point():
    t = cech_totalize(standard_scheme("point"), "logHH", 2, [()])
    assert [t.get(n, ()) for n in range(3)] == [FgAbGroup(1), FgAbGroup(), FgAbGroup()]


@pytest.mark.parametrize("theory", ["HH", "logHH"])
def test_single_chart_equals_chart_theory(theory):
    x = standard_scheme("A2")
    f = PreLogMap.over_point(PreLogRing.trivial(N2, QQ))
    degs = list(itertools.product(range(3), repeat=2))
    chart = hochschild_homology(f, 2, degs)
    glob = cech_totalize(x, theory, 2, degree_box(2, 2))
    for m in degree_box(2, 2):
        for n in range(3):
            expect = chart.get(n, m) if all(c >= 0 for c in m) else FgAbGroup()
            assert glob.get(n, m) == expect


def test_log_line_single_chart():
    x = standard_scheme("A1_log")
    f = PreLogMap.over_point(PreLogRing.canonical(N1, QQ))
    chart = loghh_homology(f, 2, [(w,) for w in range(4)])
    glob = cech_totalize(x, "logHH", 2, [(w,) for w in range(4)])
    assert all(glob.get(n, (w,)) == chart.get(n, (w,)) for n in range(3) for w in range(4))


def test_projective_line():
    t = cech_totalize(standard_scheme("P1"), "logHH", 2, degree_box(1, 4))
    assert t.get(0, (0,)) == FgAbGroup(2)
    assert t.totals()[0] == FgAbGroup(2)
    assert t.totals()[1].is_zero and t.totals()[2].is_zero


def test_box():
    t = cech_totalize(standard_scheme("boxbar"), "logHH", 2, degree_box(1, 4))
    assert t.totals() == {0: FgAbGroup(1), 1: FgAbGroup(), 2: FgAbGroup()}


def test_hodge_numbers_of_p2():
    x = standard_scheme("P2")
    for q in range(3):
        hs = omega_cohomology(x, q, (0, 0), log=False)
        assert [h.free_rank for h in hs] == [int(p == q) for p in range(3)]


def test_window_guard_flags_deep_covers():
    t = cech_totalize(standard_scheme("P2"), "logHH", 2, [(0, 0)])
    assert t.provenance["flagged_degrees"] == [2]
    assert t.provenance["cover_depth"] == 2


def test_chart_order_does_not_matter():
    x = standard_scheme("blowup_A2")
    degs = degree_box(2, 2)
    a = cech_totalize(x, "logHH", 2, degs)
    b = cech_totalize(x, "logHH", 2, degs, order=[1, 0])
    assert a.pi == b.pi


def test_blowup_has_one_extra_class_at_origin():
    t = cech_totalize(standard_scheme("blowup_A2"), "logHH", 2, [(0, 0)])
    assert [t.get(n, (0, 0)).free_rank for n in range(3)] == [1, 1, 0]


@pytest.mark.parametrize("config", ["affine", "line", "blowup"])
def test_residue_sequences(config):
    r = residue_check(config, nmax=1, radius=3)
    assert r.passed, r.details


def test_affine_residue_explicit_map():
    r = residue_check("affine", nmax=1, radius=3)
    assert r.details["dt_to_t_dlog_t"]
    row0 = r.details["rows"][0]
    assert row0["dims"]["HH(A/a)"][0] == 1 and row0["rank_res"] == 1


def test_kummer_residue():
    assert residue_check("affine", nmax=1, exponent=2, radius=4).passed
    with pytest.raises(KeyError):
        residue_check("cusp")


@pytest.mark.parametrize("n, base", [(0, "point"), (1, "point"), (1, "A1"), (2, "point")])
def test_projective_bundle(n, base):
    assert projective_bundle_check(n, base, qmax=2, radius=2).passed


@pytest.mark.parametrize("name", ["point", "A1", "A1_log"])
def test_box_invariance(name):
    assert box_invariance_check(standard_scheme(name), qmax=2, radius=2).passed


def test_product_charts():
    xb = product(standard_scheme("A1"), standard_scheme("boxbar"))
    assert len(xb.charts) == 2 and xb.fibre_rank == 2


def test_descent():
    assert descent_check(MonoidHom(N1, N1, [[2]]), k=QQ).passed
    assert descent_check(standard_scheme("A1_zariski")).passed
    assert descent_check(MonoidHom.identity(N1)).passed
    with pytest.raises(PreconditionError):
        descent_check(MonoidHom(N1, N1, [[2]]), k="GF2")
