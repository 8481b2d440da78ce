import json
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enriques_lattice.errors import BoundViolation, DomainError, InconsistencyError, LookupFailure
from enriques_lattice.fibers import affine_diagram, affine_graph, find_parabolic_subdiagrams
from enriques_lattice.fibrations import (
    CONTEXT_ROWS,
    PartialRankWarning,
    SurfaceContext,
    characteristic_rules_check,
    curve_lattice,
    enumerate_fibrations,
    extra_special_constraints,
    fiber_bisection,
    fiber_bisections,
    half_fiber_test,
    shioda_tate_check,
    surface_constraints,
)
from enriques_lattice.graphs import BUILTIN, CurveGraph, catalog, parse_graph, serialize_graph
from enriques_lattice.oracles import nef_isotropic_classes


def fibs(name):
    return enumerate_fibrations(catalog(name).graph)


def summary(name):
    return [
        sorted((str(lab), flag) for lab, flag in zip(f.labels, f.half_fiber_flags))
        for f in fibs(name)
    ]


@pytest.mark.parametrize(
    "name, count", [("E8-extra-special", 1), ("D8-extra-special", 3), ("E7-extra-special", 2), ("type-I", 9), ("E7-2", 3)]
)
def test_fibration_counts(name, count):
    assert len(fibs(name)) == count


def test_saturated_lattices_are_enriques(graph):
    assert curve_lattice(graph).is_enriques


def test_fibrations_match_chamber_rays(graph):
    assert {f.isotropic_class.coords for f in enumerate_fibrations(graph)} == set(nef_isotropic_classes(graph))


def test_half_fiber_flags():
    assert summary("E8-extra-special") == [[("II*", True)]]
    assert summary("D8-extra-special") == [[("II*", True)], [("I4*", True)], [("II*", False)]]
    assert summary("E7-extra-special") == [[("I2|III", True), ("III*", True)], [("II*", False)]]
    # the III* fiber is a half-fiber and its companion I2/III fiber is simple
    assert summary("E7-2") == [[("I2|III", False), ("III*", True)], [("II*", False)], [("II*", False)]]


def test_simple_fibers_are_exactly_twice_a_lattice_point(graph):
    cl = curve_lattice(graph)
    for f in enumerate_fibrations(graph):
        for d, flag in zip(f.fibers, f.half_fiber_flags):
            null = cl.combination(d.null_class(graph))
            if flag:
                assert null.coords == f.isotropic_class.coords
            else:
                assert all(x % 2 == 0 for x in null.coords)
                assert tuple(x // 2 for x in null.coords) == f.isotropic_class.coords


def test_fibration_invariants(graph):
    cl = curve_lattice(graph)
    found = enumerate_fibrations(graph)
    for i, f in enumerate(found):
        assert f.isotropic_class.square() == 0
        assert all(p >= 0 for p in cl.vertex_pairings(f.isotropic_class).values())
        for a in f.fibers:
            for b in f.fibers:
                if a is not b:
                    assert not set(a.vertices) & set(b.vertices)
                    assert all(graph.multiplicity(x, y) == 0 for x in a.vertices for y in b.vertices)
        for g in found[i + 1:]:
            assert f.isotropic_class.dot(g.isotropic_class) > 0


def test_half_fiber_test_rejects_foreign_fiber():
    f1, f2 = fibs("E7-extra-special")
    cl = curve_lattice(catalog("E7-extra-special").graph)
    assert half_fiber_test(f2, f2.fibers[0], cl) is False
    with pytest.raises(DomainError):
        half_fiber_test(f1, f2.fibers[0], cl)


def _relabel(g, rnd):
    names = [f"x{i}" for i in range(len(g.vertices))]
    rnd.shuffle(names)
    m = dict(zip(g.vertices, names))
    order = list(g.vertices)
    rnd.shuffle(order)
    ann = {k: [[m[v] for v in vs] for vs in val] for k, val in g.annotations.items()}
    return CurveGraph(g.name + "-relabelled", tuple(m[v] for v in order),
                      tuple((m[a], m[b], k) for a, b, k in g.edges), ann)


@settings(max_examples=10)
@given(st.sampled_from(BUILTIN), st.randoms(use_true_random=False))
def test_relabelling_preserves_fibrations(name, rnd):
    g = catalog(name).graph
    h = _relabel(g, rnd)
    key = lambda fs: sorted(sorted((str(l), flag) for l, flag in zip(f.labels, f.half_fiber_flags)) for f in fs)
    assert key(enumerate_fibrations(h)) == key(enumerate_fibrations(g))


def test_partial_rank_warning():
    # removing an end curve leaves a definite D9 diagram
    g = catalog("E8-extra-special").graph.without("R2")
    with pytest.warns(PartialRankWarning):
        found = enumerate_fibrations(g)
    assert found == []


def test_fiber_in_the_radical_is_refused():
    # a bare affine diagram spans a lattice in which its null class vanishes
    with pytest.raises(InconsistencyError), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        enumerate_fibrations(affine_graph("E", 8))


def test_missing_annotation_is_reported():
    data = json.loads(serialize_graph(catalog("D8-extra-special").graph))
    data["annotations"] = {}
    g = parse_graph(json.dumps(data))
    cl = curve_lattice(g)
    assert not cl.is_enriques
    assert any("overlattices" in n for n in cl.warnings)


# --- Shioda-Tate -------------------------------------------------------------------------


def test_shioda_tate_tight_cases():
    (f,) = fibs("E8-extra-special")
    assert shioda_tate_check(f).tight == (("II*",),)
    f1 = fibs("E7-extra-special")[0]
    assert ("III*", "I2|III") in shioda_tate_check(f1).tight


def test_shioda_tate_empty():
    rep = shioda_tate_check([])
    assert rep.checked == 0 and rep.tight == ()


def test_shioda_tate_violation():
    g = affine_graph("E", 8)
    h = affine_graph("A", 1)
    d1 = affine_diagram(g, g.vertices)
    d2 = affine_diagram(h, h.vertices)
    d3 = affine_diagram(affine_graph("A", 2), ("x0", "x1", "x2"))
    with pytest.raises(BoundViolation):
        shioda_tate_check([d1, d2, d3, d3])


def test_no_catalog_fibration_violates_shioda_tate(graph):
    for f in enumerate_fibrations(graph):
        shioda_tate_check(f)


# --- characteristic rules ----------------------------------------------------------------


def test_context_validation():
    with pytest.raises(DomainError):
        SurfaceContext(3, "ordinary")
    with pytest.raises(DomainError):
        SurfaceContext(2, "singular")


def test_quasi_elliptic_outside_characteristic_two():
    (f,) = fibs("E8-extra-special")
    assert any("quasi-elliptic" in v for v in characteristic_rules_check(SurfaceContext(3), f, True))


def test_additive_half_fiber_on_ordinary_surface():
    (f,) = fibs("E8-extra-special")
    out = characteristic_rules_check(SurfaceContext(2, "ordinary"), f, False)
    assert any("additive" in v and "II*" in v for v in out)


def test_two_additive_half_fibers_classical_quasi_elliptic():
    f1 = fibs("E7-extra-special")[0]
    assert sum(f1.half_fiber_flags) == 2
    assert characteristic_rules_check(SurfaceContext(2, "classical"), f1, True) == []


def test_multiplicative_half_fiber_on_classical_surface():
    f = next(f for f in fibs("type-I") if f.has_fiber("I8"))
    out = characteristic_rules_check(SurfaceContext(2, "classical"), f, False)
    assert any("multiplicative" in v for v in out)


@pytest.mark.parametrize(
    "name, classes",
    [
        ("E8-extra-special", ["classical", "supersingular"]),
        ("D8-extra-special", ["classical", "supersingular"]),
        ("E7-extra-special", ["classical"]),
    ],
)
def test_extra_special_constraints(name, classes):
    rep = extra_special_constraints(catalog(name).graph)
    assert rep.characteristics == {2}
    assert rep.classes == classes


def test_extra_special_constraints_rejects_other_graphs():
    with pytest.raises(LookupFailure):
        extra_special_constraints(catalog("type-I").graph)


def test_type_i_constraints():
    rep = surface_constraints(catalog("type-I").graph)
    assert [str(c) for c in rep.admissible] == ["p!=2 classical", "p=2 ordinary"]


def test_context_rows_cover_the_table():
    assert [(c.characteristic == 2, c.surface_class) for c in CONTEXT_ROWS] == [
        (False, "classical"), (True, "classical"), (True, "ordinary"), (True, "supersingular")
    ]


# --- fiber plus bisection ----------------------------------------------------------------


def test_fiber_bisection_on_catalog_graphs():
    found = [fb for name in BUILTIN for fb in fiber_bisections(catalog(name).graph, "~E8")]
    assert found
    for fb in found:
        assert fb.lattice.det() == -4 * fb.root_det == -4


def test_fiber_bisection_needs_a_bisection():
    g = catalog("E8-extra-special").graph
    (d,) = find_parabolic_subdiagrams(g)
    outside = next(v for v in g.vertices if v not in d.vertices)
    # the null class here is the half-fiber, which the extra curve meets once
    with pytest.raises(DomainError):
        fiber_bisection(g, d, outside)
    with pytest.raises(DomainError):
        fiber_bisection(g, d, d.vertices[0])
