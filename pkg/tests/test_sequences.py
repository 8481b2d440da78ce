import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enriques_lattice.errors import DomainError, UnsupportedError, ValidationError
from enriques_lattice.fibrations import curve_lattice, enumerate_fibrations
from enriques_lattice.graphs import BUILTIN, CurveGraph, catalog
from enriques_lattice.lattice import IntegralLattice
from enriques_lattice.sequences import (
    DegenerateSequence,
    IsotropicSequence,
    degenerate_closure,
    extend_sequence,
    find_sequences,
    half_fiber_classes,
    sequence_gram,
    validate_sequence,
)


def g_(name):
    return catalog(name).graph


def of_length(seqs, c):
    return [s for s in seqs if len(s) == c]


def test_every_half_fiber_is_a_1_sequence(graph):
    for f in enumerate_fibrations(graph):
        assert validate_sequence(IsotropicSequence((f.isotropic_class,), graph)) == []


@pytest.mark.parametrize("name, count", [("D8-extra-special", 2), ("E7-extra-special", 1), ("E8-extra-special", 0)])
def test_two_sequences(name, count):
    assert len(of_length(find_sequences(g_(name), 2), 2)) == count


@pytest.mark.parametrize("name", ["D8-extra-special", "E7-extra-special"])
def test_two_sequences_do_not_extend(name):
    g = g_(name)
    for s in of_length(find_sequences(g, 2), 2):
        res = extend_sequence(s, g)
        assert not res.extendable
        # the certificate names every half-fiber class of the graph
        assert sorted(fid for fid, _ in res.certificate) == sorted(f.id for f in half_fiber_classes(g))


def test_e8_one_sequence_does_not_extend():
    g = g_("E8-extra-special")
    (s,) = find_sequences(g, 10)
    assert not extend_sequence(s, g).extendable


def test_e7_2_sequences():
    g = g_("E7-2")
    seqs = find_sequences(g, 10)
    assert of_length(seqs, 4) == []
    threes = of_length(seqs, 3)
    assert threes and all(not extend_sequence(s, g).extendable for s in threes)


def test_type_i_sequences():
    g = g_("type-I")
    seqs = find_sequences(g, 10)
    assert [len(of_length(seqs, c)) for c in range(1, 6)] == [9, 17, 11, 2, 0]
    stuck = [s.sources for s in of_length(seqs, 3) if not extend_sequence(s, g).extendable]
    assert stuck == [("F2", "F3", "F9"), ("F3", "F4", "F5"), ("F5", "F6", "F7"), ("F7", "F8", "F9")]


def test_extension_returns_all_one_step_extensions():
    g = g_("type-I")
    for s in of_length(find_sequences(g, 3), 2):
        res = extend_sequence(s, g)
        assert len(res.extensions) + len(res.certificate) == len(half_fiber_classes(g))
        for e in res.extensions:
            assert validate_sequence(e) == []


@pytest.mark.parametrize("c_max", [0, 11])
def test_c_max_range(c_max):
    with pytest.raises(DomainError):
        find_sequences(g_("E8-extra-special"), c_max)


def test_axiom_1_violation():
    g = g_("D8-extra-special")
    f1, f2, _ = enumerate_fibrations(g)
    assert f1.isotropic_class.dot(f2.isotropic_class) == 2
    out = validate_sequence(IsotropicSequence((f1.isotropic_class, f2.isotropic_class), g))
    assert any(v.startswith("axiom 1") for v in out)
    with pytest.raises(ValidationError):
        extend_sequence(IsotropicSequence((f1.isotropic_class, f2.isotropic_class)), g)


def test_non_primitive_and_non_isotropic_members():
    g = g_("E8-extra-special")
    cl = curve_lattice(g)
    (f,) = enumerate_fibrations(g)
    out = validate_sequence(IsotropicSequence((f.isotropic_class * 2,), g))
    assert any("not primitive" in v for v in out)
    out = validate_sequence(IsotropicSequence((cl.vertex("R2"),), g))
    assert any("!= 0" in v for v in out)


def test_axiom_2_violation():
    g = g_("D8-extra-special")
    s = of_length(find_sequences(g, 2), 2)[0]
    (d,) = degenerate_closure(s, g, 4, limit=1)
    blocks = [list(b) for b in d.blocks]
    k = next(i for i, (_, chain) in enumerate(blocks) if len(chain) >= 2)
    f, chain = blocks[k]
    # swap in a curve that does not meet the previous link
    bad = next(v for v in g.vertices if v not in chain and g.multiplicity(v, chain[0]) == 0 and v != chain[0])
    blocks[k] = (f, (chain[0], bad) + tuple(chain[2:]))
    out = validate_sequence(DegenerateSequence(tuple(map(tuple, blocks)), g, d.sources))
    assert any(v.startswith("axiom 2") for v in out)


def test_mismatched_lattices():
    a = IntegralLattice.from_rows([[0, 1], [1, 0]]).vector((1, 0))
    b = IntegralLattice.from_rows([[0, 2], [2, 0]]).vector((1, 0))
    with pytest.raises(DomainError):
        validate_sequence(IsotropicSequence((a, b)))


def test_ten_sequences_on_d8():
    g = g_("D8-extra-special")
    total = 0
    for s in of_length(find_sequences(g, 2), 2):
        found = degenerate_closure(s, g, 10)
        assert found
        for d in found:
            total += 1
            assert d.n == 10 and d.c >= 2
            assert validate_sequence(d) == []
            assert all(m.square() == 0 for m in d.members())
            gram = sequence_gram(d)
            assert gram.rank() == 10
            assert abs(gram.det()) == 9
    assert total == 5


def test_closure_to_nine_is_unsupported():
    g = g_("D8-extra-special")
    s = of_length(find_sequences(g, 2), 2)[0]
    with pytest.raises(UnsupportedError):
        degenerate_closure(s, g, 9)
    with pytest.raises(DomainError):
        degenerate_closure(s, g, 11)
    with pytest.raises(DomainError):
        degenerate_closure(s, g, 1)


def test_closure_to_own_length_is_the_sequence():
    g = g_("E7-extra-special")
    (s,) = of_length(find_sequences(g, 2), 2)
    (d,) = degenerate_closure(s, g, 2)
    assert d.n == 2 and all(not chain for _, chain in d.blocks)


def test_small_grams():
    g = g_("E7-extra-special")
    (s,) = of_length(find_sequences(g, 2), 2)
    two = sequence_gram(s)
    assert two.gram == ((0, 1), (1, 0)) and two.det() == -1
    one = sequence_gram(IsotropicSequence(s.half_fibers[:1], g))
    assert one.gram == ((0,),) and one.det() == 0


def test_abstract_ten_sequence_gram():
    gram = IntegralLattice.from_rows([[int(i != j) for j in range(10)] for i in range(10)])
    assert abs(gram.det()) == 9


def test_non_extendable_two_sequences_have_a_special_ii_star_member(graph):
    cl = curve_lattice(graph)
    fibs = {f.id: f for f in enumerate_fibrations(graph)}
    for s in of_length(find_sequences(graph, 2), 2):
        if extend_sequence(s, graph).extendable:
            continue
        assert any(fibs[i].has_fiber("II*") and fibs[i].bisections(cl) for i in s.sources)


@settings(max_examples=5)
@given(st.sampled_from(BUILTIN), st.randoms(use_true_random=False))
def test_sequence_counts_survive_relabelling(name, rnd):
    g = g_(name)
    names = [f"y{i}" for i in range(len(g.vertices))]
    rnd.shuffle(names)
    m = dict(zip(g.vertices, names))
    ann = {k: [[m[v] for v in vs] for vs in val] for k, val in g.annotations.items()}
    h = CurveGraph(name + "-r", tuple(m[v] for v in g.vertices), tuple((m[a], m[b], k) for a, b, k in g.edges), ann)
    count = lambda x: sorted(len(s) for s in find_sequences(x, 10))
    assert count(h) == count(g)


def test_canonical_form_sorts_members():
    g = g_("D8-extra-special")
    s = of_length(find_sequences(g, 2), 2)[0]
    rev = IsotropicSequence(s.half_fibers[::-1], g, s.sources[::-1])
    assert rev.canonical() == s.canonical()
