from collections import Counter
from functools import lru_cache
from itertools import product

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from enriques_lattice import linalg
from enriques_lattice.errors import ClassificationError, StructuralError
from enriques_lattice.fibers import (
    ADDITIVE,
    MULTIPLICATIVE,
    AffineDiagram,
    ade_gram,
    ade_types,
    affine_diagram,
    affine_graph,
    classify_root_diagram,
    find_parabolic_subdiagrams,
    kodaira_label,
    parse_kodaira,
    root_lattice_gram,
    root_lattices,
)
from enriques_lattice.graphs import CurveGraph, catalog, gram_from_graph

STANDARD_MARKS = {
    ("E", 8): [1, 2, 3, 4, 5, 6, 4, 2, 3],
    ("E", 7): [1, 1, 2, 2, 2, 3, 3, 4],
    ("E", 6): [1, 1, 1, 2, 2, 2, 3],
}


def chain(n, name="chain"):
    verts = tuple(f"c{i}" for i in range(n))
    return CurveGraph(name, verts, tuple((verts[i], verts[i + 1], 1) for i in range(n - 1)))


def test_single_vertex_is_a1():
    g = CurveGraph("one", ("a",), ())
    assert classify_root_diagram(g, ["a"]).label == "A1"


def test_five_chain_is_a5():
    assert classify_root_diagram(chain(5), chain(5).vertices).label == "A5"


def test_ii_star_minus_simple_component_is_e8():
    g = catalog("E8-extra-special").graph
    d = next(d for d in find_parabolic_subdiagrams(g) if d.base_type == "~E8")
    simple = next(v for v, m in zip(d.vertices, d.marks) if m == 1)
    assert classify_root_diagram(g, [v for v in d.vertices if v != simple]).label == "E8"


def test_indefinite_subset_reports_witness():
    g = affine_graph("A", 3)
    with pytest.raises(ClassificationError) as exc:
        classify_root_diagram(g, g.vertices)
    w = exc.value.witness
    gram = gram_from_graph(g).gram
    assert w is not None
    assert sum(w[i] * gram[i][j] * w[j] for i in range(4) for j in range(4)) >= 0


@pytest.mark.parametrize("kind, rank", [(k, r) for n in range(1, 9) for k, r in ade_types(n)])
def test_affine_marks(kind, rank):
    g = affine_graph(kind, rank)
    d = affine_diagram(g, g.vertices)
    assert d.base_type == f"~{kind}{rank}"
    gram = gram_from_graph(g).gram
    n = len(d.vertices)
    assert all(sum(gram[i][j] * d.marks[j] for j in range(n)) == 0 for i in range(n))
    assert linalg.vector_gcd(d.marks) == 1
    if kind == "A":
        assert set(d.marks) == {1}
    elif kind == "D":
        assert Counter(d.marks) == Counter([1] * 4 + [2] * (rank - 3))
    else:
        assert sorted(d.marks) == sorted(STANDARD_MARKS[(kind, rank)])


@pytest.mark.parametrize(
    "kind, rank, labels",
    [
        ("A", 1, ("I2", "III")),
        ("A", 2, ("I3", "IV")),
        ("A", 7, ("I8",)),
        ("D", 4, ("I0*",)),
        ("D", 8, ("I4*",)),
        ("E", 6, ("IV*",)),
        ("E", 7, ("III*",)),
        ("E", 8, ("II*",)),
    ],
)
def test_kodaira_labels(kind, rank, labels):
    g = affine_graph(kind, rank)
    lab = kodaira_label(affine_diagram(g, g.vertices))
    assert lab.candidates == labels
    assert parse_kodaira(str(lab)) == labels
    expected = MULTIPLICATIVE if kind == "A" and rank > 2 else None
    if expected:
        assert set(lab.reductions.values()) == {MULTIPLICATIVE}
    if kind != "A":
        assert set(lab.reductions.values()) == {ADDITIVE}


def test_ambiguous_labels_keep_both_reductions():
    g = affine_graph("A", 1)
    lab = kodaira_label(affine_diagram(g, g.vertices))
    assert lab.reductions == {"I2": MULTIPLICATIVE, "III": ADDITIVE}


def test_kodaira_label_rejects_unknown_type():
    with pytest.raises(StructuralError):
        kodaira_label(AffineDiagram(("a",), (1,), "~B3"))


def test_double_edge_pair():
    g = CurveGraph("pair", ("a", "b"), (("a", "b", 2),))
    (d,) = find_parabolic_subdiagrams(g)
    assert d.marks == (1, 1)
    assert str(kodaira_label(d)) == "I2|III"


def test_e8_catalog_contains_e8_diagram():
    g = catalog("E8-extra-special").graph
    types = [d.base_type for d in find_parabolic_subdiagrams(g)]
    assert types == ["~E8"]


def test_type_i_contains_eight_cycle():
    g = catalog("type-I").graph
    cycles = [d for d in find_parabolic_subdiagrams(g) if d.base_type == "~A7"]
    assert any(set(d.vertices) == {"R8", "R21", "R22", "R23", "R24", "R25", "R26", "R27"} for d in cycles)


def test_parabolic_diagrams_on_catalog(graph):
    gram = gram_from_graph(graph)
    for d in find_parabolic_subdiagrams(graph):
        null = d.null_class(graph)
        assert d.rank <= 8
        for v in d.vertices:
            assert gram.pair(null, gram.basis_vector(graph.index[v]).coords) == 0
        assert gram.pair(null, null) == 0


def test_no_parabolic_diagrams_in_a_chain():
    assert find_parabolic_subdiagrams(chain(6)) == []


def test_root_lattice_count_rank_8():
    # independent count: multisets of connected types whose ranks sum to 8
    types = [(k, r) for n in range(1, 9) for k, r in ade_types(n)]

    def count(left, start):
        if left == 0:
            return 1
        return sum(count(left - types[i][1], i) for i in range(start, len(types)) if types[i][1] <= left)

    assert len(root_lattices(8)) == count(8, 0) == 39


@pytest.mark.parametrize("comps", root_lattices(8))
def test_root_lattice_det_is_product(comps):
    det = abs(linalg.bareiss_det(root_lattice_gram(comps)))
    expected = 1
    for k, r in comps:
        expected *= {"A": r + 1, "D": 4}.get(k) or {6: 3, 7: 2, 8: 1}[r]
    assert det == expected


# --- congruence oracle on small ranks ---------------------------------------------------


@lru_cache(maxsize=None)
def _roots(kind, rank):
    gram = ade_gram(kind, rank)
    bound = {"A": 1, "D": 2, "E": 3}[kind]
    return [c for c in product(range(-bound, bound + 1), repeat=rank)
            if sum(c[i] * gram[i][j] * c[j] for i in range(rank) for j in range(rank)) == -2]


def _embeds(gram, comps):
    """Backtrack an isometric embedding of ``gram`` into the root lattice ``comps``."""
    target = root_lattice_gram(comps)
    n = len(target)
    roots = []
    off = 0
    for k, r in comps:
        for c in _roots(k, r):
            roots.append(tuple([0] * off + list(c) + [0] * (n - off - r)))
        off += r

    def pair(u, v):
        return sum(u[i] * target[i][j] * v[j] for i in range(n) for j in range(n) if u[i] and v[j])

    images = []

    def go(i):
        if i == len(gram):
            return abs(linalg.bareiss_det([list(x) for x in images])) == 1
        for r in roots:
            if all(pair(r, images[j]) == gram[i][j] for j in range(i)):
                images.append(r)
                if go(i + 1):
                    return True
                images.pop()
        return False

    return go(0)


@st.composite
def definite_graphs(draw):
    n = draw(st.integers(1, 6))
    verts = [f"v{i}" for i in range(n)]
    edges = [(verts[i], verts[j], 1) for i in range(n) for j in range(i + 1, n) if draw(st.booleans())]
    g = CurveGraph("g", tuple(verts), tuple(edges))
    assume(linalg.inertia(gram_from_graph(g).gram)[1] == n)
    return g


# the embedding search is exponential; fewer examples keep the suite fast
@settings(max_examples=50)
@given(definite_graphs())
def test_classification_matches_congruence_oracle(g):
    d = classify_root_diagram(g, g.vertices)
    gram = [list(r) for r in gram_from_graph(g).gram]
    matches = [c for c in root_lattices(len(gram)) if abs(linalg.bareiss_det(root_lattice_gram(c))) == abs(linalg.bareiss_det(gram)) and _embeds(gram, c)]
    assert len(matches) == 1
    assert Counter(matches[0]) == Counter(d.components)


@given(definite_graphs(), st.randoms(use_true_random=False))
def test_classification_ignores_vertex_order(g, rnd):
    order = list(g.vertices)
    rnd.shuffle(order)
    h = CurveGraph(g.name, tuple(order), g.edges)
    assert classify_root_diagram(h, h.vertices).label == classify_root_diagram(g, g.vertices).label
