"""ADE and affine ADE recognition of subdiagrams; Kodaira fiber labels."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable

from . import linalg
from .errors import ClassificationError, StructuralError
from .graphs import CurveGraph

ADE_DET = {"E6": 3, "E7": 2, "E8": 1}


def ade_det(kind: str, rank: int) -> int:
    if kind == "A":
        return rank + 1
    if kind == "D":
        return 4
    return ADE_DET[f"{kind}{rank}"]


@dataclass(frozen=True)
class AdeDiagram:
    components: tuple[tuple[str, int], ...]
    vertex_assignment: dict[str, tuple[int, int]]

    @property
    def label(self) -> str:
        return "+".join(f"{k}{r}" for k, r in self.components) or "0"

    @property
    def rank(self) -> int:
        return sum(r for _, r in self.components)

    def det(self) -> int:
        d = 1
        for k, r in self.components:
            d *= ade_det(k, r)
        return d


@dataclass(frozen=True)
class AffineDiagram:
    """A connected parabolic subdiagram with its null-class marks."""

    vertices: tuple[str, ...]
    marks: tuple[int, ...]
    base_type: str  # e.g. "~E8", "~A7", "~D8"

    @property
    def rank(self) -> int:
        return len(self.vertices) - 1

    def mark(self, v: str) -> int:
        return self.marks[self.vertices.index(v)]

    def null_class(self, graph: CurveGraph) -> list[int]:
        """Coefficient vector on all graph vertices."""
        m = dict(zip(self.vertices, self.marks))
        return [m.get(v, 0) for v in graph.vertices]


MULTIPLICATIVE = "multiplicative"
ADDITIVE = "additive"


@dataclass(frozen=True)
class KodairaLabel:
    candidates: tuple[str, ...]
    affine: AffineDiagram

    def __str__(self) -> str:
        return "|".join(self.candidates)

    def reduction(self, symbol: str) -> str:
        return MULTIPLICATIVE if symbol.startswith("I") and not symbol.endswith("*") and symbol[1:].isdigit() else ADDITIVE

    @property
    def reductions(self) -> dict[str, str]:
        return {c: self.reduction(c) for c in self.candidates}


# --- shape recognition -------------------------------------------------------------


def _induced_gram(g: CurveGraph, verts: list[str]) -> list[list[int]]:
    return [[-2 if a == b else g.multiplicity(a, b) for b in verts] for a in verts]


def _components(g: CurveGraph, verts: Iterable[str]) -> list[list[str]]:
    order = [v for v in g.vertices if v in set(verts)]
    left = set(order)
    comps = []
    for v in order:
        if v not in left:
            continue
        comp = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in g.neighbours(x):
                if y in left and y not in comp:
                    comp.add(y)
                    stack.append(y)
        left -= comp
        comps.append([u for u in order if u in comp])
    return comps


def _arms(g: CurveGraph, verts: set[str], centre: str) -> list[list[str]]:
    arms = []
    for start in g.neighbours(centre):
        if start not in verts:
            continue
        arm = [start]
        prev, cur = centre, start
        while True:
            nxt = [w for w in g.neighbours(cur) if w in verts and w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            arm.append(cur)
        arms.append(arm)
    return sorted(arms, key=len)


def _path_order(g: CurveGraph, verts: set[str]) -> list[str]:
    ends = [v for v in verts if sum(w in verts for w in g.neighbours(v)) <= 1]
    start = min(ends, key=g.vertices.index)
    order = [start]
    prev = None
    while len(order) < len(verts):
        nxt = [w for w in g.neighbours(order[-1]) if w in verts and w != prev]
        prev = order[-1]
        order.append(nxt[0])
    return order


def _shape(g: CurveGraph, comp: list[str]) -> tuple[str, int, list[str]]:
    """Recognise a connected component as finite or affine ADE by shape.

    Returns (type letter with optional leading '~', rank, canonical
    vertex order) or raises ClassificationError for other shapes.
    """
    verts = set(comp)
    n = len(comp)
    deg = {v: sum(g.multiplicity(v, w) for w in g.neighbours(v) if w in verts) for v in comp}
    edges = [(a, b, m) for a, b, m in g.edges if a in verts and b in verts]
    if any(m == 2 for *_, m in edges):
        if n == 2:
            return "~A", 1, comp
        raise ClassificationError(f"double edge inside a larger diagram {comp}")
    n_edges = len(edges)
    if n_edges == n and all(d == 2 for d in deg.values()):
        order = [comp[0]]
        prev = None
        while len(order) < n:
            nxt = [w for w in g.neighbours(order[-1]) if w in verts and w != prev and w not in order]
            prev = order[-1]
            order.append(nxt[0])
        return "~A", n - 1, order
    if n_edges != n - 1:
        raise ClassificationError(f"subdiagram {comp} is neither a tree nor a cycle")
    high = [v for v in comp if deg[v] >= 3]
    if not high:
        return "A", n, _path_order(g, verts)
    if len(high) == 1 and deg[high[0]] == 4:
        arms = _arms(g, verts, high[0])
        if n == 5:
            return "~D", 4, [high[0]] + [a[0] for a in arms]
        raise ClassificationError(f"star with long arms {comp}")
    if len(high) == 2 and all(deg[v] == 3 for v in high):
        a, b = high
        arms_a = [x for x in _arms(g, verts, a) if b not in x]
        arms_b = [x for x in _arms(g, verts, b) if a not in x]
        if all(len(x) == 1 for x in arms_a + arms_b):
            middle = _path_order(g, verts - {x[0] for x in arms_a + arms_b})
            order = [x[0] for x in arms_a] + middle + [x[0] for x in arms_b]
            return "~D", n - 1, order
        raise ClassificationError(f"two branch points with long arms {comp}")
    if len(high) == 1 and deg[high[0]] == 3:
        c = high[0]
        arms = _arms(g, verts, c)
        lens = tuple(len(a) for a in arms)
        order = [c] + [v for a in arms for v in a]
        table = {(1, 2, 2): ("E", 6), (1, 2, 3): ("E", 7), (1, 2, 4): ("E", 8),
                 (2, 2, 2): ("~E", 6), (1, 3, 3): ("~E", 7), (1, 2, 5): ("~E", 8)}
        if lens[:2] == (1, 1):
            return "D", n, order
        if lens in table:
            k, r = table[lens]
            return k, r, order
        raise ClassificationError(f"branch arms {lens} are not of ADE type")
    raise ClassificationError(f"subdiagram {comp} is not of ADE type")


def classify_root_diagram(g: CurveGraph, subset: Iterable[str]) -> AdeDiagram:
    verts = [v for v in g.vertices if v in set(subset)]
    gram = _induced_gram(g, verts)
    pos, neg, zero = linalg.inertia(gram)
    if neg != len(verts):
        witness = _nonnegative_vector(gram)
        raise ClassificationError(
            f"induced form on {verts} is not negative definite (signature {pos},{neg},{zero})",
            witness=witness,
        )
    comps = []
    assignment: dict[str, tuple[int, int]] = {}
    for comp in _components(g, verts):
        kind, r, order = _shape(g, comp)
        if kind.startswith("~"):
            raise ClassificationError(f"affine component inside a definite diagram: {comp}")
        comps.append((kind, r, order))
    comps.sort(key=lambda c: ("ADE".index(c[0]), -c[1], [g.vertices.index(v) for v in c[2]]))
    for i, (_, _, order) in enumerate(comps):
        for pos_, v in enumerate(order):
            assignment[v] = (i, pos_)
    diag = AdeDiagram(tuple((k, r) for k, r, _ in comps), assignment)
    if diag.det() != abs(linalg.bareiss_det(gram)):
        raise ClassificationError(f"determinant mismatch for {diag.label}")
    return diag


def _nonnegative_vector(gram) -> list[Fraction] | None:
    """A kernel vector, or a basis vector combination with positive square."""
    ker = linalg.nullspace(gram)
    if ker:
        return ker[0]
    n = len(gram)
    for i in range(n):
        for j in range(n):
            v = [Fraction(0)] * n
            v[i] += 1
            v[j] += 1
            if sum(v[a] * gram[a][b] * v[b] for a in range(n) for b in range(n)) >= 0:
                return v
    return None


def _primitive_positive_kernel(gram) -> list[int] | None:
    ker = linalg.nullspace(gram)
    if len(ker) != 1:
        return None
    v = ker[0]
    den = 1
    for x in v:
        den = lcm(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = linalg.vector_gcd(ints)
    ints = [x // g for x in ints]
    if all(x < 0 for x in ints):
        ints = [-x for x in ints]
    if not all(x > 0 for x in ints):
        return None
    return ints


def affine_diagram(g: CurveGraph, subset: Iterable[str]) -> AffineDiagram:
    verts = [v for v in g.vertices if v in set(subset)]
    if not g.is_connected(verts):
        raise ClassificationError(f"{verts} is not connected")
    gram = _induced_gram(g, verts)
    pos, neg, zero = linalg.inertia(gram)
    if pos or zero != 1:
        raise ClassificationError(f"{verts} is not parabolic (signature {pos},{neg},{zero})")
    marks = _primitive_positive_kernel(gram)
    if marks is None:
        raise ClassificationError(f"kernel of {verts} is not a positive ray")
    kind, r, _ = _shape(g, verts)
    if not kind.startswith("~") or r != len(verts) - 1:
        raise ClassificationError(f"{verts} has shape {kind}{r}, not affine")
    return AffineDiagram(tuple(verts), tuple(marks), f"{kind}{r}")


def find_parabolic_subdiagrams(g: CurveGraph) -> list[AffineDiagram]:
    """All connected parabolic induced subdiagrams, maximal by inclusion.

    Connected subsets are grown one neighbour at a time; a subset whose
    form is not negative semidefinite is never extended, since every
    principal submatrix of a semidefinite form is semidefinite.
    """
    order = {v: i for i, v in enumerate(g.vertices)}
    seen: set[frozenset] = set()
    parabolic: list[frozenset] = []
    frontier = [frozenset([v]) for v in g.vertices]
    seen.update(frontier)
    while frontier:
        nxt = []
        for s in frontier:
            verts = sorted(s, key=order.get)
            pos, neg, zero = linalg.inertia(_induced_gram(g, verts))
            if pos:
                continue
            if zero:
                parabolic.append(s)
                continue  # connected supersets of an affine diagram are indefinite
            for v in s:
                for w in g.neighbours(v):
                    if w not in s:
                        t = s | {w}
                        if t not in seen:
                            seen.add(t)
                            nxt.append(t)
        frontier = nxt
    maximal = [s for s in parabolic if not any(s < t for t in parabolic)]
    diagrams = [affine_diagram(g, s) for s in maximal]
    diagrams.sort(key=lambda d: [order[v] for v in d.vertices])
    return diagrams


def kodaira_label(d: AffineDiagram) -> KodairaLabel:
    kind, r = d.base_type[:2], int(d.base_type[2:])
    if kind == "~A":
        if r == 1:
            cands = ("I2", "III")
        elif r == 2:
            cands = ("I3", "IV")
        else:
            cands = (f"I{r + 1}",)
    elif kind == "~D" and r >= 4:
        cands = (f"I{r - 4}*",)
    elif kind == "~E" and r in (6, 7, 8):
        cands = ({6: "IV*", 7: "III*", 8: "II*"}[r],)
    else:
        raise StructuralError(f"{d.base_type} is not an affine ADE type")
    return KodairaLabel(cands, d)


def parse_kodaira(text: str) -> tuple[str, ...]:
    return tuple(text.split("|"))


# --- standard root lattices -------------------------------------------------------------


def ade_gram(kind: str, rank: int) -> list[list[int]]:
    """Negative definite Gram matrix of the simple roots of A_n, D_n or E_n."""
    if kind == "A" and rank >= 1:
        edges = [(i, i + 1) for i in range(rank - 1)]
    elif kind == "D" and rank >= 4:
        edges = [(i, i + 1) for i in range(rank - 2)] + [(rank - 3, rank - 1)]
    elif kind == "E" and rank in (6, 7, 8):
        # branch node 2; arms 0-1, 3, and 4..rank-1
        edges = [(0, 1), (1, 2), (2, 3), (2, 4)] + [(i, i + 1) for i in range(4, rank - 1)]
    else:
        raise StructuralError(f"no root system {kind}{rank}")
    g = [[-2 if i == j else 0 for j in range(rank)] for i in range(rank)]
    for a, b in edges:
        g[a][b] = g[b][a] = 1
    return g


def ade_types(rank: int) -> list[tuple[str, int]]:
    """Connected ADE types of the given rank."""
    out = [("A", rank)]
    if rank >= 4:
        out.append(("D", rank))
    if rank in (6, 7, 8):
        out.append(("E", rank))
    return out


def root_lattices(rank: int) -> list[tuple[tuple[str, int], ...]]:
    """Every root lattice of the given rank as a sorted tuple of components."""
    result: list[tuple[tuple[str, int], ...]] = []

    def grow(left: int, cur: list[tuple[str, int]], cap: tuple[int, str]):
        if left == 0:
            result.append(tuple(cur))
            return
        for r in range(min(left, cap[0]), 0, -1):
            for kind, rr in ade_types(r):
                if (r, kind) <= cap:
                    grow(left - r, cur + [(kind, rr)], (r, kind))

    grow(rank, [], (rank, "Z"))
    return result


def block_diagonal(blocks: list[list[list[int]]]) -> list[list[int]]:
    n = sum(len(b) for b in blocks)
    out = [[0] * n for _ in range(n)]
    off = 0
    for b in blocks:
        for i, row in enumerate(b):
            for j, x in enumerate(row):
                out[off + i][off + j] = x
        off += len(b)
    return out


def root_lattice_gram(components: tuple[tuple[str, int], ...]) -> list[list[int]]:
    return block_diagonal([ade_gram(k, r) for k, r in components])


def root_lattice_label(components) -> str:
    return "+".join(f"{k}{r}" for k, r in components)


_EXTENDING = {"E": {6: [3], 7: [0], 8: [7]}}


def affine_graph(kind: str, rank: int, name: str | None = None) -> CurveGraph:
    """The affine diagram of type ~X_rank on vertices ``x0 .. x{rank}``.

    ``x{rank}`` is the extending vertex attached to the finite diagram of
    :func:`ade_gram`.
    """
    gram = ade_gram(kind, rank)
    edges = [(f"x{i}", f"x{j}", 1) for i in range(rank) for j in range(i + 1, rank) if gram[i][j]]
    ext = f"x{rank}"
    if kind == "A" and rank == 1:
        edges.append(("x0", ext, 2))
    elif kind == "A":
        edges += [("x0", ext, 1), (f"x{rank - 1}", ext, 1)]
    elif kind == "D":
        edges.append(("x1", ext, 1))
    else:
        edges += [(f"x{i}", ext, 1) for i in _EXTENDING["E"][rank]]
    verts = tuple(f"x{i}" for i in range(rank + 1))
    return CurveGraph(name or f"~{kind}{rank}", verts, tuple(edges))
