"""Genus one fibrations read off from the parabolic subdiagrams of a graph."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from . import linalg
from .errors import (
    AmbiguityError,
    BoundViolation,
    DomainError,
    InconsistencyError,
    LookupFailure,
    NoOverlatticeError,
)
from .fibers import ADDITIVE, MULTIPLICATIVE, AffineDiagram, KodairaLabel, find_parabolic_subdiagrams, kodaira_label
from .graphs import EXTRA_SPECIAL, CurveGraph, gram_from_graph, serialize_graph
from .lattice import (
    IntegralLattice,
    LatticeVector,
    OverlatticeEmbedding,
    Span,
    determinant_exact,
    primitive_part,
    span_lattice,
    unimodular_overlattices,
)

ENRIQUES_SIGNATURE = (1, 9, 0)


class PartialRankWarning(UserWarning):
    """The graph does not span a lattice of the Enriques signature (1, 9)."""


# --- the saturated lattice of a graph ------------------------------------------------


@dataclass(frozen=True)
class CurveLattice:
    """Vertex classes of a graph inside the lattice they saturate to.

    ``lattice`` is the even unimodular overlattice of the vertex span
    when it exists; otherwise the span itself, with ``warnings`` set.
    """

    graph: CurveGraph
    span: Span
    embedding: OverlatticeEmbedding | None
    lattice: IntegralLattice
    vertex_coords: dict[str, tuple[int, ...]]
    warnings: tuple[str, ...] = ()
    _rows: dict = field(default_factory=dict, repr=False, compare=False)

    def vertex(self, v: str) -> LatticeVector:
        return LatticeVector(self.vertex_coords[v], self.lattice)

    def combination(self, coeffs: Sequence) -> LatticeVector:
        """Vector ``sum coeffs[i] * vertex_i`` (vertex order of the graph)."""
        n = self.lattice.dim
        out = [0] * n
        for c, v in zip(coeffs, self.graph.vertices):
            if c:
                for k, x in enumerate(self.vertex_coords[v]):
                    out[k] += c * x
        return LatticeVector(tuple(out), self.lattice)

    def pairing_row(self, v: str) -> tuple:
        """Linear functional ``x -> vertex_v . x`` in lattice coordinates."""
        if v not in self._rows:
            c = self.vertex_coords[v]
            g = self.lattice.gram
            self._rows[v] = tuple(sum(c[i] * g[i][j] for i in range(len(c))) for j in range(len(c)))
        return self._rows[v]

    def vertex_pairings(self, x: LatticeVector) -> dict[str, int]:
        return {v: sum(a * b for a, b in zip(self.pairing_row(v), x.coords)) for v in self.graph.vertices}

    @property
    def is_enriques(self) -> bool:
        return self.lattice.signature() == ENRIQUES_SIGNATURE and abs(self.lattice.det()) == 1


def _fiber_sets(g: CurveGraph, key: str) -> list[set[str]]:
    return [set(vs) for vs in (g.annotations or {}).get(key, [])]


def _annotation_filter(g: CurveGraph, span: Span):
    simple = _fiber_sets(g, "simple_fibers")
    half = _fiber_sets(g, "half_fibers")
    if not simple and not half:
        return None
    idx = g.index
    from .fibers import affine_diagram

    def null(vs):
        d = affine_diagram(g, vs)
        out = [Fraction(0)] * span.lattice.dim
        for v, m in zip(d.vertices, d.marks):
            for k, x in enumerate(span.coords[idx[v]]):
                out[k] += m * x
        return out

    wanted = [(null(vs), True) for vs in simple] + [(null(vs), False) for vs in half]

    def accept(emb: OverlatticeEmbedding) -> bool:
        return all(emb.contains([x / 2 for x in n]) == is_simple for n, is_simple in wanted)

    return accept


_CACHE: dict[str, CurveLattice] = {}


def curve_lattice(g: CurveGraph) -> CurveLattice:
    key = serialize_graph(g)
    if key in _CACHE:
        return _CACHE[key]
    gram = gram_from_graph(g)
    span = span_lattice(gram.gram, g.vertices)
    notes: list[str] = []
    emb = None
    lat = span.lattice
    sig = lat.signature()
    if sig != ENRIQUES_SIGNATURE:
        notes.append(f"vertex span has signature {sig}, not (1, 9, 0); classes are computed in the span")
    else:
        try:
            cands = unimodular_overlattices(lat)
            accept = _annotation_filter(g, span)
            if accept is not None:
                cands = [c for c in cands if accept(c)]
            if not cands:
                raise NoOverlatticeError("no even unimodular overlattice matches the annotations")
            if len(cands) > 1:
                raise AmbiguityError(
                    f"{len(cands)} even unimodular overlattices; add a simple_fibers or half_fibers annotation",
                    cands,
                )
            emb = cands[0]
            lat = emb.overlattice
        except (NoOverlatticeError, AmbiguityError, DomainError) as exc:
            notes.append(f"no saturation: {exc}; classes are computed in the span")
    coords = {}
    for v, c in zip(g.vertices, span.coords):
        coords[v] = tuple(emb.coordinates(c)) if emb else tuple(c)
    cl = CurveLattice(g, span, emb, lat, coords, tuple(notes))
    _CACHE[key] = cl
    return cl


# --- fibrations ---------------------------------------------------------------------


@dataclass(frozen=True)
class FibrationClass:
    id: str
    isotropic_class: LatticeVector
    fibers: tuple[AffineDiagram, ...]
    half_fiber_flags: tuple[bool, ...]
    labels: tuple[KodairaLabel, ...]

    @property
    def curve_count(self) -> int:
        return sum(len(f.vertices) for f in self.fibers)

    def bisections(self, cl: CurveLattice) -> list[str]:
        """Vertices ``R`` with ``R.F = 1`` (they meet each fiber twice)."""
        pair = cl.vertex_pairings(self.isotropic_class)
        return [v for v in cl.graph.vertices if pair[v] == 1]

    def has_fiber(self, symbol: str) -> bool:
        return any(symbol in lab.candidates for lab in self.labels)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "isotropic_class": list(self.isotropic_class.coords),
            "fibers": [
                {
                    "kodaira": str(lab),
                    "vertices": list(f.vertices),
                    "marks": list(f.marks),
                    "half_fiber": flag,
                }
                for f, lab, flag in zip(self.fibers, self.labels, self.half_fiber_flags)
            ],
        }


def _null_vector(cl: CurveLattice, d: AffineDiagram) -> LatticeVector:
    return cl.combination(d.null_class(cl.graph))


def half_fiber_test(f: FibrationClass | None, fiber: AffineDiagram, cl: CurveLattice) -> bool:
    """True when the fiber's null class is primitive in the saturated lattice."""
    if f is not None and fiber not in f.fibers:
        raise DomainError("fiber does not belong to this fibration")
    n = _null_vector(cl, fiber)
    g = linalg.vector_gcd(n.coords)
    if g == 1:
        return True
    if g == 2:
        return False
    raise InconsistencyError(f"null class of {fiber.vertices} is {g} times a primitive class")


_FIBRATIONS: dict[str, tuple[FibrationClass, ...]] = {}


def enumerate_fibrations(g: CurveGraph) -> list[FibrationClass]:
    """Fibrations with at least one reducible fiber, in canonical order."""
    cl = curve_lattice(g)
    for note in cl.warnings:
        warnings.warn(note, PartialRankWarning, stacklevel=2)
    key = serialize_graph(g)
    if key not in _FIBRATIONS:
        _FIBRATIONS[key] = tuple(_enumerate(g, cl))
    return list(_FIBRATIONS[key])


def _enumerate(g: CurveGraph, cl: CurveLattice) -> list[FibrationClass]:
    diagrams = find_parabolic_subdiagrams(g)
    nulls = [_null_vector(cl, d) for d in diagrams]
    for d, n in zip(diagrams, nulls):
        if n.is_zero():
            raise InconsistencyError(
                f"null class of {d.vertices} lies in the radical of the span; the graph spans a degenerate lattice"
            )
    parent = list(range(len(diagrams)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(len(diagrams)), 2):
        p = nulls[i].dot(nulls[j])
        if p < 0:
            raise InconsistencyError(
                f"null classes of {diagrams[i].vertices} and {diagrams[j].vertices} pair negatively"
            )
        if p == 0:
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(len(diagrams)):
        groups.setdefault(find(i), []).append(i)

    order = {v: k for k, v in enumerate(g.vertices)}
    out = []
    for members in groups.values():
        rays = {primitive_part(nulls[i]).coords for i in members}
        if len(rays) != 1:
            raise InconsistencyError("orthogonal fiber classes are not proportional")
        for i, j in combinations(members, 2):
            if set(diagrams[i].vertices) & set(diagrams[j].vertices):
                raise InconsistencyError("fibers of one fibration share a curve")
        prim = LatticeVector(rays.pop(), cl.lattice)
        fibers = tuple(diagrams[i] for i in members)
        flags = tuple(half_fiber_test(None, d, cl) for d in fibers)
        labels = tuple(kodaira_label(d) for d in fibers)
        out.append((prim, fibers, flags, labels))
    out.sort(key=lambda t: sorted(sorted(order[v] for v in d.vertices) for d in t[1]))
    return [FibrationClass(f"F{k + 1}", *t) for k, t in enumerate(out)]


# --- Shioda-Tate bound ------------------------------------------------------------------


@dataclass(frozen=True)
class ShiodaTateReport:
    checked: int
    tight: tuple[tuple[str, ...], ...]

    @property
    def passed(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"checked": self.checked, "tight": [list(t) for t in self.tight]}


def shioda_tate_check(f: FibrationClass | Iterable[AffineDiagram]) -> ShiodaTateReport:
    """Check ``curves <= 8 + s`` for every set of ``s`` fibers.

    Tight cases are reported by their Kodaira labels.
    """
    fibers = list(f.fibers) if isinstance(f, FibrationClass) else list(f)
    tight = []
    checked = 0
    for s in range(1, len(fibers) + 1):
        for combo in combinations(fibers, s):
            checked += 1
            curves = sum(len(d.vertices) for d in combo)
            names = tuple(str(kodaira_label(d)) for d in combo)
            if curves > 8 + s:
                raise BoundViolation(f"{curves} curves in {s} fibers {names} exceeds {8 + s}")
            if curves == 8 + s:
                tight.append(names)
    return ShiodaTateReport(checked, tuple(tight))


# --- characteristic rules --------------------------------------------------------------

SURFACE_CLASSES = ("classical", "ordinary", "supersingular", "unspecified")


@dataclass(frozen=True)
class SurfaceContext:
    characteristic: int
    surface_class: str = "unspecified"

    def __post_init__(self):
        if self.surface_class not in SURFACE_CLASSES:
            raise DomainError(f"unknown surface class {self.surface_class!r}")
        if self.surface_class in ("ordinary", "supersingular") and self.characteristic != 2:
            raise DomainError(f"{self.surface_class} Enriques surfaces exist only in characteristic 2")

    def __str__(self) -> str:
        p = "p!=2" if self.characteristic != 2 else "p=2"
        return f"{p} {self.surface_class}"


def _forced(label: KodairaLabel, kind: str) -> bool:
    """True when every candidate symbol has reduction type ``kind``."""
    return all(r == kind for r in label.reductions.values())


def characteristic_rules_check(ctx: SurfaceContext, f: FibrationClass, quasi_elliptic: bool) -> list[str]:
    halves = [lab for lab, flag in zip(f.labels, f.half_fiber_flags) if flag]
    out = []
    p2 = ctx.characteristic == 2
    if len(halves) > 2:
        out.append(f"{f.id}: {len(halves)} half-fibers, at most two exist")
    if not p2 or ctx.surface_class == "ordinary":
        if quasi_elliptic:
            out.append(f"{f.id}: quasi-elliptic fibration impossible for {ctx}")
        for lab in halves:
            if _forced(lab, ADDITIVE):
                out.append(f"{f.id}: half-fiber of additive type {lab} impossible for {ctx}")
    if p2 and ctx.surface_class in ("classical", "supersingular"):
        for lab in halves:
            if _forced(lab, MULTIPLICATIVE):
                out.append(f"{f.id}: half-fiber of multiplicative type {lab} impossible for {ctx}")
    if p2 and ctx.surface_class in ("ordinary", "supersingular") and len(halves) > 1:
        out.append(f"{f.id}: two half-fibers, but {ctx} fibrations have exactly one")
    return out


CONTEXT_ROWS = (
    SurfaceContext(0, "classical"),
    SurfaceContext(2, "classical"),
    SurfaceContext(2, "ordinary"),
    SurfaceContext(2, "supersingular"),
)


@dataclass(frozen=True)
class ConstraintReport:
    graph: str
    admissible: tuple[SurfaceContext, ...]
    violations: dict[str, tuple[str, ...]]

    @property
    def characteristics(self) -> set[int]:
        return {2 if c.characteristic == 2 else 0 for c in self.admissible}

    @property
    def classes(self) -> list[str]:
        return sorted(c.surface_class for c in self.admissible)

    def to_json(self) -> dict:
        p = sorted(self.characteristics)
        return {
            "graph": self.graph,
            "p": ["!=2" if x != 2 else 2 for x in p],
            "classes": self.classes,
            "violations": {k: list(v) for k, v in self.violations.items()},
        }


def surface_constraints(g: CurveGraph) -> ConstraintReport:
    """Which (characteristic, class) rows survive every fibration of ``g``.

    A fibration passes a row if it passes as an elliptic or as a
    quasi-elliptic fibration.
    """
    fibs = enumerate_fibrations(g)
    admissible = []
    violations = {}
    for ctx in CONTEXT_ROWS:
        bad = []
        for f in fibs:
            runs = [characteristic_rules_check(ctx, f, q) for q in (False, True)]
            if all(runs):
                bad.extend(min(runs, key=len))
        if bad:
            violations[str(ctx)] = tuple(bad)
        else:
            admissible.append(ctx)
    return ConstraintReport(g.name, tuple(admissible), violations)


def extra_special_constraints(g: CurveGraph) -> ConstraintReport:
    if g.name not in EXTRA_SPECIAL:
        raise LookupFailure(f"{g.name!r} is not an extra-special graph ({', '.join(EXTRA_SPECIAL)})")
    return surface_constraints(g)



# --- a fiber together with a bisection -------------------------------------------------


@dataclass(frozen=True)
class FiberBisection:
    """Basis (G, R, fiber components minus one simple component)."""

    fiber: AffineDiagram
    bisection: str
    dropped: str
    lattice: IntegralLattice
    root_gram: tuple[tuple[int, ...], ...]

    @property
    def root_det(self) -> int:
        return determinant_exact(self.root_gram)


def fiber_bisection(g: CurveGraph, fiber: AffineDiagram, bisection: str) -> FiberBisection:
    """Assemble the lattice spanned by ``fiber`` and a bisection vertex.

    The bisection must meet the fiber class with multiplicity 2. The
    dropped component is the first simple one in the diagram's order.
    """
    if bisection in fiber.vertices:
        raise DomainError(f"{bisection} is a component of the fiber")
    raw = gram_from_graph(g)
    idx = g.index
    null = fiber.null_class(g)
    b = idx[bisection]
    if sum(null[i] * raw.gram[b][i] for i in range(len(null))) != 2:
        raise DomainError(f"{bisection} is not a bisection of the fiber")
    dropped = next(v for v, m in zip(fiber.vertices, fiber.marks) if m == 1)
    rest = [v for v in fiber.vertices if v != dropped]
    basis = [null, [int(i == b) for i in range(len(null))]] + [
        [int(i == idx[v]) for i in range(len(null))] for v in rest
    ]
    gram = [[raw.pair(x, y) for y in basis] for x in basis]
    lat = IntegralLattice.from_rows(gram, ["G", bisection] + rest)
    roots = tuple(tuple(row[2:]) for row in gram[2:])
    return FiberBisection(fiber, bisection, dropped, lat, roots)


def fiber_bisections(g: CurveGraph, base_type: str | None = None) -> list[FiberBisection]:
    """Every (fiber, bisection vertex) pair among the graph's parabolic subdiagrams."""
    raw = gram_from_graph(g)
    out = []
    for d in find_parabolic_subdiagrams(g):
        if base_type is not None and d.base_type != base_type:
            continue
        null = d.null_class(g)
        for v in g.vertices:
            if v in d.vertices:
                continue
            if sum(a * b for a, b in zip(null, raw.gram[g.index[v]])) == 2:
                out.append(fiber_bisection(g, d, v))
    return out
