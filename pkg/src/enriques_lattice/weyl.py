"""Reflections in (-2)-classes, nef reduction, and the finite-index test."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import lcm
from typing import Sequence

from . import linalg
from .errors import CompletenessRefused, DomainError, ReductionDivergence
from .fibers import AffineDiagram, find_parabolic_subdiagrams
from .fibrations import ENRIQUES_SIGNATURE, CurveLattice, curve_lattice
from .graphs import CurveGraph, gram_from_graph
from .lattice import LatticeVector, span_lattice


def reflect(v: LatticeVector, root: LatticeVector) -> LatticeVector:
    if root.square() != -2:
        raise DomainError(f"reflection root must have square -2, got {root.square()}")
    return v + root * v.dot(root)


@dataclass(frozen=True)
class ReductionTrace:
    input: LatticeVector
    nef_rep: LatticeVector
    root_sum: dict[str, int]
    steps: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "input": list(self.input.coords),
            "nef_rep": list(self.nef_rep.coords),
            "root_sum": {k: v for k, v in sorted(self.root_sum.items())},
            "steps": len(self.steps),
        }


def chamber_rays(roots: Sequence[LatticeVector]) -> list[tuple[int, ...]]:
    """Extreme rays of the cone ``{x : x.r >= 0 for all roots r}``.

    Brute force over (dim - 1)-subsets of roots whose pairing rows have
    full rank. Returns primitive integer generators in lattice coordinates.
    Empty when the roots do not span (the cone is then not pointed).
    """
    if not roots:
        return []
    lat = roots[0].lattice
    n = lat.dim
    rows = [[lat.pair(r.coords, lat.basis_vector(j).coords) for j in range(n)] for r in roots]
    if linalg.rank(rows) < n:
        return []
    rays: set[tuple[int, ...]] = set()
    for combo in combinations(range(len(rows)), n - 1):
        sub = [rows[i] for i in combo]
        ker = linalg.nullspace(sub)
        if len(ker) != 1:
            continue
        den = 1
        for x in ker[0]:
            den = lcm(den, x.denominator)
        x = [int(t * den) for t in ker[0]]
        g = linalg.vector_gcd(x)
        x = [t // g for t in x]
        vals = [sum(a * b for a, b in zip(row, x)) for row in rows]
        if all(t >= 0 for t in vals):
            rays.add(tuple(x))
        elif all(t <= 0 for t in vals):
            rays.add(tuple(-t for t in x))
    return sorted(rays)


def interior_vector(roots: Sequence[LatticeVector]) -> LatticeVector | None:
    """A vector of positive square pairing positively with every root.

    First tries sums of dual bases of root subsets that form a basis;
    falls back to the sum of the chamber's extreme rays.
    """
    if not roots:
        return None
    lat = roots[0].lattice
    n = lat.dim

    def good(x) -> bool:
        return lat.pair(x, x) > 0 and all(lat.pair(x, r.coords) > 0 for r in roots)

    for combo in combinations(range(len(roots)), n):
        basis = [roots[i].coords for i in combo]
        if linalg.rank(basis) < n:
            continue
        # x with x.r_i = 1 for each chosen root
        a = [[lat.pair(b, lat.basis_vector(j).coords) for j in range(n)] for b in basis]
        x = linalg.solve(a, [1] * n)
        den = 1
        for t in x:
            den = lcm(den, Fraction(t).denominator)
        x = [int(t * den) for t in x]
        if good(x):
            return LatticeVector(tuple(x), lat)
        break
    rays = chamber_rays(roots)
    if rays:
        x = [sum(r[j] for r in rays) for j in range(n)]
        if good(x):
            return LatticeVector(tuple(x), lat)
    return None


def nef_reduce(
    v: LatticeVector,
    roots: dict[str, LatticeVector] | Sequence[LatticeVector] | CurveGraph,
    *,
    interior: LatticeVector | None = None,
    order: str | random.Random = "smallest",
    max_steps: int = 100_000,
) -> ReductionTrace:
    """Reflect ``v`` in roots it pairs negatively with until it is nef.

    ``roots`` is a name -> vector mapping, a sequence (named ``r0``...)
    or a curve graph (its vertices in the saturated lattice; ``v`` must
    then live in that lattice). ``order`` picks the root among the
    negative ones: ``"smallest"`` takes the first in root order, a
    :class:`random.Random` picks uniformly.
    """
    if isinstance(roots, CurveGraph):
        cl = curve_lattice(roots)
        named = {name: cl.vertex(name) for name in roots.vertices}
        if interior is None:
            interior = _graph_interior(cl)
    elif isinstance(roots, dict):
        named = dict(roots)
    else:
        named = {f"r{i}": r for i, r in enumerate(roots)}
    names = list(named)
    for name, r in named.items():
        if r.square() != -2:
            raise DomainError(f"root {name} has square {r.square()}")
    sq = v.square()
    if sq < 0:
        raise DomainError(f"v^2 = {sq} < 0; only classes of non-negative square reduce to nef classes")
    if interior is None:
        interior = interior_vector(list(named.values()))
    if interior is not None and v.dot(interior) < 0:
        raise DomainError("v lies in the negative cone")
    lat = v.lattice
    g = lat.gram
    rows = {n: [sum(c * g[i][j] for i, c in enumerate(named[n].coords) if c) for j in range(lat.dim)] for n in names}
    cur = list(v.coords)
    root_sum: dict[str, int] = {}
    steps: list[str] = []
    for _ in range(max_steps):
        neg = []
        for n in names:
            p = sum(a * b for a, b in zip(rows[n], cur))
            if p < 0:
                neg.append((n, p))
                if order == "smallest":
                    break
        if not neg:
            out = LatticeVector(tuple(cur), lat)
            return ReductionTrace(v, out, root_sum, tuple(steps))
        n, p = neg[0] if order == "smallest" else order.choice(neg)
        rc = named[n].coords
        cur = [a + p * b for a, b in zip(cur, rc)]
        root_sum[n] = root_sum.get(n, 0) - p
        steps.append(n)
    raise ReductionDivergence(f"no nef representative after {max_steps} reflections")


_INTERIOR: dict[int, LatticeVector | None] = {}


def _graph_interior(cl: CurveLattice) -> LatticeVector | None:
    key = id(cl)
    if key not in _INTERIOR:
        _INTERIOR[key] = interior_vector([cl.vertex(v) for v in cl.graph.vertices])
    return _INTERIOR[key]


# --- finite index criterion ------------------------------------------------------------


@dataclass(frozen=True)
class VinbergEvidence:
    graph: str
    span_rank: int
    signature: tuple[int, int, int]
    parabolic: tuple[tuple[AffineDiagram, int], ...]  # (diagram, max rank of a parabolic extension)
    failures: tuple[str, ...]

    @property
    def finite_index(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.finite_index

    def to_json(self) -> dict:
        return {
            "graph": self.graph,
            "finite_index": self.finite_index,
            "span_rank": self.span_rank,
            "signature": list(self.signature),
            "parabolic": [
                {"vertices": list(d.vertices), "type": d.base_type, "extends_to_rank": r}
                for d, r in self.parabolic
            ],
            "failures": list(self.failures),
        }


def _max_parabolic_rank(g: CurveGraph, diagrams: list[AffineDiagram], start: int) -> int:
    """Largest rank of a parabolic subdiagram containing ``diagrams[start]``.

    A parabolic subdiagram is a union of connected affine diagrams that
    are pairwise disjoint and unjoined; its rank is the sum of theirs.
    """
    def compatible(a: AffineDiagram, b: AffineDiagram) -> bool:
        if set(a.vertices) & set(b.vertices):
            return False
        return all(g.multiplicity(x, y) == 0 for x in a.vertices for y in b.vertices)

    best = 0

    def grow(chosen: list[int], rank: int, nxt: int) -> None:
        nonlocal best
        best = max(best, rank)
        for k in range(nxt, len(diagrams)):
            if k != start and all(compatible(diagrams[k], diagrams[c]) for c in chosen):
                grow(chosen + [k], rank + diagrams[k].rank, k + 1)

    grow([start], diagrams[start].rank, 0)
    return best


def vinberg_finite_index(g: CurveGraph, ambient_rank: int = 10) -> VinbergEvidence:
    """Finite-index test for the reflection group of a graph of (-2)-curves.

    Restricted combinatorial form for hyperbolic lattices of rank
    ``ambient_rank`` with single and double bonds: the vertices must span
    the full rank, and every connected parabolic subdiagram must lie in
    a parabolic subdiagram of rank ``ambient_rank - 2``.
    """
    gram = gram_from_graph(g)
    span = span_lattice(gram.gram, g.vertices)
    sig = span.lattice.signature()
    if sig[0] > ENRIQUES_SIGNATURE[0] or sig[1] > ambient_rank - 1:
        raise DomainError(f"span signature {sig} does not embed in signature (1, {ambient_rank - 1})")
    failures = []
    r = span.lattice.dim
    if r < ambient_rank:
        failures.append(f"vertices span rank {r} < {ambient_rank}")
    diagrams = find_parabolic_subdiagrams(g)
    evidence = []
    for i, d in enumerate(diagrams):
        m = _max_parabolic_rank(g, diagrams, i)
        evidence.append((d, m))
        if m != ambient_rank - 2:
            failures.append(f"{d.base_type} on {d.vertices} extends only to rank {m}")
    return VinbergEvidence(g.name, r, sig, tuple(evidence), tuple(failures))


@dataclass(frozen=True)
class CompletenessCertificate:
    graph: str
    certified: bool
    evidence: VinbergEvidence

    def to_json(self) -> dict:
        return {"graph": self.graph, "certified": self.certified, "evidence": self.evidence.to_json()}


def curve_completeness_check(g: CurveGraph) -> CompletenessCertificate:
    """Certify that no further (-2)-curves exist on a surface containing ``g``.

    Finite index of the reflection group in the orthogonal group forces
    every (-2)-curve to be a vertex of the graph; this only re-verifies
    the finite-index evidence.
    """
    ev = vinberg_finite_index(g)
    if not ev.finite_index:
        raise CompletenessRefused("finite-index test fails: " + "; ".join(ev.failures), ev)
    return CompletenessCertificate(g.name, True, ev)
