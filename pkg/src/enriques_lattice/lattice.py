"""Integral lattices given by Gram matrices, and their overlattices.

Conventions: roots have square -2, so root lattices are negative
definite and the numerical lattice of an Enriques surface has signature
(1, 9).  All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Callable, Iterable, Sequence

from . import linalg
from .errors import (
    AmbiguityError,
    DomainError,
    InconsistencyError,
    NoOverlatticeError,
    StructuralError,
)

Coords = tuple  # tuple of int | Fraction


def _freeze_gram(gram: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in gram)
    for row, orig in zip(rows, gram):
        if any(a != b for a, b in zip(row, orig)):
            raise StructuralError("Gram entries must be integers")
    return rows


@dataclass(frozen=True)
class IntegralLattice:
    """A free Z-module with a symmetric integral bilinear form.

    ``ambient_basis`` optionally records the basis vectors as rational
    coordinate vectors in the lattice this one was derived from.
    """

    gram: tuple[tuple[int, ...], ...]
    basis_labels: tuple[str, ...] = ()
    ambient_basis: tuple[Coords, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        gram = _freeze_gram(self.gram)
        linalg.check_square(gram, symmetric=True)
        object.__setattr__(self, "gram", gram)
        labels = tuple(self.basis_labels) or tuple(f"b{i}" for i in range(len(gram)))
        if len(labels) != len(gram):
            raise StructuralError(
                f"{len(labels)} basis labels for a Gram matrix of size {len(gram)}"
            )
        object.__setattr__(self, "basis_labels", labels)

    @classmethod
    def from_rows(cls, gram, labels: Iterable[str] = ()) -> "IntegralLattice":
        return cls(gram=tuple(map(tuple, gram)), basis_labels=tuple(labels))

    @property
    def dim(self) -> int:
        return len(self.gram)

    def det(self) -> int:
        return linalg.bareiss_det(self.gram)

    def signature(self) -> tuple[int, int, int]:
        return linalg.inertia(self.gram)

    def rank(self) -> int:
        return linalg.rank(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.dim))

    def pair(self, u: Sequence, v: Sequence):
        """Bilinear form on coordinate vectors (rational coordinates allowed)."""
        g = self.gram
        total = 0
        for i, ui in enumerate(u):
            if ui:
                row = g[i]
                total += ui * sum(row[j] * vj for j, vj in enumerate(v) if vj)
        return linalg.as_exact(total) if isinstance(total, Fraction) else total

    def vector(self, coords: Sequence) -> "LatticeVector":
        return LatticeVector(tuple(coords), self)

    def basis_vector(self, i: int) -> "LatticeVector":
        return LatticeVector(tuple(1 if j == i else 0 for j in range(self.dim)), self)

    def to_json(self) -> dict:
        return {"gram": [list(r) for r in self.gram], "labels": list(self.basis_labels)}


@dataclass(frozen=True)
class LatticeVector:
    """Coordinates with respect to the basis of ``lattice``.

    Coordinates are normally integers; rational coordinates denote
    vectors of ``lattice`` tensored with Q (e.g. a candidate half class).
    """

    coords: Coords
    lattice: IntegralLattice = field(repr=False)

    def __post_init__(self):
        coords = tuple(linalg.as_exact(x) for x in self.coords)
        if len(coords) != self.lattice.dim:
            raise StructuralError(
                f"vector of length {len(coords)} in a lattice of rank {self.lattice.dim}"
            )
        object.__setattr__(self, "coords", coords)

    def _same(self, other: "LatticeVector") -> None:
        if other.lattice.gram != self.lattice.gram:
            raise DomainError("vectors live in different lattices")

    def dot(self, other: "LatticeVector"):
        self._same(other)
        return self.lattice.pair(self.coords, other.coords)

    def square(self):
        return self.lattice.pair(self.coords, self.coords)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for x in self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "LatticeVector") -> "LatticeVector":
        self._same(other)
        return LatticeVector(tuple(a + b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __sub__(self, other: "LatticeVector") -> "LatticeVector":
        self._same(other)
        return LatticeVector(tuple(a - b for a, b in zip(self.coords, other.coords)), self.lattice)

    def __neg__(self) -> "LatticeVector":
        return LatticeVector(tuple(-a for a in self.coords), self.lattice)

    def __mul__(self, k) -> "LatticeVector":
        return LatticeVector(tuple(k * a for a in self.coords), self.lattice)

    __rmul__ = __mul__

    def __truediv__(self, k) -> "LatticeVector":
        return LatticeVector(tuple(Fraction(a) / k for a in self.coords), self.lattice)


def determinant_exact(lattice: IntegralLattice | Sequence[Sequence[int]]) -> int:
    if not isinstance(lattice, IntegralLattice):
        linalg.check_square(lattice, symmetric=True)
        return linalg.bareiss_det(lattice)
    return lattice.det()


def signature(lattice: IntegralLattice | Sequence[Sequence[int]]) -> tuple[int, int, int]:
    gram = lattice.gram if isinstance(lattice, IntegralLattice) else lattice
    return linalg.inertia(gram)


def is_primitive(v: LatticeVector) -> bool:
    if v.is_zero():
        raise DomainError("the zero vector has no primitivity")
    if not v.is_integral():
        raise DomainError(f"{v.coords} is not a lattice vector")
    return linalg.vector_gcd(v.coords) == 1


def primitive_part(v: LatticeVector) -> LatticeVector:
    if not v.is_integral() or v.is_zero():
        raise DomainError("primitive part needs a nonzero lattice vector")
    g = linalg.vector_gcd(v.coords)
    return LatticeVector(tuple(x // g for x in v.coords), v.lattice)


def sublattice_index(sub: IntegralLattice | int, full_det: int) -> int:
    """Index of a full-rank sublattice from the two determinants."""
    sub_det = abs(sub.det() if isinstance(sub, IntegralLattice) else int(sub))
    full_det = abs(int(full_det))
    if sub_det == 0 or full_det == 0:
        raise DomainError("determinants must be nonzero")
    q, r = divmod(sub_det, full_det)
    if r or isqrt(q) ** 2 != q:
        raise InconsistencyError(
            f"|det(sub)|/|det(full)| = {sub_det}/{full_det} is not a square integer;"
            " no such embedding exists"
        )
    return isqrt(q)


# --- discriminant groups and overlattices ------------------------------------


def _frac_mod1(v: Iterable) -> tuple[Fraction, ...]:
    return tuple(Fraction(x) - (Fraction(x).numerator // Fraction(x).denominator) for x in v)


def discriminant_group(lattice: IntegralLattice) -> list[tuple[Fraction, ...]]:
    """Elements of L*/L as coordinate vectors in [0, 1)^n, sorted."""
    d = lattice.det()
    if d == 0:
        raise DomainError("degenerate lattice has no discriminant group")
    inv = linalg.inverse(lattice.gram)
    gens = [_frac_mod1(col) for col in linalg.transpose(inv)]
    return sorted(_closure({tuple([Fraction(0)] * lattice.dim)}, gens))


def _closure(start: set, gens: Sequence[tuple]) -> set:
    group = set(start)
    frontier = list(group)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _frac_mod1(a + b for a, b in zip(x, g))
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    return group


@dataclass(frozen=True)
class OverlatticeEmbedding:
    """An overlattice N of ``sublattice`` given by glue vectors.

    ``glue_generators`` and ``basis`` are rational coordinate vectors in
    the sublattice basis; ``basis`` is a Z-basis of N.
    """

    sublattice: IntegralLattice
    index: int
    glue_generators: tuple[tuple[Fraction, ...], ...]
    basis: tuple[tuple[Fraction, ...], ...]
    overlattice: IntegralLattice

    def coordinates(self, v: Sequence) -> tuple:
        """Coordinates of a sublattice-basis rational vector in the N basis."""
        return tuple(linalg.as_exact(x) for x in linalg.solve(linalg.transpose(self.basis), list(v)))

    def contains(self, v: Sequence) -> bool:
        return all(isinstance(x, int) for x in self.coordinates(v))

    def glue_set(self) -> frozenset:
        return frozenset(_closure({tuple([Fraction(0)] * self.sublattice.dim)},
                                  [_frac_mod1(g) for g in self.glue_generators]))

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "glue": [[str(x) for x in g] for g in self.glue_generators],
            "overlattice_det": self.overlattice.det(),
        }


def _overlattice_from_glue(sub: IntegralLattice, glue: Sequence[tuple]) -> OverlatticeEmbedding:
    n = sub.dim
    gens = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)] + [list(g) for g in glue]
    basis = linalg.rational_lattice_basis(gens)
    gram = [[sub.pair(u, v) for v in basis] for u in basis]
    if any(isinstance(x, Fraction) for row in gram for x in row):
        raise InconsistencyError("glue does not pair integrally")
    over = IntegralLattice.from_rows(gram, [f"n{i}" for i in range(n)])
    index = isqrt(abs(sub.det()) // abs(over.det()))
    over = IntegralLattice(over.gram, over.basis_labels, tuple(tuple(b) for b in basis))
    return OverlatticeEmbedding(sub, index, tuple(tuple(g) for g in glue), tuple(map(tuple, basis)), over)


def _minimal_generators(subgroup: frozenset, n: int) -> list[tuple]:
    zero = tuple([Fraction(0)] * n)
    gens: list[tuple] = []
    span = {zero}
    for x in sorted(subgroup, key=lambda t: (max((v.denominator for v in t), default=1) * -1, t)):
        if x not in span:
            gens.append(x)
            span = _closure(span, gens)
        if span == subgroup:
            break
    return gens


def unimodular_overlattices(sub: IntegralLattice) -> list[OverlatticeEmbedding]:
    """All even unimodular overlattices of an even lattice, by brute force
    over the isotropic subgroups of its discriminant group."""
    if not sub.is_even():
        raise DomainError("sublattice must be even")
    d = abs(sub.det())
    if d == 0:
        raise DomainError("sublattice is degenerate")
    target = isqrt(d)
    if target * target != d:
        raise NoOverlatticeError(f"|det| = {d} is not a perfect square")
    n = sub.dim
    zero = tuple([Fraction(0)] * n)
    if target == 1:
        return [_overlattice_from_glue(sub, [])]

    elements = discriminant_group(sub)

    def q_even(x) -> bool:
        q = Fraction(sub.pair(x, x))
        return q.denominator == 1 and q.numerator % 2 == 0

    isotropic = [x for x in elements if x != zero and q_even(x)]
    found: set[frozenset] = set()
    seen: set[frozenset] = set()
    frontier = [frozenset({zero})]
    while frontier:
        nxt = []
        for s in frontier:
            for x in isotropic:
                if x in s:
                    continue
                t = frozenset(_closure(set(s), [x]))
                if t in seen or len(t) > target or target % len(t):
                    continue
                seen.add(t)
                if not all(q_even(y) for y in t):
                    continue
                if len(t) == target:
                    found.add(t)
                else:
                    nxt.append(t)
        frontier = nxt
    result = [_overlattice_from_glue(sub, _minimal_generators(s, n)) for s in found]
    for emb in result:
        if abs(emb.overlattice.det()) != 1:
            raise InconsistencyError("constructed overlattice is not unimodular")
    result.sort(key=lambda e: sorted(e.glue_set()))
    return result


def unimodular_overlattice(
    sub: IntegralLattice,
    accept: Callable[[OverlatticeEmbedding], bool] | None = None,
) -> OverlatticeEmbedding:
    """The even unimodular overlattice of ``sub``.

    ``accept`` filters candidates when several exist. Raises
    :class:`NoOverlatticeError` when none qualifies and
    :class:`AmbiguityError` (carrying every candidate) when several do.
    """
    cands = unimodular_overlattices(sub)
    if accept is not None:
        cands = [c for c in cands if accept(c)]
    if not cands:
        raise NoOverlatticeError("no isotropic subgroup of the required order")
    if len(cands) > 1:
        raise AmbiguityError(f"{len(cands)} distinct even unimodular overlattices", cands)
    return cands[0]


def adjoin_half_class(lattice: IntegralLattice, v: LatticeVector) -> IntegralLattice:
    """The lattice generated by ``lattice`` and ``v/2``.

    When ``v/2`` is new, the returned basis is ``v'/2`` followed by a
    completion of the primitive vector ``v'`` (``v = g v'`` with ``g``
    odd) to a basis of ``lattice``.
    """
    if v.lattice.gram != lattice.gram:
        raise DomainError("vector does not belong to this lattice")
    if not v.is_integral() or v.is_zero():
        raise DomainError("need a nonzero lattice vector")
    gv = [lattice.pair(lattice.basis_vector(i).coords, v.coords) for i in range(lattice.dim)]
    if any(x % 2 for x in gv) or v.square() % 4:
        raise DomainError("v/2 does not pair integrally with the lattice")
    g = linalg.vector_gcd(v.coords)
    identity = tuple(tuple(Fraction(int(i == j)) for j in range(lattice.dim)) for i in range(lattice.dim))
    if g % 2 == 0:
        return IntegralLattice(lattice.gram, lattice.basis_labels, identity)
    u = [x // g for x in v.coords]
    completion = linalg.complete_to_basis(u)
    basis = [[Fraction(x, 2) for x in completion[0]]] + [[Fraction(x) for x in row] for row in completion[1:]]
    gram = [[lattice.pair(a, b) for b in basis] for a in basis]
    labels = ["v/2"] + [f"c{i}" for i in range(1, lattice.dim)]
    return IntegralLattice(tuple(map(tuple, gram)), tuple(labels), tuple(map(tuple, basis)))


# --- nondegenerate span of a generating set ------------------------------------


@dataclass(frozen=True)
class Span:
    """The lattice spanned by generators with a possibly degenerate Gram.

    ``lattice`` is nondegenerate (the radical is divided out) and
    ``coords[i]`` expresses generator ``i`` in its basis.
    """

    lattice: IntegralLattice
    coords: tuple[tuple[int, ...], ...]


def span_lattice(gram: Sequence[Sequence[int]], labels: Sequence[str] = ()) -> Span:
    linalg.check_square(gram, symmetric=True)
    n = len(gram)
    chosen: list[int] = []
    for i in range(n):
        trial = chosen + [i]
        if linalg.rank([[gram[a][b] for b in trial] for a in trial]) == len(trial):
            chosen = trial
    r = linalg.rank(gram)
    if len(chosen) != r:
        # a principal minor of full rank always exists for symmetric matrices;
        # the greedy pass can miss it, so fall back to a direct search
        from itertools import combinations

        for combo in combinations(range(n), r):
            if linalg.bareiss_det([[gram[a][b] for b in combo] for a in combo]) != 0:
                chosen = list(combo)
                break
    g_bb = [[gram[a][b] for b in chosen] for a in chosen]
    inv = linalg.inverse(g_bb)
    # generator i in coordinates of the chosen Q-basis
    qcoords = [[sum(inv[k][t] * gram[chosen[t]][i] for t in range(r)) for k in range(r)] for i in range(n)]
    basis = linalg.rational_lattice_basis(qcoords)
    bmat_inv = linalg.inverse(basis)
    coords = []
    for c in qcoords:
        x = [sum(c[k] * bmat_inv[k][j] for k in range(r)) for j in range(r)]
        if any(Fraction(t).denominator != 1 for t in x):
            raise InconsistencyError("generator outside its own span lattice")
        coords.append(tuple(int(t) for t in x))
    span_gram = [[sum(basis[a][k] * g_bb[k][l] * basis[b][l] for k in range(r) for l in range(r)) for b in range(r)] for a in range(r)]
    lat = IntegralLattice.from_rows(span_gram, [f"m{i}" for i in range(r)])
    for i in range(n):
        for j in range(n):
            if lat.pair(coords[i], coords[j]) != gram[i][j]:
                raise InconsistencyError("span lattice does not reproduce the Gram matrix")
    return Span(lat, tuple(coords))


def fiber_bisection_lattice(root_gram: Sequence[Sequence[int]], bisection_row: Sequence[int]) -> IntegralLattice:
    """Lattice with basis (fiber class G, bisection R, roots of L).

    Gram ``[[0, 2, 0], [2, -2, s], [0, s^T, L]]`` where ``L`` is the root
    lattice left after removing a simple component from the fiber and
    ``s`` holds the pairings of R with those roots. Expanding along the
    first row gives ``det = -4 det(L)`` whatever ``s`` is.
    """
    n = len(root_gram)
    if len(bisection_row) != n:
        raise StructuralError("bisection row length differs from the root lattice rank")
    gram = [[0, 2] + [0] * n, [2, -2] + list(bisection_row)]
    for i in range(n):
        gram.append([0, bisection_row[i]] + list(root_gram[i]))
    return IntegralLattice.from_rows(gram, ["G", "R"] + [f"L{i}" for i in range(n)])
