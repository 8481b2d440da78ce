"""Isotropic c-sequences and c-degenerate n-sequences on curve graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from . import linalg
from .errors import DomainError, UnsupportedError, ValidationError
from .fibrations import FibrationClass, curve_lattice, enumerate_fibrations
from .graphs import CurveGraph
from .lattice import IntegralLattice, LatticeVector


@dataclass(frozen=True)
class IsotropicSequence:
    half_fibers: tuple[LatticeVector, ...]
    graph: CurveGraph | None = field(default=None, compare=False)
    sources: tuple[str, ...] = ()  # fibration id of each member, when known

    def __len__(self) -> int:
        return len(self.half_fibers)

    def canonical(self) -> "IsotropicSequence":
        pairs = sorted(zip(self.half_fibers, self.sources or [""] * len(self)), key=lambda t: t[0].coords)
        return IsotropicSequence(tuple(p[0] for p in pairs), self.graph,
                                 tuple(p[1] for p in pairs) if self.sources else ())

    def to_json(self) -> dict:
        return {
            "c": len(self),
            "fibrations": list(self.sources),
            "classes": [list(f.coords) for f in self.half_fibers],
        }


@dataclass(frozen=True)
class DegenerateSequence:
    """Blocks ``(F_i, (R_i1, ..., R_im))``; members are F_i + R_i1 + ... + R_ik."""

    blocks: tuple[tuple[LatticeVector, tuple[str, ...]], ...]
    graph: CurveGraph | None = field(default=None, compare=False)
    sources: tuple[str, ...] = ()

    @property
    def c(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(1 + len(chain) for _, chain in self.blocks)

    def members(self) -> list[LatticeVector]:
        cl = curve_lattice(self.graph) if self.graph is not None else None
        out = []
        for f, chain in self.blocks:
            cur = f
            out.append(cur)
            for r in chain:
                if cl is None:
                    raise DomainError("chains need a curve graph")
                cur = cur + cl.vertex(r)
                out.append(cur)
        return out

    def to_json(self) -> dict:
        return {
            "c": self.c,
            "n": self.n,
            "fibrations": list(self.sources),
            "blocks": [{"half_fiber": list(f.coords), "chain": list(ch)} for f, ch in self.blocks],
        }


def _check_half_fiber(f: LatticeVector, i: int, graph: CurveGraph | None) -> list[str]:
    out = []
    if not f.is_integral():
        out.append(f"F{i + 1} is not a lattice vector")
        return out
    if f.is_zero() or linalg.vector_gcd(f.coords) != 1:
        out.append(f"F{i + 1} is not primitive")
    if f.square() != 0:
        out.append(f"F{i + 1}^2 = {f.square()} != 0")
    if graph is not None:
        cl = curve_lattice(graph)
        for v, p in cl.vertex_pairings(f).items():
            if p < 0:
                out.append(f"F{i + 1}.{v} = {p} < 0 (not nef)")
    return out


def _same_lattice(vectors: Sequence[LatticeVector]) -> None:
    if vectors and any(v.lattice.gram != vectors[0].lattice.gram for v in vectors):
        raise DomainError("sequence mixes vectors from different lattices")


def validate_sequence(s: IsotropicSequence | DegenerateSequence) -> list[str]:
    """All axiom violations of ``s``; empty iff it is a valid sequence."""
    if isinstance(s, IsotropicSequence):
        s = DegenerateSequence(tuple((f, ()) for f in s.half_fibers), s.graph, s.sources)
    fs = [f for f, _ in s.blocks]
    _same_lattice(fs)
    if s.graph is not None and fs:
        cl = curve_lattice(s.graph)
        if fs[0].lattice.gram != cl.lattice.gram:
            raise DomainError("half-fibers do not live in the graph's lattice")
    out = []
    for i, f in enumerate(fs):
        out += _check_half_fiber(f, i, s.graph)
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            p = fs[i].dot(fs[j])
            if p != 1:
                out.append(f"axiom 1: F{i + 1}.F{j + 1} = {p}, expected 1")
    if not any(chain for _, chain in s.blocks):
        return out
    if s.graph is None:
        raise DomainError("chains need a curve graph")
    cl = curve_lattice(s.graph)
    slots = [(i, j, r) for i, (_, chain) in enumerate(s.blocks) for j, r in enumerate(chain)]
    names = [r for *_, r in slots]
    if len(set(names)) != len(names):
        out.append("a curve occurs twice among the chains")
    for a in range(len(slots)):
        i, j, r = slots[a]
        if r not in cl.vertex_coords:
            raise DomainError(f"{r} is not a vertex of {s.graph.name}")
        for b in range(a + 1, len(slots)):
            k, l, q = slots[b]
            p = s.graph.multiplicity(r, q) if r != q else -2
            if i == k and l == j + 1:
                if p != 1:
                    out.append(f"axiom 2: R{i + 1},{j + 1}.R{k + 1},{l + 1} = {p}, expected 1")
            elif p != 0:
                out.append(f"axiom 3: R{i + 1},{j + 1}.R{k + 1},{l + 1} = {p}, expected 0")
        for k, f in enumerate(fs):
            p = cl.vertex_pairings(f)[r]
            want = 1 if (k == i and j == 0) else 0
            if p != want:
                out.append(f"axiom 4: F{k + 1}.R{i + 1},{j + 1} = {p}, expected {want}")
    return out


def sequence_gram(s: IsotropicSequence | DegenerateSequence) -> IntegralLattice:
    members = list(s.half_fibers) if isinstance(s, IsotropicSequence) else s.members()
    gram = [[a.dot(b) for b in members] for a in members]
    return IntegralLattice.from_rows(gram, [f"D{i + 1}" for i in range(len(members))])


# --- search over half-fiber classes ----------------------------------------------------


def half_fiber_classes(g: CurveGraph) -> list[FibrationClass]:
    return enumerate_fibrations(g)


def _cliques(fibs: list[FibrationClass], c_max: int) -> Iterator[list[int]]:
    n = len(fibs)
    adj = [[fibs[i].isotropic_class.dot(fibs[j].isotropic_class) == 1 for j in range(n)] for i in range(n)]

    def grow(cur: list[int], start: int) -> Iterator[list[int]]:
        yield cur
        if len(cur) == c_max:
            return
        for k in range(start, n):
            if all(adj[k][m] for m in cur):
                yield from grow(cur + [k], k + 1)

    for i in range(n):
        yield from grow([i], i + 1)


def find_sequences(g: CurveGraph, c_max: int) -> list[IsotropicSequence]:
    """Every c-sequence with c <= c_max, up to reordering."""
    if not 1 <= c_max <= 10:
        raise DomainError(f"c_max must lie in 1..10, got {c_max}")
    fibs = half_fiber_classes(g)
    found = sorted(_cliques(fibs, c_max), key=lambda c: (len(c), c))
    return [
        IsotropicSequence(tuple(fibs[i].isotropic_class for i in c), g, tuple(fibs[i].id for i in c))
        for c in found
    ]


@dataclass(frozen=True)
class ExtensionResult:
    sequence: IsotropicSequence
    extensions: tuple[IsotropicSequence, ...]
    certificate: tuple[tuple[str, tuple[int, ...]], ...]  # (fibration id, pairings with members)

    @property
    def extendable(self) -> bool:
        return bool(self.extensions)

    def to_json(self) -> dict:
        return {
            "sequence": list(self.sequence.sources),
            "extendable": self.extendable,
            "extensions": [list(e.sources) for e in self.extensions],
            "certificate": [{"fibration": fid, "pairings": list(p)} for fid, p in self.certificate],
        }


def extend_sequence(s: IsotropicSequence, g: CurveGraph) -> ExtensionResult:
    """One-step extensions of ``s`` by half-fiber classes of ``g``.

    The certificate lists every half-fiber class that fails, with its
    pairings against the members; a non-extendable sequence has every
    class in its certificate.
    """
    s = IsotropicSequence(s.half_fibers, g, s.sources)
    bad = validate_sequence(s)
    if bad:
        raise ValidationError("invalid input sequence", bad)
    exts = []
    cert = []
    for f in half_fiber_classes(g):
        pairings = tuple(f.isotropic_class.dot(m) for m in s.half_fibers)
        if all(p == 1 for p in pairings):
            exts.append(IsotropicSequence(s.half_fibers + (f.isotropic_class,), g, s.sources + (f.id,)))
        else:
            cert.append((f.id, pairings))
    return ExtensionResult(s, tuple(exts), tuple(cert))


def degenerate_closure(
    s: IsotropicSequence, g: CurveGraph, n_target: int, limit: int | None = None
) -> list[DegenerateSequence]:
    """Extensions of ``s`` to c'-degenerate ``n_target``-sequences.

    New blocks may use further half-fiber classes of ``g``; chains use
    graph vertices. The search is exhaustive unless ``limit`` is given.
    """
    if n_target == 9:
        raise UnsupportedError("extension to 9-sequences is not supported")
    if not 1 <= n_target <= 10:
        raise DomainError(f"n_target must lie in 1..10, got {n_target}")
    if n_target < len(s):
        raise DomainError(f"sequence already has {len(s)} members")
    s = IsotropicSequence(s.half_fibers, g, s.sources)
    bad = validate_sequence(s)
    if bad:
        raise ValidationError("invalid input sequence", bad)
    cl = curve_lattice(g)
    fibs = half_fiber_classes(g)
    fib_pair = {f.id: cl.vertex_pairings(f.isotropic_class) for f in fibs}
    verts = list(g.vertices)
    results: list[DegenerateSequence] = []

    blocks: list[list] = [[f, [], src, cl.vertex_pairings(f)] for f, src in
                          zip(s.half_fibers, s.sources or [""] * len(s))]
    used: list[str] = []

    def size() -> int:
        return sum(1 + len(b[1]) for b in blocks)

    def emit():
        results.append(DegenerateSequence(
            tuple((b[0], tuple(b[1])) for b in blocks), g, tuple(b[2] for b in blocks)))

    def can_append(bi: int, r: str) -> bool:
        if r in used:
            return False
        chain = blocks[bi][1]
        for k, b in enumerate(blocks):
            want = 1 if (k == bi and not chain) else 0
            if b[3][r] != want:
                return False
        for u in used:
            want = 1 if chain and u == chain[-1] else 0
            if g.multiplicity(r, u) != want:
                return False
        return True

    def extend_chain(bi: int, next_fib: int):
        if limit is not None and len(results) >= limit:
            return
        if size() == n_target:
            emit()
            return
        for r in verts:
            if can_append(bi, r):
                blocks[bi][1].append(r)
                used.append(r)
                extend_chain(bi, next_fib)
                used.pop()
                blocks[bi][1].pop()
        # close this chain and move on
        if bi + 1 < len(blocks):
            extend_chain(bi + 1, next_fib)
        else:
            add_block(next_fib)

    def add_block(start: int):
        for k in range(start, len(fibs)):
            f = fibs[k]
            if any(f.isotropic_class.dot(b[0]) != 1 for b in blocks):
                continue
            if any(fib_pair[f.id][u] != 0 for u in used):
                continue
            blocks.append([f.isotropic_class, [], f.id, fib_pair[f.id]])
            extend_chain(len(blocks) - 1, k + 1)
            blocks.pop()

    if not blocks:
        add_block(0)
    else:
        extend_chain(0, 0)
    # different closing orders can reach the same sequence
    unique = {}
    for d in results:
        key = tuple((b[0].coords, b[1]) for b in d.blocks)
        unique.setdefault(key, d)
    return list(unique.values())
