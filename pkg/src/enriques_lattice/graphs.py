"""Dual graphs of (-2)-curves: parsing, Gram matrices, catalog, DOT export."""

from __future__ import annotations

import json
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

from .errors import LookupFailure, ParseError
from .lattice import IntegralLattice

CATALOG_ENV = "ENRIQUES_CATALOG_DIR"


@dataclass(frozen=True)
class CurveGraph:
    """Weighted intersection graph; an edge ``(a, b, m)`` means ``a.b = m``."""

    name: str
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, int], ...]
    annotations: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple((a, b, int(m)) for a, b, m in self.edges))
        _validate(self.vertices, self.edges)

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def multiplicity(self, a: str, b: str) -> int:
        for x, y, m in self.edges:
            if {x, y} == {a, b}:
                return m
        return 0

    def neighbours(self, v: str) -> list[str]:
        out = []
        for a, b, _ in self.edges:
            if a == v:
                out.append(b)
            elif b == v:
                out.append(a)
        return out

    def induced(self, subset: Iterable[str], name: str | None = None) -> "CurveGraph":
        keep = set(subset)
        verts = [v for v in self.vertices if v in keep]
        edges = [e for e in self.edges if e[0] in keep and e[1] in keep]
        return CurveGraph(name or f"{self.name}[{','.join(verts)}]", tuple(verts), tuple(edges))

    def without(self, vertex: str) -> "CurveGraph":
        return self.induced([v for v in self.vertices if v != vertex], f"{self.name}-{vertex}")

    def is_connected(self, subset: Iterable[str] | None = None) -> bool:
        verts = set(self.vertices if subset is None else subset)
        if not verts:
            return True
        start = next(iter(verts))
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for w in self.neighbours(v):
                if w in verts and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen == verts


def _validate(vertices, edges, locate=None) -> None:
    def fail(msg, *labels):
        raise ParseError(msg, locate(*labels) if locate else None)

    if len(set(vertices)) != len(vertices):
        dup = next(v for v in vertices if vertices.count(v) > 1)
        fail(f"duplicate vertex {dup!r}", dup)
    known = set(vertices)
    seen: set[frozenset] = set()
    for a, b, m in edges:
        for v in (a, b):
            if v not in known:
                fail(f"edge refers to unknown vertex {v!r}", a, b)
        if a == b:
            fail(f"self-loop at {a!r}", a, b)
        if m not in (1, 2):
            fail(f"edge {a}-{b} has multiplicity {m}; only 1 or 2 allowed", a, b)
        key = frozenset((a, b))
        if key in seen:
            fail(f"duplicate edge {a}-{b}", a, b)
        seen.add(key)


def _edge_locator(text: str):
    lines = text.splitlines()
    start = next((i for i, ln in enumerate(lines) if '"edges"' in ln), 0)

    def locate(*labels):
        pattern = re.compile(r"\[\s*" + r"\s*,\s*".join(re.escape(json.dumps(x)) for x in labels))
        for i in range(start, len(lines)):
            if pattern.search(lines[i]):
                return i + 1
        return None

    return locate


def parse_graph(text: str) -> CurveGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from exc
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", 1)
    for key in ("name", "vertices", "edges"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise ParseError("'vertices' must be a list of strings")
    edges = []
    locate = _edge_locator(text)
    for e in data["edges"]:
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[2], int)
                and not isinstance(e[2], bool)):
            raise ParseError(f"edge {e!r} must be [label, label, multiplicity]", locate(*e[:2]) if isinstance(e, list) else None)
        edges.append((e[0], e[1], e[2]))
    _validate(tuple(vertices), tuple(edges), locate)
    return CurveGraph(str(data["name"]), tuple(vertices), tuple(edges), dict(data.get("annotations") or {}))


def serialize_graph(g: CurveGraph) -> str:
    lines = ["{", f'  "name": {json.dumps(g.name)},', f'  "vertices": {json.dumps(list(g.vertices))},', '  "edges": [']
    for i, e in enumerate(g.edges):
        lines.append("    " + json.dumps(list(e)) + ("," if i < len(g.edges) - 1 else ""))
    lines.append("  ],")
    lines.append(f'  "annotations": {json.dumps(dict(g.annotations), sort_keys=True)}')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_graph(path: str | os.PathLike) -> CurveGraph:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read graph file {str(path)!r}: {exc.strerror}") from None
    return parse_graph(text)


def gram_from_graph(g: CurveGraph) -> IntegralLattice:
    n = len(g.vertices)
    idx = g.index
    gram = [[-2 if i == j else 0 for j in range(n)] for i in range(n)]
    for a, b, m in g.edges:
        gram[idx[a]][idx[b]] = m
        gram[idx[b]][idx[a]] = m
    return IntegralLattice.from_rows(gram, g.vertices)


def graph_from_gram(lattice: IntegralLattice, name: str = "from-gram") -> CurveGraph:
    """Inverse of :func:`gram_from_graph` on Gram matrices of (-2)-curve graphs."""
    labels = lattice.basis_labels
    edges = []
    for i in range(lattice.dim):
        if lattice.gram[i][i] != -2:
            raise ParseError(f"diagonal entry {i} is {lattice.gram[i][i]}, expected -2")
        for j in range(i + 1, lattice.dim):
            if lattice.gram[i][j]:
                edges.append((labels[i], labels[j], lattice.gram[i][j]))
    return CurveGraph(name, labels, tuple(edges))


def export_dot(g: CurveGraph) -> str:
    out = [f"graph {json.dumps(g.name)} {{"]
    for v in g.vertices:
        out.append(f"  {json.dumps(v)};")
    for a, b, m in g.edges:
        for _ in range(m):
            out.append(f"  {json.dumps(a)} -- {json.dumps(b)};")
    out.append("}")
    return "\n".join(out) + "\n"


# --- catalog -------------------------------------------------------------------

@dataclass(frozen=True)
class Fact:
    value: Any
    source: str


@dataclass(frozen=True)
class CatalogEntry:
    graph: CurveGraph
    expected: Mapping[str, Fact]


EXTRA_SPECIAL = ("E8-extra-special", "D8-extra-special", "E7-extra-special")
BUILTIN = EXTRA_SPECIAL + ("type-I", "E7-2")

_EXPECTED: dict[str, dict[str, Fact]] = {
    "E8-extra-special": {
        "fibration_count": Fact(1, "extra-special E8 type: a unique genus one fibration"),
        "two_sequences": Fact(0, "extra-special E8 type: the unique 1-sequence does not extend"),
        "constraints": Fact({"p": 2, "classes": ["classical", "supersingular"]},
                            "extra-special surfaces: characteristic 2, classical or supersingular"),
    },
    "D8-extra-special": {
        "fibration_count": Fact(3, "extra-special D8 type: three genus one fibrations"),
        "two_sequences": Fact(2, "extra-special D8 type: two 2-sequences, neither extendable"),
        "constraints": Fact({"p": 2, "classes": ["classical", "supersingular"]},
                            "extra-special surfaces: characteristic 2, classical or supersingular"),
    },
    "E7-extra-special": {
        "fibration_count": Fact(2, "extra-special E7 type: two genus one fibrations"),
        "two_sequences": Fact(1, "extra-special E7 type: one 2-sequence, not extendable"),
        "constraints": Fact({"p": 2, "classes": ["classical"]},
                            "extra-special E7 type: characteristic 2 and classical only"),
    },
    "type-I": {
        "non_extendable_3_sequence": Fact(True, "type I: some 3-sequence admits no extension"),
    },
    "E7-2": {
        "non_extendable_3_sequence": Fact(True, "type E7(2): some 3-sequence admits no extension"),
        "four_sequences": Fact(0, "type E7(2): no 4-sequences"),
    },
}


def _override_dir() -> Path | None:
    d = os.environ.get(CATALOG_ENV)
    return Path(d) if d else None


def catalog_names() -> list[str]:
    names = list(BUILTIN)
    d = _override_dir()
    if d and d.is_dir():
        names += sorted(p.stem for p in d.glob("*.json") if p.stem not in names)
    return names


def catalog(name: str) -> CatalogEntry:
    d = _override_dir()
    if d is not None and (d / f"{name}.json").is_file():
        graph = load_graph(d / f"{name}.json")
    elif name in BUILTIN:
        text = resources.files("enriques_lattice.catalog").joinpath(f"{name}.json").read_text(encoding="utf-8")
        graph = parse_graph(text)
    else:
        raise LookupFailure(f"unknown catalog graph {name!r}; valid names: {', '.join(catalog_names())}")
    return CatalogEntry(graph, dict(_EXPECTED.get(name, {})))
