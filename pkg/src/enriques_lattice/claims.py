"""Replay of the classification's checkable claims as a pass/fail suite.

Each claim compares an expected value with a computed one. Expected
values come either from the classification itself or, for values it
does not state, from the frozen manifest ``data/derived.json``; the
latter are reported with status ``derived-frozen``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Callable

from .errors import BoundViolation, EnriquesError
from .fibers import affine_diagram, affine_graph, root_lattice_gram, root_lattice_label, root_lattices
from .fibrations import (
    curve_lattice,
    enumerate_fibrations,
    fiber_bisection,
    fiber_bisections,
    shioda_tate_check,
    surface_constraints,
)
from .graphs import BUILTIN, EXTRA_SPECIAL, CurveGraph, catalog, gram_from_graph
from .lattice import adjoin_half_class, determinant_exact, fiber_bisection_lattice, span_lattice
from .sequences import degenerate_closure, extend_sequence, find_sequences, sequence_gram
from .weyl import vinberg_finite_index

PASS, FAIL, FROZEN = "pass", "fail", "derived-frozen"


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    citation: str
    expected: Any
    computed: Any
    status: str

    @property
    def ok(self) -> bool:
        return self.status != FAIL

    def to_json(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "citation": self.citation,
            "expected": self.expected,
            "computed": self.computed,
            "status": self.status,
        }


def load_manifest() -> dict:
    text = resources.files("enriques_lattice.data").joinpath("derived.json").read_text(encoding="utf-8")
    return json.loads(text)


def _graph(name: str) -> CurveGraph:
    return catalog(name).graph


# --- individual claims -------------------------------------------------------------------
# each returns the computed value; the table below holds expected values and citations


def _fibration_count(name: str) -> Callable[[], int]:
    return lambda: len(enumerate_fibrations(_graph(name)))


def _non_extendable(g: CurveGraph, c: int) -> int:
    return sum(1 for s in find_sequences(g, c) if len(s) == c and not extend_sequence(s, g).extendable)


def _two_sequences(name: str) -> Callable[[], dict]:
    def run() -> dict:
        g = _graph(name)
        seqs = [s for s in find_sequences(g, 2) if len(s) == 2]
        return {"2-sequences": len(seqs), "non_extendable": _non_extendable(g, 2)}

    return run


def _e8_sequences() -> dict:
    g = _graph("E8-extra-special")
    return {"2-sequences": sum(1 for s in find_sequences(g, 2) if len(s) == 2)}


def _e7_2_sequences() -> dict:
    g = _graph("E7-2")
    return {
        "4-sequences": sum(1 for s in find_sequences(g, 4) if len(s) == 4),
        "non_extendable_3_sequence": _non_extendable(g, 3) > 0,
    }


def _type_i_sequences() -> dict:
    return {"non_extendable_3_sequence": _non_extendable(_graph("type-I"), 3) > 0}


def _sequence_counts() -> dict:
    out = {}
    for name in BUILTIN:
        counts: dict[str, int] = {}
        for s in find_sequences(_graph(name), 10):
            counts[str(len(s))] = counts.get(str(len(s)), 0) + 1
        out[name] = counts
    return out


def _non_extendable_3() -> dict:
    return {name: _non_extendable(_graph(name), 3) for name in ("E7-2", "type-I")}


def _ten_sequence() -> dict:
    n = 10
    abstract = abs(determinant_exact([[int(i != j) for j in range(n)] for i in range(n)]))
    g = _graph("D8-extra-special")
    dets = set()
    for s in find_sequences(g, 2):
        if len(s) == 2:
            for d in degenerate_closure(s, g, 10):
                dets.add(abs(sequence_gram(d).det()))
    return {"abstract_gram": abstract, "degenerate_closures_D8": sorted(dets)}


def _block_identity() -> dict:
    failures = []
    lattices = root_lattices(8)
    for comps in lattices:
        root = root_lattice_gram(comps)
        for row in ([0] * 8, [1] + [0] * 7, [0, 1, 0, 0, 0, 0, 0, 1]):
            lam = fiber_bisection_lattice(root, row)
            if lam.det() != -4 * determinant_exact(root):
                failures.append(f"{root_lattice_label(comps)} with bisection row {row}")
    return {"rank_8_root_lattices": len(lattices), "failures": failures}


def _synthetic_fiber(kind: str, rank: int) -> CurveGraph:
    base = affine_graph(kind, rank)
    d = affine_diagram(base, base.vertices)
    double = [v for v, m in zip(d.vertices, d.marks) if m == 2]
    if double:
        extra = ((double[0], "B", 1),)
    else:
        extra = ((d.vertices[0], "B", 1), (d.vertices[1], "B", 1))
    return CurveGraph(f"{base.name}+bisection", base.vertices + ("B",), base.edges + extra)


def _fiber_lattices() -> dict:
    out = {}
    for kind in ("A", "D", "E"):
        g = _synthetic_fiber(kind, 8)
        d = affine_diagram(g, [v for v in g.vertices if v != "B"])
        fb = fiber_bisection(g, d, "B")
        lam = fb.lattice
        half = adjoin_half_class(lam, lam.basis_vector(0))
        out[d.base_type] = {
            "identity": lam.det() == -4 * fb.root_det,
            "half_class_ratio_4": lam.det() == 4 * half.det(),
        }
    instances = [fb for name in BUILTIN for fb in fiber_bisections(_graph(name)) if fb.lattice.rank() == 10]
    out["catalog_instances"] = {
        "identity": all(fb.lattice.det() == -4 * fb.root_det for fb in instances),
        "half_class_ratio_4": all(
            fb.lattice.det() == 4 * adjoin_half_class(fb.lattice, fb.lattice.basis_vector(0)).det()
            for fb in instances
        ),
    }
    return out


def _e8_forcing() -> list[str]:
    return [
        root_lattice_label(c)
        for c in root_lattices(8)
        if abs(fiber_bisection_lattice(root_lattice_gram(c), [0] * 8).det()) <= 4
    ]


def _vinberg_catalog() -> dict:
    return {name: vinberg_finite_index(_graph(name)).finite_index for name in BUILTIN}


def _vinberg_negative() -> dict:
    g = _graph("E8-extra-special")
    fiber = next(d for d in enumerate_fibrations(g)[0].fibers if d.base_type == "~E8")
    bare = g.induced(fiber.vertices)
    single = CurveGraph("single-vertex", ("R",), ())
    return {
        "bare ~E8": vinberg_finite_index(bare).finite_index,
        "single vertex": vinberg_finite_index(single).finite_index,
    }


def _shioda_tate() -> dict:
    violations = 0
    tight = set()
    for name in BUILTIN:
        for f in enumerate_fibrations(_graph(name)):
            try:
                tight |= set(shioda_tate_check(f).tight)
            except BoundViolation:
                violations += 1
    return {
        "violations": violations,
        "II* tight": ("II*",) in tight,
        "III* + I2 tight": ("III*", "I2|III") in tight,
    }


def _characteristic() -> dict:
    out = {}
    for name in EXTRA_SPECIAL:
        rep = surface_constraints(_graph(name)).to_json()
        out[name] = {"p": rep["p"], "classes": rep["classes"]}
    return out


def _catalog_lattices() -> dict:
    out = {}
    for name in BUILTIN:
        g = _graph(name)
        span = span_lattice(gram_from_graph(g).gram, g.vertices).lattice
        out[name] = {"signature": list(span.signature()), "det_in_1_4": abs(span.det()) in (1, 4)}
    return out


def _cross_check() -> bool:
    """Each non-extendable 2-sequence has a member with a II* fiber and a curve bisection."""
    for name in ("D8-extra-special", "E7-extra-special"):
        g = _graph(name)
        cl = curve_lattice(g)
        fibs = {f.id: f for f in enumerate_fibrations(g)}
        for s in find_sequences(g, 2):
            if len(s) != 2 or extend_sequence(s, g).extendable:
                continue
            if not any(fibs[i].has_fiber("II*") and fibs[i].bisections(cl) for i in s.sources):
                return False
    return True


_CLAIMS: list[tuple[str, str, Any, Callable[[], Any], bool]] = [
    # (id, citation, expected, compute, derived)
    ("fibrations.E8", "extra-special E8 type: the surface has a single genus one fibration", 1,
     _fibration_count("E8-extra-special"), False),
    ("fibrations.D8", "extra-special D8 type: the surface has exactly three genus one fibrations", 3,
     _fibration_count("D8-extra-special"), False),
    ("fibrations.E7", "extra-special E7 type: the surface has exactly two genus one fibrations", 2,
     _fibration_count("E7-extra-special"), False),
    ("fibrations.type-I", "type I graph: fibration count from the chamber-ray oracle", None,
     _fibration_count("type-I"), True),
    ("fibrations.E7-2", "E7(2) graph: fibration count from the chamber-ray oracle", None,
     _fibration_count("E7-2"), True),
    ("sequences.D8", "extra-special D8 type: two 2-sequences, neither of which extends",
     {"2-sequences": 2, "non_extendable": 2}, _two_sequences("D8-extra-special"), False),
    ("sequences.E7", "extra-special E7 type: one 2-sequence, which does not extend",
     {"2-sequences": 1, "non_extendable": 1}, _two_sequences("E7-extra-special"), False),
    ("sequences.E8", "extra-special E8 type: no 2-sequence exists", {"2-sequences": 0}, _e8_sequences, False),
    ("sequences.E7-2", "E7(2) graph: no 4-sequence, and a 3-sequence that does not extend",
     {"4-sequences": 0, "non_extendable_3_sequence": True}, _e7_2_sequences, False),
    ("sequences.type-I", "type I graph: a 3-sequence that does not extend",
     {"non_extendable_3_sequence": True}, _type_i_sequences, False),
    ("sequences.counts", "c-sequence counts per catalog graph from brute-force ray subsets", None,
     _sequence_counts, True),
    ("sequences.non-extendable-3", "number of non-extendable 3-sequences from the clique search", None,
     _non_extendable_3, True),
    ("lattice.ten-sequence", "a 10-sequence spans a lattice of discriminant 9",
     {"abstract_gram": 9, "degenerate_closures_D8": [9]}, _ten_sequence, False),
    ("lattice.block-identity", "fiber class, bisection and a rank 8 root lattice L give det = -4 det(L)",
     {"rank_8_root_lattices": 39, "failures": []}, _block_identity, False),
    ("lattice.fiber-bisection", "the identity on genuine fibers with a bisection; adjoining half the fiber class divides det by 4",
     {t: {"identity": True, "half_class_ratio_4": True} for t in ("~A8", "~D8", "~E8", "catalog_instances")},
     _fiber_lattices, False),
    ("lattice.e8-forcing", "index at most 2 in a unimodular lattice leaves E8 as the only choice of L",
     ["E8"], _e8_forcing, False),
    ("vinberg.catalog", "the reflection group has finite index for every catalog graph",
     {name: True for name in BUILTIN}, _vinberg_catalog, False),
    ("vinberg.negative", "graphs spanning less than rank 10 fail the finite-index test",
     {"bare ~E8": False, "single vertex": False}, _vinberg_negative, False),
    ("shioda-tate", "at most 8 + s curves in s fibers; II* and III* + I2 attain the bound",
     {"violations": 0, "II* tight": True, "III* + I2 tight": True}, _shioda_tate, False),
    ("characteristic", "extra-special surfaces live in characteristic 2, classical or supersingular; the E7 type is classical",
     {
         "D8-extra-special": {"p": [2], "classes": ["classical", "supersingular"]},
         "E7-extra-special": {"p": [2], "classes": ["classical"]},
         "E8-extra-special": {"p": [2], "classes": ["classical", "supersingular"]},
     }, _characteristic, False),
    ("catalog.lattices", "each catalog graph spans a lattice of signature (1,9) and |det| 1 or 4",
     {name: {"signature": [1, 9, 0], "det_in_1_4": True} for name in BUILTIN}, _catalog_lattices, False),
    ("cross.two-sequences", "a non-extendable 2-sequence has a member whose fibration has a II* fiber and a curve bisection",
     True, _cross_check, False),
]


def _derived_expected(claim_id: str, manifest: dict) -> Any:
    v = manifest["values"]
    if claim_id.startswith("fibrations."):
        return v["fibration_count"][claim_id.split(".", 1)[1]]
    if claim_id == "sequences.counts":
        return v["sequence_counts"]
    if claim_id == "sequences.non-extendable-3":
        return v["non_extendable_3_sequences"]
    raise KeyError(claim_id)


def _evaluate(claim_id: str, citation: str, expected: Any, compute: Callable[[], Any], derived: bool) -> ClaimResult:
    try:
        computed = compute()
    except EnriquesError as exc:
        computed = f"error: {type(exc).__name__}: {exc}"
    # round-trip through JSON so tuples and lists compare alike
    computed = json.loads(json.dumps(computed, sort_keys=True))
    expected = json.loads(json.dumps(expected, sort_keys=True))
    if expected != computed:
        status = FAIL
    else:
        status = FROZEN if derived else PASS
    return ClaimResult(claim_id, citation, expected, computed, status)


def _oracle_claims(manifest: dict) -> list[ClaimResult]:
    from .oracles import fibration_count_oracle, fibrations_agree, sequence_counts_oracle

    v = manifest["values"]
    return [
        _evaluate("oracle.fibrations", "enumerated fibrations equal the isotropic chamber rays",
                  {name: True for name in BUILTIN},
                  lambda: {name: fibrations_agree(_graph(name)) for name in BUILTIN}, False),
        _evaluate("oracle.fibration-counts", "frozen fibration counts against the chamber-ray oracle",
                  v["fibration_count"],
                  lambda: {name: fibration_count_oracle(_graph(name)) for name in v["fibration_count"]}, True),
        _evaluate("oracle.sequence-counts", "frozen c-sequence counts against brute-force ray subsets",
                  v["sequence_counts"],
                  lambda: {name: {str(c): k for c, k in sequence_counts_oracle(_graph(name)).items()}
                           for name in v["sequence_counts"]}, True),
    ]


def claim_ids() -> list[str]:
    return [c[0] for c in _CLAIMS]


def run_claims(oracle: bool = False, only: list[str] | None = None) -> list[ClaimResult]:
    """Evaluate the claim suite in fixed order; with ``oracle`` also re-derive frozen values."""
    manifest = load_manifest()
    results = []
    for claim_id, citation, expected, compute, derived in _CLAIMS:
        if only is not None and claim_id not in only:
            continue
        if derived:
            expected = _derived_expected(claim_id, manifest)
        results.append(_evaluate(claim_id, citation, expected, compute, derived))
    if oracle:
        results += _oracle_claims(manifest)
    return results
