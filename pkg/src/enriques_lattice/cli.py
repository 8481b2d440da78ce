"""Command line front end.

Exit codes: 0 success (all claims pass), 1 a claim failed, 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .claims import FAIL, run_claims
from .errors import EnriquesError, ParseError
from .fibers import find_parabolic_subdiagrams, kodaira_label
from .fibrations import PartialRankWarning, curve_lattice, enumerate_fibrations, shioda_tate_check, surface_constraints
from .graphs import CurveGraph, catalog, catalog_names, export_dot, gram_from_graph, load_graph, serialize_graph
from .lattice import IntegralLattice, LatticeVector, span_lattice
from .sequences import extend_sequence, find_sequences
from .weyl import nef_reduce, vinberg_finite_index

EXIT_OK, EXIT_CLAIM, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


def _json_default(x):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default)


def resolve_graph(source: str | None, name: str | None) -> CurveGraph:
    if name is not None:
        return catalog(name).graph
    if source is None:
        raise UsageError("give a graph file or --catalog NAME")
    path = Path(source)
    if path.is_file():
        return load_graph(path)
    if source in catalog_names():
        return catalog(source).graph
    raise ParseError(f"cannot read graph file {source!r}: no such file")


# --- analyze ---------------------------------------------------------------------------


def analyze(g: CurveGraph, max_seq: int = 3) -> dict:
    raw = gram_from_graph(g)
    span = span_lattice(raw.gram, g.vertices).lattice
    cl = curve_lattice(g)
    fibs = enumerate_fibrations(g)
    seqs = find_sequences(g, max_seq)
    vin = vinberg_finite_index(g)
    report = {
        "graph": g.name,
        "vertices": len(g.vertices),
        "edges": len(g.edges),
        "lattice": {
            "gram_signature": list(raw.signature()),
            "span_rank": span.dim,
            "span_signature": list(span.signature()),
            "span_det": span.det(),
            "saturated_det": cl.lattice.det(),
            "notes": list(cl.warnings),
        },
        "parabolic_subdiagrams": [
            {"type": d.base_type, "kodaira": str(kodaira_label(d)), "vertices": list(d.vertices), "marks": list(d.marks)}
            for d in find_parabolic_subdiagrams(g)
        ],
        "fibrations": [
            dict(f.to_json(), bisections=f.bisections(cl), shioda_tate_tight=[list(t) for t in shioda_tate_check(f).tight])
            for f in fibs
        ],
        "sequences": [
            dict(s.to_json(), extendable=extend_sequence(s, g).extendable) if len(s) < 10 else s.to_json()
            for s in seqs
        ],
        "max_seq": max_seq,
        "vinberg": vin.to_json(),
    }
    if len(fibs):
        report["constraints"] = surface_constraints(g).to_json()
    return report


def _analyze_text(r: dict) -> str:
    lat = r["lattice"]
    lines = [
        f"graph {r['graph']}: {r['vertices']} vertices, {r['edges']} edges",
        f"  Gram signature {tuple(lat['gram_signature'])}; span rank {lat['span_rank']}, "
        f"signature {tuple(lat['span_signature'])}, det {lat['span_det']}; saturated det {lat['saturated_det']}",
    ]
    lines += [f"  note: {n}" for n in lat["notes"]]
    lines.append(f"parabolic subdiagrams: {len(r['parabolic_subdiagrams'])}")
    for d in r["parabolic_subdiagrams"]:
        lines.append(f"  {d['kodaira']:8} {d['type']:5} {' '.join(d['vertices'])}")
    lines.append(f"fibrations: {len(r['fibrations'])}")
    for f in r["fibrations"]:
        parts = [
            f"{fb['kodaira']} ({'half' if fb['half_fiber'] else 'simple'}: {' '.join(fb['vertices'])})"
            for fb in f["fibers"]
        ]
        lines.append(f"  {f['id']}: " + ", ".join(parts))
        if f["bisections"]:
            lines.append(f"      bisections: {' '.join(f['bisections'])}")
    by_c: dict[int, list] = {}
    for s in r["sequences"]:
        by_c.setdefault(s["c"], []).append(s)
    lines.append(f"sequences up to c = {r['max_seq']}:")
    for c in range(1, r["max_seq"] + 1):
        group = by_c.get(c, [])
        lines.append(f"  {c}-sequences: {len(group)}")
        for s in group if c > 1 else []:
            tag = "extendable" if s.get("extendable") else "non-extendable"
            lines.append(f"    ({', '.join(s['fibrations'])}) {tag}")
    v = r["vinberg"]
    lines.append(f"finite index: {'yes' if v['finite_index'] else 'no'}")
    lines += [f"  {x}" for x in v["failures"]]
    if "constraints" in r:
        c = r["constraints"]
        lines.append(f"admissible: p in {c['p']}, classes {', '.join(c['classes']) or 'none'}")
    return "\n".join(lines)


def cmd_analyze(args) -> int:
    if args.source is not None and args.catalog is not None:
        raise UsageError("give either a graph file or --catalog, not both")
    if not 1 <= args.max_seq <= 10:
        raise UsageError("--max-seq must lie in 1..10")
    report = analyze(resolve_graph(args.source, args.catalog), args.max_seq)
    print(_dump(report) if args.json else _analyze_text(report))
    return EXIT_OK


# --- catalog ---------------------------------------------------------------------------


def cmd_catalog(args) -> int:
    if args.list or args.name is None:
        names = catalog_names()
        print(_dump(names) if args.json else "\n".join(names))
        return EXIT_OK
    entry = catalog(args.name)
    if args.json:
        print(_dump({
            "graph": json.loads(serialize_graph(entry.graph)),
            "expected": {k: {"value": f.value, "source": f.source} for k, f in entry.expected.items()},
        }))
    else:
        print(serialize_graph(entry.graph), end="")
        for k, f in sorted(entry.expected.items()):
            print(f"# {k} = {f.value!r}  ({f.source})")
    return EXIT_OK


# --- verify-paper ----------------------------------------------------------------------


def cmd_verify(args) -> int:
    results = run_claims(oracle=args.oracle)
    if args.json:
        print(_dump([r.to_json() for r in results]))
    else:
        width = max(len(r.claim_id) for r in results)
        for r in results:
            print(f"{r.status.upper():15} {r.claim_id:{width}}  {r.citation}")
            if r.status == FAIL:
                print(f"{'':15} expected {json.dumps(r.expected, sort_keys=True)}")
                print(f"{'':15} computed {json.dumps(r.computed, sort_keys=True)}")
        failed = sum(r.status == FAIL for r in results)
        print(f"{len(results) - failed}/{len(results)} claims hold")
    return EXIT_CLAIM if any(r.status == FAIL for r in results) else EXIT_OK


# --- reduce ----------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise UsageError(f"not a list of integers: {text!r}") from None


def _load_gram(path: str) -> IntegralLattice:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ParseError(f"cannot read Gram file {path!r}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if isinstance(data, dict):
        return IntegralLattice.from_rows(data.get("gram", []), data.get("labels", ()))
    return IntegralLattice.from_rows(data)


def cmd_reduce(args) -> int:
    coords = _int_list(args.vector)
    if args.catalog is not None:
        if args.gram is not None:
            raise UsageError("give either a Gram file or --catalog, not both")
        g = catalog(args.catalog).graph
        cl = curve_lattice(g)
        if len(coords) != len(g.vertices):
            raise UsageError(f"vector has {len(coords)} entries; {g.name} has {len(g.vertices)} vertices")
        v = cl.combination(coords)
        if not v.is_integral():
            raise UsageError("vector is not integral in the saturated lattice")
        trace = nef_reduce(v, g)
    else:
        if args.gram is None:
            raise UsageError("give a Gram file or --catalog NAME")
        lat = _load_gram(args.gram)
        if not args.root:
            raise UsageError("give at least one --root")
        roots = {}
        for k, text in enumerate(args.root):
            rc = _int_list(text)
            if len(rc) != lat.dim:
                raise UsageError(f"root {text!r} has {len(rc)} entries; the lattice has rank {lat.dim}")
            roots[f"r{k}"] = LatticeVector(tuple(rc), lat)
        if len(coords) != lat.dim:
            raise UsageError(f"vector has {len(coords)} entries; the lattice has rank {lat.dim}")
        trace = nef_reduce(LatticeVector(tuple(coords), lat), roots)
    out = trace.to_json()
    if args.json:
        print(_dump(out))
    else:
        print(f"input    {out['input']}")
        print(f"nef rep  {out['nef_rep']}")
        print(f"steps    {out['steps']}")
        sums = " + ".join(f"{c}*{n}" for n, c in out["root_sum"].items()) or "0"
        print(f"root sum {sums}")
    return EXIT_OK


# --- export-dot ------------------------------------------------------------------------


def cmd_export_dot(args) -> int:
    print(export_dot(resolve_graph(args.source, args.catalog)), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="enriques", description="Lattice and curve-graph checks for Enriques surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="lattice invariants, fibrations, sequences and finite-index verdict")
    a.add_argument("source", nargs="?", help="graph JSON file or catalog name")
    a.add_argument("--catalog", metavar="NAME")
    a.add_argument("--json", action="store_true")
    a.add_argument("--max-seq", type=int, default=3, metavar="C")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("catalog", help="list or show built-in graphs")
    c.add_argument("name", nargs="?")
    c.add_argument("--list", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_catalog)

    v = sub.add_parser("verify-paper", help="run the claim suite")
    v.add_argument("--oracle", action="store_true", help="re-derive frozen values with the brute-force oracle")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("reduce", help="reflect a class of non-negative square to a nef class")
    r.add_argument("gram", nargs="?", help="JSON Gram matrix, or {\"gram\": ..., \"labels\": ...}")
    r.add_argument("--catalog", metavar="NAME", help="use a catalog graph; the vector is given on its vertices")
    r.add_argument("--vector", required=True, help="comma separated integers")
    r.add_argument("--root", action="append", default=[], help="comma separated integers; repeatable")
    r.add_argument("--json", action="store_true")
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("export-dot", help="write the graph in DOT format")
    e.add_argument("source", nargs="?")
    e.add_argument("--catalog", metavar="NAME")
    e.set_defaults(func=cmd_export_dot)
    return p


_SHOWN: set[str] = set()


def _show_warning(message, category, *rest, **kw) -> None:
    if str(message) not in _SHOWN:
        _SHOWN.add(str(message))
        print(f"enriques: warning: {message}", file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", PartialRankWarning)
            warnings.showwarning = _show_warning
            return args.func(args)
    except (UsageError, EnriquesError) as exc:
        print(f"enriques: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
