"""Independent cross-checks for the fibration enumeration.

The nef isotropic classes of a graph are found here as the isotropic
extreme rays of the cone ``{x : x.R >= 0 for every vertex R}`` (every
isotropic point of a cone inside the closed positive cone is extreme),
without looking at subdiagrams at all.
"""

from __future__ import annotations

from .fibrations import curve_lattice, enumerate_fibrations
from .graphs import CurveGraph
from .weyl import chamber_rays


def nef_isotropic_classes(g: CurveGraph) -> list[tuple[int, ...]]:
    cl = curve_lattice(g)
    rays = chamber_rays([cl.vertex(v) for v in g.vertices])
    return [r for r in rays if cl.lattice.pair(r, r) == 0]


def fibration_count_oracle(g: CurveGraph) -> int:
    return len(nef_isotropic_classes(g))


def fibrations_agree(g: CurveGraph) -> bool:
    enumerated = {f.isotropic_class.coords for f in enumerate_fibrations(g)}
    return enumerated == set(nef_isotropic_classes(g))


def sequence_counts_oracle(g: CurveGraph, c_max: int = 10) -> dict[int, int]:
    """Number of c-sequences for each c, by brute force over subsets of rays."""
    from itertools import combinations

    cl = curve_lattice(g)
    rays = nef_isotropic_classes(g)
    pair = [[cl.lattice.pair(a, b) for b in rays] for a in rays]
    counts: dict[int, int] = {}
    for c in range(1, min(c_max, len(rays)) + 1):
        k = sum(
            1
            for combo in combinations(range(len(rays)), c)
            if all(pair[i][j] == 1 for i, j in combinations(combo, 2))
        )
        if k == 0:
            break
        counts[c] = k
    return counts
