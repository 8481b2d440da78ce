"""Exact integer and rational linear algebra used throughout the package.

Everything here works on plain nested lists of ``int`` or ``Fraction``;
no floating point is ever involved.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

from .errors import StructuralError

Matrix = list[list[int]]


def check_square(m: Sequence[Sequence], *, symmetric: bool = False) -> int:
    n = len(m)
    for row in m:
        if len(row) != n:
            raise StructuralError(f"matrix is not square ({n} rows, a row of length {len(row)})")
    if symmetric:
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise StructuralError(f"matrix is not symmetric at ({i}, {j})")
    return n


def bareiss_det(m: Sequence[Sequence[int]]) -> int:
    """Determinant of an integer matrix by fraction-free elimination."""
    n = check_square(m)
    if n == 0:
        return 1
    a = [list(map(int, row)) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                # exact division is guaranteed by Sylvester's identity
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def rational_det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    n = check_square(m)
    denom = 1
    for row in m:
        for x in row:
            denom = lcm(denom, Fraction(x).denominator)
    scaled = [[int(Fraction(x) * denom) for x in row] for row in m]
    return Fraction(bareiss_det(scaled), denom**n)


def rref(m: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    a = [[Fraction(x) for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def nullspace(m: Sequence[Sequence]) -> list[list[Fraction]]:
    """Basis of the right kernel of ``m`` over Q."""
    if not m:
        return []
    cols = len(m[0])
    red, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for r, p in enumerate(pivots):
            v[p] = -red[r][f]
        basis.append(v)
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve the square nonsingular system ``a x = b`` over Q."""
    n = check_square(a)
    aug = [list(a[i]) + [b[i]] for i in range(n)]
    red, pivots = rref(aug)
    if pivots != list(range(n)):
        raise StructuralError("singular system")
    return [red[i][n] for i in range(n)]


def inverse(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = check_square(a)
    aug = [list(a[i]) + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise StructuralError("matrix is singular")
    return [row[n:] for row in red]


def inertia(m: Sequence[Sequence]) -> tuple[int, int, int]:
    """(n_plus, n_minus, n_zero) of a symmetric rational matrix.

    Congruence diagonalisation: pivot on a nonzero diagonal entry when
    one exists, otherwise replace ``e_i`` by ``e_i + e_j`` for some
    nonzero off-diagonal ``a_ij`` (all remaining diagonals are 0, so
    the new diagonal is ``2 a_ij``).
    """
    n = check_square(m, symmetric=True)
    a = [[Fraction(x) for x in row] for row in m]
    active = list(range(n))
    pos = neg = 0
    while active:
        piv = next((i for i in active if a[i][i] != 0), None)
        if piv is None:
            pair = next(
                ((i, j) for i in active for j in active if i < j and a[i][j] != 0), None
            )
            if pair is None:
                break
            i, j = pair
            for t in range(n):
                a[i][t] += a[j][t]
            for t in range(n):
                a[t][i] += a[t][j]
            piv = i
        d = a[piv][piv]
        if d > 0:
            pos += 1
        else:
            neg += 1
        active.remove(piv)
        col = [a[i][piv] for i in range(n)]
        for i in active:
            if col[i] == 0:
                continue
            f = col[i] / d
            row_i = a[i]
            for j in active:
                row_i[j] -= f * col[j]
    return pos, neg, n - pos - neg


def hnf_rows(rows: Sequence[Sequence[int]]) -> Matrix:
    """Row-style Hermite normal form; returns only the nonzero rows."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return []
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        if r == m:
            break
        while True:
            nz = [i for i in range(r, m) if a[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[p] = a[p], a[r]
            clean = True
            for i in range(r + 1, m):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        clean = False
            if clean:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return a[:r]


def rational_lattice_basis(generators: Sequence[Sequence]) -> list[list[Fraction]]:
    """A Z-basis (HNF rows) of the lattice spanned by rational vectors."""
    gens = [[Fraction(x) for x in g] for g in generators]
    denom = 1
    for g in gens:
        for x in g:
            denom = lcm(denom, x.denominator)
    ints = [[int(x * denom) for x in g] for g in gens]
    return [[Fraction(x, denom) for x in row] for row in hnf_rows(ints)]


def complete_to_basis(u: Sequence[int]) -> Matrix:
    """Integer basis of Z^n (rows) whose first row is the primitive vector ``u``."""
    n = len(u)
    if vector_gcd(u) != 1:
        raise StructuralError("vector is not primitive")
    # column HNF of u with a transform: T u = (1, 0, ..., 0)^T
    aug = [[u[i]] + [1 if j == i else 0 for j in range(n)] for i in range(n)]
    red = hnf_rows(aug)
    t = [row[1:] for row in red]
    t_inv = inverse(t)
    basis = [[int(t_inv[i][j]) for i in range(n)] for j in range(n)]
    first = basis[0]
    if list(first) != list(u):
        first = [-x for x in first]
        basis[0] = first
    assert basis[0] == list(u)
    return basis


def vector_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def transpose(a: Sequence[Sequence]) -> list[list]:
    return [list(col) for col in zip(*a)]


def as_exact(x):
    """Collapse a Fraction with denominator 1 to ``int``."""
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x
