"""Polynomial-time recovery routines: shortest path, GF(2) solve, LLL subset sum.

GF(2) rows are packed into Python ints (bit j = column j).  LLL runs entirely
in exact integer arithmetic: the Gram-Schmidt state is kept as the classical
integral (lambda, d) tables, so size-reduction and the Lovasz condition are
checked without floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, ParameterError
from .models import subset_sum_value


# ---------------------------------------------------------------------------
# shortest path


def shortest_path(adjacency: np.ndarray, source: int = 1, target: int = 2) -> Optional[tuple[int, ...]]:
    """Minimum-edge path from source to target, lexicographically smallest.

    Vertices are 1-indexed; returns None when target is unreachable.
    """
    n = adjacency.shape[0] - 1
    if source == target:
        return (source,)
    dist = {target: 0}
    frontier = [target]
    while frontier:
        nxt = []
        for u in frontier:
            for v in range(1, n + 1):
                if adjacency[u, v] and v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    if source not in dist:
        return None
    path = [source]
    cur = source
    while cur != target:
        step = dist[cur] - 1
        cur = min(v for v in range(1, n + 1) if adjacency[cur, v] and dist.get(v, -1) == step)
        path.append(cur)
    return tuple(path)


def all_simple_paths(adjacency: np.ndarray, source: int = 1, target: int = 2):
    """DFS enumeration of all simple paths; exhaustive oracle for small n."""
    n = adjacency.shape[0] - 1
    out = []

    def walk(path, seen):
        u = path[-1]
        if u == target:
            out.append(tuple(path))
            return
        for v in range(1, n + 1):
            if adjacency[u, v] and v not in seen:
                walk(path + [v], seen | {v})

    walk([source], {source})
    return out


# ---------------------------------------------------------------------------
# GF(2) linear algebra


def _pack_rows(A: np.ndarray) -> list[int]:
    m, n = A.shape
    return [int(sum(int(A[i, j]) << j for j in range(n))) for i in range(m)]


def f2_rank(A: np.ndarray) -> int:
    rows = _pack_rows(A)
    rank = 0
    for col in range(A.shape[1]):
        pivot = next((r for r in range(rank, len(rows)) if (rows[r] >> col) & 1), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and (rows[r] >> col) & 1:
                rows[r] ^= rows[rank]
        rank += 1
    return rank


@dataclass(frozen=True)
class F2Solution:
    kind: str  # "unique" | "affine" | "inconsistent"
    particular: Optional[np.ndarray]
    nullspace_basis: list
    rank: int


def f2_solve(A: np.ndarray, y: np.ndarray) -> F2Solution:
    """Exact solution classification of A x = y over GF(2)."""
    A = np.asarray(A)
    y = np.asarray(y)
    m, n = A.shape
    if y.shape != (m,):
        raise ParameterError(f"y has shape {y.shape}, expected ({m},)")
    rows = [_pack_rows(A)[i] | (int(y[i]) << n) for i in range(m)]
    pivot_cols: list[int] = []
    rank = 0
    for col in range(n):
        pivot = next((r for r in range(rank, m) if (rows[r] >> col) & 1), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(m):
            if r != rank and (rows[r] >> col) & 1:
                rows[r] ^= rows[rank]
        pivot_cols.append(col)
        rank += 1
    var_mask = (1 << n) - 1
    for r in range(rank, m):
        if rows[r] & var_mask == 0 and (rows[r] >> n) & 1:
            return F2Solution(kind="inconsistent", particular=None, nullspace_basis=[], rank=rank)
    particular = np.zeros(n, dtype=np.uint8)
    for r, col in enumerate(pivot_cols):
        particular[col] = (rows[r] >> n) & 1
    free_cols = [c for c in range(n) if c not in pivot_cols]
    basis = []
    for f in free_cols:
        vec = np.zeros(n, dtype=np.uint8)
        vec[f] = 1
        for r, col in enumerate(pivot_cols):
            vec[col] = (rows[r] >> f) & 1
        basis.append(vec)
    kind = "unique" if not free_cols else "affine"
    return F2Solution(kind=kind, particular=particular, nullspace_basis=basis, rank=rank)


def f2_solution_set(sol: F2Solution) -> list[np.ndarray]:
    """Materialize the full affine solution set (small systems only)."""
    if sol.kind == "inconsistent":
        return []
    out = []
    for bits in itertools.product((0, 1), repeat=len(sol.nullspace_basis)):
        v = sol.particular.copy()
        for b, basis_vec in zip(bits, sol.nullspace_basis):
            if b:
                v = (v + basis_vec) % 2
        out.append(v)
    return out


# ---------------------------------------------------------------------------
# LLL with exact integer arithmetic


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


def _exact_div(a: int, b: int) -> int:
    q, r = divmod(a, b)
    if r:
        raise AssertionError("inexact division in integral LLL state update")
    return q


def _gram_det(rows: list[list[int]]) -> int:
    """Fraction-free (Bareiss) determinant of the Gram matrix."""
    n = len(rows)
    g = [[_dot(rows[i], rows[j]) for j in range(n)] for i in range(n)]
    denom = 1
    for k in range(n - 1):
        if g[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if g[r][k] != 0), None)
            if swap is None:
                return 0
            g[k], g[swap] = g[swap], g[k]
            for r in range(n):
                g[r][k], g[r][swap] = g[r][swap], g[r][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                g[i][j] = _exact_div(g[i][j] * g[k][k] - g[i][k] * g[k][j], denom)
        denom = g[k][k]
    return g[n - 1][n - 1]


def lll_reduce(basis: Sequence[Sequence[int]], delta: float = 0.75) -> list[list[int]]:
    """LLL-reduce an integer basis (rows); exact arithmetic throughout.

    Output spans the same lattice, is size-reduced (|mu_ij| <= 1/2), and
    satisfies the Lovasz condition with the given delta.  Both properties and
    Gram-determinant preservation are verified before returning.
    """
    frac = Fraction(delta)
    if not (Fraction(1, 4) < frac < 1):
        raise ParameterError(f"need delta in (1/4, 1), got {delta}")
    p_num, q_den = frac.numerator, frac.denominator

    b = [[int(v) for v in row] for row in basis]
    n = len(b)
    if n == 0:
        return []
    input_det = _gram_det(b)
    if input_det == 0:
        raise DegenerateInputError("basis rows are linearly dependent")

    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * n for _ in range(n)]
    d[1] = _dot(b[0], b[0])

    def red(k: int, l: int) -> None:
        if abs(2 * lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            bq = b[l]
            bk = b[k]
            for i in range(len(bk)):
                bk[i] -= q * bq[i]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    kmax = 0
    k = 1
    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = _dot(b[k], b[j])
                for i in range(j):
                    u = _exact_div(d[i + 1] * u - lam[k][i] * lam[j][i], d[i])
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DegenerateInputError("basis rows are linearly dependent")
                    d[k + 1] = u
        while True:
            red(k, k - 1)
            if q_den * (d[k + 1] * d[k - 1] + lam[k][k - 1] ** 2) < p_num * d[k] ** 2:
                # swap b[k-1], b[k] and patch the integral GSO state
                b[k], b[k - 1] = b[k - 1], b[k]
                for j in range(k - 1):
                    lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
                lam_kk = lam[k][k - 1]
                B = _exact_div(d[k - 1] * d[k + 1] + lam_kk * lam_kk, d[k])
                for i in range(k + 1, kmax + 1):
                    t = lam[i][k]
                    lam[i][k] = _exact_div(d[k + 1] * lam[i][k - 1] - lam_kk * t, d[k])
                    lam[i][k - 1] = _exact_div(B * t + lam_kk * lam[i][k], d[k + 1])
                d[k] = B
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    red(k, l)
                k += 1
                break

    # defining properties, checked per call
    for i in range(1, n):
        for j in range(i):
            if abs(2 * lam[i][j]) > d[j + 1]:
                raise AssertionError("output not size-reduced")
    for kk in range(1, n):
        if q_den * (d[kk + 1] * d[kk - 1] + lam[kk][kk - 1] ** 2) < p_num * d[kk] ** 2:
            raise AssertionError("Lovasz condition violated on output")
    if d[n] != input_det:
        raise AssertionError("Gram determinant changed during reduction")
    return b


def lattice_coordinates(basis: Sequence[Sequence[int]], vector: Sequence[int]) -> Optional[list[int]]:
    """Integer coordinates of vector in the row lattice of basis, or None.

    Exact rational elimination; intended for membership checks on small bases.
    """
    rows = [[Fraction(v) for v in row] for row in basis]
    target = [Fraction(v) for v in vector]
    n, m = len(rows), len(rows[0])
    coeff = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    r = 0
    pivots = []
    for col in range(m):
        piv = next((i for i in range(r, n) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        coeff[r], coeff[piv] = coeff[piv], coeff[r]
        inv = 1 / rows[r][col]
        rows[r] = [v * inv for v in rows[r]]
        coeff[r] = [v * inv for v in coeff[r]]
        for i in range(n):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * bq for a, bq in zip(rows[i], rows[r])]
                coeff[i] = [a - f * bq for a, bq in zip(coeff[i], coeff[r])]
        pivots.append(col)
        r += 1
    coords = [Fraction(0)] * n
    residual = list(target)
    for i, col in enumerate(pivots):
        c = residual[col]
        if c != 0:
            coords_i = c
            residual = [a - coords_i * bq for a, bq in zip(residual, rows[i])]
            coords = [a + coords_i * bq for a, bq in zip(coords, coeff[i])]
    if any(v != 0 for v in residual):
        return None
    if any(v.denominator != 1 for v in coords):
        return None
    return [int(v) for v in coords]


# ---------------------------------------------------------------------------
# subset sum via Lagarias-Odlyzko embedding


@dataclass(frozen=True)
class LllConfig:
    delta: float = 0.75
    bits: int = 128
    slack: Optional[int] = None  # defaults to N at call time

    def __post_init__(self):
        if not (0.25 < self.delta < 1.0):
            raise ParameterError(f"need delta in (1/4, 1), got {self.delta}")
        if self.bits < 16:
            raise ParameterError(f"need bits >= 16, got {self.bits}")


def _truncate(value: float, bits: int) -> int:
    return round(Fraction(float(value)) * (1 << bits))


def exhaustive_subset_sum(X: np.ndarray, Y: float, k: int) -> tuple[Optional[tuple[int, ...]], float]:
    """Best k-subset by |sum - Y| over all C(N, k) candidates (oracle)."""
    best = None
    best_err = math.inf
    for combo in itertools.combinations(range(len(X)), k):
        err = abs(subset_sum_value(X, combo) - Y)
        if err < best_err:
            best, best_err = combo, err
    return best, best_err


# float64 carries 53 significant bits; truncating beyond ~48 fractional bits
# only amplifies the observation's own rounding error at integer scale, which
# buries the planted short vector.  The embedding therefore caps its working
# precision here; config.bits still sets the acceptance tolerance.
EMBEDDING_BIT_CAP = 48


def lll_subset_sum(
    X: np.ndarray, Y: float, k: int, config: LllConfig = LllConfig()
) -> Optional[tuple[int, ...]]:
    """Recover a k-subset with subset sum ~ Y via lattice reduction.

    Values are truncated to min(config.bits, 48) fractional bits, embedded in
    a Lagarias-Odlyzko style basis whose weight column is scaled by
    2^ceil(eff_bits/2), and candidates are read off reduced rows with a 0/+-1
    coefficient pattern.  A candidate is accepted when its float subset sum
    (left-to-right over sorted indices) is within slack * 2^(2-bits) of Y.
    """
    N = len(X)
    if not (1 <= k <= N):
        raise ParameterError(f"need 1 <= k <= N, got k={k}, N={N}")
    slack = config.slack if config.slack is not None else N
    tol = slack * 2.0 ** (2 - config.bits)

    if k == 1:
        diffs = np.abs(np.asarray(X, dtype=float) - Y)
        i = int(np.argmin(diffs))
        return (i,) if diffs[i] <= tol else None

    eff_bits = min(config.bits, EMBEDDING_BIT_CAP)
    a = [_truncate(x, eff_bits) for x in X]
    t = _truncate(Y, eff_bits)
    scale = 1 << ((eff_bits + 1) // 2)
    if t == 0:
        if math.comb(N, k) <= 10**6:
            best, err = exhaustive_subset_sum(X, Y, k)
            return best if best is not None and err <= tol else None
        return None

    rows = []
    for i in range(N):
        row = [0] * (N + 1)
        row[i] = 1
        row[N] = scale * a[i]
        rows.append(row)
    rows.append([0] * N + [scale * t])

    reduced = lll_reduce(rows, config.delta)
    for row in reduced:
        coeffs = row[:N]
        for sign in (1, -1):
            vals = {sign * c for c in coeffs}
            if not vals <= {0, 1}:
                continue
            subset = tuple(i for i, c in enumerate(coeffs) if c != 0)
            if len(subset) != k:
                continue
            if abs(subset_sum_value(X, subset) - Y) <= tol:
                return subset
    return None
