"""Exact cost evaluation and swap-delta bookkeeping

All arithmetic is int64. The delta formulas make no symmetry or zero-diagonal
assumption, so asymmetric families such as lipa are handled exactly.

The per-swap work (single deltas, the delta-table refresh after a swap) lives
in numba kernels that the heuristics call from their own compiled loops; the
functions below are the checked Python entry points to the same kernels.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from numba import njit

from qap.errors import DimensionError
from qap.instance import Instance


@njit(cache=True)
def swap_delta_kernel(f, d, p, r, s):
    """δ(r, s) for flow f, distance d and permutation p; r != s"""
    pr = p[r]
    ps = p[s]
    delta = 0
    for k in range(p.shape[0]):
        if k == r or k == s:
            continue
        pk = p[k]
        delta += (f[r, k] - f[s, k]) * (d[ps, pk] - d[pr, pk])
        delta += (f[k, r] - f[k, s]) * (d[pk, ps] - d[pk, pr])
    delta += (f[r, r] - f[s, s]) * (d[ps, ps] - d[pr, pr])
    delta += (f[r, s] - f[s, r]) * (d[ps, pr] - d[pr, ps])
    return delta


@njit(cache=True)
def update_table_kernel(f, d, p, table, r, s):
    """Refresh table after swap (r, s) has been applied to p"""
    n = p.shape[0]
    pr = p[r]
    ps = p[s]
    u = np.empty(n, dtype=np.int64)
    v = np.empty(n, dtype=np.int64)
    x = np.empty(n, dtype=np.int64)
    y = np.empty(n, dtype=np.int64)
    for k in range(n):
        pk = p[k]
        u[k] = f[r, k] - f[s, k]
        v[k] = d[ps, pk] - d[pr, pk]
        x[k] = f[k, r] - f[k, s]
        y[k] = d[pk, ps] - d[pk, pr]

    for i in range(n):
        if i == r or i == s:
            continue
        for j in range(n):
            if j == r or j == s:
                continue
            table[i, j] += (u[i] - u[j]) * (v[i] - v[j]) + (x[i] - x[j]) * (y[i] - y[j])

    for k in range(n):
        dr = 0 if k == r else swap_delta_kernel(f, d, p, r, k)
        table[r, k] = dr
        table[k, r] = dr
        ds = 0 if k == s else swap_delta_kernel(f, d, p, s, k)
        table[s, k] = ds
        table[k, s] = ds


@njit(cache=True)
def swap_with_table_kernel(f, d, p, table, current, i, j):
    """Exchange p(i) and p(j), refresh table and return the new cost"""
    delta = table[i, j]
    tmp = p[i]
    p[i] = p[j]
    p[j] = tmp
    update_table_kernel(f, d, p, table, i, j)
    return current + delta


def as_perm(instance: Instance, perm: Sequence[int]) -> np.ndarray:
    """Coerce perm to an int64 array and check it matches the instance size"""
    p = np.asarray(perm, dtype=np.int64)
    if p.shape != (instance.n,):
        raise DimensionError(f"Permutation of length {p.size} does not fit N={instance.n}")
    return p


def _check_index(instance: Instance, *indices: int):
    for idx in indices:
        if not 0 <= idx < instance.n:
            raise IndexError(f"Facility index {idx} out of range for N={instance.n}")


def cost(instance: Instance, perm: Sequence[int]) -> int:
    """C = Σ_ij F[i][j] · D[p(i)][p(j)]"""
    p = as_perm(instance, perm)
    return int(np.sum(instance.flow * instance.dist[np.ix_(p, p)]))


def swap_delta(instance: Instance, perm: Sequence[int], r: int, s: int) -> int:
    """Cost change if facilities r and s exchange locations, in O(N)"""
    p = as_perm(instance, perm)
    _check_index(instance, r, s)
    if r == s:
        return 0
    return int(swap_delta_kernel(instance.flow, instance.dist, p, r, s))


def delta_row(instance: Instance, perm: np.ndarray, r: int) -> np.ndarray:
    """
    Swap deltas of facility r with every facility j, as one vector.

    Entry r is 0. Equivalent to [swap_delta(instance, perm, r, j) for j]
    but computed with O(N²) vector operations.
    """
    f, d = instance.flow, instance.dist
    n = instance.n
    pr = perm[r]
    dp = d[np.ix_(perm, perm)]  # dp[a, b] = D[p(a)][p(b)]

    # Sums over every k, then the k = r and k = j terms are taken back out
    row_terms = np.sum((f[r] - f) * (dp - dp[r]), axis=1)
    col_terms = np.sum((f[:, r] - f.T) * (dp.T - dp[:, r]), axis=1)

    j = np.arange(n)
    pj = perm
    diag_f = np.diagonal(f)
    dpp = np.diagonal(dp)

    # k = r
    row_terms -= (f[r, r] - f[j, r]) * (dp[j, r] - dp[r, r])
    col_terms -= (f[r, r] - f[r, j]) * (dp[r, j] - dp[r, r])
    # k = j
    row_terms -= (f[r, j] - diag_f) * (dpp - dp[r, j])
    col_terms -= (f[j, r] - diag_f) * (dpp - dp[j, r])

    const = (f[r, r] - diag_f) * (dpp - d[pr, pr])
    const += (f[r, j] - f[j, r]) * (d[pj, pr] - d[pr, pj])

    row = row_terms + col_terms + const
    row[r] = 0
    return row.astype(np.int64)


@dataclass
class DeltaTable:
    """
    delta[i][j] is the cost change of swapping facilities i and j.

    Only valid for the permutation it was built or last updated against;
    updating with a permutation the table has not tracked is a contract
    violation that cannot be detected.
    """

    delta: np.ndarray

    def __getitem__(self, key):
        return self.delta[key]

    def copy(self) -> "DeltaTable":
        return DeltaTable(self.delta.copy())


def build_delta_table(instance: Instance, perm: Sequence[int]) -> DeltaTable:
    """Full N×N delta table for perm"""
    p = as_perm(instance, perm)
    table = np.zeros((instance.n, instance.n), dtype=np.int64)
    for r in range(instance.n):
        table[r] = delta_row(instance, p, r)
    return DeltaTable(table)


def update_delta_table(table: DeltaTable, instance: Instance, perm: Sequence[int], r: int, s: int) -> DeltaTable:
    """
    Bring the table up to date after swap (r, s) has been applied to perm.

    perm must already hold the post-swap permutation. Pairs disjoint from
    {r, s} get a constant-time correction each; rows and columns r and s are
    recomputed. The result equals build_delta_table on the new permutation.
    """
    p = as_perm(instance, perm)
    _check_index(instance, r, s)
    if r == s:
        return table
    update_table_kernel(instance.flow, instance.dist, p, table.delta, r, s)
    return table


def apply_swap(
    instance: Instance,
    perm: np.ndarray,
    current_cost: int,
    i: int,
    j: int,
    delta: Optional[int] = None,
    table: Optional[DeltaTable] = None,
) -> int:
    """
    Exchange p(i) and p(j) in place and return the maintained cost.

    With a table, the delta is read from it and the table is refreshed for
    the new permutation (the tabu search path). Otherwise delta is used as
    given, or computed with swap_delta first.
    """
    _check_index(instance, i, j)
    if i == j:
        return current_cost
    if table is not None:
        return int(swap_with_table_kernel(instance.flow, instance.dist, perm, table.delta, current_cost, i, j))
    if delta is None:
        delta = swap_delta(instance, perm, i, j)
    perm[i], perm[j] = perm[j], perm[i]
    return current_cost + int(delta)
