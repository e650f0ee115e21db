"""Linear assignment of patch scores to a permutation matrix.

The generator emits a row-stochastic score matrix m whose entry (i, j) rates
placing patch i at position j.  Placements must be mutually exclusive, so the
usable output is the permutation matrix maximizing ``sum(m * m_hat)``.
Maximization is run as classical minimization on the negated matrix; exact
ties are resolved toward the lexicographically smallest row-to-column
mapping so results are total and reproducible.
"""

import itertools
from functools import lru_cache
from math import isqrt

import numpy as np

from .errors import DomainError
from .shuffle import GridPermutation

SCORE_FLOOR = 1e-8
_ROW_SUM_TOL = 1e-6
_TIE_TOL = 1e-12

_BRUTE_FORCE_LIMIT = 9


def as_score_matrix(raw, floor=SCORE_FLOOR):
    """Validate and clamp a raw score matrix to the row-stochastic contract.

    Entries below `floor` are raised to it so downstream logarithms stay
    finite; each row must sum to 1 within 1e-6 before clamping.
    """
    m = np.array(raw, dtype=np.float64)
    _check_scores(m)
    sums = m.sum(axis=1)
    if not np.allclose(sums, 1.0, rtol=0.0, atol=_ROW_SUM_TOL):
        raise DomainError(f"rows must sum to 1 within {_ROW_SUM_TOL}, got {sums}")
    return np.maximum(m, floor)


def _check_scores(m):
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DomainError(f"score matrix must be square and nonempty, got {m.shape}")
    if not np.isfinite(m).all():
        raise DomainError("score matrix contains NaN or infinite entries")
    if (m < 0).any():
        raise DomainError("score matrix contains negative entries")


def _min_cost_solve(cost):
    """Shortest-augmenting-path assignment on a square cost matrix.

    Returns (col_of_row, u, v) where the duals satisfy
    ``u[i] + v[j] <= cost[i, j]`` up to floating-point noise.  Scan order is
    lowest-index-first, which makes the result deterministic.
    """
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    match = np.zeros(n + 1, dtype=np.int64)  # match[j]: row at column j, 1-based
    for i in range(1, n + 1):
        match[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        way = np.zeros(n + 1, dtype=np.int64)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = match[j0]
            cur = cost[i0 - 1, :] - u[i0] - v[1:]
            free = ~used[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[match[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    col_of_row = np.empty(n, dtype=np.int64)
    col_of_row[match[1:] - 1] = np.arange(n, dtype=np.int64)
    return col_of_row, u[1:], v[1:]


def _refine_lexicographic(cost, sigma, u, v, tol):
    """Rewrite `sigma` into the lexicographically smallest optimal mapping.

    Candidate columns are pruned through the dual bound: any complete
    matching using edge (i, c) costs at least ``sum(duals) + reduced(i, c)``,
    so strictly positive reduced cost rules a column out without a solve.
    With generic (tie-free) scores every candidate is pruned and no extra
    solves happen.
    """
    n = len(sigma)
    rows = np.arange(n)
    total = float(cost[rows, sigma].sum())
    slack_budget = total - (u.sum() + v.sum()) + tol
    taken = np.zeros(n, dtype=bool)
    prefix = 0.0
    for i in range(n):
        for c in range(int(sigma[i])):
            if taken[c]:
                continue
            if cost[i, c] - u[i] - v[c] > slack_budget:
                continue
            sub_rows = rows[i + 1 :]
            sub_cols = np.flatnonzero(~taken)
            sub_cols = sub_cols[sub_cols != c]
            forced = prefix + float(cost[i, c])
            if sub_rows.size:
                sub_sigma, _, _ = _min_cost_solve(cost[np.ix_(sub_rows, sub_cols)])
                forced += float(cost[sub_rows, sub_cols[sub_sigma]].sum())
            if forced <= total + tol:
                sigma = sigma.copy()
                sigma[i] = c
                if sub_rows.size:
                    sigma[sub_rows] = sub_cols[sub_sigma]
                break
        taken[sigma[i]] = True
        prefix += float(cost[i, sigma[i]])
    return sigma


def _mapping_to_matrix(mapping):
    n = len(mapping)
    m_hat = np.zeros((n, n), dtype=np.uint8)
    m_hat[np.arange(n), mapping] = 1
    return m_hat


def hungarian_assign(m):
    """Permutation matrix maximizing ``sum(m * m_hat)``.

    Parameters
    ----------
    m : ndarray
        Square nonnegative score matrix.

    Returns
    -------
    ndarray
        NxN 0/1 permutation matrix; among equally scoring assignments the
        one with the lexicographically smallest row-to-column mapping.
    """
    m = np.array(m, dtype=np.float64)
    _check_scores(m)
    cost = -m
    sigma, u, v = _min_cost_solve(cost)
    tol = _TIE_TOL * max(1.0, float(np.abs(m).max()) * m.shape[0])
    sigma = _refine_lexicographic(cost, sigma, u, v, tol)
    return _mapping_to_matrix(sigma)


@lru_cache(maxsize=None)
def _all_permutations(n):
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8)


def brute_force_assign(m):
    """Exhaustive oracle for :func:`hungarian_assign`, limited to N <= 9.

    Enumerates all N! permutations and applies the same objective and
    lexicographic tie-break.
    """
    m = np.array(m, dtype=np.float64)
    _check_scores(m)
    n = m.shape[0]
    if n > _BRUTE_FORCE_LIMIT:
        raise DomainError(f"brute force refused for N={n} > {_BRUTE_FORCE_LIMIT}")
    perms = _all_permutations(n)
    scores = m[np.arange(n)[None, :], perms].sum(axis=1)
    best = scores.max()
    tol = _TIE_TOL * max(1.0, float(np.abs(m).max()) * n)
    # permutations enumerate in lexicographic order: first hit wins ties
    winner = perms[int(np.argmax(scores >= best - tol))].astype(np.int64)
    return _mapping_to_matrix(winner)


def assignment_score(m, m_hat):
    """Objective value ``sum(m * m_hat)`` of an assignment."""
    m = np.asarray(m, dtype=np.float64)
    if m.shape != m_hat.shape:
        raise DomainError(f"shape mismatch: {m.shape} vs {m_hat.shape}")
    return float((m * m_hat).sum())


def permutation_from_matrix(m_hat):
    """Extract the patch permutation encoded by a permutation matrix.

    mapping[i] is the column holding the 1 in row i.  The granularity is
    inferred when N is a perfect square, otherwise left unset.
    """
    m_hat = np.asarray(m_hat)
    if m_hat.ndim != 2 or m_hat.shape[0] != m_hat.shape[1] or m_hat.shape[0] == 0:
        raise DomainError(f"assignment matrix must be square, got {m_hat.shape}")
    values = np.unique(m_hat)
    if not np.isin(values, (0, 1)).all():
        raise DomainError("assignment matrix entries must be 0 or 1")
    if (m_hat.sum(axis=0) != 1).any() or (m_hat.sum(axis=1) != 1).any():
        raise DomainError("assignment matrix must have exactly one 1 per row and column")
    n = m_hat.shape[0]
    mapping = np.argmax(m_hat, axis=1).astype(np.int64)
    g = isqrt(n)
    return GridPermutation(g if g * g == n else None, mapping)


def matrix_from_permutation(perm):
    """Inverse of :func:`permutation_from_matrix`."""
    return _mapping_to_matrix(perm.mapping)
