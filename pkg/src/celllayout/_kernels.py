"""Compiled inner loops. All take the composite weight matrix ``c`` and the
distance matrix ``d`` as float64 arrays and a permutation as an int64 array."""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def qap_cost(c, d, perm):
    n = perm.shape[0]
    total = 0.0
    for i in range(n):
        pi = perm[i]
        for k in range(n):
            total += c[i, k] * d[pi, perm[k]]
    return total


@njit(cache=True)
def swap_delta(c, d, perm, a, b):
    # Cost change of exchanging the locations of cells a and b; valid for
    # asymmetric c and d.
    pa = perm[a]
    pb = perm[b]
    delta = (c[a, a] - c[b, b]) * (d[pb, pb] - d[pa, pa]) + (c[a, b] - c[b, a]) * (d[pb, pa] - d[pa, pb])
    for k in range(perm.shape[0]):
        if k == a or k == b:
            continue
        pk = perm[k]
        delta += (c[k, a] - c[k, b]) * (d[pk, pb] - d[pk, pa]) + (c[a, k] - c[b, k]) * (d[pb, pk] - d[pa, pk])
    return delta


@njit(cache=True)
def anneal_stage(c, d, perm, current, best_perm, best_total, temperature, first, second, draws):
    """One temperature stage of Metropolis swaps, mutating ``perm``/``best_perm`` in place.

    Returns ``(current, best_total, improved)``.
    """
    improved = False
    for m in range(first.shape[0]):
        a = first[m]
        b = second[m]
        delta = swap_delta(c, d, perm, a, b)
        if delta <= 0.0 or draws[m] < math.exp(-delta / temperature):
            tmp = perm[a]
            perm[a] = perm[b]
            perm[b] = tmp
            current += delta
            if current < best_total:
                best_total = current
                best_perm[:] = perm
                improved = True
    return current, best_total, improved


@njit(cache=True)
def enumerate_all(c, d, tie_tol):
    """Exhaustive lexicographic scan of all permutations.

    Keeps the first permutation reached whose cost beats the incumbent by
    more than ``tie_tol``, i.e. the lexicographically smallest among ties.
    """
    n = c.shape[0]
    perm = np.arange(n)
    best = perm.copy()
    best_total = qap_cost(c, d, perm)
    count = 1
    while True:
        # next permutation in lexicographic order
        i = n - 2
        while i >= 0 and perm[i] >= perm[i + 1]:
            i -= 1
        if i < 0:
            break
        j = n - 1
        while perm[j] <= perm[i]:
            j -= 1
        tmp = perm[i]
        perm[i] = perm[j]
        perm[j] = tmp
        lo = i + 1
        hi = n - 1
        while lo < hi:
            tmp = perm[lo]
            perm[lo] = perm[hi]
            perm[hi] = tmp
            lo += 1
            hi -= 1
        count += 1
        total = qap_cost(c, d, perm)
        if total < best_total - tie_tol:
            best_total = total
            best[:] = perm
    return best, best_total, count
