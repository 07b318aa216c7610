"""Brute-force reference implementations used only by the tests.

Nothing here calls into the code paths it checks: counts enumerate
integer vectors directly, correlations use double loops, envelopes use a
direct polynomial evaluation and the ML decoder searches the whole codebook.
"""

from __future__ import annotations

import functools
import itertools
import math

import numpy as np


def aacf_loop(a):
    L = len(a)
    out = {}
    for k in range(-L + 1, L):
        if k >= 0:
            out[k] = sum(np.conj(a[i]) * a[i + k] for i in range(L - k))
        else:
            out[k] = sum(a[i] * np.conj(a[i - k]) for i in range(L + k))
    return out


def envelope_direct(a, ts):
    """``|sum_i a_i exp(j 2 pi i t)|^2`` for normalised times ``ts``."""
    i = np.arange(len(a))
    return np.array([abs(np.sum(np.asarray(a) * np.exp(2j * np.pi * i * t))) ** 2 for t in ts])


def anf_eval(coeffs: dict[tuple[int, ...], int], x: tuple[int, ...], H: int) -> int:
    """Evaluate ``sum_k a_k prod_j x_j^{k_j}`` over Z_H; keys are monomial exponent vectors."""
    total = 0
    for exps, a in coeffs.items():
        total += a * math.prod(xj for xj, e in zip(x, exps) if e)
    return total % H


def gdj_anf(m, H, pi, c, k):
    """Monomial coefficients of the quadratic form along ``pi`` plus linear terms."""
    coeffs: dict[tuple[int, ...], int] = {(0,) * m: k}
    for n in range(m - 1):
        e = [0] * m
        e[pi[n] - 1] = e[pi[n + 1] - 1] = 1
        coeffs[tuple(e)] = coeffs.get(tuple(e), 0) + H // 2
    for n in range(m):
        e = [0] * m
        e[pi[n] - 1] = 1
        coeffs[tuple(e)] = coeffs.get(tuple(e), 0) + c[n]
    return coeffs


def bits_msb(i, m):
    return tuple((i >> (m - 1 - j)) & 1 for j in range(m))


@functools.lru_cache(maxsize=None)
def brute_A(m, Y):
    return len(brute_gaps(m, Y))


@functools.lru_cache(maxsize=None)
def brute_gaps(m, Y):
    """All gap vectors, lexicographic (a cached list; do not mutate)."""
    ranges = [range(Y // 2**n + 1) for n in range(m)]
    return [g for g in itertools.product(*ranges) if sum(v * 2**n for n, v in enumerate(g)) <= Y]


@functools.lru_cache(maxsize=None)
def brute_P(m, Z):
    return sum(brute_A(m, Z - s0) for s0 in range(Z + 1))


def brute_support(s0, gaps):
    """Support built cluster by cluster: halve the block, insert gap g_n between halves."""
    m = len(gaps)

    def layout(level):
        if level == m:
            return [0]
        inner = layout(level + 1)
        width = max(inner) + 1
        return inner + [width + gaps[level] + p for p in inner]

    return sorted(s0 + p for p in layout(0))


def brute_symmetric_count(m, l, Z):
    """Count separation vectors whose support has symmetric halves to depth ``l``,
    by generating every admissible support and testing the symmetry directly."""
    count = 0
    for s0 in range(Z + 1):
        for g in brute_gaps(m, Z - s0):
            if _symmetric_ok(s0, g, m, l, Z):
                count += 1
    return count


def brute_separations(m, l, Z):
    """All admissible ``(s0, gaps)`` pairs at level ``l``, lexicographic."""
    return [(s0, g) for s0 in range(Z + 1) for g in brute_gaps(m, Z - s0) if _symmetric_ok(s0, g, m, l, Z)]


def _symmetric_ok(s0, g, m, l, Z):
    if l == 0:
        return True
    # gap between the halves is twice the inner offset, and the outer offset
    # is what is left of floor(Z/2) after the inner layout
    if g[0] % 2:
        return False
    inner_s0, inner_g = g[0] // 2, g[1:]
    used = inner_s0 + sum(v * 2**n for n, v in enumerate(inner_g))
    if used > Z // 2 or s0 != Z // 2 - used:
        return False
    return _symmetric_ok(inner_s0, inner_g, m - 1, l - 1, Z // 2)


def all_paths(m):
    return [p for p in itertools.permutations(range(1, m + 1)) if p[0] > p[-1]]


def codebook(m, H, M, supports):
    """Every codeword for the given list of supports (each a list of 2**m positions).

    Returns ``(matrix, labels)`` where labels are ``(support_idx, pi, c, k)``.
    """
    xs = [bits_msb(i, m) for i in range(2**m)]
    words, labels = [], []
    xi = np.exp(2j * np.pi / H)
    for si, supp in enumerate(supports):
        for pi in all_paths(m):
            for c in itertools.product(range(H), repeat=m):
                for k in range(H):
                    coeffs = gdj_anf(m, H, pi, c, k)
                    t = np.zeros(M, dtype=complex)
                    for i, x in enumerate(xs):
                        t[supp[i]] = xi ** anf_eval(coeffs, x, H)
                    words.append(t)
                    labels.append((si, pi, c, k))
    return np.array(words), labels


def ml_decode(words, y, h):
    """Minimum-distance codeword index for ``y = h * t + noise``."""
    dist = np.sum(np.abs(h[None, :] * words - y[None, :]) ** 2, axis=1)
    return int(np.argmin(dist)), dist
