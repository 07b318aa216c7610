"""Counting and ranking of admissible separation vectors.

``A_m(Y)`` counts gap vectors ``(g_1..g_m)`` with ``sum g_n 2^(n-1) <= Y``;
``P_m(Z)`` adds a free offset ``s0`` so the total is at most ``Z``;
``D_{m,l}(Z)`` restricts to supports that are symmetric at ``l`` levels.
All counts are exact Python integers.

Ranks are 1-based. The canonical order is lexicographic in
``(s0, g_1, ..., g_m)``; for ``l > 0`` it is inherited from the half-length
problem.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .construct import SeparationVector


class CardinalityTable:
    """Memo of ``A_m(Y)`` rows, grown on demand.

    Row ``m`` is a list with ``A_m(0..Y_max)``; ``A_0(Y) = 1`` is the seed so
    that ``A_m(Y) = A_m(Y-1) + A_{m-1}(floor(Y/2))``.
    """

    def __init__(self):
        self._rows: list[list[int]] = [[1]]
        self._lock = threading.Lock()

    def _extend(self, k: int, Y: int) -> None:
        if k == 0:
            self._rows[0].extend([1] * (Y + 1 - len(self._rows[0])))
            return
        row, prev = self._rows[k], self._rows[k - 1]
        if len(prev) - 1 < Y // 2:
            self._extend(k - 1, Y // 2)
        while len(row) - 1 < Y:
            y = len(row)
            row.append(row[-1] + prev[y // 2])

    def A(self, m: int, Y: int) -> int:
        if m < 0 or Y < 0:
            raise ValueError(f"invalid arguments m={m}, Y={Y}")
        rows = self._rows
        if m >= len(rows) or Y >= len(rows[m]):
            with self._lock:
                while len(rows) <= m:
                    rows.append([1])
                self._extend(m, Y)
        return rows[m][Y]


_TABLE = CardinalityTable()


def _check_m(m: int) -> None:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")


def card_A(m: int, Y: int) -> int:
    """Number of gap vectors ``g`` with ``sum_n g_n 2^(n-1) <= Y``."""
    _check_m(m)
    if Y < 0:
        raise ValueError(f"Y must be >= 0, got {Y}")
    return _TABLE.A(m, Y)


def card_P_sum(m: int, Z: int) -> int:
    """``P_m(Z)`` as the direct sum over the offset."""
    _check_m(m)
    if Z < 0:
        raise ValueError(f"Z must be >= 0, got {Z}")
    return sum(_TABLE.A(m, i) for i in range(Z + 1))


def card_P(m: int, Z: int) -> int:
    """Number of separation vectors ``(s0, g)`` using at most ``Z`` zeros."""
    _check_m(m)
    if Z < 0:
        raise ValueError(f"Z must be >= 0, got {Z}")
    twice = _TABLE.A(m + 1, 2 * Z + 1)
    if twice % 2:
        raise ArithmeticError("A_{m+1}(2Z+1) is odd")
    return twice // 2


def card_D(m: int, l: int, Z: int) -> int:
    """Separation vectors whose supports are symmetric at ``l`` levels."""
    _check_m(m)
    if not 0 <= l <= m - 1:
        raise ValueError(f"l must lie in [0, {m - 1}], got {l}")
    if Z < 0:
        raise ValueError(f"Z must be >= 0, got {Z}")
    while l > 0:
        m, l, Z = m - 1, l - 1, Z // 2
    return card_P(m, Z)


def card_C(m: int, H: int) -> int | Fraction:
    """Number of H-PSK Golay sequences of length ``2**m`` (``H**(m+1) m!/2``).

    The value is integral whenever ``H`` is even; a ``Fraction`` is returned
    for odd ``H`` with ``m == 1``.
    """
    if m < 0 or H < 1:
        raise ValueError(f"invalid arguments m={m}, H={H}")
    if m == 0:
        return H
    value = Fraction(H ** (m + 1) * math.factorial(m), 2)
    return int(value) if value.denominator == 1 else value


def d_nonzero(M: int, H: int) -> float:
    """Minimum distance between codewords sharing a support, at unit mean power."""
    if H < 2 or H & (H - 1):
        raise ValueError(f"H must be a power of two >= 2, got {H}")
    if H == 2:
        return math.sqrt(M)
    return math.sqrt(2 * M) * math.sin(math.pi / H)


@dataclass(frozen=True)
class CodeCard:
    M: int
    m: int
    H: int
    l: int
    Z: int
    n_total: float
    n_supp: float
    n_nonzero: float
    rho: float
    d_lb: float
    n_codewords: int

    @property
    def rho_bits(self) -> int:
        """Integer number of bits per block, ``floor(n_total)``."""
        return self.n_codewords.bit_length() - 1

    def row(self) -> dict:
        return {
            "M": self.M,
            "m": self.m,
            "H": self.H,
            "l": self.l,
            "Z": self.Z,
            "n_total": self.n_total,
            "n_supp": self.n_supp,
            "n_nonzero": self.n_nonzero,
            "rho": self.rho,
            "d_lb": self.d_lb,
        }


def _log2(n: int) -> float:
    # exact enough for huge integers, where float(n) would overflow
    shift = max(n.bit_length() - 64, 0)
    return math.log2(n >> shift) + shift


def code_card(M: int, m: int, H: int = 4, l: int = 0) -> CodeCard:
    """Bit budget, spectral efficiency and distance bound of one code."""
    _check_m(m)
    if M < 2**m:
        raise ValueError(f"M={M} is smaller than 2**m={2**m}")
    Z = M - 2**m
    n_supp = card_D(m, l, Z)
    n_nz = card_C(m, H)
    total = n_supp * n_nz
    if isinstance(total, Fraction):
        raise ValueError("the code size is not integral for these parameters")
    return CodeCard(
        M=M,
        m=m,
        H=H,
        l=l,
        Z=Z,
        n_total=_log2(total),
        n_supp=_log2(n_supp),
        n_nonzero=_log2(int(n_nz)),
        rho=(total.bit_length() - 1) / M,
        d_lb=math.sqrt(M / 2 ** (m - l - 1)),
        n_codewords=total,
    )


# --- unranking ---------------------------------------------------------------


def _check_rank(n: int, count: int) -> None:
    if not 1 <= n <= count:
        raise ValueError(f"rank {n} outside [1, {count}]")


def unrank_sep_core(n: int, Y: int, m: int) -> tuple[int, ...]:
    """The ``n``-th gap vector with ``sum g_j 2^(j-1) <= Y``."""
    _check_m(m)
    _check_rank(n, card_A(m, Y))
    gaps = []
    while m > 1:
        # g_1 = c owns the block of A_{m-1}(floor((Y-c)/2)) vectors
        c = 0
        while True:
            block = _TABLE.A(m - 1, (Y - c) // 2)
            if n <= block:
                break
            n -= block
            c += 1
        gaps.append(c)
        Y = (Y - c) // 2
        m -= 1
    gaps.append(n - 1)
    return tuple(gaps)


def unrank_sep(n: int, Z: int, m: int) -> SeparationVector:
    """The ``n``-th separation vector using at most ``Z`` zeros."""
    _check_rank(n, card_P(m, Z))
    c = 0
    while True:
        block = _TABLE.A(m, Z - c)
        if n <= block:
            break
        n -= block
        c += 1
    return SeparationVector(c, unrank_sep_core(n, Z - c, m))


def unrank_sep_dist(n: int, Z: int, m: int, l: int) -> SeparationVector:
    """The ``n``-th separation vector that is symmetric at ``l`` levels."""
    _check_rank(n, card_D(m, l, Z))
    if l == 0:
        return unrank_sep(n, Z, m)
    half = unrank_sep_dist(n, Z // 2, m - 1, l - 1)
    # the half's (offset, gaps) become the outer gaps; the gap between halves
    # is twice the half's offset
    gaps = (2 * half.s0, *half.sep)
    s0 = Z // 2 - half.used()
    return SeparationVector(s0, gaps)


# --- ranking -----------------------------------------------------------------


def rank_sep_core(gaps: Sequence[int], Y: int, m: int) -> int:
    _check_m(m)
    gaps = tuple(int(g) for g in gaps)
    if len(gaps) != m or any(g < 0 for g in gaps):
        raise ValueError(f"gap vector {gaps} is not a length-{m} non-negative vector")
    if sum(g << j for j, g in enumerate(gaps)) > Y:
        raise ValueError(f"gap vector {gaps} exceeds Y={Y}")
    n = 1
    for j, g in enumerate(gaps[:-1]):
        mm = m - j
        n += sum(_TABLE.A(mm - 1, (Y - i) // 2) for i in range(g))
        Y = (Y - g) // 2
    return n + gaps[-1]


def rank_sep(sep: SeparationVector, Z: int, m: int) -> int:
    if sep.m != m:
        raise ValueError(f"separation vector has {sep.m} gaps, expected {m}")
    if not sep.is_feasible(Z):
        raise ValueError(f"separation vector {sep.as_tuple()} needs more than Z={Z} zeros")
    offset = sum(_TABLE.A(m, Z - i) for i in range(sep.s0))
    return offset + rank_sep_core(sep.sep, Z - sep.s0, m)


def rank_sep_dist(sep: SeparationVector, Z: int, m: int, l: int) -> int:
    if not 0 <= l <= m - 1:
        raise ValueError(f"l must lie in [0, {m - 1}], got {l}")
    if l == 0:
        return rank_sep(sep, Z, m)
    if sep.m != m:
        raise ValueError(f"separation vector has {sep.m} gaps, expected {m}")
    if sep.sep[0] % 2:
        raise ValueError("the gap between halves must be even for l > 0")
    half = SeparationVector(sep.sep[0] // 2, sep.sep[1:])
    if sep.s0 != Z // 2 - half.used():
        raise ValueError(f"separation vector {sep.as_tuple()} is not symmetric at level {l}")
    return rank_sep_dist(half, Z // 2, m - 1, l - 1)


# --- iteration ---------------------------------------------------------------


def _iter_core(Y: int, m: int) -> Iterator[tuple[int, ...]]:
    if m == 1:
        for g in range(Y + 1):
            yield (g,)
        return
    for g in range(Y + 1):
        for rest in _iter_core((Y - g) // 2, m - 1):
            yield (g, *rest)


def iter_separations(Z: int, m: int, l: int = 0) -> Iterator[SeparationVector]:
    """All admissible separation vectors in rank order."""
    if l == 0:
        for s0 in range(Z + 1):
            for gaps in _iter_core(Z - s0, m):
                yield SeparationVector(s0, gaps)
        return
    for half in iter_separations(Z // 2, m - 1, l - 1):
        yield SeparationVector(Z // 2 - half.used(), (2 * half.s0, *half.sep))
