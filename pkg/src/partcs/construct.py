"""Synthesis of partitioned complementary sequences.

A codeword is described by a path ``pi`` over the ``m`` Boolean variables,
linear phase coefficients ``c``, a phase offset ``k``, a prepad ``d`` and
per-variable Golay shifts ``s``. Element ``i`` (``x_1`` is the MSB of ``i``)
carries phase ``f_i(i)`` and lands at position ``i + f_s(i)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Any, Sequence

import numpy as np


def index_bits(i: int, m: int) -> tuple[int, ...]:
    """Bits ``(x_1, ..., x_m)`` of ``i`` with ``x_1`` the most significant."""
    return tuple((i >> (m - j)) & 1 for j in range(1, m + 1))


def bit_table(m: int) -> np.ndarray:
    """``(2**m, m)`` array; row ``i`` holds ``index_bits(i, m)``."""
    i = np.arange(2**m)[:, None]
    return (i >> (m - 1 - np.arange(m))[None, :]) & 1


@dataclass(frozen=True)
class CsParams:
    m: int
    H: int
    pi: tuple[int, ...]
    c: tuple[int, ...]
    k: int = 0
    d: int = 0
    s: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "pi", tuple(int(p) for p in self.pi))
        object.__setattr__(self, "c", tuple(int(v) % self.H for v in self.c))
        object.__setattr__(self, "k", int(self.k) % self.H)
        s = tuple(int(v) for v in self.s) if self.s else (0,) * self.m
        object.__setattr__(self, "s", s)
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if self.H < 2 or self.H % 2:
            raise ValueError("H must be an even integer >= 2")
        if sorted(self.pi) != list(range(1, self.m + 1)):
            raise ValueError(f"pi={self.pi} is not a permutation of 1..{self.m}")
        if len(self.c) != self.m or len(self.s) != self.m:
            raise ValueError("c and s must have m entries")
        if self.d < 0 or min(self.s) < 0:
            raise ValueError("shifts and prepad must be non-negative")

    @property
    def length(self) -> int:
        return 2**self.m + self.d + sum(self.s)

    def is_non_overlapping(self) -> bool:
        """Non-squashing condition ``s_l >= s_{l+1} + ... + s_m``."""
        return all(self.s[j] >= sum(self.s[j + 1 :]) for j in range(self.m - 1))

    def to_json(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "H": self.H,
            "pi": list(self.pi),
            "c": list(self.c),
            "k": self.k,
            "d": self.d,
            "s": list(self.s),
        }

    @classmethod
    def from_json(cls, obj: dict[str, Any] | str) -> "CsParams":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            m=obj["m"],
            H=obj["H"],
            pi=tuple(obj["pi"]),
            c=tuple(obj["c"]),
            k=obj.get("k", 0),
            d=obj.get("d", 0),
            s=tuple(obj.get("s", ())),
        )


@dataclass(frozen=True)
class SeparationVector:
    """Offset ``s0`` (zeros before the first cluster) and cluster gaps ``sep``."""

    s0: int
    sep: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "sep", tuple(int(v) for v in self.sep))
        if self.s0 < 0 or any(v < 0 for v in self.sep):
            raise ValueError("separations must be non-negative")

    @property
    def m(self) -> int:
        return len(self.sep)

    def used(self) -> int:
        """Zero subcarriers consumed: ``s0 + sum_n sep_n 2^(n-1)``."""
        return self.s0 + sum(v << n for n, v in enumerate(self.sep))

    def is_feasible(self, Z: int) -> bool:
        return self.used() <= Z

    def as_tuple(self) -> tuple[int, ...]:
        return (self.s0, *self.sep)


def _check_index(params: CsParams, i: int) -> None:
    if not 0 <= i < 2**params.m:
        raise ValueError(f"index {i} outside [0, {2**params.m})")


def f_i_eval(params: CsParams, i: int) -> int:
    """Phase index of element ``i`` (an integer mod H)."""
    _check_index(params, i)
    x = index_bits(i, params.m)
    xp = [x[p - 1] for p in params.pi]
    quad = sum(xp[n] * xp[n + 1] for n in range(params.m - 1))
    lin = sum(cn * xn for cn, xn in zip(params.c, xp))
    return ((params.H // 2) * quad + lin + params.k) % params.H


def f_s_eval(params: CsParams, i: int) -> int:
    """Shift of element ``i``; the element is placed at ``i + f_s(i)``."""
    _check_index(params, i)
    x = index_bits(i, params.m)
    return sum(sn * xn for sn, xn in zip(params.s, x)) + params.d


def phase_table(params: CsParams) -> np.ndarray:
    """``f_i`` at every index, vectorised."""
    x = bit_table(params.m)
    xp = x[:, [p - 1 for p in params.pi]]
    quad = np.sum(xp[:, :-1] * xp[:, 1:], axis=1)
    lin = xp @ np.asarray(params.c, dtype=np.int64)
    return ((params.H // 2) * quad + lin + params.k) % params.H


def placement(params: CsParams) -> np.ndarray:
    """Position ``i + f_s(i)`` of every element."""
    x = bit_table(params.m)
    return np.arange(2**params.m) + x @ np.asarray(params.s, dtype=np.int64) + params.d


def support(params: CsParams) -> list[int]:
    return sorted(int(p) for p in placement(params))


@lru_cache(maxsize=None)
def psk_alphabet(H: int) -> np.ndarray:
    """``exp(2j pi k / H)`` with the axis points 1, j, -1, -j exact."""
    k = np.arange(H)
    table = np.cos(2 * np.pi * k / H) + 1j * np.sin(2 * np.pi * k / H)
    quarter = (4 * k) % H == 0
    table[quarter] = (1j ** ((4 * k[quarter]) // H))
    table.setflags(write=False)
    return table


def synthesize(params: CsParams) -> np.ndarray:
    """Build the partitioned CS; raises if two elements would collide."""
    if not params.is_non_overlapping():
        raise ValueError(f"shifts {params.s} violate the non-squashing condition")
    pos = placement(params)
    if np.unique(pos).size != pos.size:
        raise ValueError("element placements collide")
    seq = np.zeros(params.length, dtype=np.complex128)
    seq[pos] = psk_alphabet(params.H)[phase_table(params)]
    return seq


def mate(params: CsParams) -> CsParams:
    """Golay mate: advance the coefficient of ``x_{pi_1}`` by a half turn."""
    c = list(params.c)
    c[0] = (c[0] + params.H // 2) % params.H
    return replace(params, c=tuple(c))


def shifts_from_separations(sep: SeparationVector) -> tuple[tuple[int, ...], int]:
    """Golay shifts ``(s_1..s_m)`` and prepad ``d`` for a separation vector."""
    s = [0] * sep.m
    tail = 0
    for n in reversed(range(sep.m)):
        s[n] = sep.sep[n] + tail
        tail += s[n]
    return tuple(s), sep.s0


def separations_from_shifts(s: Sequence[int], d: int = 0) -> SeparationVector:
    s = list(s)
    sep = [s[n] - sum(s[n + 1 :]) for n in range(len(s))]
    if any(v < 0 for v in sep):
        raise ValueError(f"shifts {tuple(s)} violate the non-squashing condition")
    return SeparationVector(d, tuple(sep))


def params_with_separation(params: CsParams, sep: SeparationVector) -> CsParams:
    s, d = shifts_from_separations(sep)
    return replace(params, s=s, d=d)
