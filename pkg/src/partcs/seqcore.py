"""Sequence primitives: autocorrelation, OFDM envelope and PMEPR.

Sequences are plain 1-D complex numpy arrays. Zero elements are stored
explicitly, so the support of a sequence is simply its nonzero positions.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

DEFAULT_OVERSAMPLE = 8
DEFAULT_TOL = 1e-9


def as_seq(seq) -> np.ndarray:
    """Coerce ``seq`` to a non-empty 1-D complex128 array."""
    arr = np.asarray(seq, dtype=np.complex128)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a sequence must be a non-empty 1-D array")
    return arr


def aacf(seq) -> np.ndarray:
    """Aperiodic autocorrelation of ``seq`` at lags ``-L+1 .. L-1``.

    Entry ``k + L - 1`` holds ``sum_i conj(a_i) a_{i+k}``.
    """
    a = as_seq(seq)
    # np.correlate(a, a, 'full')[L-1+k] = sum_n a_{n+k} conj(a_n)
    return np.correlate(a, a, mode="full")


def energy(seq) -> float:
    a = as_seq(seq)
    return float(np.sum(np.abs(a) ** 2))


def is_complementary_pair(a, b, tol: float = DEFAULT_TOL) -> bool:
    """True when the summed autocorrelations vanish at every nonzero lag."""
    a = as_seq(a)
    b = as_seq(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    total = aacf(a) + aacf(b)
    total[a.size - 1] = 0.0
    return bool(np.max(np.abs(total)) <= tol)


def envelope_samples(seq, oversample: int = DEFAULT_OVERSAMPLE) -> np.ndarray:
    """Instantaneous envelope power ``|A(e^{j2 pi t/Ts})|^2`` on a uniform grid.

    The grid has ``oversample * L`` points over one symbol, i.e. the
    zero-padded inverse DFT of the sequence.
    """
    if oversample < 1:
        raise ValueError("oversample must be >= 1")
    a = as_seq(seq)
    n = oversample * a.size
    x = np.fft.ifft(a, n) * n
    return np.abs(x) ** 2


def pmepr_db(seq, oversample: int = DEFAULT_OVERSAMPLE, p_ref: float | None = None) -> float:
    """Peak envelope power over ``p_ref`` in dB.

    ``p_ref`` defaults to the sequence energy. For partitioned CSs the code
    constant is ``2**m`` (every codeword carries ``2**m`` unit elements), which
    coincides with the energy.
    """
    if p_ref is None:
        p_ref = energy(seq)
    if p_ref <= 0:
        raise ValueError("p_ref must be positive")
    peak = float(np.max(envelope_samples(seq, oversample)))
    return 10.0 * np.log10(peak / p_ref)


def seq_to_json(seq) -> dict[str, Any]:
    a = as_seq(seq)
    return {"length": int(a.size), "elements": [[float(z.real), float(z.imag)] for z in a]}


def seq_from_json(obj: dict[str, Any] | str) -> np.ndarray:
    if isinstance(obj, str):
        obj = json.loads(obj)
    elements = obj["elements"]
    if len(elements) != obj["length"]:
        raise ValueError("'length' does not match the number of elements")
    return as_seq([complex(re, im) for re, im in elements])
