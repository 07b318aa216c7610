"""Monte Carlo and scan drivers behind the CLI."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .channel import ChannelProfile, n0_from_ebn0, realize, trial_rng, transmit
from .codec import CodecConfig, Payload, decode, encode
from .enumeration import code_card
from .seqcore import pmepr_db


@dataclass(frozen=True)
class BlerPoint:
    ebn0_db: float
    trials: int
    block_errors: int

    @property
    def bler(self) -> float:
        return self.block_errors / self.trials if self.trials else math.nan


def run_trial(cfg: CodecConfig, profile: ChannelProfile, ebn0_db: float, seed: int, trial: int) -> bool:
    """One block transmission; True on a block error.

    The payload, channel and noise directions depend only on ``(seed, trial)``,
    so every Eb/N0 point of a sweep sees the same realisations.
    """
    rng = trial_rng(seed, trial)
    payload = Payload.random(cfg, rng)
    _, frame = encode(payload, cfg)
    gains = realize(profile, cfg.M, rng)
    y = transmit(frame, gains, n0_from_ebn0(ebn0_db, cfg), rng)
    return decode(y, gains, cfg) != payload


def _run_batch(args) -> int:
    cfg, profile, ebn0_db, seed, start, stop = args
    return sum(run_trial(cfg, profile, ebn0_db, seed, t) for t in range(start, stop))


def bler_point(
    cfg: CodecConfig,
    profile: ChannelProfile,
    ebn0_db: float,
    trials: int,
    seed: int = 0,
    max_errors: int = 200,
    batch: int = 50,
    pool: ProcessPoolExecutor | None = None,
) -> BlerPoint:
    """Block error rate at one Eb/N0.

    Trials run in fixed batches and the point stops after the first batch
    that brings the error count to ``max_errors``; the result does not
    depend on how batches are scheduled.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bounds = [(a, min(a + batch, trials)) for a in range(0, trials, batch)]
    jobs = [(cfg, profile, ebn0_db, seed, a, b) for a, b in bounds]
    results = pool.map(_run_batch, jobs) if pool else map(_run_batch, jobs)
    done = errors = 0
    for (a, b), err in zip(bounds, results):
        done, errors = b, errors + err
        if errors >= max_errors:
            break
    return BlerPoint(ebn0_db, done, errors)


def bler_curve(
    cfg: CodecConfig,
    profile: ChannelProfile,
    ebn0_list: Sequence[float],
    trials: int,
    seed: int = 0,
    max_errors: int = 200,
    workers: int = 1,
) -> list[BlerPoint]:
    if not ebn0_list:
        raise ValueError("the Eb/N0 list is empty")
    if workers <= 1:
        return [bler_point(cfg, profile, e, trials, seed, max_errors) for e in ebn0_list]
    with ProcessPoolExecutor(workers) as pool:
        return [bler_point(cfg, profile, e, trials, seed, max_errors, pool=pool) for e in ebn0_list]


def pmepr_samples(cfg: CodecConfig, n: int, seed: int = 0, oversample: int = 8) -> np.ndarray:
    """PMEPR (dB) of ``n`` random codewords, referenced to ``2**m``."""
    out = np.empty(n)
    for t in range(n):
        rng = trial_rng(seed, t)
        _, frame = encode(Payload.random(cfg, rng), cfg)
        out[t] = pmepr_db(frame, oversample, p_ref=2**cfg.m)
    return out


def qpsk_pmepr_samples(M: int, n: int, seed: int = 0, oversample: int = 8) -> np.ndarray:
    """Control: uncoded random QPSK on all ``M`` subcarriers."""
    out = np.empty(n)
    for t in range(n):
        rng = trial_rng(seed, t)
        frame = np.exp(0.5j * np.pi * rng.integers(0, 4, M))
        out[t] = pmepr_db(frame, oversample, p_ref=M)
    return out


def ccdf(values: Iterable[float]) -> list[tuple[float, float]]:
    """``(x, P[X > x])`` at every distinct sample value."""
    v = np.sort(np.asarray(list(values), dtype=float))
    xs, first = np.unique(v, return_index=True)
    last = np.append(first[1:], v.size)
    return [(float(x), float((v.size - b) / v.size)) for x, b in zip(xs, last)]


def enumerate_rows(Ms: Iterable[int], ms: Iterable[int], H: int = 4, ls: Iterable[int] | None = None) -> list[dict]:
    """Code cards over an ``(M, m, l)`` grid; infeasible combinations are skipped."""
    rows = []
    ms = list(ms)
    ls = None if ls is None else list(ls)
    for M in Ms:
        for m in ms:
            if M < 2**m:
                continue
            for l in range(m) if ls is None else [l for l in ls if l < m]:
                rows.append(code_card(M, m, H, l).row())
    return rows


def dmin_rows(ms: Iterable[int], Zs: Iterable[int], H: int = 4) -> list[dict]:
    """Spectral efficiency and distance bound for every ``(m, l, Z)``."""
    rows = []
    for m in ms:
        for Z in Zs:
            for l in range(m):
                card = code_card(2**m + Z, m, H, l)
                rows.append({**card.row(), "bits": card.rho_bits})
    return rows
