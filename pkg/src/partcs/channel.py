"""Frequency-domain link model ``y_i = h_i t_i + w_i``.

The cyclic prefix is assumed to cover the channel delay spread, so every
subcarrier sees a single complex gain and no time-domain convolution is
simulated.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

KINDS = ("flat", "iid-rayleigh", "tapped-delay")

# 6-tap exponentially decaying power-delay profile (delays in samples)
DEFAULT_DELAYS = (0, 1, 2, 3, 5, 8)
DEFAULT_POWERS_DB = (0.0, -2.0, -4.0, -6.0, -10.0, -16.0)


@dataclass(frozen=True)
class ChannelProfile:
    kind: str = "flat"
    delays: tuple[int, ...] = ()
    powers: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown channel kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "tapped-delay":
            return
        if not self.delays or len(self.delays) != len(self.powers):
            raise ValueError("tapped-delay profiles need matching, non-empty delays and powers")
        if any(d < 0 for d in self.delays) or any(p <= 0 for p in self.powers):
            raise ValueError("tap delays must be >= 0 and tap powers > 0")
        total = sum(self.powers)
        object.__setattr__(self, "delays", tuple(int(d) for d in self.delays))
        object.__setattr__(self, "powers", tuple(p / total for p in self.powers))

    @classmethod
    def tapped_delay(cls, delays, powers_db) -> "ChannelProfile":
        return cls("tapped-delay", tuple(delays), tuple(10 ** (p / 10) for p in powers_db))

    @classmethod
    def default_fading(cls) -> "ChannelProfile":
        return cls.tapped_delay(DEFAULT_DELAYS, DEFAULT_POWERS_DB)

    @classmethod
    def from_dict(cls, obj: dict) -> "ChannelProfile":
        kind = obj.get("kind", "flat")
        if kind == "tapped-delay":
            if "powers_db" in obj:
                return cls.tapped_delay(obj["delays"], obj["powers_db"])
            return cls(kind, tuple(obj["delays"]), tuple(obj["powers"]))
        return cls(kind)

    @classmethod
    def load(cls, path: str | Path) -> "ChannelProfile":
        """Read a JSON or TOML profile file."""
        path = Path(path)
        if path.suffix == ".toml":
            with path.open("rb") as fh:
                return cls.from_dict(tomllib.load(fh))
        return cls.from_dict(json.loads(path.read_text()))


def trial_rng(seed: int, *keys: int) -> np.random.Generator:
    """Independent counter-based stream for one trial of a seeded run."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *keys])))


def complex_normal(rng: np.random.Generator, size, var: float = 1.0) -> np.ndarray:
    scale = math.sqrt(var / 2)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def realize(profile: ChannelProfile, M: int, rng: np.random.Generator) -> np.ndarray:
    """Per-subcarrier gains ``h_0 .. h_{M-1}``."""
    if profile.kind == "flat":
        return np.ones(M, dtype=np.complex128)
    if profile.kind == "iid-rayleigh":
        return complex_normal(rng, M)
    taps = complex_normal(rng, len(profile.delays)) * np.sqrt(profile.powers)
    k = np.arange(M)[:, None]
    delays = np.asarray(profile.delays)[None, :]
    return np.exp(-2j * np.pi * k * delays / M) @ taps


def transmit(frame, gains, n0: float, rng: np.random.Generator) -> np.ndarray:
    """Received subcarriers for noise variance ``n0`` per complex subcarrier."""
    t = np.asarray(frame, dtype=np.complex128)
    h = np.asarray(gains, dtype=np.complex128)
    if t.shape != h.shape:
        raise ValueError("frame and gains must have the same length")
    if n0 == 0:
        return h * t
    return h * t + complex_normal(rng, t.size, n0)


def n0_from_ebn0(ebn0_db: float, cfg) -> float:
    """Noise variance per subcarrier at the given Eb/N0.

    A block carries ``2**cfg.m`` unit-energy elements and ``cfg.n_bits``
    information bits, so ``Eb = 2**m / n_bits``.
    """
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    eb = 2**cfg.m / cfg.n_bits
    return eb / 10 ** (ebn0_db / 10)
