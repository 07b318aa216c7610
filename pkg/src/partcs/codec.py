"""Bit-level encoder and recursive pruned ML decoder for partitioned CSs.

A block of ``n_bits`` information bits is split into
``bits_nonzero`` (``(m+1)*h`` bits, Gray-mapped to the phase offset and the
``m`` linear coefficients) and ``bits_index`` (an integer selecting the path
``pi`` and the separation vector).

The decoder peels one Boolean variable per level: for a hypothesised current
variable ``x_cur`` it folds the candidate sequence onto the half with
``x_cur = 0``, enumerating the next path entry and the coefficient of
``x_cur``. Survivors are chosen globally by an optimistic score
(sum of best per-element PSK projections minus channel energy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .construct import CsParams, SeparationVector, bit_table, params_with_separation, synthesize
from .enumeration import card_D, iter_separations, unrank_sep_dist

# elements scored per chunk; small chunks keep temporaries in cache
_CHUNK_ELEMENTS = 1 << 16


@dataclass(frozen=True)
class CodecConfig:
    M: int
    m: int
    H: int = 4
    l: int = 0
    n_max: int = 10000
    n_best: int = 400

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("the codec needs m >= 2")
        if self.M < 2**self.m:
            raise ValueError(f"M={self.M} is smaller than 2**m={2**self.m}")
        if self.H < 2 or self.H & (self.H - 1):
            raise ValueError(f"H={self.H} is not a power of two >= 2")
        if not 0 <= self.l <= self.m - 1:
            raise ValueError(f"l must lie in [0, {self.m - 1}], got {self.l}")
        if self.n_max < 1 or self.n_best < 1:
            raise ValueError("decoder budgets must be >= 1")

    @property
    def Z(self) -> int:
        return self.M - 2**self.m

    @property
    def h(self) -> int:
        return self.H.bit_length() - 1

    @property
    def n_paths(self) -> int:
        return math.factorial(self.m) // 2

    @property
    def n_supports(self) -> int:
        return card_D(self.m, self.l, self.Z)

    @property
    def n_nonzero_bits(self) -> int:
        return (self.m + 1) * self.h

    @property
    def n_index_bits(self) -> int:
        return (self.n_supports * self.n_paths).bit_length() - 1

    @property
    def n_bits(self) -> int:
        return self.n_nonzero_bits + self.n_index_bits


def _bits_to_int(bits) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | int(b)
    return out


def _int_to_bits(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - j)) & 1 for j in range(width))


@dataclass(frozen=True)
class Payload:
    bits_nonzero: tuple[int, ...]
    bits_index: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "bits_nonzero", tuple(int(b) for b in self.bits_nonzero))
        object.__setattr__(self, "bits_index", tuple(int(b) for b in self.bits_index))
        if any(b not in (0, 1) for b in self.bits_nonzero + self.bits_index):
            raise ValueError("payload bits must be 0 or 1")

    @property
    def bits(self) -> tuple[int, ...]:
        return self.bits_nonzero + self.bits_index

    @property
    def index(self) -> int:
        return _bits_to_int(self.bits_index)

    @classmethod
    def from_bits(cls, bits, cfg: CodecConfig) -> "Payload":
        bits = tuple(int(b) for b in bits)
        if len(bits) != cfg.n_bits:
            raise ValueError(f"expected {cfg.n_bits} bits, got {len(bits)}")
        return cls(bits[: cfg.n_nonzero_bits], bits[cfg.n_nonzero_bits :])

    @classmethod
    def from_int(cls, value: int, cfg: CodecConfig) -> "Payload":
        if not 0 <= value < 1 << cfg.n_bits:
            raise ValueError(f"payload value {value} does not fit in {cfg.n_bits} bits")
        return cls.from_bits(_int_to_bits(value, cfg.n_bits), cfg)

    def to_int(self) -> int:
        return _bits_to_int(self.bits)

    @classmethod
    def random(cls, cfg: CodecConfig, rng: np.random.Generator) -> "Payload":
        return cls.from_bits(rng.integers(0, 2, cfg.n_bits), cfg)


# --- Gray mapping and path ranking -------------------------------------------


def gray(value: int) -> int:
    """Bit label of phase index ``value``; neighbouring phases differ in one bit."""
    return value ^ (value >> 1)


def gray_inverse(code: int) -> int:
    value = 0
    while code:
        value ^= code
        code >>= 1
    return value


def _path_completions(prefix: list[int], remaining: list[int]) -> int:
    """Completions of ``prefix`` by ``remaining`` whose last entry is below the first."""
    r = len(remaining)
    if r == 0:
        return int(prefix[0] > prefix[-1])
    return sum(1 for v in remaining if v < prefix[0]) * math.factorial(r - 1)


def unrank_path(index: int, m: int) -> tuple[int, ...]:
    """The ``index``-th (0-based, lexicographic) path with ``pi_1 > pi_m``."""
    if m < 2:
        raise ValueError("paths need m >= 2")
    if not 0 <= index < math.factorial(m) // 2:
        raise ValueError(f"path index {index} outside [0, {math.factorial(m) // 2})")
    prefix: list[int] = []
    remaining = list(range(1, m + 1))
    for _ in range(m):
        for v in remaining:
            rest = [u for u in remaining if u != v]
            count = _path_completions(prefix + [v], rest)
            if index < count:
                prefix.append(v)
                remaining = rest
                break
            index -= count
    return tuple(prefix)


def rank_path(pi) -> int:
    pi = [int(p) for p in pi]
    m = len(pi)
    if sorted(pi) != list(range(1, m + 1)) or m < 2:
        raise ValueError(f"{tuple(pi)} is not a permutation of 1..m with m >= 2")
    if pi[0] < pi[-1]:
        raise ValueError(f"path {tuple(pi)} has pi_1 < pi_m")
    index = 0
    remaining = list(range(1, m + 1))
    for pos, p in enumerate(pi):
        for v in remaining:
            if v == p:
                break
            rest = [u for u in remaining if u != v]
            index += _path_completions(pi[:pos] + [v], rest)
        remaining.remove(p)
    return index


def canonical_path(pi, c):
    """Orient ``(pi, c)`` so that ``pi_1 > pi_m``; reversal leaves f_i unchanged."""
    pi, c = tuple(pi), tuple(c)
    if pi[0] < pi[-1]:
        return pi[::-1], c[::-1]
    return pi, c


# --- encoder -----------------------------------------------------------------


def payload_to_params(payload: Payload, cfg: CodecConfig) -> CsParams:
    if len(payload.bits_nonzero) != cfg.n_nonzero_bits or len(payload.bits_index) != cfg.n_index_bits:
        raise ValueError(
            f"payload has {len(payload.bits_nonzero)}+{len(payload.bits_index)} bits, "
            f"config expects {cfg.n_nonzero_bits}+{cfg.n_index_bits}"
        )
    h = cfg.h
    symbols = [
        gray_inverse(_bits_to_int(payload.bits_nonzero[j * h : (j + 1) * h])) for j in range(cfg.m + 1)
    ]
    k, c = symbols[0], tuple(symbols[1:])
    i_pi_supp = payload.index
    i_supp, i_pi = divmod(i_pi_supp, cfg.n_paths)
    if i_supp >= cfg.n_supports:
        raise ValueError(f"index {i_pi_supp} is out of range")
    pi = unrank_path(i_pi, cfg.m)
    sep = unrank_sep_dist(i_supp + 1, cfg.Z, cfg.m, cfg.l)
    return params_with_separation(CsParams(cfg.m, cfg.H, pi, c, k), sep)


def params_to_payload(params: CsParams, sep_rank: int, cfg: CodecConfig) -> Payload:
    """Inverse of ``payload_to_params``; ``sep_rank`` is the 1-based separation rank."""
    pi, c = canonical_path(params.pi, params.c)
    h = cfg.h
    bits_nz: list[int] = []
    for sym in (params.k, *c):
        bits_nz.extend(_int_to_bits(gray(sym), h))
    index = (sep_rank - 1) * cfg.n_paths + rank_path(pi)
    # indices beyond the floor(log2) budget are never sent; clamp to the nearest valid
    index = min(index, (1 << cfg.n_index_bits) - 1)
    return Payload(tuple(bits_nz), _int_to_bits(index, cfg.n_index_bits))


def encode(payload: Payload, cfg: CodecConfig) -> tuple[CsParams, np.ndarray]:
    """Map a payload to its CS parameters and the ``M``-subcarrier frame."""
    params = payload_to_params(payload, cfg)
    seq = synthesize(params)
    frame = np.zeros(cfg.M, dtype=np.complex128)
    frame[: seq.size] = seq
    return params, frame


# --- decoder -----------------------------------------------------------------


def psk_projection(x: np.ndarray, H: int) -> np.ndarray:
    """``max_c Re(exp(-2j pi c / H) x)``, elementwise."""
    if H == 2:
        return np.abs(x.real)
    if H == 4:
        return np.maximum(np.abs(x.real), np.abs(x.imag))
    step = 2 * np.pi / H
    ang = np.angle(x)
    return np.abs(x) * np.cos(ang - step * np.round(ang / step))


def _rotated_projections(u0: np.ndarray, u1: np.ndarray, H: int, rot: np.ndarray) -> np.ndarray:
    """``psk_projection(u0 + rot[c] * u1)`` for every ``c``, shape ``(n, H, L)``."""
    if H != 4:
        return psk_projection(u0[:, None, :] + rot[None, :, None] * u1[:, None, :], H)
    # rotations by -j^c swap and negate real and imaginary parts, and
    # max(|x|, |y|) = (|x + y| + |x - y|) / 2
    a0, b0, a1, b1 = u0.real, u0.imag, u1.real, u1.imag
    p, q, pp, qq = a0 + b0, a0 - b0, a1 + b1, a1 - b1
    out = np.empty((u0.shape[0], 4, u0.shape[1]))
    for c, (x, y) in enumerate(((p + pp, q + qq), (p - qq, q + pp), (p - pp, q - qq), (p + qq, q - pp))):
        np.abs(x, out=x)
        np.abs(y, out=y)
        np.add(x, y, out=out[:, c, :])
    out *= 0.5
    return out


@lru_cache(maxsize=64)
def support_table(M: int, m: int, l: int) -> tuple[np.ndarray, tuple[SeparationVector, ...]]:
    """Placement matrix ``(D, 2**m)`` for every admissible separation, in rank order."""
    Z = M - 2**m
    seps = tuple(iter_separations(Z, m, l))
    base = np.arange(2**m)
    x = bit_table(m)
    # position of element i = i + sum_n s_n x_n + d, s from the separation gaps
    gaps = np.array([sv.sep for sv in seps], dtype=np.int64).reshape(len(seps), m)
    # Golay shifts s_n = g_n + sum_{i>n} s_i
    s = np.zeros_like(gaps)
    tail = np.zeros(len(seps), dtype=np.int64)
    for n in reversed(range(m)):
        s[:, n] = gaps[:, n] + tail
        tail = tail + s[:, n]
    d = np.array([sv.s0 for sv in seps], dtype=np.int64)
    pos = base[None, :] + s @ x.T + d[:, None]
    pos.setflags(write=False)
    return pos, seps


@dataclass
class DecoderState:
    """Surviving hypotheses at one recursion level.

    Row ``j`` of ``seqs`` is a folded sequence of length ``2**r``. ``path``
    holds the hypothesised path entries so far (its last column is the
    variable folded next), ``phases`` the coefficients already fixed,
    ``sep_idx`` the root separation and ``es`` the channel energy of that
    support. ``survivors`` records, per level, the parent row of each
    survivor.
    """

    seqs: np.ndarray
    es: np.ndarray
    sep_idx: np.ndarray
    path: np.ndarray
    phases: np.ndarray
    survivors: list[np.ndarray] = field(default_factory=list)

    def __len__(self) -> int:
        return self.seqs.shape[0]

    @property
    def r(self) -> int:
        return self.seqs.shape[1].bit_length() - 1


def _top(scores: np.ndarray, k: int) -> np.ndarray:
    """Indices of the ``k`` best scores; ties go to the lower index."""
    if k >= scores.size:
        return np.lexsort((np.arange(scores.size), -scores))
    part = np.argpartition(-scores, k - 1)[:k]
    thresh = scores[part].min()
    cand = np.flatnonzero(scores >= thresh)
    order = np.lexsort((cand, -scores[cand]))
    return cand[order[:k]]


def separation_scores(v: np.ndarray, e: np.ndarray, cfg: CodecConfig) -> np.ndarray:
    """Preparation metric of every admissible separation, in rank order."""
    pos, _ = support_table(cfg.M, cfg.m, cfg.l)
    out = np.empty(pos.shape[0])
    step = max(1, _CHUNK_ELEMENTS // pos.shape[1])
    for a in range(0, pos.shape[0], step):
        p = pos[a : a + step]
        out[a : a + step] = psk_projection(v[p], cfg.H).sum(axis=1) - e[p].sum(axis=1)
    return out


def prepare(v: np.ndarray, e: np.ndarray, cfg: CodecConfig) -> DecoderState:
    """Select the best separations and branch on the first path entry.

    ``v`` are the matched values ``conj(h) * y`` and ``e`` the energies
    ``|h|^2 / 2`` of all ``M`` subcarriers.
    """
    pos, _ = support_table(cfg.M, cfg.m, cfg.l)
    scores = separation_scores(v, e, cfg)
    keep = _top(scores, min(len(scores), cfg.n_max))
    m = cfg.m
    sep_idx = np.repeat(keep, m)
    first = np.tile(np.arange(1, m + 1), keep.size)
    p = pos[keep]
    return DecoderState(
        seqs=np.repeat(v[p], m, axis=0),
        es=np.repeat(e[p].sum(axis=1), m),
        sep_idx=sep_idx,
        path=first[:, None],
        phases=np.zeros((sep_idx.size, 0), dtype=np.int64),
    )


def _fold(seqs: np.ndarray, r: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Split along bit ``p`` (0 = MSB) into the ``x=0`` and ``x=1`` halves."""
    view = seqs.reshape(seqs.shape[0], 1 << p, 2, 1 << (r - 1 - p))
    return view[:, :, 0, :].reshape(seqs.shape[0], -1), view[:, :, 1, :].reshape(seqs.shape[0], -1)


def _layout(state: DecoderState, m: int) -> tuple[np.ndarray, np.ndarray]:
    """Per row: bit position of the current variable and the next candidates.

    The folded sequence indexes the remaining variables in increasing order
    (MSB first), so the variable on bit ``p`` is the ``p``-th remaining one.
    """
    n = len(state)
    rem = np.ones((n, m), dtype=bool)
    rows = np.arange(n)
    for col in range(state.path.shape[1] - 1):
        rem[rows, state.path[:, col] - 1] = False
    cur = state.path[:, -1] - 1
    p = (rem & (np.arange(m)[None, :] < cur[:, None])).sum(axis=1)
    rem[rows, cur] = False
    # every row has exactly r - 1 remaining variables, listed in increasing order
    nxt = np.nonzero(rem)[1].reshape(n, state.r - 1) + 1
    return p, nxt


def decode_step(state: DecoderState, cfg: CodecConfig) -> DecoderState:
    """Fold every candidate once, enumerate (next entry, phase) and prune."""
    m, H = cfg.m, cfg.H
    r = state.r
    n = len(state)
    rot = np.exp(-2j * np.pi * np.arange(H) / H)
    p, nxt = _layout(state, m)

    # Child (q, c) equals u0 + rot[c] * u1 where x_q = 0 and u0 - rot[c] * u1
    # = u0 + rot[c + H/2] * u1 where x_q = 1, so per-element projections of the
    # H rotations suffice; the q-dependent sums are masked sums over bits.
    mask1 = bit_table(r - 1).astype(np.float64)
    flip = (np.arange(H) + H // 2) % H
    scores = np.empty((n, r - 1, H))
    step = max(1, _CHUNK_ELEMENTS // (H << (r - 1)))
    for pv in range(r):
        rows = np.flatnonzero(p == pv)
        for a in range(0, rows.size, step):
            sub = rows[a : a + step]
            u0, u1 = _fold(state.seqs[sub], r, pv)
            proj = _rotated_projections(u0, u1, H, rot)
            s1 = proj @ mask1
            sc = proj.sum(axis=2)[:, :, None] - s1 + s1[:, flip, :]
            scores[sub] = sc.transpose(0, 2, 1) - state.es[sub, None, None]

    # nxt is increasing per row, so the flat index orders children by
    # (parent, next variable, phase) for tie-breaking
    chosen = _top(scores.ravel(), cfg.n_best)
    parent, rest = np.divmod(chosen, (r - 1) * H)
    j, c = np.divmod(rest, H)
    q = nxt[parent, j]

    signs = 1.0 - 2.0 * bit_table(r - 1).T
    new_seqs = np.empty((chosen.size, 1 << (r - 1)), dtype=np.complex128)
    for pv in np.unique(p[parent]):
        sel = np.flatnonzero(p[parent] == pv)
        u0, u1 = _fold(state.seqs[parent[sel]], r, int(pv))
        new_seqs[sel] = u0 + u1 * rot[c[sel]][:, None] * signs[j[sel]]

    return DecoderState(
        seqs=new_seqs,
        es=state.es[parent],
        sep_idx=state.sep_idx[parent],
        path=np.concatenate([state.path[parent], q[:, None]], axis=1),
        phases=np.concatenate([state.phases[parent], c[:, None]], axis=1),
        survivors=state.survivors + [parent],
    )


@dataclass(frozen=True)
class Detection:
    params: CsParams
    sep_rank: int
    metric: float


def detect(received, gains, cfg: CodecConfig) -> Detection:
    """Run the pruned recursive search and return the best hypothesis."""
    y = np.asarray(received, dtype=np.complex128)
    h = np.asarray(gains, dtype=np.complex128)
    if y.shape != (cfg.M,) or h.shape != (cfg.M,):
        raise ValueError(f"received values and gains must both have length M={cfg.M}")
    v = np.conj(h) * y
    e = np.abs(h) ** 2 / 2
    state = prepare(v, e, cfg)
    while state.r > 1:
        state = decode_step(state, cfg)

    # base case: the last coefficient and the offset, H*H combinations
    H = cfg.H
    rot = np.exp(-2j * np.pi * np.arange(H) / H)
    w = state.seqs[:, 0, None] + state.seqs[:, 1, None] * rot[None, :]
    metric = (w[:, :, None] * rot[None, None, :]).real - state.es[:, None, None]
    best = int(np.argmax(metric))
    row, rest = divmod(best, H * H)
    c_last, k = divmod(rest, H)

    _, seps = support_table(cfg.M, cfg.m, cfg.l)
    sep_i = int(state.sep_idx[row])
    pi = tuple(int(v) for v in state.path[row])
    c = tuple(int(v) for v in state.phases[row]) + (c_last,)
    pi, c = canonical_path(pi, c)
    params = params_with_separation(CsParams(cfg.m, H, pi, c, k), seps[sep_i])
    return Detection(params=params, sep_rank=sep_i + 1, metric=float(metric.flat[best]))


def decode(received, gains, cfg: CodecConfig) -> Payload:
    """Most likely payload given the received subcarriers and channel gains."""
    det = detect(received, gains, cfg)
    return params_to_payload(det.params, det.sep_rank, cfg)
