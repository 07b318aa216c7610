"""End-to-end acceptance checks, one test per criterion.

Each test records a single ``criterion N PASS|FAIL`` line; the lines are
printed as they run and repeated in the terminal summary.
"""

import functools
import itertools
import math

import numpy as np
import pytest

from partcs.channel import ChannelProfile, complex_normal, n0_from_ebn0, realize, trial_rng
from partcs.codec import CodecConfig, Payload, decode, detect, encode
from partcs.construct import CsParams, SeparationVector, mate, params_with_separation, support, synthesize
from partcs.enumeration import (
    card_A,
    card_D,
    card_P,
    code_card,
    d_nonzero,
    rank_sep_dist,
    unrank_sep_dist,
)
from partcs.seqcore import is_complementary_pair, pmepr_db
from partcs.sim import bler_curve

from oracles import (
    brute_A,
    brute_P,
    brute_separations,
    brute_support,
    brute_symmetric_count,
    codebook,
)

RESULTS: dict[int, str] = {}


def report(n, title, ok, detail):
    line = f"criterion {n} {'PASS' if ok else 'FAIL'}: {title} [{detail}]"
    RESULTS[n] = line
    print(line)
    assert ok, line


def random_params(rng, m):
    H = int(rng.choice([2, 4, 8]))
    base = CsParams(
        m, H, tuple(int(p) for p in rng.permutation(m) + 1), tuple(int(c) for c in rng.integers(0, H, m)), int(rng.integers(0, H))
    )
    sep = SeparationVector(int(rng.integers(0, 6)), tuple(int(v) for v in rng.integers(0, 6, m)))
    return params_with_separation(base, sep)


def test_criterion_1_reference_pair():
    a = synthesize(CsParams(3, 4, (3, 2, 1), (0, 0, 0)))
    b = synthesize(CsParams(3, 4, (2, 3, 1), (0, 0, 0), s=(1, 0, 0)))
    exact = np.array_equal(a, [1, 1, 1, -1, 1, 1, -1, 1]) and np.array_equal(b, [1, 1, 1, -1, 0, 1, -1, 1, 1])
    r = math.sqrt(9 / 8)
    dist = r * np.linalg.norm(np.append(a, 0) - b)

    # same-support distance by exhaustive search over all 768 codewords
    words, _ = codebook(3, 4, 9, [list(range(8))])
    gram = (words @ words.conj().T).real
    sq = np.diag(gram)[:, None] + np.diag(gram)[None, :] - 2 * gram
    np.fill_diagonal(sq, np.inf)
    d_nz = r * math.sqrt(sq.min())
    ok = exact and abs(dist - 1.5) <= 1e-9 and abs(d_nz - 3) <= 1e-9 and abs(d_nonzero(9, 4) - 3) <= 1e-9
    report(1, "reference pair sequences and distances", ok, f"exact={exact} d={dist:.10f} d_nonzero={d_nz:.10f}")


def test_criterion_2_cardinality():
    n8 = code_card(512, 8, 4, 0).n_total
    n9 = code_card(512, 9, 4, 0).n_total
    ok = abs(n8 - 62.43) <= 0.01 and abs(n9 - 37.47) <= 0.01 and round(n8 - n9) == 25
    report(2, "n_total at M=512", ok, f"m=8: {n8:.4f} m=9: {n9:.4f} gain=2^{n8 - n9:.2f}")


def test_criterion_3_distance_scan():
    big = code_card(160, 6, 4, 5)
    small = code_card(80, 5, 4, 4)
    ok = (
        abs(big.d_lb - 12.65) <= 0.005
        and big.rho == pytest.approx(25 / 160, abs=1e-12)
        and small.Z == 48
        and abs(small.d_lb - 8.9) <= 0.05
    )
    report(3, "d_lb and rho", ok, f"d_lb(160,6,5)={big.d_lb:.4f} rho={big.rho:.5f} d_lb(80,5,4)={small.d_lb:.4f}")


def test_criterion_4_oracle_equivalence():
    mismatches = 0
    checked = 0
    for m in range(1, 5):
        for Y in range(33):
            mismatches += card_A(m, Y) != brute_A(m, Y)
            mismatches += card_P(m, Y) != brute_P(m, Y)
            for l in range(m):
                mismatches += card_D(m, l, Y) != brute_symmetric_count(m, l, Y)
                checked += 1
    trips = 0
    for m in range(1, 5):
        for Z in range(33):
            for l in range(m):
                ref = brute_separations(m, l, Z)
                got = [unrank_sep_dist(n, Z, m, l) for n in range(1, card_D(m, l, Z) + 1)]
                as_pairs = [(s.s0, s.sep) for s in got]
                if l == 0:
                    mismatches += as_pairs != ref
                else:
                    mismatches += sorted(as_pairs) != sorted(ref)
                for n, sep in enumerate(got, 1):
                    mismatches += rank_sep_dist(sep, Z, m, l) != n
                    trips += 1
    report(4, "counts and rank/unrank versus brute force", mismatches == 0, f"{checked} (m,l,Z) cells, {trips} round trips, {mismatches} mismatches")


def _pattern_values(m, H, limit, rng):
    """Element values of Golay sequences (all of them, or a random subset)."""
    paths = [p for p in itertools.permutations(range(1, m + 1)) if p[0] > p[-1]]
    combos = list(itertools.product(paths, itertools.product(range(H), repeat=m), range(H)))
    if len(combos) > limit:
        combos = [combos[i] for i in rng.choice(len(combos), limit, replace=False)]
    rows = []
    for pi, c, k in combos:
        rows.append(synthesize(CsParams(m, H, pi, c, k)))
    return np.array(rows)


def test_criterion_5_support_distance():
    rng = np.random.default_rng(5)
    worst_ratio = np.inf
    pairs = 0
    for m in (3, 4):
        values = _pattern_values(m, 4, 1000, rng)
        for Z in range(9):
            M = 2**m + Z
            r = math.sqrt(M / 2**m)
            for l in range(m):
                bound = math.sqrt(M / 2 ** (m - l - 1))
                sups = [brute_support(s0, g) for s0, g in brute_separations(m, l, Z)]
                for s1, s2 in itertools.combinations(sups, 2):
                    # the symmetric difference bounds the distance for every value pattern
                    sym = len(set(s1) ^ set(s2))
                    t1 = np.zeros((len(values), M), dtype=complex)
                    t2 = np.zeros_like(t1)
                    t1[:, s1] = values
                    t2[:, s2] = values
                    d = r * np.sqrt(np.min(np.sum(np.abs(t1 - t2) ** 2, axis=1)))
                    worst_ratio = min(worst_ratio, d / bound, r * math.sqrt(sym) / bound)
                    pairs += 1
    report(5, "support distance bound", worst_ratio >= 1 - 1e-12, f"{pairs} support pairs, min d/bound={worst_ratio:.6f}")


def test_criterion_6_certification():
    rng = np.random.default_rng(6)
    gcp_fail = 0
    for _ in range(1000):
        p = random_params(rng, int(rng.integers(1, 8)))
        gcp_fail += not is_complementary_pair(synthesize(p), synthesize(mate(p)), tol=1e-9)
    worst = -np.inf
    for _ in range(10_000):
        p = random_params(rng, int(rng.integers(1, 8)))
        worst = max(worst, pmepr_db(synthesize(p), 8, p_ref=2**p.m))
    ok = gcp_fail == 0 and worst <= 3.0103 + 1e-3
    report(6, "complementary pairs and PMEPR", ok, f"GCP failures={gcp_fail}/1000, max PMEPR={worst:.5f} dB")


@pytest.mark.slow
def test_criterion_7_round_trip():
    errors = exhaustive = 0
    for m in (2, 3):
        for Z in range(5):
            for l in range(m):
                cfg = CodecConfig(2**m + Z, m, l=l)
                ones = np.ones(cfg.M)
                for value in range(1 << cfg.n_bits):
                    payload = Payload.from_int(value, cfg)
                    errors += decode(encode(payload, cfg)[1], ones, cfg) != payload
                    exhaustive += 1
    rng = np.random.default_rng(7)
    for M, m in ((16, 3), (32, 4), (64, 5)):
        cfg = CodecConfig(M, m)
        ones = np.ones(M)
        for _ in range(1000):
            payload = Payload.random(cfg, rng)
            errors += decode(encode(payload, cfg)[1], ones, cfg) != payload
    report(7, "noiseless decode(encode(b)) == b", errors == 0, f"{exhaustive} exhaustive + 3000 random payloads, {errors} errors")


@functools.lru_cache(maxsize=None)
def _oracle_book(M, m, l):
    sups = [brute_support(s0, g) for s0, g in brute_separations(m, l, M - 2**m)]
    return codebook(m, 4, M, sups)[0]


@pytest.mark.slow
def test_criterion_8_ml_exactness():
    configs = [(8 + Z, 3, l) for Z in range(3) for l in range(3)]
    sweep = (-2.0, 0.0, 2.0, 4.0, 6.0, 8.0)
    worst = 0.0
    ml_errors = 0
    for t in range(1000):
        M, m, l = configs[t % len(configs)]
        cfg = CodecConfig(M, m, l=l, n_max=10**6, n_best=10**9)
        rng = trial_rng(8, t)
        payload = Payload.random(cfg, rng)
        _, frame = encode(payload, cfg)
        profile = ChannelProfile("iid-rayleigh" if t % 2 else "flat")
        h = realize(profile, M, rng)
        y = h * frame + complex_normal(rng, M, n0_from_ebn0(sweep[(t // len(configs)) % len(sweep)], cfg))
        det = detect(y, h, cfg)
        t_det = np.zeros(M, dtype=complex)
        seq = synthesize(det.params)
        t_det[: seq.size] = seq
        d_det = np.linalg.norm(y - h * t_det)
        words = _oracle_book(M, m, l)
        d_ml = np.sqrt(np.min(np.sum(np.abs(y[None, :] - h[None, :] * words) ** 2, axis=1)))
        worst = max(worst, abs(d_det - d_ml))
        ml_errors += abs(d_det - d_ml) > 1e-9
    report(8, "unbounded decoder equals exhaustive ML", ml_errors == 0, f"1000 trials, max |d_dec - d_ML|={worst:.2e}")


@pytest.mark.slow
def test_criterion_9_error_rate():
    sweep = [0.0, 1.0, 2.0, 3.0, 4.0]
    pairs = [(CodecConfig(32, 4, l=3), CodecConfig(32, 5)), (CodecConfig(16, 3, l=2), CodecConfig(16, 4))]
    flat = ChannelProfile()
    monotone = True
    within = True
    notes = []
    for part, std in pairs:
        curves = {}
        for cfg in (part, std):
            pts = bler_curve(cfg, flat, sweep, trials=1000, seed=9, max_errors=200)
            curves[cfg] = [p.bler for p in pts]
            monotone &= all(a >= b for a, b in zip(curves[cfg], curves[cfg][1:]))
        bp, bs = curves[part], curves[std]
        # 2 dB equivalence at the mid-range point: each curve at E+2 beats the other at E
        i0, i2 = sweep.index(0.0), sweep.index(2.0)
        ok = bp[i2] <= bs[i0] and bs[i2] <= bp[i0]
        within &= ok
        notes.append(
            f"M={part.M}: l={part.l} ({part.n_bits} b) {bp[i2]:.4f} vs std m={std.m} ({std.n_bits} b) {bs[i2]:.4f} at 2 dB"
        )
    report(9, "BLER monotone and partitioned within 2 dB of standard", monotone and within, f"monotone={monotone}; " + "; ".join(notes))
